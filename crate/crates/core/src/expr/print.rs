use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Signed};

use super::poly::{factor_expr, term_expr, Mono, Poly};
use super::{Expr, Exponent, JetSpace, Node, Rational};

/// Options for [`to_text`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextStyle {
    /// Names used for jets of order above three and for the short partial
    /// form `D(F,x,i,y,j)`.
    pub ctx: JetSpace,
    /// Group terms by their jet monomial, factoring out common content.
    pub grouped: bool,
}

impl Default for TextStyle {
    fn default() -> Self {
        TextStyle { ctx: JetSpace::xy(), grouped: false }
    }
}

impl TextStyle {
    pub fn plain(ctx: &JetSpace) -> Self {
        TextStyle { ctx: ctx.clone(), grouped: false }
    }

    pub fn equation(ctx: &JetSpace) -> Self {
        TextStyle { ctx: ctx.clone(), grouped: true }
    }
}

/// Render in the text grammar accepted by [`super::parse`].
pub fn to_text(e: &Expr, style: &TextStyle) -> String {
    if style.grouped && e.is_normal() {
        grouped(e, style)
    } else {
        let mut s = String::new();
        write_expr(e, style, &mut s);
        s
    }
}

fn join_terms(parts: Vec<String>) -> String {
    let mut out = String::new();
    for (i, p) in parts.into_iter().enumerate() {
        if i == 0 {
            out.push_str(&p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&p);
        }
    }
    out
}

fn grouped(e: &Expr, style: &TextStyle) -> String {
    let p = Poly::from_nf(e);
    if p.len() <= 1 {
        return to_text(e, &TextStyle::plain(&style.ctx));
    }
    let mut groups: BTreeMap<Mono, Poly> = BTreeMap::new();
    for (m, c) in &p.terms {
        let (jets, rest): (Vec<_>, Vec<_>) = m.0.iter().cloned().partition(|(b, _)| matches!(b.node(), Node::Jet { .. }));
        groups.entry(Mono(jets)).or_default().add_term(Mono(rest), c.clone());
    }
    let mut parts = Vec::new();
    for (jets, coef) in &groups {
        if coef.len() == 1 {
            let (m, c) = coef.terms.iter().next().unwrap();
            let mut all = m.0.clone();
            all.extend(jets.0.iter().cloned());
            all.sort_by(|a, b| a.0.cmp(&b.0));
            parts.push(plain(&term_expr(&Mono(all), c), style));
            continue;
        }
        let content = content_of(coef);
        let inner = if content.is_one() {
            coef.clone()
        } else {
            let inv = Mono(content.0.iter().map(|(b, e)| (b.clone(), -*e)).collect());
            coef.mul_mono(&inv).unwrap_or_else(|_| coef.clone())
        };
        let body = plain(&inner.to_expr(), style);
        if content.is_one() && jets.is_one() {
            parts.push(body);
            continue;
        }
        let mut s = String::new();
        if !content.is_one() {
            s.push_str(&plain(&term_expr(&content, &Rational::one()), style));
            s.push('*');
        }
        s.push('(');
        s.push_str(&body);
        s.push(')');
        if !jets.is_one() {
            s.push('*');
            s.push_str(&plain(&term_expr(jets, &Rational::one()), style));
        }
        parts.push(s);
    }
    join_terms(parts)
}

/// Factors common to every term, with their least positive exponent.
fn content_of(p: &Poly) -> Mono {
    let mut iter = p.terms.keys();
    let Some(first) = iter.next() else { return Mono::one() };
    let mut content: Vec<(Expr, Exponent)> = first
        .0
        .iter()
        .filter(|(b, e)| e.is_positive() && e.is_integer() && !matches!(b.node(), Node::Rational(_) | Node::Exp(_)))
        .cloned()
        .collect();
    for m in iter {
        content.retain_mut(|(b, e)| match m.exponent_of(b) {
            Some(f) if f.is_positive() && f.is_integer() => {
                if f < *e {
                    *e = f;
                }
                true
            }
            _ => false,
        });
    }
    Mono(content)
}

fn plain(e: &Expr, style: &TextStyle) -> String {
    let mut s = String::new();
    write_expr(e, style, &mut s);
    s
}

fn write_expr(e: &Expr, st: &TextStyle, out: &mut String) {
    match e.node() {
        Node::Sum(xs) => {
            let parts = xs.iter().map(|x| plain(x, st)).collect();
            out.push_str(&join_terms(parts));
        }
        Node::Product(fs) => write_product(fs, st, out),
        Node::Power(_, q) if q.is_negative() => write_product(core::slice::from_ref(e), st, out),
        _ => write_factor(e, st, out),
    }
}

fn needs_parens(e: &Expr) -> bool {
    match e.node() {
        Node::Sum(_) | Node::Product(_) | Node::Power(..) => true,
        Node::Rational(q) => q.is_negative() || !q.is_integer(),
        _ => false,
    }
}

fn write_parenthesized(e: &Expr, st: &TextStyle, out: &mut String) {
    if needs_parens(e) {
        out.push('(');
        write_expr(e, st, out);
        out.push(')');
    } else {
        write_factor(e, st, out);
    }
}

fn write_product(fs: &[Expr], st: &TextStyle, out: &mut String) {
    let mut coef = Rational::one();
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for f in fs {
        match f.node() {
            Node::Rational(q) => coef *= q,
            Node::Power(b, q) if q.is_negative() => den.push(factor_expr(b, &-*q)),
            _ => num.push(f.clone()),
        }
    }
    if coef.is_negative() {
        out.push('-');
        coef = -coef;
    }
    let mut first = true;
    if !coef.is_one() || num.is_empty() {
        out.push_str(&coef.to_string());
        first = false;
    }
    for f in &num {
        if !first {
            out.push('*');
        }
        first = false;
        if matches!(f.node(), Node::Sum(_) | Node::Product(_)) {
            out.push('(');
            write_expr(f, st, out);
            out.push(')');
        } else {
            write_factor(f, st, out);
        }
    }
    for d in &den {
        out.push('/');
        if matches!(d.node(), Node::Sum(_) | Node::Product(_)) {
            out.push('(');
            write_expr(d, st, out);
            out.push(')');
        } else {
            write_factor(d, st, out);
        }
    }
}

fn exponent_text(q: &Exponent) -> String {
    if q.is_integer() && !q.is_negative() {
        format!("^{}", q.numer())
    } else {
        format!("^({q})")
    }
}

fn write_args(args: &[Expr], st: &TextStyle, out: &mut String) {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_expr(a, st, out);
    }
}

fn write_factor(e: &Expr, st: &TextStyle, out: &mut String) {
    match e.node() {
        Node::Rational(q) => out.push_str(&q.to_string()),
        Node::Constant(s) | Node::Variable(s) => out.push_str(s),
        Node::Jet { order, var } => {
            if *order <= 3 {
                out.push_str(var);
                for _ in 0..*order {
                    out.push('\'');
                }
            } else {
                out.push_str(&format!("D({var},{},{order})", st.ctx.indep()));
            }
        }
        Node::Function { name, derivs, args } => {
            if derivs.iter().all(|d| *d == 0) {
                out.push_str(name);
                out.push('(');
                write_args(args, st, out);
                out.push(')');
            } else if args.len() == 2 && args[0] == st.ctx.x() && args[1] == st.ctx.y() {
                out.push_str("D(");
                out.push_str(name);
                for (a, d) in args.iter().zip(derivs) {
                    if *d > 0 {
                        out.push_str(&format!(",{a},{d}"));
                    }
                }
                out.push(')');
            } else {
                out.push_str("D(");
                out.push_str(name);
                out.push('(');
                write_args(args, st, out);
                out.push(')');
                for d in derivs {
                    out.push_str(&format!(",{d}"));
                }
                out.push(')');
            }
        }
        Node::Antiderivative { integrand, var, at } => {
            out.push_str("int(");
            write_expr(integrand, st, out);
            out.push(',');
            out.push_str(var);
            if !matches!(at.node(), Node::Variable(v) if v == var) {
                out.push(',');
                write_expr(at, st, out);
            }
            out.push(')');
        }
        Node::Exp(a) => {
            out.push_str("exp(");
            write_expr(a, st, out);
            out.push(')');
        }
        Node::Power(b, q) => {
            write_parenthesized(b, st, out);
            out.push_str(&exponent_text(q));
        }
        Node::Sum(_) | Node::Product(_) => {
            out.push('(');
            write_expr(e, st, out);
            out.push(')');
        }
    }
}
