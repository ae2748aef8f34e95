//! LaTeX rendering of normalized expressions.

use chainlab_core::expr::Exponent;
use chainlab_core::{Expr, Node, Rational};

const GREEK: [&str; 30] = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu", "nu",
    "xi", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega", "Gamma", "Delta", "Theta", "Lambda",
    "Sigma", "Phi", "Omega",
];

fn name(s: &str) -> String {
    if GREEK.contains(&s) {
        format!("\\{s}")
    } else if s.chars().count() > 1 {
        format!("\\mathrm{{{s}}}")
    } else {
        s.to_string()
    }
}

fn rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

fn exponent(e: &Exponent) -> String {
    if e.is_integer() && (0..10).contains(e.numer()) {
        e.numer().to_string()
    } else if e.is_integer() {
        format!("{{{}}}", e.numer())
    } else {
        format!("{{{}/{}}}", e.numer(), e.denom())
    }
}

/// Factor ordering inside a product: numbers, named constants, functions,
/// compound factors, base variables, jets.
fn rank(e: &Expr) -> u8 {
    match e.node() {
        Node::Rational(_) => 0,
        Node::Constant(_) => 1,
        Node::Function { .. } | Node::Antiderivative { .. } | Node::Exp(_) => 2,
        Node::Sum(_) | Node::Product(_) => 3,
        Node::Variable(_) => 4,
        Node::Jet { .. } => 5,
        Node::Power(b, _) => rank(b),
    }
}

/// `(highest jet order, total jet weight)` of a term, for ordering sums.
fn jet_weight(e: &Expr) -> (u32, u32) {
    match e.node() {
        Node::Jet { order, .. } => (*order, *order),
        Node::Power(b, q) => {
            let (top, w) = jet_weight(b);
            let k = if q.is_integer() && *q.numer() > 0 { u32::try_from(*q.numer()).unwrap_or(1) } else { 1 };
            (top, w * k)
        }
        Node::Product(fs) => fs.iter().map(jet_weight).fold((0, 0), |(t, w), (t2, w2)| (t.max(t2), w + w2)),
        _ => (0, 0),
    }
}

pub fn equation(lhs: &Expr) -> String {
    format!("{} = 0", expr(lhs))
}

pub fn expr(e: &Expr) -> String {
    match e.node() {
        Node::Sum(ts) => sum(ts),
        _ => {
            let (neg, body) = term(e);
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
    }
}

fn sum(ts: &[Expr]) -> String {
    let mut terms: Vec<&Expr> = ts.iter().collect();
    terms.sort_by_key(|t| jet_weight(t));
    let mut out = String::new();
    for (i, t) in terms.into_iter().enumerate() {
        let (neg, body) = term(t);
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

/// A term without its sign, and whether it is negative.
fn term(e: &Expr) -> (bool, String) {
    let factors: Vec<Expr> = match e.node() {
        Node::Product(fs) => fs.clone(),
        _ => vec![e.clone()],
    };
    let mut coef = Rational::from_integer(1.into());
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for f in factors {
        match f.node() {
            Node::Rational(q) => coef *= q,
            Node::Power(b, q) if *q.numer() < 0 => den.push(if *q == Exponent::from_integer(-1) {
                b.clone()
            } else {
                b.pow(-q)
            }),
            _ => num.push(f),
        }
    }
    let neg = coef < Rational::from_integer(0.into());
    if neg {
        coef = -coef;
    }
    num.sort_by_key(rank);
    den.sort_by_key(rank);
    let join = |fs: &[Expr]| fs.iter().map(|f| factor(f, fs.len() > 1)).collect::<Vec<_>>().join(" ");
    let one = coef.is_integer() && coef.numer() == &1.into();
    if den.is_empty() && coef.is_integer() {
        let body = match (one, num.is_empty()) {
            (true, true) => "1".to_string(),
            (true, false) => join(&num),
            (false, true) => rational(&coef),
            (false, false) => format!("{} {}", rational(&coef), join(&num)),
        };
        return (neg, body);
    }
    let mut top = Vec::new();
    if coef.numer() != &1.into() || num.is_empty() {
        top.push(coef.numer().to_string());
    }
    if !num.is_empty() {
        top.push(join(&num));
    }
    let mut bottom = Vec::new();
    if coef.denom() != &1.into() {
        bottom.push(coef.denom().to_string());
    }
    if !den.is_empty() {
        bottom.push(join(&den));
    }
    (neg, format!("\\frac{{{}}}{{{}}}", top.join(" "), bottom.join(" ")))
}

fn factor(e: &Expr, among_others: bool) -> String {
    match e.node() {
        Node::Sum(_) if among_others => format!("\\left({}\\right)", expr(e)),
        _ => atom(e),
    }
}

fn atom(e: &Expr) -> String {
    match e.node() {
        Node::Rational(q) => rational(q),
        Node::Constant(s) | Node::Variable(s) => name(s),
        Node::Jet { order, var } => match order {
            1..=3 => format!("{}{}", name(var), "'".repeat(*order as usize)),
            k => format!("{}^{{({k})}}", name(var)),
        },
        Node::Function { name: f, derivs, args } => function(f, derivs, args),
        Node::Antiderivative { integrand, var, at } => {
            format!("\\int_0^{{{}}} {} \\, d{}", expr(at), expr(integrand), name(var))
        }
        Node::Exp(a) => format!("e^{{{}}}", expr(a)),
        Node::Power(b, q) => {
            if *q.numer() < 0 {
                return expr(e);
            }
            let base = match b.node() {
                Node::Sum(_) | Node::Product(_) | Node::Power(..) | Node::Exp(_) => {
                    format!("\\left({}\\right)", expr(b))
                }
                Node::Rational(r) if !r.is_integer() || *r.numer() < 0.into() => {
                    format!("\\left({}\\right)", rational(r))
                }
                _ => atom(b),
            };
            format!("{base}^{}", exponent(q))
        }
        Node::Sum(_) | Node::Product(_) => expr(e),
    }
}

fn function(f: &str, derivs: &[u32], args: &[Expr]) -> String {
    let arglist = args.iter().map(expr).collect::<Vec<_>>().join(",");
    let total: u32 = derivs.iter().sum();
    if total == 0 {
        return format!("{}({arglist})", name(f));
    }
    if args.len() == 1 && total <= 3 {
        return format!("{}{}({arglist})", name(f), "'".repeat(total as usize));
    }
    let mut sub = String::new();
    for (i, (k, a)) in derivs.iter().zip(args).enumerate() {
        let slot = match a.node() {
            Node::Variable(v) => v.to_string(),
            _ => (i + 1).to_string(),
        };
        sub.push_str(&slot.repeat(*k as usize));
    }
    format!("{}_{{{sub}}}({arglist})", name(f))
}
