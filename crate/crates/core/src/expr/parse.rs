//! Text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-'? factor
//! factor := base ('^' exponent)?
//! exponent := '-'? integer | '(' expr ')'
//! base   := integer | ident primes? | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! Built-ins: `D(y,x,k)` for jets, `D(F,x,i,y,j)` / `D(F(a,b),x,i)` /
//! `D(F(a,b),i,j)` for partials of opaque functions, `exp(u)`, and
//! `int(f,s)` / `int(f,s,at)` for antiderivatives.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{symbol, Expr, JetSpace, Node, Rational, Symbol};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Primes(u32),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(text[start..i].parse().unwrap()), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if c == '\'' {
            let start = i;
            while i < bytes.len() && bytes[i] == b'\'' {
                i += 1;
            }
            out.push((Tok::Primes((i - start) as u32), start));
        } else if "+-*/^(),=".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(Error::Syntax { position: i, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

const BUILTINS: [&str; 3] = ["D", "exp", "int"];

/// Argument counts of every applied identifier.
fn arities(toks: &[(Tok, usize)]) -> Result<BTreeMap<String, usize>> {
    let mut table = BTreeMap::new();
    for (k, (t, _)) in toks.iter().enumerate() {
        let Tok::Ident(name) = t else { continue };
        if BUILTINS.contains(&name.as_str()) || toks[k + 1].0 != Tok::Sym('(') {
            continue;
        }
        let mut depth = 0;
        let mut count = 1;
        let mut empty = true;
        for (t, _) in &toks[k + 1..] {
            match t {
                Tok::Sym('(') => depth += 1,
                Tok::Sym(')') => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Tok::Sym(',') if depth == 1 => count += 1,
                Tok::End => break,
                _ => {}
            }
            if depth >= 1 && !matches!(t, Tok::Sym('(')) {
                empty = false;
            }
        }
        let n = if empty { 0 } else { count };
        if let Some(prev) = table.insert(name.clone(), n) {
            if prev != n {
                return Err(Error::Arity(name.clone()));
            }
        }
    }
    Ok(table)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: &'a JetSpace,
    arity: BTreeMap<String, usize>,
    bound: Vec<Symbol>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.at(), message: message.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::sum(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat('*') {
                factors.push(self.unary()?);
            } else if self.eat('/') {
                factors.push(self.unary()?.recip());
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::product(factors) })
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(-self.factor()?)
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let start = self.at();
        let q = if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            match e.normalize()?.node() {
                Node::Rational(q) => q.clone(),
                _ => return Err(Error::Syntax { position: start, message: "exponent must be a rational number".into() }),
            }
        } else {
            let neg = self.eat('-');
            let Tok::Num(n) = self.peek().clone() else { return self.err("expected an exponent") };
            self.pos += 1;
            let q = Rational::from_integer(n);
            if neg {
                -q
            } else {
                q
            }
        };
        let (Some(n), Some(d)) = (q.numer().to_i64(), q.denom().to_i64()) else {
            return Err(Error::Syntax { position: start, message: "exponent out of range".into() });
        };
        Ok(base.pow(super::Exponent::new(n, d)))
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Expr::rational(Rational::from_integer(n)))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Tok::Primes(k) = *self.peek() {
                    if name.as_str() != &**self.ctx.dep() {
                        return self.err(format!("primes only apply to `{}`", self.ctx.dep()));
                    }
                    self.pos += 1;
                    return self.jet(k);
                }
                if *self.peek() == Tok::Sym('(') {
                    self.pos += 1;
                    return self.application(&name);
                }
                Ok(self.identifier(&name))
            }
            Tok::End => self.err("unexpected end of input"),
            t => self.err(format!("unexpected token {t:?}")),
        }
    }

    fn jet(&self, k: u32) -> Result<Expr> {
        if k > self.ctx.max_order() {
            return Err(Error::OrderOverflow { requested: k, max: self.ctx.max_order() });
        }
        Ok(self.ctx.derivative(k))
    }

    fn identifier(&self, name: &str) -> Expr {
        let s = symbol(name);
        if &s == self.ctx.indep() || &s == self.ctx.dep() || self.bound.contains(&s) {
            Expr::var_sym(&s)
        } else {
            Expr::from_node(Node::Constant(s))
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat(')') {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(')') {
                return Ok(args);
            }
            self.expect(',')?;
        }
    }

    fn application(&mut self, name: &str) -> Result<Expr> {
        match name {
            "D" => self.derivative(),
            "exp" => {
                let a = self.args()?;
                if a.len() != 1 {
                    return Err(Error::Arity("exp".into()));
                }
                Ok(Expr::exp(a.into_iter().next().unwrap()))
            }
            "int" => self.integral(),
            _ => {
                let args = self.args()?;
                Ok(Expr::func(name, args))
            }
        }
    }

    fn ident_arg(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn count_arg(&mut self) -> Result<u32> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.pos += 1;
                n.to_u32().ok_or(()).or_else(|_| self.err("derivative order out of range"))
            }
            _ => self.err("expected a derivative order"),
        }
    }

    fn integral(&mut self) -> Result<Expr> {
        // the integrand may mention the bound variable, which is only known
        // after it: scan ahead for it
        let save = self.pos;
        let mut depth = 0;
        let mut comma = None;
        for k in self.pos..self.toks.len() {
            match &self.toks[k].0 {
                Tok::Sym('(') => depth += 1,
                Tok::Sym(')') => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                Tok::Sym(',') if depth == 0 => {
                    comma = Some(k);
                    break;
                }
                _ => {}
            }
        }
        let Some(comma) = comma else { return self.err("int needs an integration variable") };
        self.pos = comma + 1;
        let var = self.ident_arg()?;
        let after_var = self.pos;
        let vs = symbol(&var);
        self.pos = save;
        let bare = matches!(&self.toks[save].0, Tok::Ident(n) if n.as_str() != var && !BUILTINS.contains(&n.as_str()))
            && self.toks[save + 1].0 == Tok::Sym(',');
        self.bound.push(vs.clone());
        let integrand = if bare {
            // `int(beta, s)` reads as `int(beta(s), s)`
            let Tok::Ident(n) = self.toks[save].0.clone() else { unreachable!() };
            self.pos += 1;
            if &symbol(&n) == self.ctx.indep() || &symbol(&n) == self.ctx.dep() {
                Ok(Expr::var(&n))
            } else {
                Ok(Expr::func(&n, vec![Expr::var_sym(&vs)]))
            }
        } else {
            self.expr()
        };
        self.bound.pop();
        let integrand = integrand?;
        if self.pos != comma {
            return self.err("malformed integrand");
        }
        self.pos = after_var;
        let at = if self.eat(',') { self.expr()? } else { Expr::var_sym(&vs) };
        self.expect(')')?;
        Ok(Expr::from_node(Node::Antiderivative { integrand, var: vs, at }))
    }

    fn derivative(&mut self) -> Result<Expr> {
        let start = self.at();
        let head = self.ident_arg()?;
        // D(y, x, k)
        if head.as_str() == &**self.ctx.dep() && *self.peek() == Tok::Sym(',') {
            self.expect(',')?;
            let v = self.ident_arg()?;
            if v.as_str() != &**self.ctx.indep() {
                return self.err(format!("`{head}` can only be differentiated in `{}`", self.ctx.indep()));
            }
            self.expect(',')?;
            let k = self.count_arg()?;
            self.expect(')')?;
            return self.jet(k);
        }
        let (args, explicit) = if self.eat('(') {
            let a = self.args()?;
            (a, true)
        } else {
            let x = self.ctx.x();
            let y = self.ctx.y();
            let a = match self.arity.get(&head) {
                Some(1) => vec![x],
                Some(2) | None => vec![x, y],
                Some(_) => {
                    return Err(Error::Syntax {
                        position: start,
                        message: format!("write `D({head}(..), ..)` for functions of more than two arguments"),
                    })
                }
            };
            (a, false)
        };
        if BUILTINS.contains(&head.as_str()) {
            return Err(Error::Syntax { position: start, message: format!("cannot differentiate `{head}` formally") });
        }
        let mut derivs = vec![0u32; args.len()];
        if explicit && matches!(self.peek(), Tok::Sym(',')) && matches!(self.toks[self.pos + 1].0, Tok::Num(_)) {
            for d in derivs.iter_mut() {
                self.expect(',')?;
                *d = self.count_arg()?;
            }
        } else {
            while self.eat(',') {
                let v = self.ident_arg()?;
                self.expect(',')?;
                let k = self.count_arg()?;
                let target = Expr::var(&v);
                let Some(slot) = args.iter().position(|a| *a == target) else {
                    return self.err(format!("`{v}` is not an argument of `{head}`"));
                };
                derivs[slot] += k;
            }
        }
        self.expect(')')?;
        Ok(Expr::func_derivative(&head, args, derivs))
    }
}

fn parse_raw(text: &str, ctx: &JetSpace) -> Result<(Expr, Option<Expr>)> {
    let toks = lex(text)?;
    let arity = arities(&toks)?;
    let mut p = Parser { toks, pos: 0, ctx, arity, bound: Vec::new() };
    let lhs = p.expr()?;
    let rhs = if p.eat('=') { Some(p.expr()?) } else { None };
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok((lhs, rhs))
}

/// Parse an expression and return its normalized form.
///
/// ```
/// use chainlab_core::expr::parse;
/// use chainlab_core::{Expr, JetSpace};
/// let ctx = JetSpace::xy();
/// let e = parse("y'' + 3*y*y' + y^3", &ctx).unwrap();
/// assert_eq!(e.to_string(), "y^3 + 3*y*y' + y''");
/// ```
pub fn parse(text: &str, ctx: &JetSpace) -> Result<Expr> {
    match parse_raw(text, ctx)? {
        (e, None) => e.normalize(),
        (_, Some(_)) => {
            let at = text.find('=').unwrap_or(0);
            Err(Error::Syntax { position: at, message: "unexpected `=` in an expression".into() })
        }
    }
}

/// Parse `lhs = rhs` (or a bare `lhs`, meaning `lhs = 0`) as `lhs - rhs`.
pub fn parse_equation(text: &str, ctx: &JetSpace) -> Result<Expr> {
    let (lhs, rhs) = parse_raw(text, ctx)?;
    match rhs {
        Some(r) => (lhs - r).normalize(),
        None => lhs.normalize(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> JetSpace {
        JetSpace::xy()
    }

    #[test]
    fn chain_member() {
        let e = parse("y' + F(x,y)*y", &ctx()).unwrap();
        let f = Expr::func("F", vec![Expr::var("x"), Expr::var("y")]);
        assert_eq!(e, (Expr::jet("y", 1) + f * Expr::var("y")).normalize().unwrap());
    }

    #[test]
    fn zero_literal() {
        assert!(parse("0", &ctx()).unwrap().is_zero_literal());
    }

    #[test]
    fn jets() {
        assert_eq!(parse("y'''", &ctx()).unwrap(), Expr::jet("y", 3));
        assert_eq!(parse("D(y,x,5)", &ctx()).unwrap(), Expr::jet("y", 5));
        assert_eq!(parse("D(y,x,0)", &ctx()).unwrap(), Expr::var("y"));
    }

    #[test]
    fn partial_forms_agree() {
        let a = parse("D(F,x,1,y,2)", &ctx()).unwrap();
        let b = parse("D(F(x,y),x,1,y,2)", &ctx()).unwrap();
        let c = parse("D(F(x,y),1,2)", &ctx()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = parse("alpha(x) + D(alpha,x,1)", &ctx()).unwrap();
        assert_eq!(d, parse("alpha(x) + D(alpha(x),1)", &ctx()).unwrap());
    }

    #[test]
    fn arity_conflict() {
        assert_eq!(parse("F(x) + F(x,y)", &ctx()), Err(Error::Arity("F".into())));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse("x + * y", &ctx()) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 4),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn identifiers() {
        let e = parse("k1*x", &ctx()).unwrap();
        assert_eq!(e, (Expr::constant("k1") * Expr::var("x")).normalize().unwrap());
    }

    #[test]
    fn exponents() {
        let e = parse("x^(1/2)*x^(1/2) - x^-1*x^2", &ctx()).unwrap();
        assert!(e.is_zero_literal());
    }

    #[test]
    fn integrals_bind_their_variable() {
        let e = parse("int(s*alpha(s), s, x)", &ctx()).unwrap();
        match e.node() {
            Node::Antiderivative { var, .. } => assert_eq!(&**var, "s"),
            n => panic!("{n:?}"),
        }
        let z = JetSpace::zw();
        let e = parse("exp(-int(beta,z))", &z).unwrap();
        assert!(e.contains_function("beta"));
    }

    #[test]
    fn equations() {
        let e = parse_equation("y'' = -y", &ctx()).unwrap();
        assert_eq!(e, parse("y'' + y", &ctx()).unwrap());
    }
}
