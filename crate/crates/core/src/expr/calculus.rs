use alloc::collections::BTreeMap;
use alloc::format;

use num_traits::{One, Zero};

use super::poly::{exponent_to_rational, Mono, Poly};
use super::{symbol, Expr, JetSpace, Node, Substitution, Symbol};
use crate::error::{Error, Result};

enum Target {
    /// Base variable or named constant with this name.
    Name(Symbol),
    /// Exactly this atom.
    Atom(Expr),
}

enum Kind<'a> {
    Total(&'a JetSpace),
    Partial(Target),
}

struct Derivation<'a> {
    kind: Kind<'a>,
    memo: BTreeMap<Expr, Poly>,
}

impl<'a> Derivation<'a> {
    fn new(kind: Kind<'a>) -> Self {
        Derivation { kind, memo: BTreeMap::new() }
    }

    fn poly(&mut self, p: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &p.terms {
            for (i, (b, e)) in m.0.iter().enumerate() {
                let d = self.atom(b)?;
                if d.is_zero() {
                    continue;
                }
                let mut rest = m.0.clone();
                let reduced = *e - super::Exponent::one();
                if reduced.is_zero() {
                    rest.remove(i);
                } else {
                    rest[i].1 = reduced;
                }
                let k = c * exponent_to_rational(e);
                out.add_assign(Poly::from_mono(k, Mono(rest)).mul(&d)?);
            }
        }
        Ok(out)
    }

    fn atom(&mut self, b: &Expr) -> Result<Poly> {
        if let Some(p) = self.memo.get(b) {
            return Ok(p.clone());
        }
        let d = self.atom_uncached(b)?;
        self.memo.insert(b.clone(), d.clone());
        Ok(d)
    }

    fn atom_uncached(&mut self, b: &Expr) -> Result<Poly> {
        match b.node() {
            Node::Rational(_) => Ok(Poly::zero()),
            Node::Constant(s) | Node::Variable(s) => Ok(match &self.kind {
                Kind::Total(ctx) => {
                    if matches!(b.node(), Node::Constant(_)) {
                        Poly::zero()
                    } else if s == ctx.indep() {
                        Poly::one()
                    } else if s == ctx.dep() {
                        Poly::atom(ctx.derivative(1))
                    } else {
                        Poly::zero()
                    }
                }
                Kind::Partial(t) => indicator(t, b),
            }),
            Node::Jet { order, var } => match &self.kind {
                Kind::Total(ctx) => {
                    if var != ctx.dep() {
                        return Ok(Poly::zero());
                    }
                    let next = order + 1;
                    if next > ctx.max_order() {
                        return Err(Error::OrderOverflow { requested: next, max: ctx.max_order() });
                    }
                    Ok(Poly::atom(ctx.derivative(next)))
                }
                Kind::Partial(t) => Ok(indicator(t, b)),
            },
            Node::Function { name, derivs, args } => {
                let mut out = Poly::zero();
                for (i, a) in args.iter().enumerate() {
                    let da = self.poly(&Poly::from_nf(a))?;
                    if da.is_zero() {
                        continue;
                    }
                    let mut ds = derivs.clone();
                    ds[i] += 1;
                    let f = Expr::normal(Node::Function { name: name.clone(), derivs: ds, args: args.clone() });
                    out.add_assign(Poly::atom(f).mul(&da)?);
                }
                Ok(out)
            }
            Node::Antiderivative { integrand, var, at } => self.antiderivative(integrand, var, at),
            Node::Exp(u) => {
                let du = self.poly(&Poly::from_nf(u))?;
                Poly::atom(b.clone()).mul(&du)
            }
            Node::Sum(_) => self.poly(&Poly::from_nf(b)),
            Node::Power(..) | Node::Product(_) => self.poly(&Poly::from_nf(b)),
        }
    }

    fn antiderivative(&mut self, integrand: &Expr, var: &Symbol, at: &Expr) -> Result<Poly> {
        let dat = self.poly(&Poly::from_nf(at))?;
        let mut out = Poly::zero();
        if !dat.is_zero() {
            let bound = Substitution::new().bind(Expr::var_sym(var), at.clone())?.apply(integrand)?;
            out = Poly::from_nf(&bound).mul(&dat)?;
        }
        // dependence of the integrand on symbols other than the bound one
        let clash = match &self.kind {
            Kind::Total(ctx) => var == ctx.indep() || var == ctx.dep(),
            Kind::Partial(Target::Name(s)) => s == var,
            Kind::Partial(Target::Atom(a)) => a.depends_on(var),
        };
        let (integrand, var) = if clash {
            let fresh = symbol(&format!("{}_", var));
            let renamed = Substitution::new().bind(Expr::var_sym(var), Expr::var_sym(&fresh))?.apply(integrand)?;
            (renamed, fresh)
        } else {
            (integrand.clone(), var.clone())
        };
        let mut inner = Derivation::new(match &self.kind {
            Kind::Total(ctx) => Kind::Total(ctx),
            Kind::Partial(Target::Name(s)) => Kind::Partial(Target::Name(s.clone())),
            Kind::Partial(Target::Atom(a)) => Kind::Partial(Target::Atom(a.clone())),
        });
        let di = inner.poly(&Poly::from_nf(&integrand))?;
        if !di.is_zero() {
            out.add_assign(Poly::antiderivative(&di, &var, &Poly::from_nf(at))?);
        }
        Ok(out)
    }
}

fn indicator(t: &Target, b: &Expr) -> Poly {
    let hit = match t {
        Target::Name(s) => matches!(b.node(), Node::Variable(v) | Node::Constant(v) if v == s),
        Target::Atom(a) => a == b,
    };
    if hit {
        Poly::one()
    } else {
        Poly::zero()
    }
}

/// Total derivative `D_x` in the jet space `ctx`.
///
/// ```
/// use chainlab_core::expr::{parse, total_derivative};
/// use chainlab_core::JetSpace;
/// let ctx = JetSpace::xy();
/// let e = parse("F(x,y)", &ctx).unwrap();
/// let d = total_derivative(&e, &ctx).unwrap();
/// assert_eq!(d, parse("D(F,x,1) + y'*D(F,y,1)", &ctx).unwrap());
/// ```
pub fn total_derivative(e: &Expr, ctx: &JetSpace) -> Result<Expr> {
    let p = Poly::from_expr(e)?;
    Derivation::new(Kind::Total(ctx)).poly(&p)?.into_normal()
}

/// Formal partial derivative with respect to the base variable or named
/// constant `s`. Jet variables are independent coordinates.
pub fn partial_derivative(e: &Expr, s: &str) -> Result<Expr> {
    let p = Poly::from_expr(e)?;
    Derivation::new(Kind::Partial(Target::Name(symbol(s)))).poly(&p)?.into_normal()
}

/// Partial derivative with respect to a single atom (variable, constant or
/// jet variable).
pub fn partial_derivative_wrt(e: &Expr, atom: &Expr) -> Result<Expr> {
    match atom.node() {
        Node::Variable(_) | Node::Constant(_) | Node::Jet { .. } => {}
        _ => return Err(Error::InvalidParameter(format!("cannot differentiate with respect to {atom}"))),
    }
    let p = Poly::from_expr(e)?;
    Derivation::new(Kind::Partial(Target::Atom(atom.clone()))).poly(&p)?.into_normal()
}
