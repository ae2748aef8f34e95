//! Point symmetries `ξ ∂_x + φ ∂_y` and their action on jets.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{reduce_mod, Ode};
use crate::error::{Error, Result};
use crate::expr::{is_zero, partial_derivative, partial_derivative_wrt, total_derivative, Expr, JetSpace, Oracle, ZeroVerdict};
use crate::transform::integral;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    xi: Expr,
    phi: Expr,
}

impl VectorField {
    pub fn new(xi: Expr, phi: Expr) -> Result<VectorField> {
        let (xi, phi) = (xi.normalize()?, phi.normalize()?);
        if xi.has_jets() || phi.has_jets() {
            return Err(Error::InvalidParameter(format!("vector field ({xi}, {phi}) depends on derivatives")));
        }
        Ok(VectorField { xi, phi })
    }

    pub fn xi(&self) -> &Expr {
        &self.xi
    }

    pub fn phi(&self) -> &Expr {
        &self.phi
    }
}

/// `[φ^(1), .., φ^(k)]`.
pub fn prolong(v: &VectorField, k: u32, ctx: &JetSpace) -> Result<Vec<Expr>> {
    if k == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    if k > ctx.max_order() {
        return Err(Error::OrderOverflow { requested: k, max: ctx.max_order() });
    }
    let dxi = total_derivative(&v.xi, ctx)?;
    let mut out = Vec::with_capacity(k as usize);
    let mut cur = v.phi.clone();
    for j in 1..=k {
        cur = (total_derivative(&cur, ctx)? - ctx.derivative(j) * &dxi).normalize()?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// `pr v(lhs)` reduced modulo the equation, then zero-tested.
pub fn is_symmetry(v: &VectorField, ode: &Ode, oracle: &Oracle) -> Result<ZeroVerdict> {
    let ctx = ode.space();
    let lhs = ode.lhs();
    let mut acc = vec![
        &v.xi * partial_derivative(lhs, ctx.indep())?,
        &v.phi * partial_derivative(lhs, ctx.dep())?,
    ];
    for (j, phij) in (1..).zip(prolong(v, ode.order(), ctx)?) {
        acc.push(phij * partial_derivative_wrt(lhs, &ctx.derivative(j))?);
    }
    let reduced = reduce_mod(&Expr::sum(acc), ode)?;
    is_zero(&reduced, oracle)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryTag {
    V1,
    V2,
    V3,
    /// Riccati chain, `n >= 3`.
    Bv,
    /// Abel chain, `n >= 2`.
    Bw,
}

/// Explicit generators; `alpha` is a function of `x` and required for the
/// `V*` tags.
pub fn known_symmetries(tag: SymmetryTag, n: u32, alpha: Option<&Expr>) -> Result<Vec<VectorField>> {
    let ctx = JetSpace::xy();
    let (x, y) = (ctx.x(), ctx.y());
    let i = Expr::integer;
    let need = || alpha.ok_or(Error::MissingAlpha);
    let field = |xi: Expr, phi: Expr| VectorField::new(xi, phi);
    match tag {
        SymmetryTag::V1 => {
            let a = need()?;
            Ok(vec![field(&x * &y, y.powi(2) * (i(1) - &x * &y * a))?])
        }
        SymmetryTag::V2 => {
            let a = need()?;
            Ok(vec![field(&y * (i(1) - &x), y.powi(2) * ((&x - 1) * &y * a - 1))?])
        }
        SymmetryTag::V3 => {
            let a = need()?;
            let mu = integral(&(&x * a), ctx.indep(), x.clone())?;
            let nu = integral(&(&mu / x.powi(2)), ctx.indep(), x.clone())?;
            let common = (&x - 1) * (&x - &y * &mu) + &x * &y * &nu;
            let xi = &nu * &common;
            let phi = -(x.powi(-2)) * &common * (&x - &y * &mu + &x * &y * (&x * &y * a - 1) * &nu);
            Ok(vec![field(xi, phi)?])
        }
        SymmetryTag::Bv => {
            if n < 3 {
                return Err(Error::UnsupportedOrder(n));
            }
            Ok(vec![
                field(i(1), i(0))?,
                field(x.clone(), -y.clone())?,
                field(x.powi(2), i(i64::from(n)) - i(2) * &x * &y)?,
            ])
        }
        SymmetryTag::Bw => {
            if n < 2 {
                return Err(Error::UnsupportedOrder(n));
            }
            Ok(vec![field(i(1), i(0))?, field(x, -(y / 2))?])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_chain, standard_chain, ChainKind, ParamFunction};
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s, &JetSpace::xy()).unwrap()
    }

    #[test]
    fn prolongation_examples() {
        let ctx = JetSpace::xy();
        let translation = VectorField::new(Expr::one(), Expr::zero()).unwrap();
        assert!(prolong(&translation, 3, &ctx).unwrap().iter().all(Expr::is_zero_literal));
        let scaling = VectorField::new(p("x"), p("-y")).unwrap();
        assert_eq!(prolong(&scaling, 2, &ctx).unwrap(), vec![p("-2*y'"), p("-3*y''")]);
        let bw = VectorField::new(p("k1 + k2*x"), p("-k2*y/2")).unwrap();
        assert_eq!(prolong(&bw, 1, &ctx).unwrap()[0], p("-3*k2*y'/2"));
        assert_eq!(prolong(&bw, 0, &ctx), Err(Error::UnsupportedOrder(0)));
        assert!(matches!(prolong(&bw, ctx.max_order() + 1, &ctx), Err(Error::OrderOverflow { .. })));
    }

    #[test]
    fn generic_bv_on_riccati() {
        let ode = standard_chain(ChainKind::Riccati, &Expr::one(), 3).unwrap();
        let v = VectorField::new(p("k1 + x*(k2 + k3*x)"), p("3*k3 - y*(k2 + 2*k3*x)")).unwrap();
        assert_eq!(is_symmetry(&v, &ode, &Oracle::default()).unwrap(), ZeroVerdict::SymbolicZero);
    }

    #[test]
    fn not_a_symmetry() {
        let ode = Ode::new(p("y' + y^2"), &JetSpace::xy()).unwrap();
        let v = VectorField::new(Expr::zero(), Expr::one()).unwrap();
        assert!(!is_symmetry(&v, &ode, &Oracle::default()).unwrap().is_zero());
    }

    #[test]
    fn v1_v2_on_riccati_form() {
        let a = p("alpha(x)");
        let ode = build_chain(&ParamFunction::xy(&a * p("y")).unwrap(), 2).unwrap();
        for tag in [SymmetryTag::V1, SymmetryTag::V2] {
            let v = &known_symmetries(tag, 2, Some(&a)).unwrap()[0];
            assert_eq!(is_symmetry(v, &ode, &Oracle::default()).unwrap(), ZeroVerdict::SymbolicZero, "{tag:?}");
        }
        assert_eq!(known_symmetries(SymmetryTag::V3, 2, None), Err(Error::MissingAlpha));
    }

    #[test]
    fn bw_is_order_independent() {
        assert_eq!(known_symmetries(SymmetryTag::Bw, 2, None), known_symmetries(SymmetryTag::Bw, 5, None));
        assert_eq!(known_symmetries(SymmetryTag::Bw, 2, None).unwrap()[1], VectorField::new(p("x"), p("-y/2")).unwrap());
    }
}
