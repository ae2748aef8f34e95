//! Linearization of chain equations by point transformations.
//!
//! A second-order equation can only be mapped to `w'' = 0` if it is cubic in
//! `y'`; then Lie's two invariants decide. For the chain, the second-order
//! member is linearizable exactly when `F` is affine in `y`, and the
//! third- and fourth-order members only when `F_y = 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{Ode, ParamFunction};
use crate::error::{Error, Result};
use crate::expr::{is_zero, partial_derivative, Expr, JetSpace, Node, Oracle};
use crate::transform::{integral, GroupElement, MoebiusMap, PointTransformation};

/// `y'' + A y'^3 + B y'^2 + C y' + D` with `A..D` functions of `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicCoefficients {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub d: Expr,
    pub space: JetSpace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearizabilityStatus {
    Linearizable,
    NotLinearizable,
    AlreadyLinear,
    /// `F_y ≠ 0` at order five or more, where non-linearizability is
    /// conjectured rather than proved.
    ConjecturedNotLinearizable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizabilityVerdict {
    pub status: LinearizabilityStatus,
    /// The vanishing residuals for a positive verdict, the first
    /// non-vanishing one for a negative verdict, `F_y` otherwise.
    pub residuals: Vec<Expr>,
    pub order: u32,
}

pub fn extract_cubic_coeffs(ode: &Ode) -> Result<CubicCoefficients> {
    if ode.order() != 2 {
        return Err(Error::UnsupportedOrder(ode.order()));
    }
    let space = ode.space();
    let dep = space.dep();
    let rest = (ode.lhs() - space.derivative(2)).normalize()?;
    let terms: Vec<Expr> = match rest.node() {
        Node::Sum(xs) => xs.clone(),
        _ if rest.is_zero_literal() => Vec::new(),
        _ => vec![rest.clone()],
    };
    let mut coeffs: [Vec<Expr>; 4] = Default::default();
    let mut too_high = false;
    for t in terms {
        let factors = match t.node() {
            Node::Product(fs) => fs.clone(),
            _ => vec![t.clone()],
        };
        let mut degree = 0i64;
        let mut others = Vec::new();
        for f in factors {
            let power = match f.node() {
                Node::Jet { order: 1, var } if var == dep => Some(1),
                Node::Power(b, q) if matches!(b.node(), Node::Jet { order: 1, var } if var == dep) => {
                    if !q.is_integer() || *q.numer() < 0 {
                        return Err(Error::NotPolynomial);
                    }
                    Some(*q.numer())
                }
                _ => None,
            };
            match power {
                Some(k) => degree += k,
                None if f.jet_order(dep) > 0 => return Err(Error::NotPolynomial),
                None => others.push(f),
            }
        }
        match usize::try_from(degree) {
            Ok(k) if k <= 3 => coeffs[k].push(Expr::product(others)),
            _ => too_high = true,
        }
    }
    if too_high {
        return Err(Error::NotCubic);
    }
    let [d, c, b, a] = coeffs.map(|ts| Expr::sum(ts).normalize());
    Ok(CubicCoefficients { a: a?, b: b?, c: c?, d: d?, space: space.clone() })
}

/// Lie's invariants `(Γ1, Γ2)`; both vanish iff the cubic equation is
/// linearizable.
pub fn lie_conditions(k: &CubicCoefficients) -> Result<(Expr, Expr)> {
    let (x, y) = (k.space.indep(), k.space.dep());
    let dx = |e: &Expr| partial_derivative(e, x);
    let dy = |e: &Expr| partial_derivative(e, y);
    let (a, b, c, d) = (&k.a, &k.b, &k.c, &k.d);
    let g1 = Expr::integer(3) * dx(&dx(a)?)? - Expr::integer(2) * dx(&dy(b)?)? + dy(&dy(c)?)?
        - Expr::integer(3) * dx(&(c * a))?
        + Expr::integer(3) * dy(&(d * a))?
        + dx(&(b * b))?
        + Expr::integer(3) * a * dy(d)?
        - b * dy(c)?;
    let g2 = Expr::integer(3) * dy(&dy(d)?)? - Expr::integer(2) * dx(&dy(c)?)? + dx(&dx(b)?)?
        - Expr::integer(3) * dx(&(d * a))?
        + Expr::integer(3) * dy(&(d * b))?
        - dy(&(c * c))?
        - Expr::integer(3) * d * dx(a)?
        + c * dx(b)?;
    Ok((g1.normalize()?, g2.normalize()?))
}

/// Reduced linearization conditions for the chain member of order 2, 3 or 4.
pub fn chain_linearization_residuals(f: &ParamFunction, n: u32) -> Result<Vec<Expr>> {
    let (xs, ys) = (f.space().indep(), f.space().dep());
    let y = f.space().y();
    let f0 = f.expr();
    let dy = |e: &Expr| partial_derivative(e, ys);
    let fy = dy(f0)?;
    let fyy = dy(&fy)?;
    let i = Expr::integer;
    let out = match n {
        2 => {
            let fyyy = dy(&fyy)?;
            let fxyy = partial_derivative(&fyy, xs)?;
            vec![i(4) * &fyy + &y * fyyy, i(2) * (f0 - &y * &fy) * &fyy + fxyy]
        }
        3 => {
            let fxy = partial_derivative(&fy, xs)?;
            let fxyy = dy(&fxy)?;
            vec![
                i(4) * &fy + &y * &fyy,
                i(3) * &fy + &y * &fyy,
                &y * &fy * &fy - i(2) * &y * &y * &fy * &fyy + i(3) * f0 * (&fy + &y * &fyy) + i(3) * (fxy + &y * fxyy),
            ]
        }
        4 => vec![i(5) * &fy + &y * &fyy, fyy],
        _ => return Err(Error::UnsupportedOrder(n)),
    };
    out.into_iter().map(|e| e.normalize()).collect()
}

/// Verdict for `Ω_F^n[y] = 0`, `n >= 2`.
pub fn is_linearizable(f: &ParamFunction, n: u32, oracle: &Oracle) -> Result<LinearizabilityVerdict> {
    use LinearizabilityStatus::*;
    let verdict = |status, residuals| Ok(LinearizabilityVerdict { status, residuals, order: n });
    if n < 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    if n == 2 {
        let res = chain_linearization_residuals(f, 2)?;
        for r in &res {
            if !is_zero(r, oracle)?.is_zero() {
                return verdict(NotLinearizable, vec![r.clone()]);
            }
        }
        return verdict(Linearizable, res);
    }
    let fy = partial_derivative(f.expr(), f.space().dep())?;
    if is_zero(&fy, oracle)?.is_zero() {
        return verdict(AlreadyLinear, vec![fy]);
    }
    if n >= 5 {
        return verdict(ConjecturedNotLinearizable, vec![fy]);
    }
    for r in chain_linearization_residuals(f, n)? {
        if !is_zero(&r, oracle)?.is_zero() {
            return verdict(NotLinearizable, vec![r]);
        }
    }
    Err(Error::VerificationFailed("F_y is nonzero but every reduced condition vanishes".into()))
}

/// The change `y = w exp(-∫β)` taking `F = α0 y + β` to `F = α y` with
/// `α = α0 exp(-∫β)`; returns the group element and `α(x)`.
pub fn beta_gauge(alpha0: &Expr, beta: &Expr, n: u32) -> Result<(GroupElement, Expr)> {
    if n < 1 {
        return Err(Error::UnsupportedOrder(n));
    }
    let (xs, zs) = (JetSpace::xy(), JetSpace::zw());
    let r = Expr::exp(-integral(beta, xs.indep(), zs.x())?);
    let g = GroupElement::new(MoebiusMap::identity(), r)?;
    let alpha = (alpha0 * Expr::exp(-integral(beta, xs.indep(), xs.x())?)).normalize()?;
    Ok((g, alpha))
}

/// The six-parameter family `z = ρ(x, y)`, `w = ψ(x, y)` sending
/// `y'' + 3αyy' + α²y³ + α'y² = 0` to `w'' = 0`; `ks = [k1, .., k6]` with
/// `k3 k6 ≠ 0`, `k5 ≠ 1`.
pub fn linearizing_family(alpha: &Expr, ks: &[Expr; 6]) -> Result<PointTransformation> {
    let [k1, k2, k3, k4, k5, k6] = ks;
    if (k3 * k6).normalize()?.is_zero_literal() {
        return Err(Error::ConstraintViolation("k3*k6 must be nonzero".into()));
    }
    if (k5 - 1).normalize()?.is_zero_literal() {
        return Err(Error::ConstraintViolation("k5 must differ from 1".into()));
    }
    let space = JetSpace::xy();
    let (x, y) = (space.x(), space.y());
    let xs = space.indep();
    let t = integral(&((k5 - &x) * alpha / k3), xs, x.clone())?;
    let inner = integral(&(k6 * (k1 - &t) / (k5 - &x).powi(2)), xs, x.clone())?;
    let rho = (&x - k5) / (k3 * &y) - k1 + &t;
    let lead = (k5 - 1) * k4 * (k5 - &x) + k6 * (&x - 1);
    let bracket = &lead * (&x - k5) - k3 * ((k5 - 1) * (k4 * k1 - k2) * (k5 - &x) + k6 * k1 * (&x - 1)) * &y
        + k3 * &y * (&lead * &t + (k5 - 1) * (k5 - &x) * inner);
    let q = ((k5 - 1) * k3 * (k5 - &x) * &y).recip();
    PointTransformation::forward(rho, q * bracket)
}

/// Which system of determining equations to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `ρ_y = 0`
    Fiber,
    /// `ρ_y ≠ 0`
    General,
}

/// Residuals of the determining equations for `z = ρ(x, y)`, `w = ψ(x, y)`
/// to relate `w'' = 0` and the cubic equation.
pub fn determining_residuals(k: &CubicCoefficients, rho: &Expr, psi: &Expr, branch: Branch) -> Result<Vec<Expr>> {
    let (xs, ys) = (k.space.indep(), k.space.dep());
    let dx = |e: &Expr| partial_derivative(e, xs);
    let dy = |e: &Expr| partial_derivative(e, ys);
    let (a, b, c, d) = (&k.a, &k.b, &k.c, &k.d);
    let i = Expr::integer;
    let ry = dy(rho)?;
    let out = match branch {
        Branch::Fiber => {
            if !ry.is_zero_literal() {
                return Err(Error::BranchMismatch("rho depends on y".into()));
            }
            let (rx, px, py) = (dx(rho)?, dx(psi)?, dy(psi)?);
            let rxx = dx(&rx)?;
            let rxxx = dx(&rxx)?;
            vec![
                dy(&py)? - &py * b,
                i(2) * dx(&py)? - &py * &rxx / &rx - &py * c,
                dx(&px)? - &px * &rxx / &rx - &py * d,
                i(2) * &rx * rxxx
                    - i(3) * &rxx * &rxx
                    - &rx * &rx * (i(4) * (dy(d)? + b * d) - (i(2) * dx(c)? + c * c)),
            ]
        }
        Branch::General => {
            if ry.is_zero_literal() {
                return Err(Error::BranchMismatch("rho does not depend on y".into()));
            }
            let (rx, px, py) = (dx(rho)?, dx(psi)?, dy(psi)?);
            let (rxx, rxy, ryy) = (dx(&rx)?, dy(&rx)?, dy(&ry)?);
            let (pxx, pxy, pyy) = (dx(&px)?, dy(&px)?, dy(&py)?);
            let rxyy = dy(&rxy)?;
            let ryyy = dy(&ryy)?;
            let mixed = c * &ry * &ry - i(2) * &ry * &rxy + &rx * (a * &rx - b * &ry + &ryy);
            vec![
                &ry * (a * &px + &pyy) - &py * (a * &rx + &ryy),
                (b * &ry - a * &rx) * (&ry * &px - &rx * &py) - i(2) * &ry * &py * &rxy
                    + (&rx * &py - &ry * &px) * &ryy
                    + i(2) * &ry * &ry * &pxy,
                &ry * &ry * &pxx - d * &ry * &ry * &py + &px * &mixed,
                &ry * &ry * &rxx - d * ry.powi(3) + &rx * &mixed,
                i(2) * (a * b + dy(a)?) * &rx * &ry
                    + (b * b - i(4) * a * c + i(4) * dx(a)? - i(2) * dy(b)?) * &ry * &ry
                    + i(6) * a * &ry * &rxy
                    - i(3) * (a * &rx + &ryy).powi(2)
                    + i(2) * &ry * &ryyy,
                i(-3) * a * a * rx.powi(3) + i(3) * (b * b - i(2) * a * c + i(2) * dx(a)?) * &rx * &ry * &ry
                    - i(2) * (i(3) * a * d - dx(b)? + i(2) * dy(c)?) * ry.powi(3)
                    + i(3) * &rx * &ryy * (i(-2) * b * &ry + &ryy)
                    + i(6) * &ry * &rxy * (b * &ry - i(2) * &ryy)
                    + i(6) * &ry * &ry * &rxyy,
            ]
        }
    };
    out.into_iter().map(|e| e.normalize()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_chain;
    use crate::expr::{parse, ZeroVerdict};
    use LinearizabilityStatus::*;

    fn ctx() -> JetSpace {
        JetSpace::xy()
    }

    fn p(s: &str) -> Expr {
        parse(s, &ctx()).unwrap()
    }

    fn pf(s: &str) -> ParamFunction {
        ParamFunction::xy(p(s)).unwrap()
    }

    fn eq8() -> Ode {
        build_chain(&pf("alpha(x)*y"), 2).unwrap()
    }

    #[test]
    fn cubic_coefficients_of_riccati_form() {
        let k = extract_cubic_coeffs(&eq8()).unwrap();
        assert!(k.a.is_zero_literal() && k.b.is_zero_literal());
        assert_eq!(k.c, p("3*alpha(x)*y"));
        assert_eq!(k.d, p("alpha(x)^2*y^3 + D(alpha(x),1)*y^2"));
        let quartic = Ode::new(p("y'' + y'^4"), &ctx()).unwrap();
        assert_eq!(extract_cubic_coeffs(&quartic), Err(Error::NotCubic));
        let rational = Ode::new(p("y'' + 1/(1 + y'^2)"), &ctx()).unwrap();
        assert_eq!(extract_cubic_coeffs(&rational), Err(Error::NotPolynomial));
    }

    #[test]
    fn lie_invariants() {
        let (g1, g2) = lie_conditions(&extract_cubic_coeffs(&eq8()).unwrap()).unwrap();
        assert!(g1.is_zero_literal() && g2.is_zero_literal());
        let abel = build_chain(&pf("y^2"), 2).unwrap();
        let (_, g2) = lie_conditions(&extract_cubic_coeffs(&abel).unwrap()).unwrap();
        assert_eq!(g2, p("-4*y^3"));
    }

    #[test]
    fn chain_residual_values() {
        assert_eq!(chain_linearization_residuals(&pf("y^2"), 2).unwrap()[0], Expr::integer(8));
        assert_eq!(chain_linearization_residuals(&pf("y"), 3).unwrap()[0], Expr::integer(4));
        assert_eq!(chain_linearization_residuals(&pf("y^2"), 4).unwrap(), vec![p("12*y"), Expr::integer(2)]);
        assert_eq!(chain_linearization_residuals(&pf("y"), 5), Err(Error::UnsupportedOrder(5)));
    }

    #[test]
    fn verdicts() {
        let o = Oracle::default();
        assert_eq!(is_linearizable(&pf("x^2*y + beta(x)"), 2, &o).unwrap().status, Linearizable);
        let abel = is_linearizable(&pf("lambda*y^2"), 2, &o).unwrap();
        assert_eq!(abel.status, NotLinearizable);
        assert_eq!(is_linearizable(&pf("y"), 3, &o).unwrap().residuals, vec![Expr::integer(4)]);
        assert_eq!(is_linearizable(&pf("beta(x)"), 7, &o).unwrap().status, AlreadyLinear);
        assert_eq!(is_linearizable(&pf("y"), 6, &o).unwrap().status, ConjecturedNotLinearizable);
    }

    #[test]
    fn gauge_with_unit_beta() {
        let (g, alpha) = beta_gauge(&Expr::one(), &Expr::one(), 2).unwrap();
        assert_eq!(alpha, p("exp(-x)"));
        let q = crate::transform::transformed_parameter(&pf("y + 1"), &g, 2).unwrap();
        assert_eq!(*q.expr(), parse("exp(-z)*w", &JetSpace::zw()).unwrap());
    }

    #[test]
    fn family_constraints() {
        let ks = [0, 0, 1, 0, 1, 1].map(Expr::integer);
        assert!(matches!(linearizing_family(&p("alpha(x)"), &ks), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn trivial_fiber_residuals() {
        let zero = CubicCoefficients { a: Expr::zero(), b: Expr::zero(), c: Expr::zero(), d: Expr::zero(), space: ctx() };
        let r = determining_residuals(&zero, &p("x"), &p("y"), Branch::Fiber).unwrap();
        assert!(r.iter().all(Expr::is_zero_literal));
        assert!(matches!(determining_residuals(&zero, &p("y"), &p("x"), Branch::Fiber), Err(Error::BranchMismatch(_))));
    }

    #[test]
    fn explicit_map_satisfies_general_branch() {
        let k = extract_cubic_coeffs(&eq8()).unwrap();
        let ks = [0, 0, 1, 0, 0, 1].map(Expr::integer);
        let t = linearizing_family(&p("alpha(x)"), &ks).unwrap();
        for r in determining_residuals(&k, t.first(), t.second(), Branch::General).unwrap() {
            assert_eq!(is_zero(&r, &Oracle::default()).unwrap(), ZeroVerdict::SymbolicZero, "{r}");
        }
    }
}
