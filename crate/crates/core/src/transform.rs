//! Point transformations of chain equations.
//!
//! Fiber-preserving maps `x = ρ(z)`, `y = R(z) w` with Möbius `ρ` send each
//! chain equation of order `n` to the chain equation of the same order whose
//! parameter function is
//!
//! ```text
//! Q_n(z, w) = F(ρ, R w) ρ_z + R_z / R - ((n - 1)/2) ρ_zz / ρ_z.
//! ```
//!
//! Requiring `Q_n` to stay of the form `δ(z) w` whenever `F = α(x) y` forces
//! `R = r0 ρ_z^((n-1)/2)` and gives the subgroup action
//! `α ↦ r0 α(ρ) ρ_x^((n+1)/2)`. [`classify_alpha`] recognizes the four orbit
//! shapes of that action on rational `α` and [`witness_element`] produces a
//! group element reaching a classified function from its representative.
//!
//! Source coordinates are those of the equation or parameter function being
//! transformed; target coordinates are always `(z, w)`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::chain::{reduce_mod, Ode, ParamFunction};
use crate::error::{Error, Result};
use crate::expr::{
    is_zero, partial_derivative, total_derivative, Exponent, Expr, JetSpace, Node, Oracle, Rational, Substitution, Symbol,
    ZeroVerdict,
};
use crate::upoly::RatFunc;

fn nonzero(e: &Expr, what: &str) -> Result<Expr> {
    let e = e.normalize()?;
    if e.is_zero_literal() {
        return Err(Error::DegenerateMap(format!("{what} vanishes")));
    }
    Ok(e)
}

/// `ρ(t) = (k2 t + k1) / (k4 t + k3)` with `k4 ∈ {0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoebiusMap {
    k1: Expr,
    k2: Expr,
    k3: Expr,
    k4: Expr,
}

impl MoebiusMap {
    pub fn new(k1: Expr, k2: Expr, k3: Expr, k4: Expr) -> Result<MoebiusMap> {
        let k4 = k4.normalize()?;
        if !(k4.is_zero_literal() || k4.is_one_literal()) {
            return Err(Error::DegenerateMap(format!("k4 must be 0 or 1, got {k4}")));
        }
        let m = MoebiusMap { k1: k1.normalize()?, k2: k2.normalize()?, k3: k3.normalize()?, k4 };
        if m.k4.is_zero_literal() && m.k3.is_zero_literal() {
            return Err(Error::DegenerateMap("(k3, k4) = (0, 0)".into()));
        }
        nonzero(&m.delta(), "k2*k3 - k1*k4")?;
        Ok(m)
    }

    pub fn from_rationals(k: [Rational; 4]) -> Result<MoebiusMap> {
        let [k1, k2, k3, k4] = k.map(Expr::rational);
        MoebiusMap::new(k1, k2, k3, k4)
    }

    pub fn identity() -> MoebiusMap {
        MoebiusMap { k1: Expr::zero(), k2: Expr::one(), k3: Expr::one(), k4: Expr::zero() }
    }

    pub fn k1(&self) -> &Expr {
        &self.k1
    }

    pub fn k2(&self) -> &Expr {
        &self.k2
    }

    pub fn k3(&self) -> &Expr {
        &self.k3
    }

    pub fn k4(&self) -> &Expr {
        &self.k4
    }

    /// `Δ = k2 k3 - k1 k4`, normalized.
    pub fn delta(&self) -> Expr {
        (&self.k2 * &self.k3 - &self.k1 * &self.k4).normalize().expect("polynomial in the coefficients")
    }

    /// `k4 t + k3`.
    pub fn denominator(&self, t: &Expr) -> Expr {
        &self.k4 * t + &self.k3
    }

    pub fn apply(&self, t: &Expr) -> Result<Expr> {
        ((&self.k2 * t + &self.k1) / self.denominator(t)).normalize()
    }

    /// `self ∘ inner`: `t ↦ self(inner(t))`, rescaled so that `k4 ∈ {0, 1}`.
    pub fn after(&self, inner: &MoebiusMap) -> Result<MoebiusMap> {
        let (a, b, c, d) = (&self.k2, &self.k1, &self.k4, &self.k3);
        let (e, f, g, h) = (&inner.k2, &inner.k1, &inner.k4, &inner.k3);
        let k2 = (a * e + b * g).normalize()?;
        let k1 = (a * f + b * h).normalize()?;
        let k4 = (c * e + d * g).normalize()?;
        let k3 = (c * f + d * h).normalize()?;
        if k4.is_zero_literal() {
            return MoebiusMap::new(k1, k2, k3, k4);
        }
        MoebiusMap::new(&k1 / &k4, &k2 / &k4, &k3 / &k4, Expr::one())
    }
}

/// How the dependent variable is rescaled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scaling {
    /// `y = R(z) w` for an arbitrary nonzero `R`.
    Function(Expr),
    /// `y = r0 ρ_z^((n-1)/2) w`, the subgroup preserving `F = α(x) y`.
    Subgroup { r0: Expr, order: u32 },
}

/// Element of the equivalence group: `x = ρ(z)`, `y = R(z) w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    mobius: MoebiusMap,
    scaling: Scaling,
}

fn z() -> Expr {
    JetSpace::zw().x()
}

fn w() -> Expr {
    JetSpace::zw().y()
}

fn only_in(e: &Expr, allowed: &[&Symbol]) -> bool {
    !e.has_jets() && e.free_variables().iter().all(|v| allowed.contains(&v))
}

impl GroupElement {
    /// General element with scaling function `R(z)`.
    pub fn new(mobius: MoebiusMap, r: Expr) -> Result<GroupElement> {
        let zs = JetSpace::zw();
        let r = nonzero(&r, "the scaling function")?;
        if !only_in(&r, &[zs.indep()]) {
            return Err(Error::InvalidParameter(format!("scaling {r} must depend on z only")));
        }
        Ok(GroupElement { mobius, scaling: Scaling::Function(r) })
    }

    /// Subgroup element acting on order-`order` equations.
    pub fn subgroup(mobius: MoebiusMap, r0: Expr, order: u32) -> Result<GroupElement> {
        let r0 = nonzero(&r0, "r0")?;
        if !only_in(&r0, &[]) {
            return Err(Error::InvalidParameter(format!("r0 = {r0} must be constant")));
        }
        check_parity(&mobius, order)?;
        Ok(GroupElement { mobius, scaling: Scaling::Subgroup { r0, order } })
    }

    pub fn identity() -> GroupElement {
        GroupElement { mobius: MoebiusMap::identity(), scaling: Scaling::Function(Expr::one()) }
    }

    pub fn mobius(&self) -> &MoebiusMap {
        &self.mobius
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn r0(&self) -> Option<&Expr> {
        match &self.scaling {
            Scaling::Subgroup { r0, .. } => Some(r0),
            Scaling::Function(_) => None,
        }
    }

    /// `ρ(z)`.
    pub fn rho(&self) -> Result<Expr> {
        self.mobius.apply(&z())
    }

    /// `R(z)`.
    pub fn scale_function(&self) -> Result<Expr> {
        match &self.scaling {
            Scaling::Function(r) => Ok(r.clone()),
            Scaling::Subgroup { r0, order } => {
                let rho_z = total_derivative(&self.rho()?, &JetSpace::zw())?;
                (r0 * rho_z.pow(Exponent::new(i64::from(*order) - 1, 2))).normalize()
            }
        }
    }

    /// Subgroup element acting as `self` followed by `next`.
    pub fn then(&self, next: &GroupElement) -> Result<GroupElement> {
        match (&self.scaling, &next.scaling) {
            (Scaling::Subgroup { r0: a, order: n }, Scaling::Subgroup { r0: b, order: m }) if n == m => {
                GroupElement::subgroup(self.mobius.after(&next.mobius)?, a * b, *n)
            }
            _ => Err(Error::InvalidParameter("composition is defined for subgroup elements of one order".into())),
        }
    }
}

fn check_parity(m: &MoebiusMap, order: u32) -> Result<()> {
    if order.is_multiple_of(2) {
        if let Some(d) = m.delta().as_rational() {
            if !d.is_positive() {
                return Err(Error::Parity);
            }
        }
    }
    Ok(())
}

fn target_space(source: &JetSpace) -> Result<JetSpace> {
    let t = JetSpace::zw().with_max_order(source.max_order());
    for name in [source.indep(), source.dep()] {
        if name == t.indep() || name == t.dep() {
            return Err(Error::InvalidOde(format!("source coordinates must not use `{name}`")));
        }
    }
    Ok(t)
}

/// Rewrite an equation in `(x, y)` under `x = ρ(z)`, `y = R(z) w`, using
/// `d/dx = ρ_z^{-1} d/dz`, and rescale to be monic in `w^(n)`.
pub fn pullback_fiber(ode: &Ode, g: &GroupElement) -> Result<Ode> {
    let src = ode.space();
    let tgt = target_space(src)?;
    let rho = g.rho()?;
    let inv = nonzero(&total_derivative(&rho, &tgt)?, "rho_z")?.recip();
    let mut cur = (g.scale_function()? * tgt.y()).normalize()?;
    let mut s = Substitution::new().bind(src.x(), rho)?.bind(src.y(), cur.clone())?;
    for k in 1..=ode.order() {
        cur = (&inv * total_derivative(&cur, &tgt)?).normalize()?;
        s = s.bind(src.derivative(k), cur.clone())?;
    }
    Ode::monic(s.apply(ode.lhs())?, &tgt)
}

/// `Q_n = F(ρ, R w) ρ_z + R_z/R - ((n-1)/2) ρ_zz/ρ_z`.
pub fn transformed_parameter(f: &ParamFunction, g: &GroupElement, n: u32) -> Result<ParamFunction> {
    let src = f.space();
    let tgt = target_space(src)?;
    let rho = g.rho()?;
    let r = g.scale_function()?;
    let rho_z = nonzero(&total_derivative(&rho, &tgt)?, "rho_z")?;
    let rho_zz = total_derivative(&rho_z, &tgt)?;
    let r_z = total_derivative(&r, &tgt)?;
    let moved = Substitution::new().bind(src.x(), rho)?.bind(src.y(), &r * tgt.y())?.apply(f.expr())?;
    let half = Expr::frac(i64::from(n) - 1, 2);
    let q = moved * &rho_z + r_z / &r - half * rho_zz / rho_z;
    ParamFunction::new(q, &tgt)
}

/// Which way a point transformation is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `z = Z(x, y)`, `w = W(x, y)`.
    Forward,
    /// `x = ρ(z, w)`, `y = ψ(z, w)`.
    Inverse,
}

/// A pair of component expressions in the coordinates of `space`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointTransformation {
    direction: Direction,
    first: Expr,
    second: Expr,
    space: JetSpace,
}

impl PointTransformation {
    pub fn new(direction: Direction, first: Expr, second: Expr, space: &JetSpace) -> Result<PointTransformation> {
        let first = first.normalize()?;
        let second = second.normalize()?;
        for c in [&first, &second] {
            if !only_in(c, &[space.indep(), space.dep()]) {
                return Err(Error::InvalidParameter(format!("{c} is not a function of ({}, {})", space.indep(), space.dep())));
            }
        }
        let t = PointTransformation { direction, first, second, space: space.clone() };
        nonzero(&t.jacobian()?, "the Jacobian")?;
        Ok(t)
    }

    /// `z = Z(x, y)`, `w = W(x, y)` over the `(x, y)` space.
    pub fn forward(z: Expr, w: Expr) -> Result<PointTransformation> {
        PointTransformation::new(Direction::Forward, z, w, &JetSpace::xy())
    }

    /// `x = ρ(z, w)`, `y = ψ(z, w)` over the `(z, w)` space.
    pub fn inverse(x: Expr, y: Expr) -> Result<PointTransformation> {
        PointTransformation::new(Direction::Inverse, x, y, &JetSpace::zw())
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn first(&self) -> &Expr {
        &self.first
    }

    pub fn second(&self) -> &Expr {
        &self.second
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn jacobian(&self) -> Result<Expr> {
        let (a, b) = (self.space.indep(), self.space.dep());
        let d = |e: &Expr, s: &Symbol| partial_derivative(e, s);
        (d(&self.first, a)? * d(&self.second, b)? - d(&self.first, b)? * d(&self.second, a)?).normalize()
    }
}

/// `Q_1 = (F(ρ,ψ) ψ ρ_z + ψ_z) / (w (F(ρ,ψ) ψ ρ_w + ψ_w))` for the inverse map
/// `x = ρ(z, w)`, `y = ψ(z, w)`.
pub fn transformed_parameter_first_order(f: &ParamFunction, t: &PointTransformation) -> Result<ParamFunction> {
    if t.direction() != Direction::Inverse {
        return Err(Error::InvalidParameter("expected x = rho(z,w), y = psi(z,w)".into()));
    }
    let src = f.space();
    let tgt = t.space();
    let (rho, psi) = (t.first(), t.second());
    let moved = Substitution::new().bind(src.x(), rho.clone())?.bind(src.y(), psi.clone())?.apply(f.expr())?;
    let (zn, wn) = (tgt.indep(), tgt.dep());
    let num = &moved * psi * partial_derivative(rho, zn)? + partial_derivative(psi, zn)?;
    let den = (tgt.y() * (&moved * psi * partial_derivative(rho, wn)? + partial_derivative(psi, wn)?)).normalize()?;
    if den.is_zero_literal() {
        return Err(Error::DegenerateDenominator);
    }
    ParamFunction::new(num / den, tgt)
}

/// Does the forward map `t` send solutions of `a` (in `(x, y)`) to solutions
/// of `b` (in `(z, w)`)? Computes `w^(k)` by `D_x(·)/D_x Z`, substitutes into
/// `b`, reduces modulo `a` and zero-tests the residual.
pub fn maps_to(a: &Ode, t: &PointTransformation, b: &Ode, oracle: &Oracle) -> Result<ZeroVerdict> {
    if t.direction() != Direction::Forward {
        return Err(Error::InvalidParameter("expected z = Z(x,y), w = W(x,y)".into()));
    }
    let ctx = a.space();
    let bs = b.space();
    let dz = reduce_mod(&total_derivative(t.first(), ctx)?, a)?;
    if dz.is_zero_literal() {
        return Err(Error::SingularJacobian);
    }
    let inv = dz.recip();
    let mut cur = t.second().clone();
    let mut s = Substitution::new().bind(bs.x(), t.first().clone())?.bind(bs.y(), cur.clone())?;
    for k in 1..=b.order() {
        cur = reduce_mod(&(total_derivative(&cur, ctx)? * &inv), a)?;
        s = s.bind(bs.derivative(k), cur.clone())?;
    }
    let residual = reduce_mod(&s.apply(b.lhs())?, a)?;
    is_zero(&residual, oracle)
}

/// The three reductions of a parameter function to a simpler equivalent one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalCase {
    /// `F = ε F0(a x + b, c y + d)`, `ε ≠ 0`.
    Scaled { f0: Expr, epsilon: Expr, a: Expr, b: Expr, c: Expr, d: Expr },
    /// `F = F0(x, y) + A(x) y + B(x)`; `epsilon` scales the result.
    Affine { f0: Expr, a: Expr, b: Expr, epsilon: Expr },
    /// `F = F0(x, A(x) y)`, `A ≠ 0`.
    Rescaled { f0: Expr, a: Expr },
}

fn compose_xy(e: &Expr, space: &JetSpace, x: Expr, y: Expr) -> Result<Expr> {
    Substitution::new().bind(space.x(), x)?.bind(space.y(), y)?.apply(e)
}

/// `∫_0^t f(s) ds` for `f` written in the variable `var`.
pub fn integral(f: &Expr, var: &Symbol, t: Expr) -> Result<Expr> {
    let mentions = |name: &str| {
        f.any(&|e| match e.node() {
            Node::Variable(v) | Node::Constant(v) => &**v == name,
            Node::Antiderivative { var, .. } => &**var == name,
            _ => false,
        })
    };
    let fresh: alloc::string::String = ["s", "t", "u", "v"]
        .into_iter()
        .map(alloc::string::String::from)
        .chain((1..).map(|i| format!("s{i}")))
        .find(|c| !mentions(c))
        .expect("unbounded supply of names");
    let s = fresh.as_str();
    let body = Substitution::new().bind(Expr::var_sym(var), Expr::var(s))?.apply(f)?;
    Expr::antiderivative(body, s, t).normalize()
}

impl CanonicalCase {
    /// The function `F` this case describes, in `space`.
    pub fn source(&self, space: &JetSpace) -> Result<Expr> {
        let (x, y) = (space.x(), space.y());
        match self {
            CanonicalCase::Scaled { f0, epsilon, a, b, c, d } => Ok(epsilon * compose_xy(f0, space, a * &x + b, c * &y + d)?),
            CanonicalCase::Affine { f0, a, b, .. } => Ok(f0 + a * &y + b),
            CanonicalCase::Rescaled { f0, a } => compose_xy(f0, space, x, a * y),
        }
    }

    /// The reduced function stated for this case, in `(z, w)`.
    pub fn target(&self, space: &JetSpace) -> Result<Expr> {
        let (z, w) = (z(), w());
        let at_z = |e: &Expr| Substitution::new().bind(space.x(), z.clone())?.apply(e);
        match self {
            CanonicalCase::Scaled { f0, epsilon, a, b, c, d } => {
                if c.normalize()?.is_zero_literal() {
                    Ok(Expr::zero())
                } else {
                    compose_xy(f0, space, b + a * &z / epsilon, d + &w)
                }
            }
            CanonicalCase::Affine { f0, a, b, epsilon } => {
                let r = epsilon * Expr::exp(-integral(b, space.indep(), z.clone())?);
                Ok(compose_xy(f0, space, z.clone(), &r * &w)? + r * at_z(a)? * w)
            }
            CanonicalCase::Rescaled { f0, a } => {
                let az = at_z(a)?;
                let daz = total_derivative(&az, &JetSpace::zw())?;
                Ok(compose_xy(f0, space, z, w)? - daz / az)
            }
        }
    }

    fn element(&self, f: &Expr, space: &JetSpace, n: u32) -> Result<GroupElement> {
        let zz = z();
        let at_z = |e: &Expr| Substitution::new().bind(space.x(), zz.clone())?.apply(e);
        match self {
            CanonicalCase::Scaled { epsilon, c, .. } => {
                let epsilon = nonzero(epsilon, "epsilon")?;
                if c.normalize()?.is_zero_literal() {
                    let r = Expr::exp(-integral(f, space.indep(), zz.clone())?);
                    return GroupElement::new(MoebiusMap::identity(), r);
                }
                let m = MoebiusMap::new(Expr::zero(), epsilon.recip(), Expr::one(), Expr::zero())?;
                let rho_z = total_derivative(&m.apply(&zz)?, &JetSpace::zw())?;
                let r = c.recip() * (&epsilon * rho_z).pow(Exponent::new(i64::from(n) - 1, 2));
                GroupElement::new(m, r)
            }
            CanonicalCase::Affine { b, epsilon, .. } => {
                let r = epsilon * Expr::exp(-integral(b, space.indep(), zz.clone())?);
                GroupElement::new(MoebiusMap::identity(), r)
            }
            CanonicalCase::Rescaled { a, .. } => GroupElement::new(MoebiusMap::identity(), at_z(a)?.recip()),
        }
    }
}

/// Check that `f` has the shape declared by `case`, then return the group
/// element used for the reduction and the transformed parameter function.
pub fn canonical_reduce(f: &ParamFunction, case: &CanonicalCase, n: u32) -> Result<(GroupElement, ParamFunction)> {
    if n < 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    let space = f.space();
    let declared = case.source(space)?;
    if !is_zero(&(f.expr() - &declared), &Oracle::default())?.is_zero() {
        return Err(Error::CaseMismatch(format!("{} is not {declared}", f.expr())));
    }
    if let CanonicalCase::Scaled { c, .. } = case {
        if c.normalize()?.is_zero_literal() && f.expr().depends_on(space.dep()) {
            return Err(Error::CaseMismatch("c = 0 requires F independent of y".into()));
        }
    }
    if let CanonicalCase::Rescaled { a, .. } = case {
        nonzero(a, "A")?;
    }
    let g = case.element(f.expr(), space, n)?;
    let q = transformed_parameter(f, &g, n)?;
    Ok((g, q))
}

/// `g·α = r0 α(ρ(x)) Δ^((n+1)/2) / (k4 x + k3)^(n+1)`.
pub fn subgroup_action(alpha: &Expr, r0: &Expr, m: &MoebiusMap, n: u32) -> Result<Expr> {
    check_parity(m, n)?;
    let x = JetSpace::xy().x();
    let moved = Substitution::new().bind(x.clone(), m.apply(&x)?)?.apply(alpha)?;
    let p = i64::from(n) + 1;
    (r0 * moved * m.delta().pow(Exponent::new(p, 2)) * m.denominator(&x).powi(-p)).normalize()
}

/// One of the four orbit shapes of `F = α(x) y` under the subgroup, with the
/// parameters read off `α`. Linear factors are monic in `x`, except that
/// `p x + q` in class 2 carries the rational content. `p = 0` marks a
/// constant `p x + q`; in class 4, `s = None` marks a missing `x + s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EClassLabel {
    pub j: u8,
    pub gamma: Expr,
    pub p: Option<Rational>,
    pub q: Option<Rational>,
    pub s: Option<Rational>,
    pub k3: Rational,
    pub k4: Rational,
    pub order: u32,
}

impl EClassLabel {
    /// The function `α` described by the label.
    pub fn member(&self) -> Expr {
        let x = JetSpace::xy().x();
        let lin = |a: &Rational, b: &Rational| Expr::rational(a.clone()) * &x + Expr::rational(b.clone());
        let base = lin(&self.k4, &self.k3);
        let n = i64::from(self.order);
        let one = Rational::one();
        let e = match self.j {
            1 => &self.gamma * base.powi(-(n + 1)),
            2 => &self.gamma * lin(self.p.as_ref().unwrap(), self.q.as_ref().unwrap()) * base.powi(-(n + 2)),
            3 => &self.gamma / (lin(self.p.as_ref().unwrap(), self.q.as_ref().unwrap()) * base.powi(n)),
            _ => {
                let pole = self.s.as_ref().map_or_else(Expr::one, |s| lin(&one, s));
                &self.gamma * lin(self.p.as_ref().unwrap(), self.q.as_ref().unwrap()) / (pole * base.powi(n + 1))
            }
        };
        e.normalize().expect("rational expression")
    }

    fn valid(&self) -> bool {
        let zero = Rational::zero();
        let base_ok = !(self.k3.is_zero() && self.k4.is_zero());
        base_ok
            && match self.j {
                2 | 3 => {
                    let (p, q) = (self.p.as_ref().unwrap(), self.q.as_ref().unwrap());
                    p * &self.k3 - &self.k4 * q != zero
                }
                4 => {
                    let (p, q) = (self.p.as_ref().unwrap(), self.q.as_ref().unwrap());
                    match &self.s {
                        Some(s) => p * s != *q && &self.k4 * s - &self.k3 != zero,
                        None => *p != zero,
                    }
                }
                _ => true,
            }
    }
}

/// Split off the named-constant factor of the first term.
fn constant_factor(e: &Expr) -> Result<(Expr, Expr)> {
    let first = match e.node() {
        Node::Sum(xs) => &xs[0],
        _ => e,
    };
    let factors: Vec<Expr> = match first.node() {
        Node::Product(fs) => fs.clone(),
        _ => vec![first.clone()],
    };
    let gamma = Expr::product(factors.into_iter().filter(|f| match f.node() {
        Node::Constant(_) => true,
        Node::Power(b, _) => matches!(b.node(), Node::Constant(_)),
        _ => false,
    }))
    .normalize()?;
    Ok((gamma.clone(), (e / gamma).normalize()?))
}

/// Match `α` against the four orbit shapes at order `n`. `None` when `α` has
/// an irrational or non-linear factor, a named constant anywhere but in an
/// overall factor, or no shape fits.
pub fn classify_alpha(alpha: &Expr, n: u32) -> Result<Option<EClassLabel>> {
    if n < 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    let xs = JetSpace::xy();
    let e = alpha.normalize()?;
    let opaque = e.any(&|t| matches!(t.node(), Node::Function { .. } | Node::Antiderivative { .. } | Node::Exp(_) | Node::Jet { .. }));
    if opaque || !only_in(&e, &[xs.indep()]) {
        return Err(Error::NotRational(e.to_string()));
    }
    if e.is_zero_literal() {
        return Ok(None);
    }
    let (gs, rest) = constant_factor(&e)?;
    if rest.has_constants() {
        return Ok(None);
    }
    let rf = RatFunc::from_expr(&rest, xs.indep())?;
    let (mut nroots, ncof) = rf.num.rational_roots();
    let (mut droots, dcof) = rf.den.rational_roots();
    if ncof.degree() > 0 || dcof.degree() > 0 {
        return Ok(None);
    }
    nroots.sort_by_key(|r| r.1);
    droots.sort_by_key(|r| r.1);
    let c = ncof.leading();
    let gc = |k: &Rational| (&gs * Expr::rational(k.clone())).normalize();
    let (m, one, zero) = (n, Rational::one(), Rational::zero());
    let label = |j, gamma, p, q, s, k3, k4| EClassLabel { j, gamma, p, q, s, k3, k4, order: m };
    let nums: Vec<u32> = nroots.iter().map(|r| r.1).collect();
    let dens: Vec<u32> = droots.iter().map(|r| r.1).collect();
    let found = match (nums.as_slice(), dens.as_slice()) {
        ([], []) => Some(label(1, gc(&c)?, None, None, None, one.clone(), zero.clone())),
        ([], [k]) if *k == m + 1 => Some(label(1, gc(&c)?, None, None, None, -&droots[0].0, one.clone())),
        ([], [k]) if *k == m => Some(label(3, gc(&c)?, Some(zero.clone()), Some(one.clone()), None, -&droots[0].0, one.clone())),
        ([], [k]) if *k == m + 2 => Some(label(2, gs.clone(), Some(zero.clone()), Some(c.clone()), None, -&droots[0].0, one.clone())),
        ([], [1]) => Some(label(3, gc(&c)?, Some(one.clone()), Some(-&droots[0].0), None, one.clone(), zero.clone())),
        ([], [1, k]) if *k == m => {
            Some(label(3, gc(&c)?, Some(one.clone()), Some(-&droots[0].0), None, -&droots[1].0, one.clone()))
        }
        ([1], []) => Some(label(2, gs.clone(), Some(c.clone()), Some(-&c * &nroots[0].0), None, one.clone(), zero.clone())),
        ([1], [k]) if *k == m + 2 => {
            Some(label(2, gs.clone(), Some(c.clone()), Some(-&c * &nroots[0].0), None, -&droots[0].0, one.clone()))
        }
        ([1], [1]) => Some(label(4, gc(&c)?, Some(one.clone()), Some(-&nroots[0].0), Some(-&droots[0].0), one.clone(), zero.clone())),
        ([1], [1, k]) if *k == m + 1 => Some(label(
            4,
            gc(&c)?,
            Some(one.clone()),
            Some(-&nroots[0].0),
            Some(-&droots[0].0),
            -&droots[1].0,
            one.clone(),
        )),
        ([], [1, k]) if *k == m + 1 => Some(label(
            4,
            gc(&c)?,
            Some(zero.clone()),
            Some(one.clone()),
            Some(-&droots[0].0),
            -&droots[1].0,
            one.clone(),
        )),
        ([1], [k]) if *k == m + 1 => {
            Some(label(4, gc(&c)?, Some(one.clone()), Some(-&nroots[0].0), None, -&droots[0].0, one.clone()))
        }
        _ => None,
    };
    Ok(found.filter(EClassLabel::valid))
}

/// Parameters of the class representatives `θ`, `u x + v`, `1/(u x + v)`
/// and `(x + r)/(x + s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representative {
    pub theta: Expr,
    pub u: Expr,
    pub v: Expr,
    pub r: Expr,
    pub s: Expr,
}

impl Default for Representative {
    fn default() -> Self {
        Representative { theta: Expr::one(), u: Expr::one(), v: Expr::zero(), r: Expr::one(), s: Expr::zero() }
    }
}

impl Representative {
    /// `α_j`.
    pub fn alpha(&self, j: u8) -> Result<Expr> {
        let x = JetSpace::xy().x();
        let e = match j {
            1 => self.theta.clone(),
            2 => &self.u * &x + &self.v,
            3 => (&self.u * &x + &self.v).recip(),
            4 => (&x + &self.r) / (&x + &self.s),
            _ => return Err(Error::InvalidParameter(format!("no class {j}"))),
        };
        e.normalize()
    }

    fn check(&self) -> Result<()> {
        let bad = |e: Expr| e.normalize().map(|e| e.is_zero_literal());
        if bad(self.theta.clone())? || bad(self.u.clone())? || bad(&self.r - &self.s)? {
            return Err(Error::ConstraintViolation("representatives need theta != 0, u != 0, r != s".into()));
        }
        Ok(())
    }
}

/// A subgroup element taking the representative `α_j` to the labelled
/// function, with `k3`, `k4` taken from the label.
pub fn witness_element(target: &EClassLabel, rep: &Representative) -> Result<GroupElement> {
    rep.check()?;
    let n = target.order;
    let k3 = Expr::rational(target.k3.clone());
    let k4 = Expr::rational(target.k4.clone());
    let gamma = &target.gamma;
    let opt = |v: &Option<Rational>| v.clone().map(Expr::rational).ok_or_else(|| Error::NoSolution("incomplete label".into()));
    let (k1, k2, r0) = match target.j {
        1 => {
            let (k1, k2) = if target.k4.is_zero() { (Expr::zero(), k3.recip()) } else { (&k3 - 1, Expr::one()) };
            (k1, k2, gamma / &rep.theta)
        }
        2 | 3 => {
            let (p, q) = (opt(&target.p)?, opt(&target.q)?);
            let lambda = nonzero(&(&rep.u / (&p * &k3 - &q * &k4)), "p*k3 - q*k4").map_err(|e| Error::NoSolution(e.to_string()))?;
            let k2 = (&lambda * &p - &k4 * &rep.v) / &rep.u;
            let k1 = (&lambda * &q - &k3 * &rep.v) / &rep.u;
            let omega = if target.j == 2 { gamma / &lambda } else { gamma * &lambda };
            (k1, k2, omega)
        }
        4 => {
            let (p, q) = (opt(&target.p)?, opt(&target.q)?);
            let (c, d) = target.s.clone().map_or((Expr::zero(), Expr::one()), |s| (Expr::one(), Expr::rational(s)));
            let det = (&q * &c - &p * &d).normalize()?;
            if det.is_zero_literal() {
                return Err(Error::NoSolution("proportional class-4 factors".into()));
            }
            let rs = &rep.r - &rep.s;
            let lambda = (&rs * (&c * &k3 - &d * &k4) / &det).normalize()?;
            let mu = (&rs * (&p * &k3 - &q * &k4) / &det).normalize()?;
            if lambda.is_zero_literal() || mu.is_zero_literal() {
                return Err(Error::NoSolution("degenerate class-4 parameters".into()));
            }
            let k2 = &lambda * &p - &rep.r * &k4;
            let k1 = &lambda * &q - &rep.r * &k3;
            let delta = (&lambda * (&p * &k3 - &q * &k4)).normalize()?;
            if n.is_multiple_of(2) && delta.as_rational().is_some_and(|d| !d.is_positive()) {
                return Err(Error::Parity);
            }
            let omega = gamma * mu / lambda;
            (k1, k2, omega / delta.pow(Exponent::new(i64::from(n) + 1, 2)))
        }
        j => return Err(Error::NoSolution(format!("no class {j}"))),
    };
    let m = MoebiusMap::new(k1, k2, k3, k4)?;
    GroupElement::subgroup(m, r0, n)
}
