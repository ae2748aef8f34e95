//! Chain equations `Ω_F^n[y] = 0` with `Ω_F = d/dx + F(x,y)`.
//!
//! Equations are stored expanded and normalized. [`reduce_mod`] eliminates
//! derivatives of order `>= n` using a monic equation, which is what the
//! symmetry and transformation checks need.

use alloc::format;
use alloc::string::String;

use crate::error::{Error, Result};
use crate::expr::{partial_derivative_wrt, to_text, total_derivative, Expr, JetSpace, Substitution, TextStyle};

/// An equation `lhs = 0`, monic in its highest derivative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ode {
    order: u32,
    lhs: Expr,
    space: JetSpace,
}

impl Ode {
    /// Validate `lhs = 0`: it must contain a derivative of the dependent
    /// variable and have coefficient exactly 1 on the highest one.
    pub fn new(lhs: Expr, space: &JetSpace) -> Result<Ode> {
        let lhs = lhs.normalize()?;
        let order = lhs.jet_order(space.dep());
        if order == 0 {
            return Err(Error::InvalidOde(format!("no derivative of {} in {lhs}", space.dep())));
        }
        if order > space.max_order() {
            return Err(Error::OrderOverflow { requested: order, max: space.max_order() });
        }
        let lead = partial_derivative_wrt(&lhs, &space.derivative(order))?;
        if !lead.is_one_literal() {
            return Err(Error::InvalidOde(format!("coefficient of the highest derivative is {lead}, not 1")));
        }
        Ok(Ode { order, lhs, space: space.clone() })
    }

    /// Divide by the coefficient of the highest derivative, then validate.
    pub fn monic(lhs: Expr, space: &JetSpace) -> Result<Ode> {
        let lhs = lhs.normalize()?;
        let order = lhs.jet_order(space.dep());
        if order == 0 {
            return Err(Error::InvalidOde(format!("no derivative of {} in {lhs}", space.dep())));
        }
        let top = space.derivative(order);
        let lead = partial_derivative_wrt(&lhs, &top)?;
        if lead.jet_order(space.dep()) >= order {
            return Err(Error::InvalidOde("not linear in the highest derivative".into()));
        }
        if lead.is_zero_literal() {
            return Err(Error::InvalidOde("vanishing leading coefficient".into()));
        }
        let rest = (&lhs - &lead * &top).normalize()?;
        if rest.jet_order(space.dep()) >= order {
            return Err(Error::InvalidOde("not linear in the highest derivative".into()));
        }
        Ode::new(top + (rest / lead).normalize()?, space)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn lhs(&self) -> &Expr {
        &self.lhs
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    /// `y^(n)` solved from the equation.
    pub fn solved_top(&self) -> Result<Expr> {
        (self.space.derivative(self.order) - &self.lhs).normalize()
    }

    /// Text form `lhs = 0`, grouped by jet monomial.
    pub fn to_text(&self) -> String {
        format!("{} = 0", to_text(&self.lhs, &TextStyle::equation(&self.space)))
    }
}

/// A jet-free function of the base coordinates labelling one chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamFunction {
    expr: Expr,
    space: JetSpace,
}

impl ParamFunction {
    pub fn new(expr: Expr, space: &JetSpace) -> Result<ParamFunction> {
        let expr = expr.normalize()?;
        if expr.has_jets() {
            return Err(Error::InvalidParameter(format!("{expr} contains derivatives")));
        }
        if let Some(v) = expr.free_variables().into_iter().find(|v| v != space.indep() && v != space.dep()) {
            return Err(Error::InvalidParameter(format!("{expr} depends on {v}")));
        }
        Ok(ParamFunction { expr, space: space.clone() })
    }

    /// `F(x, y)` in the `(x, y)` space.
    pub fn xy(expr: Expr) -> Result<ParamFunction> {
        ParamFunction::new(expr, &JetSpace::xy())
    }

    /// Generic opaque `name(x, y)`.
    pub fn opaque(name: &str, space: &JetSpace) -> ParamFunction {
        ParamFunction { expr: Expr::func(name, alloc::vec![space.x(), space.y()]), space: space.clone() }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }
}

/// `Ω_F[e] = D_x e + F e`.
pub fn apply_operator(f: &ParamFunction, e: &Expr, ctx: &JetSpace) -> Result<Expr> {
    (total_derivative(e, ctx)? + f.expr() * e).normalize()
}

/// `Ω_F^n[y] = 0`.
///
/// ```
/// use chainlab_core::chain::{build_chain, ParamFunction};
/// use chainlab_core::expr::parse;
/// use chainlab_core::JetSpace;
/// let ctx = JetSpace::xy();
/// let ode = build_chain(&ParamFunction::xy(parse("y^2", &ctx).unwrap()).unwrap(), 2).unwrap();
/// assert_eq!(*ode.lhs(), parse("y^5 + 4*y^2*y' + y''", &ctx).unwrap());
/// ```
pub fn build_chain(f: &ParamFunction, n: u32) -> Result<Ode> {
    if n == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    let ctx = f.space();
    if n > ctx.max_order() {
        return Err(Error::OrderOverflow { requested: n, max: ctx.max_order() });
    }
    let mut lhs = ctx.y();
    for _ in 0..n {
        lhs = apply_operator(f, &lhs, ctx)?;
    }
    Ode::new(lhs, ctx)
}

/// Which standard chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// `F = λ y`
    Riccati,
    /// `F = λ y^2`
    Abel,
}

pub fn standard_chain(kind: ChainKind, lambda: &Expr, n: u32) -> Result<Ode> {
    let ctx = JetSpace::xy();
    let y = ctx.y();
    let f = match kind {
        ChainKind::Riccati => lambda * &y,
        ChainKind::Abel => lambda * y.powi(2),
    };
    build_chain(&ParamFunction::new(f, &ctx)?, n)
}

/// Eliminate every `y^(k)`, `k >= n`, using the monic equation of order `n`.
pub fn reduce_mod(e: &Expr, ode: &Ode) -> Result<Expr> {
    let ctx = ode.space();
    let n = ode.order();
    let top = e.jet_order(ctx.dep());
    if top < n {
        return e.normalize();
    }
    let solved = ode.solved_top()?;
    let at_top = Substitution::new().bind(ctx.derivative(n), solved.clone())?;
    let mut rep = solved;
    let mut all = Substitution::new().bind(ctx.derivative(n), rep.clone())?;
    for k in n + 1..=top {
        rep = at_top.apply(&total_derivative(&rep, ctx)?)?;
        all = all.bind(ctx.derivative(k), rep.clone())?;
    }
    all.apply(e)
}

/// Divide `(e^u)^(n+1)` by `e^u` and rename `u' -> y`, `u'' -> y'`, and so on.
pub fn log_derivative_reduce(n: u32) -> Result<Ode> {
    if n == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    let ctx = JetSpace::xy();
    let uspace = JetSpace::new(ctx.indep(), "u", (n + 1).max(ctx.max_order()))?;
    let u = uspace.y();
    let mut e = Expr::exp(u.clone());
    for _ in 0..=n {
        e = total_derivative(&e, &uspace)?;
    }
    let reduced = (e * Expr::exp(-u)).normalize()?;
    let mut rename = Substitution::new();
    for k in 1..=n + 1 {
        rename = rename.bind(uspace.derivative(k), ctx.derivative(k - 1))?;
    }
    Ode::new(rename.apply(&reduced)?, &ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn ctx() -> JetSpace {
        JetSpace::xy()
    }

    fn p(s: &str) -> Expr {
        parse(s, &ctx()).unwrap()
    }

    #[test]
    fn operator_on_y() {
        let f = ParamFunction::opaque("F", &ctx());
        assert_eq!(apply_operator(&f, &ctx().y(), &ctx()).unwrap(), p("y' + F(x,y)*y"));
        let zero = ParamFunction::xy(Expr::zero()).unwrap();
        assert_eq!(apply_operator(&zero, &p("y'*x"), &ctx()).unwrap(), p("y' + x*y''"));
        let fy = ParamFunction::xy(p("y")).unwrap();
        assert_eq!(apply_operator(&fy, &p("y' + y^2"), &ctx()).unwrap(), p("y'' + 3*y*y' + y^3"));
    }

    #[test]
    fn riccati_members() {
        let one = Expr::one();
        assert_eq!(*standard_chain(ChainKind::Riccati, &one, 1).unwrap().lhs(), p("y' + y^2"));
        assert_eq!(*standard_chain(ChainKind::Riccati, &one, 2).unwrap().lhs(), p("y^3 + 3*y*y' + y''"));
        assert_eq!(
            *standard_chain(ChainKind::Riccati, &one, 3).unwrap().lhs(),
            p("y^4 + 6*y^2*y' + 3*y'^2 + 4*y*y'' + y'''")
        );
    }

    #[test]
    fn second_member_generic() {
        let ode = build_chain(&ParamFunction::opaque("F", &ctx()), 2).unwrap();
        assert_eq!(*ode.lhs(), p("y*(F(x,y)^2 + D(F,x,1)) + (2*F(x,y) + y*D(F,y,1))*y' + y''"));
        assert_eq!(ode.order(), 2);
    }

    #[test]
    fn reduction() {
        let ode = Ode::new(p("y'' + y"), &ctx()).unwrap();
        assert_eq!(reduce_mod(&p("y''"), &ode).unwrap(), p("-y"));
        assert_eq!(reduce_mod(&p("D(y,x,4) + y''' * x"), &ode).unwrap(), p("y - x*y'"));
        let chain = build_chain(&ParamFunction::opaque("F", &ctx()), 3).unwrap();
        assert!(reduce_mod(chain.lhs(), &chain).unwrap().is_zero_literal());
    }

    #[test]
    fn ode_validation() {
        assert!(matches!(Ode::new(p("x*y"), &ctx()), Err(Error::InvalidOde(_))));
        assert!(matches!(Ode::new(p("2*y'' + y"), &ctx()), Err(Error::InvalidOde(_))));
        assert_eq!(Ode::monic(p("2*y'' + y"), &ctx()).unwrap().lhs(), &p("y'' + y/2"));
        assert!(matches!(ParamFunction::xy(p("y'")), Err(Error::InvalidParameter(_))));
        assert!(matches!(ParamFunction::xy(Expr::var("z")), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn log_derivative_small_orders() {
        assert_eq!(*log_derivative_reduce(1).unwrap().lhs(), p("y' + y^2"));
        assert_eq!(*log_derivative_reduce(2).unwrap().lhs(), p("y'' + 3*y*y' + y^3"));
    }
}
