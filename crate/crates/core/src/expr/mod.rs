//! Symbolic expressions over exact rationals, jet coordinates and opaque
//! functions.
//!
//! An [`Expr`] is an immutable, reference-counted tree. Builders (`+`, `*`,
//! [`Expr::pow`], ...) produce raw trees; [`Expr::normalize`] maps any tree to
//! its canonical expanded form. Every other kernel operation returns
//! normalized output.

mod calculus;
mod parse;
pub(crate) mod poly;
mod print;
mod probe;
mod subst;
mod zero;

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub use calculus::{partial_derivative, partial_derivative_wrt, total_derivative};
pub use parse::{parse, parse_equation};
pub use print::{to_text, TextStyle};
pub use probe::{numeric_probe, Instantiation};
pub use subst::Substitution;
pub use zero::{is_zero, Oracle, ZeroVerdict};

/// Exact rational used for coefficients and constants.
pub type Rational = BigRational;
/// Exact rational used for exponents.
pub type Exponent = Rational64;
/// Interned-by-refcount identifier.
pub type Symbol = Arc<str>;

pub fn symbol(name: &str) -> Symbol {
    Arc::from(name)
}

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Node of an expression tree.
///
/// Variant order is the atom ordering used by the canonical form:
/// constants < named constants < base variables < jet variables (by order)
/// < opaque functions (by name, multi-index) < antiderivatives < exponentials
/// < compound nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Rational(Rational),
    Constant(Symbol),
    Variable(Symbol),
    /// `order`-th derivative of the dependent variable `var`; `order >= 1`.
    Jet { order: u32, var: Symbol },
    /// Opaque function applied to `args`, differentiated `derivs[i]` times in
    /// slot `i`.
    Function { name: Symbol, derivs: Vec<u32>, args: Vec<Expr> },
    /// A function of `at` whose derivative is `integrand` (written in `var`),
    /// integration constant zero.
    Antiderivative { integrand: Expr, var: Symbol, at: Expr },
    Exp(Expr),
    Power(Expr, Exponent),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
}

struct Inner {
    node: Node,
    normal: bool,
}

/// Immutable symbolic expression.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl Expr {
    fn build(node: Node, normal: bool) -> Expr {
        Expr(Arc::new(Inner { node, normal }))
    }

    pub(crate) fn normal(node: Node) -> Expr {
        Expr::build(node, true)
    }

    pub fn from_node(node: Node) -> Expr {
        let normal = matches!(node, Node::Constant(_) | Node::Variable(_) | Node::Jet { .. } | Node::Rational(_));
        Expr::build(node, normal)
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub(crate) fn is_normal(&self) -> bool {
        self.0.normal
    }

    pub fn rational(q: Rational) -> Expr {
        Expr::from_node(Node::Rational(q))
    }

    pub fn integer(n: i64) -> Expr {
        Expr::rational(integer(n))
    }

    pub fn frac(num: i64, den: i64) -> Expr {
        Expr::rational(rational(num, den))
    }

    pub fn zero() -> Expr {
        Expr::integer(0)
    }

    pub fn one() -> Expr {
        Expr::integer(1)
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_node(Node::Variable(symbol(name)))
    }

    pub fn var_sym(name: &Symbol) -> Expr {
        Expr::from_node(Node::Variable(name.clone()))
    }

    pub fn constant(name: &str) -> Expr {
        Expr::from_node(Node::Constant(symbol(name)))
    }

    /// `order`-th derivative of `var`; order zero is the variable itself.
    pub fn jet(var: &str, order: u32) -> Expr {
        Expr::jet_sym(&symbol(var), order)
    }

    pub fn jet_sym(var: &Symbol, order: u32) -> Expr {
        if order == 0 {
            Expr::var_sym(var)
        } else {
            Expr::from_node(Node::Jet { order, var: var.clone() })
        }
    }

    pub fn func(name: &str, args: Vec<Expr>) -> Expr {
        let derivs = alloc::vec![0; args.len()];
        Expr::func_derivative(name, args, derivs)
    }

    pub fn func_derivative(name: &str, args: Vec<Expr>, derivs: Vec<u32>) -> Expr {
        assert_eq!(args.len(), derivs.len(), "multi-index length must match arity");
        Expr::from_node(Node::Function { name: symbol(name), derivs, args })
    }

    pub fn antiderivative(integrand: Expr, var: &str, at: Expr) -> Expr {
        Expr::from_node(Node::Antiderivative { integrand, var: symbol(var), at })
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::from_node(Node::Exp(arg))
    }

    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        Expr::from_node(Node::Sum(terms.into_iter().collect()))
    }

    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        Expr::from_node(Node::Product(factors.into_iter().collect()))
    }

    pub fn pow(&self, exponent: Exponent) -> Expr {
        Expr::from_node(Node::Power(self.clone(), exponent))
    }

    pub fn powi(&self, exponent: i64) -> Expr {
        self.pow(Exponent::from_integer(exponent))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self.node() {
            Node::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// True for the literal zero. Use [`Expr::normalize`] first for a
    /// semantic check.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self.node(), Node::Rational(q) if q.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self.node(), Node::Rational(q) if q.is_one())
    }

    /// Canonical expanded form.
    pub fn normalize(&self) -> Result<Expr> {
        if self.is_normal() {
            return Ok(self.clone());
        }
        poly::Poly::from_expr(self)?.into_normal()
    }

    /// Visit every node, outermost first.
    pub fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self.node() {
            Node::Function { args, .. } => args.iter().for_each(|a| a.walk(f)),
            Node::Antiderivative { integrand, at, .. } => {
                integrand.walk(f);
                at.walk(f);
            }
            Node::Exp(a) | Node::Power(a, _) => a.walk(f),
            Node::Sum(xs) | Node::Product(xs) => xs.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if !found && pred(e) {
                found = true;
            }
        });
        found
    }

    /// Highest jet order of `var` present, 0 if none.
    pub fn jet_order(&self, var: &Symbol) -> u32 {
        let mut max = 0;
        self.walk(&mut |e| {
            if let Node::Jet { order, var: v } = e.node() {
                if v == var && *order > max {
                    max = *order;
                }
            }
        });
        max
    }

    pub fn has_jets(&self) -> bool {
        self.any(&|e| matches!(e.node(), Node::Jet { .. }))
    }

    /// Does the expression depend on the symbol (as variable or constant)?
    /// Bound integration variables are not reported.
    pub fn depends_on(&self, name: &Symbol) -> bool {
        match self.node() {
            Node::Variable(v) | Node::Constant(v) => v == name,
            Node::Jet { var, .. } => var == name,
            Node::Rational(_) => false,
            Node::Function { args, .. } => args.iter().any(|a| a.depends_on(name)),
            Node::Antiderivative { integrand, var, at } => {
                at.depends_on(name) || (var != name && integrand.depends_on(name))
            }
            Node::Exp(a) | Node::Power(a, _) => a.depends_on(name),
            Node::Sum(xs) | Node::Product(xs) => xs.iter().any(|a| a.depends_on(name)),
        }
    }

    /// Names of free base variables; bound integration variables excluded.
    pub fn free_variables(&self) -> alloc::collections::BTreeSet<Symbol> {
        fn go(e: &Expr, bound: &mut Vec<Symbol>, out: &mut alloc::collections::BTreeSet<Symbol>) {
            match e.node() {
                Node::Variable(v) if !bound.contains(v) => {
                    out.insert(v.clone());
                }
                Node::Antiderivative { integrand, var, at } => {
                    go(at, bound, out);
                    bound.push(var.clone());
                    go(integrand, bound, out);
                    bound.pop();
                }
                Node::Function { args: xs, .. } | Node::Sum(xs) | Node::Product(xs) => {
                    xs.iter().for_each(|a| go(a, bound, out))
                }
                Node::Exp(a) | Node::Power(a, _) => go(a, bound, out),
                _ => {}
            }
        }
        let mut out = alloc::collections::BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Does a named constant occur anywhere?
    pub fn has_constants(&self) -> bool {
        self.any(&|e| matches!(e.node(), Node::Constant(_)))
    }

    pub fn contains_function(&self, name: &str) -> bool {
        self.any(&|e| matches!(e.node(), Node::Function { name: n, .. } if &**n == name))
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.node.hash(state)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self, &TextStyle::default()))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self, &TextStyle::default()))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::integer(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Expr {
        Expr::rational(q)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.$method(rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.clone().$method(rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.clone().$method(rhs.clone())
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                self.$method(Expr::integer(rhs))
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                self.clone().$method(Expr::integer(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, |a, b| Expr::sum([a, Expr::product([Expr::integer(-1), b])]));
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, |a, b| Expr::product([a, b.recip()]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::integer(-1), self])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

/// Coordinates for total differentiation: one independent and one dependent
/// variable, with jets up to `max_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSpace {
    indep: Symbol,
    dep: Symbol,
    max_order: u32,
}

impl JetSpace {
    pub const DEFAULT_MAX_ORDER: u32 = 32;

    pub fn new(indep: &str, dep: &str, max_order: u32) -> Result<JetSpace> {
        if max_order == 0 {
            return Err(Error::InvalidJetSpace("maximum order must be at least 1".into()));
        }
        if indep == dep {
            return Err(Error::InvalidJetSpace("variable names must be distinct".into()));
        }
        Ok(JetSpace { indep: symbol(indep), dep: symbol(dep), max_order })
    }

    /// `(x, y)` with the default order bound.
    pub fn xy() -> JetSpace {
        JetSpace::new("x", "y", Self::DEFAULT_MAX_ORDER).unwrap()
    }

    /// `(z, w)` with the default order bound.
    pub fn zw() -> JetSpace {
        JetSpace::new("z", "w", Self::DEFAULT_MAX_ORDER).unwrap()
    }

    pub fn indep(&self) -> &Symbol {
        &self.indep
    }

    pub fn dep(&self) -> &Symbol {
        &self.dep
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn x(&self) -> Expr {
        Expr::var_sym(&self.indep)
    }

    pub fn y(&self) -> Expr {
        Expr::var_sym(&self.dep)
    }

    /// `y^(k)`; `k = 0` gives `y`.
    pub fn derivative(&self, k: u32) -> Expr {
        Expr::jet_sym(&self.dep, k)
    }

    pub fn with_max_order(&self, max_order: u32) -> JetSpace {
        JetSpace { max_order, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_order_follows_categories() {
        let c = Expr::constant("k");
        let x = Expr::var("x");
        let y1 = Expr::jet("y", 1);
        let y2 = Expr::jet("y", 2);
        let f = Expr::func("F", alloc::vec![x.clone()]);
        let a = Expr::antiderivative(x.clone(), "x", x.clone());
        assert!(Expr::integer(5) < c);
        assert!(c < x);
        assert!(x < y1);
        assert!(y1 < y2);
        assert!(y2 < f);
        assert!(f < a);
    }

    #[test]
    fn order_zero_jet_is_the_variable() {
        assert_eq!(Expr::jet("y", 0), Expr::var("y"));
    }

    #[test]
    fn jet_space_rejects_bad_input() {
        assert!(JetSpace::new("x", "x", 3).is_err());
        assert!(JetSpace::new("x", "y", 0).is_err());
    }
}
