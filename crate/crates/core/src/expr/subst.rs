use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::calculus::partial_derivative_wrt;
use super::{symbol, Expr, Node, Symbol};
use crate::error::{Error, Result};

/// Simultaneous substitution of atoms and opaque-function heads.
///
/// A head binding `F ↦ (params, body)` replaces every instance
/// `F_{i,j,..}(a, b, ..)` by the matching partial derivative of `body`,
/// evaluated at the instance's arguments.
///
/// ```
/// use chainlab_core::expr::{parse, Substitution};
/// use chainlab_core::{Expr, JetSpace};
/// let ctx = JetSpace::xy();
/// let e = parse("y' + F(x,y)*y", &ctx).unwrap();
/// let s = Substitution::new().bind_function("F", &["x", "y"], parse("y^2", &ctx).unwrap()).unwrap();
/// assert_eq!(s.apply(&e).unwrap(), parse("y' + y^3", &ctx).unwrap());
/// ```
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    atoms: BTreeMap<Expr, Expr>,
    heads: BTreeMap<Symbol, (Vec<Symbol>, Expr)>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bind a base variable, jet variable or named constant.
    pub fn bind(mut self, atom: Expr, value: Expr) -> Result<Self> {
        match atom.node() {
            Node::Variable(_) | Node::Constant(_) | Node::Jet { .. } => {}
            _ => return Err(Error::InvalidParameter(format!("{atom} is not a substitutable atom"))),
        }
        if self.atoms.contains_key(&atom) {
            return Err(Error::InconsistentBinding(atom.to_string()));
        }
        self.atoms.insert(atom, value);
        Ok(self)
    }

    /// Bind an opaque-function head to a body in the formal parameters.
    pub fn bind_function(mut self, name: &str, params: &[&str], body: Expr) -> Result<Self> {
        let key = symbol(name);
        if self.heads.contains_key(&key) {
            return Err(Error::InconsistentBinding(name.to_string()));
        }
        self.heads.insert(key, (params.iter().map(|p| symbol(p)).collect(), body.normalize()?));
        Ok(self)
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.heads.is_empty()
    }

    /// Apply and normalize.
    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        if self.is_empty() {
            return e.normalize();
        }
        let mut memo = BTreeMap::new();
        self.go(e, &mut Vec::new(), &mut memo)?.normalize()
    }

    fn lookup_atom(&self, e: &Expr, bound: &[Symbol]) -> Option<Expr> {
        match e.node() {
            Node::Variable(v) if bound.contains(v) => None,
            Node::Jet { order, var } => {
                if let Some(v) = self.atoms.get(e) {
                    return Some(v.clone());
                }
                // renaming the dependent variable carries its jets along
                match self.atoms.get(&Expr::var_sym(var))?.node() {
                    Node::Variable(w) => Some(Expr::jet_sym(w, *order)),
                    _ => None,
                }
            }
            _ => self.atoms.get(e).cloned(),
        }
    }

    fn go(&self, e: &Expr, bound: &mut Vec<Symbol>, memo: &mut BTreeMap<Expr, Expr>) -> Result<Expr> {
        let cacheable = bound.is_empty();
        if cacheable {
            if let Some(r) = memo.get(e) {
                return Ok(r.clone());
            }
        }
        let out = match e.node() {
            Node::Rational(_) => e.clone(),
            Node::Variable(_) | Node::Constant(_) | Node::Jet { .. } => {
                self.lookup_atom(e, bound).unwrap_or_else(|| e.clone())
            }
            Node::Function { name, derivs, args } => {
                let new_args = args.iter().map(|a| self.go(a, bound, memo)).collect::<Result<Vec<_>>>()?;
                match self.heads.get(name) {
                    Some((params, body)) => {
                        if params.len() != args.len() {
                            return Err(Error::Arity(name.to_string()));
                        }
                        let mut d = body.clone();
                        for (p, k) in params.iter().zip(derivs) {
                            let pv = Expr::var_sym(p);
                            for _ in 0..*k {
                                d = partial_derivative_wrt(&d, &pv)?;
                            }
                        }
                        let mut s = Substitution::new();
                        for (p, a) in params.iter().zip(new_args) {
                            s = s.bind(Expr::var_sym(p), a)?;
                        }
                        s.apply(&d)?
                    }
                    None => Expr::from_node(Node::Function {
                        name: name.clone(),
                        derivs: derivs.clone(),
                        args: new_args,
                    }),
                }
            }
            Node::Antiderivative { integrand, var, at } => {
                let at = self.go(at, bound, memo)?;
                bound.push(var.clone());
                let integrand = self.go(integrand, bound, memo);
                bound.pop();
                Expr::from_node(Node::Antiderivative { integrand: integrand?, var: var.clone(), at })
            }
            Node::Exp(a) => Expr::exp(self.go(a, bound, memo)?),
            Node::Power(b, q) => self.go(b, bound, memo)?.pow(*q),
            Node::Product(xs) => {
                Expr::product(xs.iter().map(|x| self.go(x, bound, memo)).collect::<Result<Vec<_>>>()?)
            }
            Node::Sum(xs) => Expr::sum(xs.iter().map(|x| self.go(x, bound, memo)).collect::<Result<Vec<_>>>()?),
        };
        if cacheable && !matches!(e.node(), Node::Sum(_) | Node::Product(_)) {
            memo.insert(e.clone(), out.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn renaming_carries_jets() {
        let y = Expr::var("y");
        let e = Expr::jet("y", 1) + y.powi(2);
        let s = Substitution::new().bind(y, Expr::var("w")).unwrap();
        let expect = (Expr::jet("w", 1) + Expr::var("w").powi(2)).normalize().unwrap();
        assert_eq!(s.apply(&e).unwrap(), expect);
    }

    #[test]
    fn duplicate_binding_is_rejected() {
        let s = Substitution::new().bind(Expr::var("y"), Expr::one()).unwrap();
        assert!(matches!(s.bind(Expr::var("y"), Expr::zero()), Err(Error::InconsistentBinding(_))));
    }

    #[test]
    fn simultaneous_swap() {
        let (x, y) = (Expr::var("x"), Expr::var("y"));
        let s = Substitution::new().bind(x.clone(), y.clone()).unwrap().bind(y.clone(), x.clone()).unwrap();
        let e = &x - Expr::integer(2) * &y;
        assert_eq!(s.apply(&e).unwrap(), (y - Expr::integer(2) * x).normalize().unwrap());
    }

    #[test]
    fn head_binding_differentiates_body() {
        let (x, y) = (Expr::var("x"), Expr::var("y"));
        let fy = Expr::func_derivative("F", vec![x.clone(), y.clone()], vec![0, 1]);
        let s = Substitution::new().bind_function("F", &["x", "y"], &x * y.powi(3)).unwrap();
        assert_eq!(s.apply(&fy).unwrap(), (Expr::integer(3) * x * y.powi(2)).normalize().unwrap());
    }

    #[test]
    fn bound_variable_is_untouched() {
        let s_ = Expr::var("s");
        let a = Expr::antiderivative(Expr::func("b", vec![s_.clone()]), "s", Expr::var("x"));
        let s = Substitution::new().bind(s_, Expr::integer(7)).unwrap();
        assert_eq!(s.apply(&a).unwrap(), a.normalize().unwrap());
    }
}
