use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Signed;

use super::poly::{is_field_factor, term_expr, Factor, Mono, Poly};
use super::probe::Instantiation;
use super::{Expr, Exponent, Node};
use crate::error::{Error, Result};

/// Parameters of the numeric tier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Oracle {
    pub seed: u64,
    /// Agreeing instantiations required for a numeric zero.
    pub samples: u32,
    /// Absolute tolerance, scaled by the sum of term magnitudes when that
    /// exceeds one.
    pub tolerance: f64,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { seed: 0x5eed, samples: 8, tolerance: 1e-9 }
    }
}

impl Oracle {
    pub fn with_seed(seed: u64) -> Self {
        Oracle { seed, ..Oracle::default() }
    }

    /// Seed of the `i`-th instantiation.
    pub fn sample_seed(&self, i: u32) -> u64 {
        self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(u64::from(i).wrapping_mul(0xbf58_476d_1ce4_e5b9))
    }
}

/// Outcome of [`is_zero`].
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroVerdict {
    SymbolicZero,
    NumericZero,
    NonZero { seed: u64, value: f64 },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero { .. })
    }
}

const WITNESS_FLOOR: f64 = 1e-6;
const ATTEMPTS_PER_SAMPLE: u32 = 8;

/// Two-tier zero test: canonical form first, then seeded instantiations.
pub fn is_zero(e: &Expr, oracle: &Oracle) -> Result<ZeroVerdict> {
    let p = Poly::from_expr(e)?;
    if p.is_zero() || cleared_groups_vanish(&p)? {
        return Ok(ZeroVerdict::SymbolicZero);
    }
    let terms: Vec<Expr> = p.terms.iter().map(|(m, c)| term_expr(m, c)).collect();
    let mut zeros = 0;
    let mut tried = 0;
    let mut i = 0;
    while zeros < oracle.samples && tried < oracle.samples * ATTEMPTS_PER_SAMPLE {
        let seed = oracle.sample_seed(i);
        i += 1;
        tried += 1;
        let inst = Instantiation::new(seed);
        let mut value = 0.0;
        let mut scale = 0.0;
        let mut pole = false;
        for t in &terms {
            match inst.evaluate(t) {
                Ok(v) => {
                    value += v;
                    scale += libm::fabs(v);
                }
                Err(Error::Pole) => {
                    pole = true;
                    break;
                }
                Err(err) => return Err(err),
            }
        }
        if pole || !value.is_finite() {
            continue;
        }
        let tol = oracle.tolerance * if scale > 1.0 { scale } else { 1.0 };
        let mag = libm::fabs(value);
        if mag <= tol {
            zeros += 1;
        } else if mag > WITNESS_FLOOR {
            return Ok(ZeroVerdict::NonZero { seed, value });
        }
    }
    if zeros >= oracle.samples {
        Ok(ZeroVerdict::NumericZero)
    } else {
        Err(Error::ProbeSingular)
    }
}

/// Clear generic denominators, split by the generic part of each monomial and
/// check every field coefficient vanishes after clearing its own
/// denominators. Sound always; complete when the generic atoms are
/// algebraically independent over rational functions of the base variables.
fn cleared_groups_vanish(p: &Poly) -> Result<bool> {
    let mut den: BTreeMap<Expr, Exponent> = BTreeMap::new();
    for m in p.terms.keys() {
        for (b, e) in &m.0 {
            if e.is_negative() && matches!(b.node(), Node::Sum(_)) && !is_field_factor(b, e) {
                let slot = den.entry(b.clone()).or_insert_with(|| Exponent::from_integer(0));
                if -*e > *slot {
                    *slot = -*e;
                }
            }
        }
    }
    let cleared = if den.is_empty() { p.clone() } else { p.mul_mono(&Mono(den.into_iter().collect()))? };
    if cleared.is_zero() {
        return Ok(true);
    }
    let mut groups: BTreeMap<Mono, Poly> = BTreeMap::new();
    for (m, c) in &cleared.terms {
        let (field, generic): (Vec<Factor>, Vec<Factor>) = m.0.iter().cloned().partition(|(b, e)| is_field_factor(b, e));
        groups.entry(Mono(generic)).or_default().add_term(Mono(field), c.clone());
    }
    for g in groups.values() {
        if g.is_zero() {
            continue;
        }
        let (num, _) = g.together()?;
        if !num.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn o() -> Oracle {
        Oracle::default()
    }

    #[test]
    fn expansion_is_symbolic_zero() {
        let x = Expr::var("x");
        let e = (&x + 1).powi(2) - x.powi(2) - Expr::integer(2) * &x - 1;
        assert_eq!(is_zero(&e, &o()).unwrap(), ZeroVerdict::SymbolicZero);
    }

    #[test]
    fn rational_identity_is_symbolic_zero() {
        let x = Expr::var("x");
        let f = Expr::func("F", vec![x.clone()]);
        // F*(x/(x+1) + 1/(x+1) - 1)
        let e = &f * (&x / (&x + 1) + (&x + 1).recip() - 1);
        assert_eq!(is_zero(&e, &o()).unwrap(), ZeroVerdict::SymbolicZero);
    }

    #[test]
    fn nonzero_carries_witness() {
        let e = Expr::integer(8);
        match is_zero(&e, &o()).unwrap() {
            ZeroVerdict::NonZero { value, .. } => assert!(libm::fabs(value) > 1e-6),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn antiderivative_of_derivative_is_numeric_zero() {
        // int_0^x b'(s) ds - b(x) + b(0)
        let s = Expr::var("s");
        let x = Expr::var("x");
        let bp = Expr::func_derivative("b", vec![s], vec![1]);
        let e = Expr::antiderivative(bp, "s", x.clone()) - Expr::func("b", vec![x]) + Expr::func("b", vec![Expr::zero()]);
        assert_eq!(is_zero(&e, &o()).unwrap(), ZeroVerdict::NumericZero);
    }

    #[test]
    fn all_poles_is_probe_singular() {
        let x = Expr::var("x");
        let e = Expr::func("F", vec![x.clone()]) * (x - 3).pow(Exponent::new(1, 2));
        assert_eq!(is_zero(&e, &o()), Err(Error::ProbeSingular));
    }
}
