//! Dense univariate polynomials over the rationals, with rational-root
//! extraction. Used to read linear factors off rational functions of `x`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::{Expr, Node, Rational, Symbol};

/// Coefficients from the constant term upward, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct UPoly(Vec<Rational>);

impl UPoly {
    pub(crate) fn zero() -> UPoly {
        UPoly(Vec::new())
    }

    pub(crate) fn constant(c: Rational) -> UPoly {
        UPoly::new(vec![c])
    }

    pub(crate) fn x() -> UPoly {
        UPoly::new(vec![Rational::zero(), Rational::one()])
    }

    pub(crate) fn new(mut coeffs: Vec<Rational>) -> UPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has degree 0 here.
    pub(crate) fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub(crate) fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub(crate) fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub(crate) fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub(crate) fn scale(&self, k: &Rational) -> UPoly {
        UPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub(crate) fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub(crate) fn pow(&self, k: u32) -> UPoly {
        let mut acc = UPoly::constant(Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub(crate) fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.0.clone();
        let dd = d.degree();
        let lead = d.leading();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    rem[i + j] -= &c * dj;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot), UPoly::new(rem))
    }

    pub(crate) fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    /// Monic greatest common divisor.
    pub(crate) fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub(crate) fn eval(&self, t: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    /// Rational roots with multiplicities, and the cofactor free of them.
    pub(crate) fn rational_roots(&self) -> (Vec<(Rational, u32)>, UPoly) {
        let mut rest = self.clone();
        let mut roots = Vec::new();
        if rest.degree() == 0 {
            return (roots, rest);
        }
        let mut zeros = 0;
        while rest.degree() > 0 && rest.coeff(0).is_zero() {
            rest = UPoly::new(rest.0[1..].to_vec());
            zeros += 1;
        }
        if zeros > 0 {
            roots.push((Rational::zero(), zeros));
        }
        if rest.degree() == 0 {
            return (roots, rest);
        }
        let ints = rest.integer_coefficients();
        let lows = divisors(&ints[0]);
        let highs = divisors(ints.last().unwrap());
        for p in &lows {
            for q in &highs {
                for sign in [1, -1] {
                    if rest.degree() == 0 {
                        return (roots, rest);
                    }
                    let cand = Rational::new(p * BigInt::from(sign), q.clone());
                    if *cand.denom() != *q {
                        continue;
                    }
                    let linear = UPoly::new(vec![-cand.clone(), Rational::one()]);
                    let mut mult = 0;
                    while rest.degree() > 0 && rest.eval(&cand).is_zero() {
                        rest = rest.div_rem(&linear).0;
                        mult += 1;
                    }
                    if mult > 0 {
                        roots.push((cand, mult));
                    }
                }
            }
        }
        (roots, rest)
    }

    /// Primitive integer multiple of the coefficients.
    fn integer_coefficients(&self) -> Vec<BigInt> {
        let lcm = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        ints.into_iter().map(|c| c / &g).collect()
    }
}

/// Positive divisors of a nonzero integer.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let root = n.sqrt();
    let mut d = BigInt::one();
    while d <= root {
        if (&n % &d).is_zero() {
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// A rational function `num / den` in one variable, in lowest terms with a
/// monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RatFunc {
    pub(crate) num: UPoly,
    pub(crate) den: UPoly,
}

impl RatFunc {
    fn new(num: UPoly, den: UPoly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den);
        let g = if g.is_zero() { UPoly::constant(Rational::one()) } else { g };
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading();
        Ok(RatFunc { num: num.scale(&(Rational::one() / &lead)), den: den.monic() })
    }

    fn poly(p: UPoly) -> RatFunc {
        RatFunc { num: p, den: UPoly::constant(Rational::one()) }
    }

    fn add(&self, o: &RatFunc) -> Result<RatFunc> {
        RatFunc::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    fn mul(&self, o: &RatFunc) -> Result<RatFunc> {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    fn powi(&self, k: i64) -> Result<RatFunc> {
        let e = u32::try_from(k.unsigned_abs()).map_err(|_| Error::NotRational("exponent too large".into()))?;
        if k >= 0 {
            RatFunc::new(self.num.pow(e), self.den.pow(e))
        } else {
            RatFunc::new(self.den.pow(e), self.num.pow(e))
        }
    }

    /// Read an expression built from rationals, the variable `var`, sums,
    /// products and integer powers.
    pub(crate) fn from_expr(e: &Expr, var: &Symbol) -> Result<RatFunc> {
        let not_rational = || Error::NotRational(alloc::format!("{e}"));
        match e.node() {
            Node::Rational(q) => Ok(RatFunc::poly(UPoly::constant(q.clone()))),
            Node::Variable(v) if v == var => Ok(RatFunc::poly(UPoly::x())),
            Node::Sum(xs) => xs.iter().try_fold(RatFunc::poly(UPoly::zero()), |acc, t| acc.add(&RatFunc::from_expr(t, var)?)),
            Node::Product(xs) => xs
                .iter()
                .try_fold(RatFunc::poly(UPoly::constant(Rational::one())), |acc, t| acc.mul(&RatFunc::from_expr(t, var)?)),
            Node::Power(b, q) if q.is_integer() => RatFunc::from_expr(b, var)?.powi(*q.numer()),
            _ => Err(not_rational()),
        }
    }
}
