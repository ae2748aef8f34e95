//! Canonical form: expanded sums of monomials with exact rational
//! coefficients.
//!
//! A monomial is a sorted list of `(base, exponent)` factors. Bases are
//! atoms, canonical sums (only with negative exponents or exponents in
//! `(0, 1)`; positive integer powers of sums are always expanded), or
//! rational constants with an exponent in `(0, 1)`. At most one `exp(..)`
//! factor occurs per monomial. A sum raised to a negative or fractional power
//! is first put over a common denominator; the numerator is then made
//! primitive (monomial content removed, integer coefficients with gcd 1 and a
//! positive last term).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use super::{Expr, Exponent, Node, Rational, Symbol};
use crate::error::{Error, Result};

pub(crate) type Factor = (Expr, Exponent);

pub(crate) fn exponent_to_rational(e: &Exponent) -> Rational {
    Rational::new(BigInt::from(*e.numer()), BigInt::from(*e.denom()))
}

/// Monomial with the canonical term order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct Mono(pub(crate) Vec<Factor>);

impl Mono {
    pub(crate) fn one() -> Mono {
        Mono(Vec::new())
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn jet_range(&self) -> (usize, usize) {
        let lo = self.0.partition_point(|(b, _)| rank(b) < 3);
        let hi = self.0.partition_point(|(b, _)| rank(b) <= 3);
        (lo, hi)
    }

    pub(crate) fn exponent_of(&self, base: &Expr) -> Option<Exponent> {
        self.0
            .binary_search_by(|(b, _)| b.cmp(base))
            .ok()
            .map(|i| self.0[i].1)
    }
}

fn rank(e: &Expr) -> u8 {
    match e.node() {
        Node::Rational(_) => 0,
        Node::Constant(_) => 1,
        Node::Variable(_) => 2,
        Node::Jet { .. } => 3,
        Node::Function { .. } => 4,
        Node::Antiderivative { .. } => 5,
        Node::Exp(_) => 6,
        Node::Power(..) => 7,
        Node::Product(_) => 8,
        Node::Sum(_) => 9,
    }
}

fn cmp_desc<'a>(
    mut a: impl Iterator<Item = &'a Factor>,
    mut b: impl Iterator<Item = &'a Factor>,
) -> Ordering {
    loop {
        match (a.next(), b.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                let c = x.0.cmp(&y.0).then(x.1.cmp(&y.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
        }
    }
}

impl Ord for Mono {
    // Jet part first (compared from the largest factor down), then the rest.
    fn cmp(&self, other: &Self) -> Ordering {
        let (alo, ahi) = self.jet_range();
        let (blo, bhi) = other.jet_range();
        let a = &self.0;
        let b = &other.0;
        cmp_desc(a[alo..ahi].iter().rev(), b[blo..bhi].iter().rev()).then_with(|| {
            cmp_desc(
                a[ahi..].iter().rev().chain(a[..alo].iter().rev()),
                b[bhi..].iter().rev().chain(b[..blo].iter().rev()),
            )
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of canonicalizing a raw factor list.
struct Settled {
    coef: Rational,
    mono: Mono,
    expand: Vec<(Expr, u32)>,
}

fn exact_root(c: &BigInt, n: u32) -> Option<BigInt> {
    if c.is_negative() {
        return None;
    }
    let r = c.nth_root(n);
    if Pow::pow(&r, n) == *c {
        Some(r)
    } else {
        None
    }
}

fn rational_pow_int(c: &Rational, k: i64) -> Result<Rational> {
    if k < 0 && c.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let k32 = i32::try_from(k).map_err(|_| Error::DivisionByZero)?;
    Ok(Pow::pow(c, k32))
}

/// `c^e` as a rational coefficient times an optional radical factor.
fn radical(c: &Rational, e: Exponent) -> Result<(Rational, Option<Factor>)> {
    if c.is_zero() {
        return if e > Exponent::zero() {
            Ok((Rational::zero(), None))
        } else {
            Err(Error::DivisionByZero)
        };
    }
    if c.is_one() {
        return Ok((Rational::one(), None));
    }
    if e.is_integer() {
        return Ok((rational_pow_int(c, e.to_integer())?, None));
    }
    let k = e.floor();
    let frac = e - k;
    let mut coef = rational_pow_int(c, k.to_integer())?;
    let den = u32::try_from(*frac.denom()).map_err(|_| Error::DivisionByZero)?;
    let num = *frac.numer();
    if c.is_positive() {
        if let (Some(rn), Some(rd)) = (exact_root(c.numer(), den), exact_root(c.denom(), den)) {
            let root = Rational::new(rn, rd);
            coef *= rational_pow_int(&root, num)?;
            return Ok((coef, None));
        }
    }
    Ok((coef, Some((Expr::normal(Node::Rational(c.clone())), frac))))
}

fn sort_merge(mut raw: Vec<Factor>) -> Vec<Factor> {
    raw.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<Factor> = Vec::with_capacity(raw.len());
    for (b, e) in raw {
        match out.last_mut() {
            Some(last) if last.0 == b => last.1 += e,
            _ => out.push((b, e)),
        }
    }
    out
}

/// Canonicalize a sorted, merged factor list.
fn settle(raw: Vec<Factor>) -> Result<Settled> {
    let mut coef = Rational::one();
    let mut factors: Vec<Factor> = Vec::with_capacity(raw.len());
    let mut expand = Vec::new();
    let mut exps: Vec<Factor> = Vec::new();
    let mut resort = false;
    for (base, e) in raw {
        if e.is_zero() {
            continue;
        }
        match base.node() {
            Node::Rational(c) => {
                let (k, f) = radical(c, e)?;
                coef *= k;
                if let Some(f) = f {
                    factors.push(f);
                }
            }
            Node::Exp(_) => exps.push((base, e)),
            Node::Sum(_) => {
                let one = Exponent::one();
                if e >= one {
                    let k = e.floor();
                    expand.push((base.clone(), k.to_integer() as u32));
                    let frac = e - k;
                    if !frac.is_zero() {
                        factors.push((base, frac));
                    }
                } else {
                    factors.push((base, e));
                }
            }
            _ => factors.push((base, e)),
        }
    }
    match exps.len() {
        0 => {}
        1 if exps[0].1.is_one() => factors.push(exps.pop().unwrap()),
        _ => {
            let mut arg = Poly::zero();
            for (b, e) in &exps {
                if let Node::Exp(a) = b.node() {
                    arg = arg.add(&Poly::from_nf(a).scale(&exponent_to_rational(e)));
                }
            }
            if !arg.is_zero() {
                factors.push((Expr::normal(Node::Exp(arg.to_expr())), Exponent::one()));
                resort = true;
            }
        }
    }
    if resort || factors.windows(2).any(|w| w[0].0 >= w[1].0) {
        factors = sort_merge(factors);
        factors.retain(|(_, e)| !e.is_zero());
    }
    Ok(Settled { coef, mono: Mono(factors), expand })
}

fn merge(a: &[Factor], b: &[Factor]) -> Vec<Factor> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn needs_settle(f: &[Factor]) -> bool {
    let mut n_exp = 0;
    for (b, e) in f {
        match b.node() {
            Node::Rational(_) => {
                if *e >= Exponent::one() || *e <= Exponent::zero() {
                    return true;
                }
            }
            Node::Exp(_) => {
                n_exp += 1;
                if !e.is_one() {
                    return true;
                }
            }
            Node::Sum(_) if *e >= Exponent::one() => return true,
            _ => {}
        }
        if e.is_zero() {
            return true;
        }
    }
    n_exp > 1
}

/// Sparse polynomial over atoms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct Poly {
    pub(crate) terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    pub(crate) fn zero() -> Poly {
        Poly::default()
    }

    pub(crate) fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub(crate) fn constant(q: Rational) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Mono::one(), q);
        p
    }

    /// `base^1` for a normalized atom.
    pub(crate) fn atom(e: Expr) -> Poly {
        Poly::from_mono(Rational::one(), Mono(vec![(e, Exponent::one())]))
    }

    pub(crate) fn from_mono(c: Rational, m: Mono) -> Poly {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn add_assign(&mut self, other: Poly) {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
    }

    pub(crate) fn neg(&self) -> Poly {
        self.scale(&-Rational::one())
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub(crate) fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    /// Product of two monomials, as a polynomial (expansions may occur).
    fn mono_product(a: &Mono, b: &Mono, coef: Rational, out: &mut Poly) -> Result<()> {
        let raw = if a.is_one() {
            b.0.clone()
        } else if b.is_one() {
            a.0.clone()
        } else {
            merge(&a.0, &b.0)
        };
        Poly::push_raw(raw, coef, out)
    }

    fn push_raw(raw: Vec<Factor>, coef: Rational, out: &mut Poly) -> Result<()> {
        if !needs_settle(&raw) {
            out.add_term(Mono(raw), coef);
            return Ok(());
        }
        let s = settle(raw)?;
        let c = coef * s.coef;
        if c.is_zero() {
            return Ok(());
        }
        if s.expand.is_empty() {
            out.add_term(s.mono, c);
        } else {
            let mut p = Poly::from_mono(c, s.mono);
            for (base, k) in s.expand {
                p = p.mul(&Poly::from_nf(&base).pow_int(k)?)?;
            }
            out.add_assign(p);
        }
        Ok(())
    }

    pub(crate) fn mul(&self, other: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                Poly::mono_product(ma, mb, ca * cb, &mut out)?;
            }
        }
        Ok(out)
    }

    pub(crate) fn mul_mono(&self, m: &Mono) -> Result<Poly> {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            Poly::mono_product(ma, m, ca.clone(), &mut out)?;
        }
        Ok(out)
    }

    pub(crate) fn pow_int(&self, k: u32) -> Result<Poly> {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    fn mono_pow(c: &Rational, m: &Mono, q: Exponent) -> Result<Poly> {
        let (coef, rad) = radical(c, q)?;
        let mut raw: Vec<Factor> = m.0.iter().map(|(b, e)| (b.clone(), *e * q)).collect();
        if let Some(r) = rad {
            raw.push(r);
            raw = sort_merge(raw);
        }
        let mut out = Poly::zero();
        Poly::push_raw(raw, coef, &mut out)?;
        Ok(out)
    }

    pub(crate) fn pow(&self, q: Exponent) -> Result<Poly> {
        if q.is_zero() {
            return Ok(Poly::one());
        }
        if self.is_zero() {
            return if q > Exponent::zero() { Ok(Poly::zero()) } else { Err(Error::DivisionByZero) };
        }
        if q.is_integer() && q > Exponent::zero() {
            return self.pow_int(q.to_integer() as u32);
        }
        if self.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return Poly::mono_pow(c, m, q);
        }
        let (num, den) = self.together()?;
        let np = if num.len() == 1 {
            let (m, c) = num.terms.iter().next().unwrap();
            Poly::mono_pow(c, m, q)?
        } else {
            num.primitive_pow(q)?
        };
        if den.is_one() {
            Ok(np)
        } else {
            np.mul(&Poly::mono_pow(&Rational::one(), &den, -q)?)
        }
    }

    /// `self^q` for a multi-term polynomial free of negative exponents.
    fn primitive_pow(&self, q: Exponent) -> Result<Poly> {
        // monomial content
        let mut iter = self.terms.keys();
        let first = iter.next().unwrap();
        let mut content: Vec<Factor> = first.0.iter().filter(|(_, e)| *e > Exponent::zero()).cloned().collect();
        for m in iter {
            content.retain_mut(|(b, e)| match m.exponent_of(b) {
                Some(f) if f > Exponent::zero() => {
                    if f < *e {
                        *e = f;
                    }
                    true
                }
                _ => false,
            });
            if content.is_empty() {
                break;
            }
        }
        // Only exponents that divide cleanly out of every term.
        content.retain(|(b, _)| !matches!(b.node(), Node::Exp(_) | Node::Rational(_)));
        let content = Mono(content);
        // numeric content
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        let mut k = Rational::new(num_gcd, den_lcm);
        let last_negative = self.terms.values().next_back().unwrap().is_negative();
        if last_negative && q.is_integer() {
            k = -k;
        }
        let inv_content = Mono(content.0.iter().map(|(b, e)| (b.clone(), -*e)).collect());
        let prim = self.scale(&k.recip()).mul_mono(&inv_content)?;
        let head = Poly::mono_pow(&k, &content, q)?;
        let mut tail = Poly::zero();
        Poly::push_raw(vec![(prim.to_expr(), q)], Rational::one(), &mut tail)?;
        head.mul(&tail)
    }

    /// `self = num / den` with `num` free of negative exponents.
    pub(crate) fn together(&self) -> Result<(Poly, Mono)> {
        let mut den: BTreeMap<Expr, Exponent> = BTreeMap::new();
        for m in self.terms.keys() {
            for (b, e) in &m.0 {
                if *e < Exponent::zero() {
                    let slot = den.entry(b.clone()).or_insert_with(Exponent::zero);
                    if -*e > *slot {
                        *slot = -*e;
                    }
                }
            }
        }
        if den.is_empty() {
            return Ok((self.clone(), Mono::one()));
        }
        let d = Mono(den.into_iter().collect());
        Ok((self.mul_mono(&d)?, d))
    }

    pub(crate) fn from_expr(e: &Expr) -> Result<Poly> {
        if e.is_normal() {
            return Ok(Poly::from_nf(e));
        }
        match e.node() {
            Node::Rational(q) => Ok(Poly::constant(q.clone())),
            Node::Constant(_) | Node::Variable(_) | Node::Jet { .. } => Ok(Poly::atom(e.clone())),
            Node::Function { name, derivs, args } => {
                let args = args.iter().map(|a| a.normalize()).collect::<Result<Vec<_>>>()?;
                Ok(Poly::atom(Expr::normal(Node::Function {
                    name: name.clone(),
                    derivs: derivs.clone(),
                    args,
                })))
            }
            Node::Antiderivative { integrand, var, at } => {
                Poly::antiderivative(&Poly::from_expr(integrand)?, var, &Poly::from_expr(at)?)
            }
            Node::Exp(a) => Poly::exp_of(Poly::from_expr(a)?),
            Node::Sum(xs) => {
                let mut acc = Poly::zero();
                for x in xs {
                    acc.add_assign(Poly::from_expr(x)?);
                }
                Ok(acc)
            }
            Node::Product(xs) => {
                let mut acc = Poly::one();
                for x in xs {
                    let p = Poly::from_expr(x)?;
                    acc = if let Some(c) = p.as_constant() { acc.scale(&c) } else { acc.mul(&p)? };
                    if acc.is_zero() {
                        // still normalize the remaining factors for division-by-zero errors
                        continue;
                    }
                }
                Ok(acc)
            }
            Node::Power(b, q) => match b.node() {
                // (a^r)^q = a^(rq), positive bases assumed for fractional r
                Node::Power(inner, r) => Poly::from_expr(inner)?.pow(*r * *q),
                _ => Poly::from_expr(b)?.pow(*q),
            },
        }
    }

    pub(crate) fn exp_of(arg: Poly) -> Result<Poly> {
        if arg.is_zero() {
            Ok(Poly::one())
        } else {
            Ok(Poly::atom(Expr::normal(Node::Exp(arg.into_normal()?))))
        }
    }

    /// Antiderivative node, in closed form when the integrand is a polynomial
    /// in the integration variable.
    pub(crate) fn antiderivative(integrand: &Poly, var: &Symbol, at: &Poly) -> Result<Poly> {
        let v = Expr::var_sym(var);
        if let Some(closed) = integrand.integrate_polynomially(var, &v) {
            let mut out = Poly::zero();
            for (m, c) in &closed.terms {
                let mut rest = Vec::new();
                let mut k = 0u32;
                for (b, e) in &m.0 {
                    if *b == v {
                        k = e.to_integer() as u32;
                    } else {
                        rest.push((b.clone(), *e));
                    }
                }
                let term = Poly::from_mono(c.clone(), Mono(rest)).mul(&at.pow_int(k)?)?;
                out.add_assign(term);
            }
            return Ok(out);
        }
        Ok(Poly::atom(Expr::normal(Node::Antiderivative {
            integrand: integrand.consolidate()?.to_expr(),
            var: var.clone(),
            at: at.consolidate()?.to_expr(),
        })))
    }

    fn integrate_polynomially(&self, var: &Symbol, v: &Expr) -> Option<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut k = Exponent::zero();
            let mut rest = Vec::new();
            for (b, e) in &m.0 {
                if b == v {
                    k = *e;
                } else if b.depends_on(var) {
                    return None;
                } else {
                    rest.push((b.clone(), *e));
                }
            }
            if !k.is_integer() || k < Exponent::zero() {
                return None;
            }
            let k1 = k + Exponent::one();
            rest.push((v.clone(), k1));
            rest = sort_merge(rest);
            out.add_term(Mono(rest), c / exponent_to_rational(&k1));
        }
        Some(out)
    }

    /// Normal form as an expression.
    pub(crate) fn into_normal(self) -> Result<Expr> {
        Ok(self.consolidate()?.to_expr())
    }

    /// Put the coefficient of every generic monomial over a common
    /// denominator and cancel sum atoms that divide the numerator.
    pub(crate) fn consolidate(&self) -> Result<Poly> {
        let fractional = |m: &Mono| {
            m.0.iter().any(|(b, e)| *e < Exponent::zero() && matches!(b.node(), Node::Sum(_)) && is_field_factor(b, e))
        };
        if !self.terms.keys().any(fractional) {
            return Ok(self.clone());
        }
        let mut groups: BTreeMap<Mono, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (field, generic): (Vec<Factor>, Vec<Factor>) =
                m.0.iter().cloned().partition(|(b, e)| is_field_factor(b, e));
            groups.entry(Mono(generic)).or_default().add_term(Mono(field), c.clone());
        }
        let mut out = Poly::zero();
        for (g, coef) in groups {
            if !coef.terms.keys().any(fractional) {
                out.add_assign(coef.mul_mono(&g)?);
                continue;
            }
            let (mut num, den) = coef.together()?;
            let mut den = den.0;
            for (b, k) in den.iter_mut() {
                match b.node() {
                    Node::Sum(_) => {
                        let s = Poly::from_nf(b);
                        while *k > Exponent::zero() {
                            match num.div_exact(&s) {
                                Some(q) => {
                                    num = q;
                                    *k -= Exponent::one();
                                }
                                None => break,
                            }
                        }
                    }
                    _ => {
                        let least = num
                            .terms
                            .keys()
                            .map(|m| m.exponent_of(b).unwrap_or_else(Exponent::zero))
                            .min()
                            .unwrap_or_else(Exponent::zero);
                        let cancel = if least < *k { least } else { *k };
                        if cancel > Exponent::zero() {
                            num = num.mul_mono(&Mono(vec![(b.clone(), -cancel)]))?;
                            *k -= cancel;
                        }
                    }
                }
            }
            let inv = Mono(den.into_iter().filter(|(_, k)| !k.is_zero()).map(|(b, k)| (b, -k)).collect());
            out.add_assign(num.mul_mono(&inv)?.mul_mono(&g)?);
        }
        Ok(out)
    }

    /// Exact quotient by `s` for polynomials without negative exponents, or
    /// `None` if `s` does not divide.
    pub(crate) fn div_exact(&self, s: &Poly) -> Option<Poly> {
        let (ms, cs) = s.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        for _ in 0..4096 {
            let Some((mn, cn)) = rem.terms.iter().next_back() else { return Some(quot) };
            let t = mono_div(mn, ms)?;
            let c = cn / cs;
            quot.add_term(t.clone(), c.clone());
            rem = rem.sub(&s.mul_mono(&t).ok()?.scale(&c));
        }
        None
    }

    /// Rebuild from a normalized expression without re-normalizing.
    pub(crate) fn from_nf(e: &Expr) -> Poly {
        let mut p = Poly::zero();
        match e.node() {
            Node::Sum(ts) => {
                for t in ts {
                    let (c, m) = nf_term(t);
                    p.terms.insert(m, c);
                }
            }
            Node::Rational(q) => {
                if !q.is_zero() {
                    p.terms.insert(Mono::one(), q.clone());
                }
            }
            _ => {
                let (c, m) = nf_term(e);
                p.terms.insert(m, c);
            }
        }
        p
    }

    pub(crate) fn to_expr(&self) -> Expr {
        if self.terms.is_empty() {
            return Expr::normal(Node::Rational(Rational::zero()));
        }
        let mut terms: Vec<Expr> = self.terms.iter().map(|(m, c)| term_expr(m, c)).collect();
        if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::normal(Node::Sum(terms))
        }
    }
}

fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    let neg: Vec<Factor> = b.0.iter().map(|(x, e)| (x.clone(), -*e)).collect();
    let q = merge(&a.0, &neg);
    if q.iter().any(|(_, e)| *e < Exponent::zero()) {
        return None;
    }
    Some(Mono(q.into_iter().filter(|(_, e)| !e.is_zero()).collect()))
}

/// Variables, named constants, and integer powers of sums built from them.
pub(crate) fn is_field_factor(b: &Expr, e: &Exponent) -> bool {
    match b.node() {
        Node::Variable(_) | Node::Constant(_) => true,
        Node::Sum(_) => {
            e.is_integer()
                && !b.any(&|a| match a.node() {
                    Node::Variable(_) | Node::Constant(_) | Node::Rational(_) | Node::Sum(_) | Node::Product(_) => false,
                    Node::Power(_, q) => !q.is_integer(),
                    _ => true,
                })
        }
        _ => false,
    }
}

fn nf_factor(f: &Expr) -> Factor {
    match f.node() {
        Node::Power(b, e) => (b.clone(), *e),
        _ => (f.clone(), Exponent::one()),
    }
}

fn nf_term(t: &Expr) -> (Rational, Mono) {
    match t.node() {
        Node::Rational(q) => (q.clone(), Mono::one()),
        Node::Product(fs) => {
            let mut c = Rational::one();
            let mut out = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                match f.node() {
                    Node::Rational(q) if i == 0 => c = q.clone(),
                    _ => out.push(nf_factor(f)),
                }
            }
            (c, Mono(out))
        }
        _ => (Rational::one(), Mono(vec![nf_factor(t)])),
    }
}

pub(crate) fn factor_expr(b: &Expr, e: &Exponent) -> Expr {
    if e.is_one() {
        b.clone()
    } else {
        Expr::normal(Node::Power(b.clone(), *e))
    }
}

pub(crate) fn term_expr(m: &Mono, c: &Rational) -> Expr {
    if m.is_one() {
        return Expr::normal(Node::Rational(c.clone()));
    }
    if c.is_one() && m.0.len() == 1 {
        let (b, e) = &m.0[0];
        return factor_expr(b, e);
    }
    let mut fs = Vec::with_capacity(m.0.len() + 1);
    if !c.is_one() {
        fs.push(Expr::normal(Node::Rational(c.clone())));
    }
    fs.extend(m.0.iter().map(|(b, e)| factor_expr(b, e)));
    Expr::normal(Node::Product(fs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn x() -> Expr {
        Expr::var("x")
    }
    fn y() -> Expr {
        Expr::var("y")
    }

    #[test]
    fn like_terms_merge() {
        let e = (x() + x()).normalize().unwrap();
        assert_eq!(e, (Expr::integer(2) * x()).normalize().unwrap());
    }

    #[test]
    fn expansion_identity_cancels() {
        let e = (y() + 1).powi(2) - y().powi(2) - Expr::integer(2) * y() - 1;
        assert!(e.normalize().unwrap().is_zero_literal());
    }

    #[test]
    fn reciprocal_of_sum_is_primitive() {
        let a = (Expr::integer(2) * x() + 2).recip().normalize().unwrap();
        let b = (Expr::frac(1, 2) * (x() + 1).recip()).normalize().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nested_denominators_collapse() {
        // 1 / (1/x + 1/x^2) = x^2 / (x + 1)
        let e = (x().recip() + x().powi(-2)).recip().normalize().unwrap();
        let expect = (x().powi(2) * (x() + 1).recip()).normalize().unwrap();
        assert_eq!(e, expect);
    }

    #[test]
    fn sum_powers_merge_and_expand() {
        let s = x() + 1;
        let e = (s.pow(Exponent::new(1, 2)) * s.pow(Exponent::new(1, 2))).normalize().unwrap();
        assert_eq!(e, s.normalize().unwrap());
        let e = (s.recip() * s.powi(2)).normalize().unwrap();
        assert_eq!(e, s.normalize().unwrap());
    }

    #[test]
    fn radicals_fold_when_exact() {
        let e = Expr::integer(4).pow(Exponent::new(1, 2)).normalize().unwrap();
        assert_eq!(e, Expr::integer(2));
        let r = Expr::integer(2).pow(Exponent::new(1, 2));
        assert_eq!((r.clone() * r).normalize().unwrap(), Expr::integer(2));
    }

    #[test]
    fn exponentials_combine() {
        let u = Expr::func("b", vec![x()]);
        let e = (Expr::exp(u.clone()) * Expr::exp(-u)).normalize().unwrap();
        assert!(e.is_one_literal());
        let e = Expr::exp(x()).powi(-2).normalize().unwrap();
        assert_eq!(e, Expr::exp(Expr::integer(-2) * x()).normalize().unwrap());
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert_eq!((x() - x()).recip().normalize(), Err(Error::DivisionByZero));
        assert_eq!(Expr::zero().recip().normalize(), Err(Error::DivisionByZero));
    }

    #[test]
    fn polynomial_antiderivative_closes() {
        let s = Expr::var("s");
        let a = Expr::antiderivative(Expr::integer(3) * s.powi(2), "s", x() + 1);
        let expect = (x() + 1).powi(3).normalize().unwrap();
        assert_eq!(a.normalize().unwrap(), expect);
    }

    #[test]
    fn opaque_antiderivative_stays_formal() {
        let s = Expr::var("s");
        let a = Expr::antiderivative(Expr::func("b", vec![s]), "s", x());
        assert!(matches!(a.normalize().unwrap().node(), Node::Antiderivative { .. }));
    }
}
