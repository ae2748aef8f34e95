//! Floating-point instantiation of expressions: the independent oracle
//! behind the numeric tier of the zero test.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use fnv::FnvHasher;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Expr, Node, Symbol};
use crate::error::{Error, Result};

const POLE: f64 = 1e-12;
const MAX_DEGREE: u32 = 4;
const PANELS: usize = 16;

// 10-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Random polynomial standing in for an opaque function.
#[derive(Clone, Debug)]
struct Surrogate {
    terms: Vec<(f64, Vec<u32>)>,
}

impl Surrogate {
    fn new(seed: u64, name: &Symbol, arity: usize) -> Surrogate {
        let mut rng = ChaCha8Rng::seed_from_u64(hash_of(seed, &(name, arity)));
        let mut terms = Vec::new();
        let mut exps = alloc::vec![0u32; arity];
        loop {
            terms.push((rng.random_range(-1.0..=1.0), exps.clone()));
            // next multi-index of total degree <= MAX_DEGREE
            let mut i = 0;
            loop {
                if i == arity {
                    return Surrogate { terms };
                }
                exps[i] += 1;
                if exps.iter().sum::<u32>() <= MAX_DEGREE {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    fn eval(&self, derivs: &[u32], args: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, exps) in &self.terms {
            let mut term = *c;
            for ((e, d), a) in exps.iter().zip(derivs).zip(args) {
                if d > e {
                    term = 0.0;
                    break;
                }
                for k in 0..*d {
                    term *= f64::from(e - k);
                }
                term *= libm::pow(*a, f64::from(e - d));
            }
            total += term;
        }
        total
    }
}

fn hash_of<T: Hash + ?Sized>(seed: u64, t: &T) -> u64 {
    let mut h = FnvHasher::default();
    seed.hash(&mut h);
    t.hash(&mut h);
    h.finish()
}

/// A concrete point: values for atoms and polynomial surrogates for opaque
/// functions, all derived from one seed unless overridden.
#[derive(Clone, Debug)]
pub struct Instantiation {
    seed: u64,
    values: BTreeMap<Expr, f64>,
}

impl Instantiation {
    pub fn new(seed: u64) -> Self {
        Instantiation { seed, values: BTreeMap::new() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Pin the value of a variable, constant or jet atom.
    pub fn set(&mut self, atom: Expr, value: f64) -> &mut Self {
        self.values.insert(atom, value);
        self
    }

    pub fn with(mut self, atom: Expr, value: f64) -> Self {
        self.set(atom, value);
        self
    }

    /// Value assigned to an atom: base variables in `[1, 2]`, named
    /// constants in `{±1, ±2, ±3}`, jet variables in `[-1, 1]`.
    pub fn atom_value(&self, atom: &Expr) -> f64 {
        if let Some(v) = self.values.get(atom) {
            return *v;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(hash_of(self.seed, atom));
        match atom.node() {
            Node::Variable(_) => rng.random_range(1.0..=2.0),
            Node::Constant(_) => {
                let mag = f64::from(rng.random_range(1..=3u8));
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            }
            _ => rng.random_range(-1.0..=1.0),
        }
    }

    /// Evaluate; `Error::Pole` on a division by a near-zero value or a
    /// fractional power of a negative value.
    pub fn evaluate(&self, e: &Expr) -> Result<f64> {
        let mut ev = Evaluator { inst: self, funcs: BTreeMap::new(), bound: Vec::new() };
        ev.eval(e)
    }
}

struct Evaluator<'a> {
    inst: &'a Instantiation,
    funcs: BTreeMap<(Symbol, usize), Surrogate>,
    bound: Vec<(Symbol, f64)>,
}

impl Evaluator<'_> {
    fn eval(&mut self, e: &Expr) -> Result<f64> {
        match e.node() {
            Node::Rational(q) => Ok(q.to_f64().unwrap_or(f64::NAN)),
            Node::Variable(v) => {
                if let Some((_, t)) = self.bound.iter().rev().find(|(s, _)| s == v) {
                    return Ok(*t);
                }
                Ok(self.inst.atom_value(e))
            }
            Node::Constant(_) | Node::Jet { .. } => Ok(self.inst.atom_value(e)),
            Node::Function { name, derivs, args } => {
                let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
                let seed = self.inst.seed;
                let s = self
                    .funcs
                    .entry((name.clone(), args.len()))
                    .or_insert_with(|| Surrogate::new(seed, name, args.len()));
                Ok(s.eval(derivs, &vals))
            }
            Node::Antiderivative { integrand, var, at } => {
                let b = self.eval(at)?;
                self.integrate(integrand, var, b)
            }
            Node::Exp(a) => Ok(libm::exp(self.eval(a)?)),
            Node::Power(b, q) => {
                let v = self.eval(b)?;
                power(v, *q.numer(), *q.denom())
            }
            Node::Product(xs) => {
                let mut acc = 1.0;
                for x in xs {
                    acc *= self.eval(x)?;
                }
                Ok(acc)
            }
            Node::Sum(xs) => {
                let mut acc = 0.0;
                for x in xs {
                    acc += self.eval(x)?;
                }
                Ok(acc)
            }
        }
    }

    /// Composite Gauss-Legendre quadrature over `[0, b]`.
    fn integrate(&mut self, integrand: &Expr, var: &Symbol, b: f64) -> Result<f64> {
        let h = b / PANELS as f64;
        let mut total = 0.0;
        for p in 0..PANELS {
            let mid = h * (p as f64 + 0.5);
            let half = h / 2.0;
            for (node, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                for t in [mid - half * node, mid + half * node] {
                    self.bound.push((var.clone(), t));
                    let v = self.eval(integrand);
                    self.bound.pop();
                    total += w * half * v?;
                }
            }
        }
        Ok(total)
    }
}

fn power(v: f64, num: i64, den: i64) -> Result<f64> {
    if num < 0 && libm::fabs(v) < POLE {
        return Err(Error::Pole);
    }
    if den == 1 {
        if let Ok(k) = i32::try_from(num) {
            return Ok(libm::pow(v, f64::from(k)));
        }
    }
    if v < 0.0 {
        return Err(Error::Pole);
    }
    Ok(libm::pow(v, num as f64 / den as f64))
}

/// Evaluate `e` at the instantiation derived from `seed`.
pub fn numeric_probe(e: &Expr, seed: u64) -> Result<f64> {
    Instantiation::new(seed).evaluate(e)
}
