#![allow(dead_code)]

use chainlab_core::expr::{integer, parse};
use chainlab_core::transform::MoebiusMap;
use chainlab_core::{Expr, JetSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn xy(s: &str) -> Expr {
    parse(s, &JetSpace::xy()).unwrap()
}

pub fn zw(s: &str) -> Expr {
    parse(s, &JetSpace::zw()).unwrap()
}

/// A valid Möbius map with small integer coefficients; `positive` forces
/// `Δ > 0`.
pub fn random_moebius(rng: &mut ChaCha8Rng, positive: bool) -> MoebiusMap {
    loop {
        let k4 = rng.random_range(0..=1i64);
        let k: [i64; 3] = core::array::from_fn(|_| rng.random_range(-3..=3));
        let delta = k[1] * k[2] - k[0] * k4;
        if (k4 == 0 && k[2] == 0) || delta == 0 || (positive && delta < 0) {
            continue;
        }
        return MoebiusMap::from_rationals([integer(k[0]), integer(k[1]), integer(k[2]), integer(k4)]).unwrap();
    }
}

/// A nonvanishing-generic scaling `R(z)`: a polynomial or an exponential of
/// an antiderivative.
pub fn random_scaling(rng: &mut ChaCha8Rng) -> Expr {
    let c: [i64; 3] = core::array::from_fn(|_| rng.random_range(1..=3));
    match rng.random_range(0..3) {
        0 => zw(&format!("{} + {}*z + {}*z^2", c[0], c[1], c[2])),
        1 => zw(&format!("{}*exp({}*z)", c[0], c[1])),
        _ => {
            let zs = JetSpace::zw();
            let inner = chainlab_core::transform::integral(&zw(&format!("{}*z^2 + beta(z)", c[2])), zs.indep(), zs.x()).unwrap();
            Expr::exp(inner)
        }
    }
}

/// A random expression over `x, y, y', y''`, a named constant, small
/// integers and opaque `f(x, y)`, `g(x)`.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.random_range(0..4) == 0 {
        return match rng.random_range(0..8) {
            0 => xy("x"),
            1 => xy("y"),
            2 => xy("y'"),
            3 => xy("y''"),
            4 => xy("a"),
            5 => xy("f(x, y)"),
            6 => xy("g(x)"),
            _ => Expr::integer(rng.random_range(-3..=3)),
        };
    }
    let kids = |k: usize, rng: &mut ChaCha8Rng| (0..k).map(|_| random_expr(rng, depth - 1)).collect::<Vec<_>>();
    match rng.random_range(0..5) {
        0 | 1 => {
            let k = rng.random_range(2..=3);
            Expr::sum(kids(k, rng))
        }
        2 | 3 => {
            let k = rng.random_range(2..=3);
            Expr::product(kids(k, rng))
        }
        _ => {
            let base = random_expr(rng, depth - 1);
            match rng.random_range(0..4) {
                0 => Expr::exp(base / 4),
                1 if !base.normalize().is_ok_and(|b| b.is_zero_literal()) => base.powi(-1),
                1 => base + 1,
                2 => base.powi(2),
                _ => base.powi(3),
            }
        }
    }
}

/// A random expression in `x` alone.
pub fn random_in_x(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.random_range(0..3) == 0 {
        return match rng.random_range(0..4) {
            0 => xy("x"),
            1 => xy("g(x)"),
            2 => xy("exp(x)"),
            _ => Expr::integer(rng.random_range(-3..=3)),
        };
    }
    let (a, b) = (random_in_x(rng, depth - 1), random_in_x(rng, depth - 1));
    match rng.random_range(0..3) {
        0 => a + b,
        1 => a * b,
        _ => a.powi(2) + b,
    }
}
