mod common;

use chainlab_core::expr::{is_zero, parse, partial_derivative, partial_derivative_wrt, to_text, Instantiation, TextStyle};
use chainlab_core::{Error, Expr, JetSpace, Oracle, ZeroVerdict};
use common::{random_expr, rng, xy};
use proptest::prelude::*;

/// Five-point central difference of `e` in `atom`, or `None` near a pole.
fn central_difference(e: &Expr, atom: &Expr, seed: u64) -> Option<(f64, f64)> {
    let h = 1e-4;
    let base = Instantiation::new(seed);
    let at = base.atom_value(atom);
    let f = |t: f64| base.clone().with(atom.clone(), t).evaluate(e).ok().filter(|v| v.abs() < 1e4);
    let (m2, m1, p1, p2) = (f(at - 2.0 * h)?, f(at - h)?, f(at + h)?, f(at + 2.0 * h)?);
    Some(((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h), at))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let e = random_expr(&mut rng(seed), 4).normalize().unwrap();
        prop_assert_eq!(e.normalize().unwrap(), e);
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let e = random_expr(&mut rng(seed), 3).normalize().unwrap();
        let text = to_text(&e, &TextStyle::plain(&JetSpace::xy()));
        let back = parse(&text, &JetSpace::xy()).unwrap();
        prop_assert!(is_zero(&(back - &e), &Oracle::default()).unwrap().is_zero(), "{}", text);
    }

    #[test]
    fn derivatives_match_finite_differences(seed in any::<u64>()) {
        let e = random_expr(&mut rng(seed), 3);
        for atom in [xy("x"), xy("y"), xy("y'")] {
            let d = partial_derivative_wrt(&e, &atom).unwrap();
            let Some((fd, at)) = central_difference(&e, &atom, seed) else { continue };
            let Ok(exact) = Instantiation::new(seed).with(atom.clone(), at).evaluate(&d) else { continue };
            prop_assert!((exact - fd).abs() <= 1e-5 * exact.abs().max(1.0), "{} d/d{}: {} vs {}", e, atom, exact, fd);
        }
    }

    #[test]
    fn sum_minus_itself_is_symbolic_zero(seed in any::<u64>()) {
        let e = random_expr(&mut rng(seed), 3);
        prop_assert_eq!(is_zero(&(&e - &e), &Oracle::default()).unwrap(), ZeroVerdict::SymbolicZero);
    }
}

#[test]
fn zero_test_tiers() {
    let o = Oracle::default();
    assert_eq!(is_zero(&xy("(x+1)^2 - x^2 - 2*x - 1"), &o).unwrap(), ZeroVerdict::SymbolicZero);
    assert_eq!(is_zero(&xy("1/(x+1) + 1/(x*(x+1)) - 1/x"), &o).unwrap(), ZeroVerdict::SymbolicZero);
    assert!(!is_zero(&xy("x - y"), &o).unwrap().is_zero());
    let xs = JetSpace::xy();
    let a = chainlab_core::transform::integral(&xy("x^2"), xs.indep(), xy("x")).unwrap();
    assert!(is_zero(&(a - xy("x^3/3")), &o).unwrap().is_zero());
}

#[test]
fn opaque_derivatives() {
    let e = xy("f(x, y)*exp(g(x))");
    let d = partial_derivative(&e, &chainlab_core::expr::symbol("x")).unwrap();
    assert_eq!(d, xy("D(f,x,1)*exp(g(x)) + f(x,y)*D(g,x,1)*exp(g(x))"));
}

#[test]
fn parse_errors() {
    assert!(matches!(parse("x + ", &JetSpace::xy()), Err(Error::Syntax { .. })));
    assert!(matches!(parse("f(x) + f(x, y)", &JetSpace::xy()), Err(Error::Arity(_))));
    assert!(matches!(parse("1/0", &JetSpace::xy()), Err(Error::DivisionByZero)));
}
