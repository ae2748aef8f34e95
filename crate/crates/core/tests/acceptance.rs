//! One line per acceptance criterion; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use chainlab_core::chain::{apply_operator, build_chain, log_derivative_reduce, standard_chain, ChainKind, Ode, ParamFunction};
use chainlab_core::expr::{is_zero, partial_derivative_wrt, total_derivative, Instantiation, Substitution};
use chainlab_core::linearize::{
    chain_linearization_residuals, extract_cubic_coeffs, is_linearizable, lie_conditions, linearizing_family,
    LinearizabilityStatus,
};
use chainlab_core::symmetry::{is_symmetry, known_symmetries, SymmetryTag};
use chainlab_core::transform::{
    canonical_reduce, classify_alpha, maps_to, pullback_fiber, subgroup_action, transformed_parameter, witness_element,
    CanonicalCase, GroupElement, PointTransformation, Representative,
};
use chainlab_core::{Expr, JetSpace, Oracle, ZeroVerdict};
use common::{random_expr, random_in_x, random_moebius, random_scaling, rng, xy, zw};
use rand::Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

const BUDGET: Duration = Duration::from_secs(60);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let held: bool = $cond;
        if !held {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T>(r: chainlab_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn oracle() -> Oracle {
    Oracle::default()
}

fn symbolic_zero(e: &Expr, what: &str) -> Outcome {
    let v = ok(is_zero(e, &oracle()))?;
    ensure!(v == ZeroVerdict::SymbolicZero, "{what}: {v:?}");
    Ok(())
}

fn any_zero(e: &Expr, what: &str) -> Outcome {
    let v = ok(is_zero(e, &oracle()))?;
    ensure!(v.is_zero(), "{what}: {v:?}");
    Ok(())
}

fn opaque() -> ParamFunction {
    ParamFunction::opaque("F", &JetSpace::xy())
}

fn golden_expansions() -> Outcome {
    let two = ok(build_chain(&opaque(), 2))?;
    let seven = xy("y'' + (2*F(x,y) + y*D(F,y,1))*y' + y*(F(x,y)^2 + D(F,x,1))");
    ensure!(*two.lhs() == seven, "second member: {}", two.lhs());
    let three = ok(build_chain(&opaque(), 3))?;
    let twelve = xy("y''' + y'*(3*(F(x,y)^2 + D(F,x,1)) + y*(3*F(x,y)*D(F,y,1) + 2*D(F,x,1,y,1))) \
                     + y*(F(x,y)^3 + 3*F(x,y)*D(F,x,1) + D(F,x,2)) + y'^2*(3*D(F,y,1) + y*D(F,y,2)) \
                     + (3*F(x,y) + y*D(F,y,1))*y''");
    ensure!(*three.lhs() == twelve, "third member: {}", three.lhs());
    Ok(())
}

/// `Ω^(n-1)[Ω[y]]` through the coefficients `a_k` of `Ω^m = Σ a_k D^k`.
fn iteration_identity() -> Outcome {
    let ctx = JetSpace::xy();
    let f = opaque();
    let first = ok(apply_operator(&f, &ctx.y(), &ctx))?;
    let mut coeffs = vec![Expr::one()];
    let mut derivs = vec![first.clone()];
    for n in 2..=6usize {
        let mut next = vec![Expr::zero(); coeffs.len() + 1];
        for (k, a) in coeffs.iter().enumerate() {
            next[k] = &next[k] + ok(total_derivative(a, &ctx))? + f.expr() * a;
            next[k + 1] = &next[k + 1] + a;
        }
        coeffs = next.into_iter().map(|e| ok(e.normalize())).collect::<Result<_, _>>()?;
        while derivs.len() < coeffs.len() {
            derivs.push(ok(total_derivative(derivs.last().unwrap(), &ctx))?);
        }
        let composed = Expr::sum(coeffs.iter().zip(&derivs).map(|(a, d)| a * d));
        let direct = ok(build_chain(&f, n as u32))?;
        symbolic_zero(&(composed - direct.lhs()), &format!("n = {n}"))?;
    }
    Ok(())
}

fn riccati_round_trip() -> Outcome {
    let mut r = rng(31);
    for i in 0..200 {
        let (a, b) = (random_in_x(&mut r, 3), random_in_x(&mut r, 3));
        let affine = i % 2 == 0;
        let f = if affine {
            &a * xy("y") + &b
        } else {
            let k = r.random_range(2..=4);
            &a * xy("y") + &b + Expr::integer(r.random_range(1..=3)) * xy("y").powi(k)
        };
        let pf = ok(ParamFunction::xy(f.clone()))?;
        let v = ok(is_linearizable(&pf, 2, &oracle()))?;
        let want = if affine { LinearizabilityStatus::Linearizable } else { LinearizabilityStatus::NotLinearizable };
        ensure!(v.status == want, "F = {f}: {:?}", v.status);
    }
    let eq8 = ok(build_chain(&ok(ParamFunction::xy(xy("alpha(x)*y")))?, 2))?;
    let (g1, g2) = ok(lie_conditions(&ok(extract_cubic_coeffs(&eq8))?))?;
    symbolic_zero(&g1, "Gamma1")?;
    symbolic_zero(&g2, "Gamma2")?;
    let abel = ok(standard_chain(ChainKind::Abel, &Expr::one(), 2))?;
    let (_, g2) = ok(lie_conditions(&ok(extract_cubic_coeffs(&abel))?))?;
    ensure!(g2 == xy("-4*y^3"), "Abel Gamma2 = {g2}");
    Ok(())
}

fn higher_order_verdicts() -> Outcome {
    let mut notes = Vec::new();
    let y = ok(ParamFunction::xy(xy("y")))?;
    let v = ok(is_linearizable(&y, 3, &oracle()))?;
    if v.status != LinearizabilityStatus::NotLinearizable || v.residuals != vec![Expr::integer(4)] {
        notes.push(format!("F = y, n = 3 gave {:?} {:?}", v.status, v.residuals));
    }
    let y2 = ok(ParamFunction::xy(xy("y^2")))?;
    let res = ok(chain_linearization_residuals(&y2, 4))?;
    let v = ok(is_linearizable(&y2, 4, &oracle()))?;
    if v.status != LinearizabilityStatus::NotLinearizable {
        notes.push(format!("F = y^2, n = 4 gave {:?}", v.status));
    }
    if !res.contains(&Expr::integer(8)) {
        let shown: Vec<String> = res.iter().map(ToString::to_string).collect();
        notes.push(format!("F = y^2, n = 4: expected a residual equal to 8, computed [{}]", shown.join(", ")));
    }
    for n in 3..=6 {
        for f in ["g(x)", "x^2 + 1", "0", "exp(x)"] {
            let v = ok(is_linearizable(&ok(ParamFunction::xy(xy(f)))?, n, &oracle()))?;
            if v.status != LinearizabilityStatus::AlreadyLinear {
                notes.push(format!("F = {f}, n = {n} gave {:?}", v.status));
            }
        }
    }
    ensure!(notes.is_empty(), "{}", notes.join("; "));
    Ok(())
}

fn free_particle() -> Result<Ode, String> {
    let zs = JetSpace::zw();
    ok(Ode::new(zs.derivative(2), &zs))
}

fn linearizing_family_maps() -> Outcome {
    let alpha = xy("alpha(x)");
    let eq8 = ok(build_chain(&ok(ParamFunction::xy(&alpha * xy("y")))?, 2))?;
    let target = free_particle()?;
    let t = ok(linearizing_family(&alpha, &[0, 0, 1, 0, 0, 1].map(Expr::integer)))?;
    let v = ok(maps_to(&eq8, &t, &target, &oracle()))?;
    ensure!(v.is_zero(), "simplest member: {v:?}");
    let mut r = rng(5);
    let mut done = 0;
    while done < 20 {
        let ks: [i64; 6] = std::array::from_fn(|_| r.random_range(-4..=4));
        if ks[2] * ks[5] == 0 || ks[4] == 1 {
            continue;
        }
        let t = ok(linearizing_family(&alpha, &ks.map(Expr::integer)))?;
        let v = ok(maps_to(&eq8, &t, &target, &Oracle::with_seed(100 + done)))?;
        ensure!(v.is_zero(), "k = {ks:?}: {v:?}");
        done += 1;
    }
    Ok(())
}

fn explicit_map() -> Outcome {
    let ode = ok(Ode::new(xy("y^3 + 3*y*y' + y''"), &JetSpace::xy()))?;
    let t = ok(PointTransformation::forward(xy("x/y - x^2/2"), xy("(x-1)/y - x*(x-2)/2")))?;
    let v = ok(maps_to(&ode, &t, &free_particle()?, &oracle()))?;
    ensure!(v == ZeroVerdict::SymbolicZero, "{v:?}");
    Ok(())
}

fn fiber_pullback() -> Outcome {
    let f = opaque();
    let mut r = rng(7);
    for n in 2..=5 {
        let ode = ok(build_chain(&f, n))?;
        for i in 0..10 {
            let g = ok(GroupElement::new(random_moebius(&mut r, false), random_scaling(&mut r)))?;
            let pulled = ok(pullback_fiber(&ode, &g))?;
            let direct = ok(build_chain(&ok(transformed_parameter(&f, &g, n))?, n))?;
            symbolic_zero(&(pulled.lhs() - direct.lhs()), &format!("n = {n}, sample {i}"))?;
        }
    }
    Ok(())
}

fn canonical_reductions() -> Outcome {
    let xs = JetSpace::xy();
    let cases = [
        CanonicalCase::Scaled {
            f0: xy("G(x,y)"),
            epsilon: Expr::integer(3),
            a: Expr::integer(2),
            b: Expr::integer(-1),
            c: Expr::integer(5),
            d: Expr::integer(7),
        },
        CanonicalCase::Scaled {
            f0: xy("h(x)"),
            epsilon: Expr::one(),
            a: Expr::one(),
            b: Expr::zero(),
            c: Expr::zero(),
            d: Expr::zero(),
        },
        CanonicalCase::Affine { f0: xy("G(x,y)"), a: xy("A(x)"), b: xy("B(x)"), epsilon: Expr::one() },
        CanonicalCase::Rescaled { f0: xy("G(x,y)"), a: xy("A(x)") },
    ];
    for case in &cases {
        for n in 2..=4 {
            let f = ok(ParamFunction::xy(ok(case.source(&xs))?))?;
            let (_, q) = ok(canonical_reduce(&f, case, n))?;
            symbolic_zero(&(q.expr() - ok(case.target(&xs))?), &format!("{case:?}, n = {n}"))?;
        }
    }
    Ok(())
}

fn subgroup_orbits() -> Outcome {
    let mut r = rng(11);
    let to_z = ok(Substitution::new().bind(xy("x"), zw("z")))?;
    for n in [3, 5] {
        for alpha in ["alpha(x)", "x^3 - 2", "1/(2*x + 1)"] {
            let a = xy(alpha);
            let m = random_moebius(&mut r, false);
            let r0 = Expr::integer(r.random_range(1..=4));
            let g = ok(GroupElement::subgroup(m.clone(), r0.clone(), n))?;
            let q = ok(transformed_parameter(&ok(ParamFunction::xy(&a * xy("y")))?, &g, n))?;
            let acted = ok(to_z.apply(&ok(subgroup_action(&a, &r0, &m, n))?))?;
            any_zero(&(q.expr() - acted * zw("w")), &format!("{alpha}, n = {n}"))?;
        }
    }
    let rep = Representative::default();
    for j in 1..=4u8 {
        let base = ok(rep.alpha(j))?;
        let own = ok(classify_alpha(&base, 3))?.ok_or(format!("alpha_{j} unclassified"))?;
        ensure!(own.j == j, "alpha_{j} classified as {}", own.j);
        for _ in 0..50 {
            let m = random_moebius(&mut r, false);
            let r0 = Expr::integer(r.random_range(1..=5) * if r.random::<bool>() { 1 } else { -1 });
            let beta = ok(subgroup_action(&base, &r0, &m, 3))?;
            let label = ok(classify_alpha(&beta, 3))?.ok_or(format!("{beta} (from alpha_{j}) unclassified"))?;
            ensure!(label.j == j, "{beta} from alpha_{j} classified as {}", label.j);
            let w = ok(witness_element(&label, &rep))?;
            let back = ok(subgroup_action(&base, w.r0().unwrap(), w.mobius(), 3))?;
            any_zero(&(back - &beta), &format!("witness for {beta}"))?;
        }
    }
    Ok(())
}

fn symmetries() -> Outcome {
    let alpha = xy("alpha(x)");
    let eq8 = ok(build_chain(&ok(ParamFunction::xy(&alpha * xy("y")))?, 2))?;
    for tag in [SymmetryTag::V1, SymmetryTag::V2] {
        let v = &ok(known_symmetries(tag, 2, Some(&alpha)))?[0];
        let verdict = ok(is_symmetry(v, &eq8, &oracle()))?;
        ensure!(verdict == ZeroVerdict::SymbolicZero, "{tag:?}: {verdict:?}");
    }
    let linear = xy("2 - 3*x");
    let eq8l = ok(build_chain(&ok(ParamFunction::xy(&linear * xy("y")))?, 2))?;
    let v3 = &ok(known_symmetries(SymmetryTag::V3, 2, Some(&linear)))?[0];
    let verdict = ok(is_symmetry(v3, &eq8l, &oracle()))?;
    ensure!(verdict.is_zero(), "V3: {verdict:?}");
    for n in 3..=6 {
        let ode = ok(standard_chain(ChainKind::Riccati, &Expr::one(), n))?;
        for v in ok(known_symmetries(SymmetryTag::Bv, n, None))? {
            let verdict = ok(is_symmetry(&v, &ode, &oracle()))?;
            ensure!(verdict.is_zero(), "bv, n = {n}: {verdict:?}");
        }
    }
    let bw2 = ok(known_symmetries(SymmetryTag::Bw, 2, None))?;
    for n in 2..=5 {
        let ode = ok(standard_chain(ChainKind::Abel, &Expr::one(), n))?;
        let fields = ok(known_symmetries(SymmetryTag::Bw, n, None))?;
        ensure!(fields == bw2, "bw depends on n at n = {n}");
        for v in fields {
            let verdict = ok(is_symmetry(&v, &ode, &oracle()))?;
            ensure!(verdict.is_zero(), "bw, n = {n}: {verdict:?}");
        }
    }
    Ok(())
}

fn log_derivative() -> Outcome {
    for n in 1..=5 {
        let a = ok(log_derivative_reduce(n))?;
        let b = ok(standard_chain(ChainKind::Riccati, &Expr::one(), n))?;
        ensure!(a == b, "n = {n}: {} vs {}", a.lhs(), b.lhs());
    }
    Ok(())
}

fn kernel_health() -> Outcome {
    let mut r = rng(12);
    let mut compared = 0;
    for i in 0..1000u64 {
        let e = random_expr(&mut r, 4);
        let once = ok(e.normalize())?;
        ensure!(ok(once.normalize())? == once, "normalize not idempotent on {e}");
        for atom in [xy("x"), xy("y"), xy("y'")] {
            let d = ok(partial_derivative_wrt(&e, &atom))?;
            let inst = Instantiation::new(i);
            let at = inst.atom_value(&atom);
            let h = 1e-4;
            let f = |t: f64| inst.clone().with(atom.clone(), t).evaluate(&e).ok().filter(|v| v.abs() < 1e4);
            let stencil = (f(at - 2.0 * h), f(at - h), f(at + h), f(at + 2.0 * h));
            let (Some(m2), Some(m1), Some(p1), Some(p2)) = stencil else { continue };
            let Ok(exact) = inst.clone().with(atom.clone(), at).evaluate(&d) else { continue };
            let fd = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
            ensure!((exact - fd).abs() <= 1e-5 * exact.abs().max(1.0), "d/d{atom} of {e}: {exact} vs {fd}");
            compared += 1;
        }
    }
    ensure!(compared >= 1500, "only {compared} finite-difference comparisons were well conditioned");
    Ok(())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("golden expansions of the second and third members", golden_expansions),
        ("iteration identity for 2 <= n <= 6", iteration_identity),
        ("second-order linearizability round trip", riccati_round_trip),
        ("third- and fourth-order verdicts", higher_order_verdicts),
        ("linearizing family maps to w'' = 0", linearizing_family_maps),
        ("explicit map for the unit Riccati member", explicit_map),
        ("fiber pullback equals the transformed chain", fiber_pullback),
        ("canonical reductions", canonical_reductions),
        ("subgroup action, orbits and witnesses", subgroup_orbits),
        ("known symmetries", symmetries),
        ("log-derivative reduction", log_derivative),
        ("kernel health", kernel_health),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let took = start.elapsed();
        if outcome.is_ok() && took > BUDGET {
            outcome = Err(format!("exceeded the {} s budget", BUDGET.as_secs()));
        }
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({:.2} s)", i + 1, took.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2}: FAIL  {name} ({:.2} s): {why}", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
