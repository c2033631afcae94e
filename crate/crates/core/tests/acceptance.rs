//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails or exceeds its time budget.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bm_core::asymmetry::{asymmetry, asymmetry_affine_invariance_check, polygon_asymmetry, verify_contact_points};
use bm_core::certify::{
    base_nice_matrix, certify_sandwich, enumerate_nice_octahedra, four_dim_examples, ratio, CertificationFailure,
    OperatorT,
};
use bm_core::equidistant::{
    certify_equidistance, parallel_pair_ratio, parameter_grid, pentagon, random_symmetric_polygon,
    standard_symmetric_bodies, PentagonParams, UBasis,
};
use bm_core::lemma::{
    claim3d_check, corner_classify, find_lemma_counterexample, sample_valid_parallelogram, SamplerConfig,
};
use bm_core::polytope::{convex_hull_2d, cube, polygon_to_h};
use bm_core::rational::{int, q};
use bm_core::search::{optimize, snap_to_nice, SearchConfig};
use bm_core::{QVector, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn millionth() -> Rational {
    q(1, 1_000_000)
}

fn exact_3d_optimum() -> Outcome {
    let op = OperatorT::new(base_nice_matrix()).map_err(|e| e.to_string())?;
    certify_sandwich(&op, &q(5, 9)).map_err(|e| format!("base matrix fails at 5/9: {e:?}"))?;
    match certify_sandwich(&op, &(q(5, 9) + millionth())) {
        Err(CertificationFailure::Violation(_)) => {}
        other => return Err(format!("expected a violation witness above 5/9, got {other:?}")),
    }
    let r = ratio(&op);
    ensure(r == q(9, 5), || format!("ratio {r}"))?;
    Ok("certifies at 5/9, witness at 5/9 + 1e-6, ratio 9/5".into())
}

fn nice_family() -> Outcome {
    let family = enumerate_nice_octahedra();
    let keys: BTreeSet<String> = family.iter().map(|m| m.canonical_key()).collect();
    ensure(family.len() == 192 && keys.len() == 192, || {
        format!("{} matrices, {} distinct", family.len(), keys.len())
    })?;
    for m in family {
        let op = OperatorT::new(m).map_err(|e| e.to_string())?;
        certify_sandwich(&op, &q(5, 9)).map_err(|e| format!("{:?} fails at 5/9: {e:?}", op.matrix()))?;
        let rep = claim3d_check(&op).map_err(|e| e.to_string())?;
        ensure(rep.holds() && rep.occupied_cubes == 6, || format!("{:?}: {rep:?}", op.matrix()))?;
    }
    Ok("192 distinct, all certify at 5/9, 6 of 8 corner cubes occupied".into())
}

fn exact_4d_optimum() -> Outcome {
    for m in four_dim_examples() {
        let op = OperatorT::new(m).map_err(|e| e.to_string())?;
        certify_sandwich(&op, &q(1, 2)).map_err(|e| format!("{:?} fails at 1/2: {e:?}", op.matrix()))?;
        ensure(certify_sandwich(&op, &(q(1, 2) + millionth())).is_err(), || {
            format!("{:?} certifies above 1/2", op.matrix())
        })?;
        let r = ratio(&op);
        ensure(r == int(2), || format!("{:?}: ratio {r}", op.matrix()))?;
    }
    Ok("3 matrices certify at 1/2, fail at 1/2 + 1e-6, ratio 2".into())
}

fn theorem_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut minima = Vec::new();
    for (n, bound) in [(3, q(9, 5)), (4, int(2))] {
        let mut min = None::<Rational>;
        for _ in 0..10_000 {
            let m = common::random_invertible(&mut rng, n, 10, 10);
            let r = ratio(&OperatorT::new(m.clone()).map_err(|e| e.to_string())?);
            ensure(r >= bound, || format!("n = {n}: {m:?} has ratio {r} < {bound}"))?;
            if min.as_ref().is_none_or(|x| r < *x) {
                min = Some(r);
            }
        }
        minima.push(min.expect("nonempty"));
    }
    Ok(format!(
        "10000 matrices per dimension, zero violations; smallest ratios {:.4} (n=3), {:.4} (n=4)",
        bm_core::rational::to_f64(&minima[0]),
        bm_core::rational::to_f64(&minima[1])
    ))
}

fn search_reproduction() -> Outcome {
    let r3 = optimize(&SearchConfig {
        n: 3,
        restarts: 200,
        seed: 42,
        ..SearchConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let hi = |v: &Rational| v + q(1, 1000);
    ensure(r3.exact_ratio >= q(9, 5) && r3.exact_ratio <= hi(&q(9, 5)), || {
        format!("n = 3 exact ratio {}", r3.exact_ratio)
    })?;
    let snapped = snap_to_nice(&r3.best_float_matrix).ok_or("n = 3 optimum does not snap to the nice family")?;
    let family: BTreeSet<String> = enumerate_nice_octahedra().iter().map(|m| m.canonical_key()).collect();
    ensure(family.contains(&snapped.canonical_key()), || "snapped matrix outside the family".into())?;
    if r3.exact_ratio == q(9, 5) {
        ensure(r3.is_nice == Some(true), || "optimum at 9/5 is not nice".into())?;
    }

    let r4 = optimize(&SearchConfig {
        n: 4,
        restarts: 200,
        seed: 42,
        ..SearchConfig::default()
    })
    .map_err(|e| e.to_string())?;
    ensure(r4.exact_ratio >= int(2) && r4.exact_ratio <= hi(&int(2)), || {
        format!("n = 4 exact ratio {}", r4.exact_ratio)
    })?;

    let r2 = optimize(&SearchConfig {
        n: 2,
        restarts: 20,
        seed: 1,
        ..SearchConfig::default()
    })
    .map_err(|e| e.to_string())?;
    ensure(r2.exact_ratio == int(1), || format!("n = 2 exact ratio {}", r2.exact_ratio))?;
    Ok(format!(
        "n=3 -> {}, n=4 -> {}, n=2 -> {}",
        r3.exact_ratio, r4.exact_ratio, r2.exact_ratio
    ))
}

fn asymmetry_exactness() -> Outcome {
    let (sq_v, sq_h) = cube(2).map_err(|e| e.to_string())?;
    let sq = asymmetry(&sq_v, &sq_h).map_err(|e| e.to_string())?;
    ensure(sq.as_value == int(1), || format!("square: {}", sq.as_value))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut triangles = vec![UBasis::default().triangle()];
    while triangles.len() < 50 {
        let pts: Vec<QVector> = (0..3).map(|_| common::random_vector(&mut rng, 2, 20, 5)).collect();
        if let Ok(t) = convex_hull_2d(&pts) {
            triangles.push(t);
        }
    }
    for t in &triangles {
        let h = polygon_to_h(t).map_err(|e| e.to_string())?;
        let res = asymmetry(t, &h).map_err(|e| e.to_string())?;
        ensure(res.as_value == int(2), || format!("{t:?}: as = {}", res.as_value))?;
        let contacts = verify_contact_points(t, &h, &res);
        ensure(contacts >= 3, || format!("{t:?}: {contacts} contacts"))?;
    }

    let basis = UBasis::default();
    for params in parameter_grid() {
        let k = pentagon(&params, &basis);
        let h = polygon_to_h(&k).map_err(|e| e.to_string())?;
        let res = asymmetry(&k, &h).map_err(|e| e.to_string())?;
        ensure(&res.as_value == params.r() && res.center == params.minkowski_center(&basis), || {
            format!("K({}, {}): as {} at {:?}", params.r(), params.k(), res.as_value, res.center)
        })?;
        let contacts = verify_contact_points(&k, &h, &res);
        ensure(contacts >= 3, || format!("K({}, {}): {contacts} contacts", params.r(), params.k()))?;
    }
    Ok("square 1, 50 triangles 2, 15 grid pentagons r with exact centers".into())
}

fn equidistance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bodies: Vec<(String, _)> =
        standard_symmetric_bodies().into_iter().map(|(name, b)| (name.to_string(), b)).collect();
    for i in 0..100 {
        bodies.push((format!("random-{i}"), random_symmetric_polygon(&mut rng)));
    }
    let mut count = 0;
    for params in parameter_grid() {
        for (name, body) in &bodies {
            let cert = certify_equidistance(&params, body)
                .map_err(|e| format!("K({}, {}) vs {name}: {e}", params.r(), params.k()))?;
            ensure(cert.is_tight(), || {
                format!("K({}, {}) vs {name}: sandwich {} vs as {}", params.r(), params.k(), cert.sandwich_ratio, cert.as_check.as_value)
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} certificates, sandwich ratio = as(K) in each"))
}

fn lemma_suite() -> Outcome {
    let r = q(5, 9);
    let config = SamplerConfig::default();
    for seed in 0..10_000 {
        let p = sample_valid_parallelogram(seed, &r, &config).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(corner_classify(&p).all_ones(), || format!("seed {seed}: {p:?}"))?;
    }
    let cx = find_lemma_counterexample(&q(1, 2), 1, &config).map_err(|e| format!("at 1/2: {e}"))?;
    let none = find_lemma_counterexample(
        &r,
        1,
        &SamplerConfig {
            max_attempts: 1_000_000,
            ..config
        },
    );
    ensure(none.is_err(), || format!("counterexample at 5/9: {none:?}"))?;
    Ok(format!("10000 samples one per corner; counterexample at 1/2: p={:?} q={:?}; none at 5/9 in 1e6", cx.p(), cx.q()))
}

fn affine_invariance() -> Outcome {
    let basis = UBasis::default();
    let square = convex_hull_2d(cube(2).map_err(|e| e.to_string())?.0.vertices()).map_err(|e| e.to_string())?;
    let mut bodies = vec![basis.triangle(), square];
    for (r, k) in [(q(9, 5), q(1, 3)), (q(7, 4), q(2, 7)), (q(15, 8), q(5, 16))] {
        bodies.push(pentagon(&PentagonParams::new(r, k).map_err(|e| e.to_string())?, &basis));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for body in &bodies {
        let h = polygon_to_h(body).map_err(|e| e.to_string())?;
        let before = polygon_asymmetry(body).map_err(|e| e.to_string())?.as_value;
        for _ in 0..1000 {
            let a = common::random_invertible(&mut rng, 2, 10, 6);
            let t = common::random_vector(&mut rng, 2, 10, 6);
            let ok = asymmetry_affine_invariance_check(body, &h, &a, &t).map_err(|e| e.to_string())?;
            ensure(ok, || format!("as({before}) changed under {a:?} + {t:?}"))?;
        }
    }

    let (lo, hi) = bm_core::equidistant::k_range(&q(9, 5));
    let ratios: Vec<Rational> = (0..10)
        .map(|i| {
            let k = &lo + (&hi - &lo) * q(i, 9);
            parallel_pair_ratio(&pentagon(&PentagonParams::new(q(9, 5), k).unwrap(), &basis))
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let distinct: BTreeSet<&Rational> = ratios.iter().collect();
    ensure(distinct.len() == 10, || format!("parallel-pair ratios collide: {ratios:?}"))?;
    Ok("5 bodies x 1000 maps unchanged; 10 k values separated at r = 9/5".into())
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact 3D optimum", exact_3d_optimum, 1),
        ("192-family", nice_family, 5),
        ("exact 4D optimum", exact_4d_optimum, 1),
        ("theorem-as-oracle fuzz", theorem_fuzz, 120),
        ("search reproduction", search_reproduction, 600),
        ("asymmetry exactness", asymmetry_exactness, 30),
        ("equidistance certification", equidistance, 120),
        ("lemma 2D property suite", lemma_suite, 300),
        ("affine-invariance suite", affine_invariance, 60),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let line = match (&outcome, over) {
            (Ok(detail), false) => format!("PASS  criterion {} ({name}): {detail}", i + 1),
            (Ok(detail), true) => format!("FAIL  criterion {} ({name}): over the {budget} s budget; {detail}", i + 1),
            (Err(why), _) => format!("FAIL  criterion {} ({name}): {why}", i + 1),
        };
        if outcome.is_err() || over {
            failed += 1;
        }
        println!("{line} [{:.2} s]", elapsed.as_secs_f64());
    }
    if failed == 0 {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
