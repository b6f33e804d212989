//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rz_pairing::circlevals::circular_distance;
use rz_pairing::eta::{dai_zhang_reduced, eta_circle_flat, eta_sharp_bruteforce, hurwitz_eta_zero, reduced_eta};
use rz_pairing::forms::{
    ch_bundle, exactness_residual, todd_form, BundleData, CatalogMap, Form, K1Element, ModelManifold,
};
use rz_pairing::pairing::{
    analytic_term_k0, k0_relation_residual, khomology_residual, pair_h1, pair_h2, pair_k0, GeometricKCycle,
    KHomologyRelation, RZK0Cocycle,
};
use rz_pairing::spectra::eta_partial_sum;
use rz_pairing::spectral_flow::{spectral_flow, PiecewiseLinear, SpectralFamily};
use rz_pairing::{CircleValue, Scalar};
use rz_pairing_lab::generators::{
    block_data, circle_homotopy, k0_triple, symmetric_circle_spectrum, torus_one_form, transgression_defect,
};
use rz_pairing_lab::scenario::{plan, Task};
use rz_pairing_lab::{Options, GOLDEN};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn within(limit: Duration, took: Duration) -> Result<(), String> {
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn tenths() -> impl Iterator<Item = Scalar> {
    (1..=9).map(|k| Scalar::ratio(k, 10))
}

fn sphere_generator(n: u32) -> Result<GeometricKCycle, String> {
    GeometricKCycle::new(ModelManifold::Sphere(n), BundleData::Bott(n / 2), CatalogMap::Identity).map_err(e)
}

fn circle_eta() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for a in tenths() {
        let expected = Scalar::ONE - Scalar::int(2) * a;
        let r = eta_circle_flat(a).map_err(e)?;
        ensure(r.eta == expected, || format!("eta({a}) = {}, expected {expected}", r.eta))?;
        worst = worst.max((hurwitz_eta_zero(a.to_f64()).map_err(e)? - expected.to_f64()).abs());
    }
    ensure(worst <= 1e-8, || format!("numeric deviation {worst:e}"))?;
    within(Duration::from_secs(1), start.elapsed())?;
    Ok(format!("max numeric deviation {worst:.1e}"))
}

fn reduced_circle_eta() -> Outcome {
    for a in tenths().chain([Scalar::ratio(1, 3), Scalar::ratio(5, 7)]) {
        let r = eta_circle_flat(a).map_err(e)?.reduced;
        let expected = CircleValue::from_scalar(Scalar::ONE - a).map_err(e)?;
        ensure(r.is_exact() && r == expected, || format!("reduced({a}) = {r}, expected {expected}"))?;
    }
    Ok("exact".into())
}

fn sharp_oracle() -> Outcome {
    let start = Instant::now();
    let specs = [symmetric_circle_spectrum(false, 1000).map_err(e)?, symmetric_circle_spectrum(true, 1000).map_err(e)?];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let p = block_data(&mut rng);
        let spec = &specs[i % 2];
        let brute = eta_sharp_bruteforce(&p, spec).value;
        worst = worst.max((brute - p.index_plus() as f64 * eta_partial_sum(spec, 0.0)).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    within(Duration::from_secs(2), start.elapsed())?;
    Ok(format!("max deviation {worst:.1e} over 50 blocks"))
}

fn index_integrals() -> Outcome {
    let s2 = ModelManifold::Sphere(2);
    for k in -3..=3 {
        let v = ch_bundle(&BundleData::Line(k), &s2).map_err(e)?.degree_part(2).integrate(&s2).map_err(e)?;
        ensure(v == Scalar::int(k), || format!("line({k}) integrates to {v}"))?;
    }
    for p in 1..=3 {
        let m = ModelManifold::Sphere(2 * p);
        let v = ch_bundle(&BundleData::Bott(p), &m)
            .and_then(|c| c.wedge(&todd_form(&m)?))
            .and_then(|f| f.integrate(&m))
            .map_err(e)?;
        ensure(v == Scalar::ONE, || format!("bott({p}) index {v}"))?;
    }
    Ok("exact".into())
}

fn headline_values() -> Outcome {
    let half = CircleValue::from_scalar(Scalar::HALF).map_err(e)?;
    for n in [2, 4, 6] {
        let (eta, _) = analytic_term_k0(&sphere_generator(n)?, &K1Element::identity(1)).map_err(e)?;
        ensure(eta.reduced == half, || format!("S^{n}: {}", eta.reduced))?;
    }
    for b in [Scalar::ZERO, Scalar::ratio(1, 4), Scalar::ratio(3, 2)] {
        let v = pair_h2(b, 1).map_err(e)?.value;
        let expected = CircleValue::from_scalar(Scalar::HALF - b).map_err(e)?;
        ensure(v == expected && v.is_exact(), || format!("pair_h2({b}) = {v}, expected {expected}"))?;
    }
    Ok("exact".into())
}

fn h1_pairing() -> Outcome {
    for a in tenths() {
        let v = pair_h1(a, 1).map_err(e)?.value;
        let expected = CircleValue::from_scalar(Scalar::ONE - Scalar::int(2) * a).map_err(e)?;
        ensure(v == expected && v.is_exact(), || format!("pair_h1({a}, 1) = {v}, expected {expected}"))?;
    }
    Ok("exact".into())
}

fn transgression_property() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        worst = worst.max(transgression_defect(&circle_homotopy(&mut rng, 2048, 64).map_err(e)?).map_err(e)?);
    }
    ensure(worst <= 1e-6, || format!("sup-norm defect {worst:e}"))?;
    within(Duration::from_secs(5), start.elapsed())?;
    Ok(format!("max defect {worst:.1e} over 10 homotopies"))
}

fn exactness() -> Outcome {
    let planned = plan(GOLDEN, &Options::default()).map_err(e)?;
    let mut count = 0;
    let mut worst = 0.0_f64;
    for p in &planned {
        if let Task::PairK0 { x, .. } | Task::KHomology { x, .. } = &p.task {
            worst = worst.max(x.exactness_residual());
            count += 1;
        }
    }
    ensure(count > 0, || "no bundled cocycles".into())?;
    ensure(worst <= 1e-8, || format!("bundled residual {worst:e}"))?;
    let circle = ModelManifold::Circle;
    let mu = Form::constant(&circle, Scalar::ratio(1, 3)).map_err(e)?;
    let wave = Form::grid_from_fn(&circle, 1024, 0, |x| x[0].sin()).map_err(e)?;
    let corrupted = exactness_residual(&mu.add(&wave).map_err(e)?, &K1Element::Winding(2)).map_err(e)?;
    ensure(corrupted >= 0.9, || format!("corrupted residual {corrupted}"))?;
    Ok(format!("{count} bundled cocycles, max {worst:.1e}; corrupted {corrupted:.3}"))
}

fn k0_relation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let t = k0_triple(&mut rng).map_err(e)?;
        worst = worst.max(k0_relation_residual(&t.e1, &t.e2, &t.e3, &t.tch, &t.cycle).map_err(e)?);
    }
    ensure(worst <= 1e-9, || format!("max residual {worst:e}"))?;
    within(Duration::from_secs(2), start.elapsed())?;
    Ok(format!("max residual {worst:.1e} over 100 triples"))
}

fn khomology() -> Outcome {
    let s2 = ModelManifold::Sphere(2);
    let mu = Form::constant(&s2, Scalar::ratio(1, 7)).and_then(|m| m.add(&Form::top(&s2, Scalar::ratio(2, 3))?));
    let x = RZK0Cocycle::new(K1Element::identity(1), mu.map_err(e)?, s2.clone()).map_err(e)?;
    let point = |r| GeometricKCycle::new(ModelManifold::Point, BundleData::Trivial(r), CatalogMap::constant(s2.clone()));
    let exact = [
        KHomologyRelation::DirectSum {
            manifold: s2.clone(),
            map: CatalogMap::Identity,
            e1: BundleData::Trivial(1),
            e2: BundleData::Bott(1),
        },
        KHomologyRelation::DirectSum {
            manifold: s2.clone(),
            map: CatalogMap::SelfMap { degree: 2 },
            e1: BundleData::Line(-1),
            e2: BundleData::Line(3),
        },
        KHomologyRelation::DisjointUnion(point(1).map_err(e)?, point(2).map_err(e)?),
        KHomologyRelation::DisjointUnion(sphere_generator(2)?, point(3).map_err(e)?),
    ];
    for rel in &exact {
        let r = khomology_residual(&x, rel).map_err(e)?;
        ensure(r == 0.0, || format!("{rel:?}: residual {r:e}"))?;
    }
    let mut worst = 0.0_f64;
    for p in [1, 2] {
        for cycle in [
            GeometricKCycle::new(s2.clone(), BundleData::Trivial(1), CatalogMap::Identity).map_err(e)?,
            sphere_generator(2)?,
            point(2).map_err(e)?,
        ] {
            worst = worst.max(khomology_residual(&x, &KHomologyRelation::BundleModification { cycle, p }).map_err(e)?);
        }
    }
    ensure(worst <= 1e-9, || format!("bundle modification residual {worst:e}"))?;
    Ok(format!("sum/union exactly 0; modification max {worst:.1e}"))
}

fn spectral_flow_counts() -> Outcome {
    for w in -3..=3i64 {
        let path = PiecewiseLinear::affine(0.25, 0.25 + w as f64).map_err(e)?;
        let sf = spectral_flow(&SpectralFamily::circle_twist(path, 1024)).map_err(e)?.flow;
        ensure(sf == w, || format!("winding {w}: flow {sf}"))?;
    }
    for (eta, h) in [(Scalar::ZERO, 1), (Scalar::HALF, 1), (Scalar::ratio(-3, 5), 2)] {
        let r = reduced_eta(eta, h).map_err(e)?;
        for sf in -5..=5 {
            let v = dai_zhang_reduced(&r, sf).map_err(e)?;
            ensure(v == r.reduced, || format!("eta {eta}, sf {sf}: {v} vs {}", r.reduced))?;
        }
    }
    Ok("exact".into())
}

fn torus_value(mu: Form, k: i64) -> Result<CircleValue, String> {
    let t = ModelManifold::Torus2;
    let x = RZK0Cocycle::new(K1Element::identity(1), mu, t.clone()).map_err(e)?;
    let c = GeometricKCycle::new(t, BundleData::Line(k), CatalogMap::Identity).map_err(e)?;
    Ok(pair_k0(&x, &c).map_err(e)?.value)
}

fn representative_independence() -> Outcome {
    let t = ModelManifold::Torus2;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut shift, mut doubling) = (0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let k = rng.random_range(-3..=3);
        let m0 = Form::constant(&t, Scalar::ratio(rng.random_range(0..60), 60)).map_err(e)?;
        let base = torus_value(m0.clone(), k)?;
        let mut twin = rng.clone();
        let nu = torus_one_form(&mut rng, 1024).map_err(e)?;
        let nu_fine = torus_one_form(&mut twin, 2048).map_err(e)?;
        let coarse = torus_value(m0.add(&nu.exterior_derivative().map_err(e)?).map_err(e)?, k)?;
        let fine = torus_value(m0.add(&nu_fine.exterior_derivative().map_err(e)?).map_err(e)?, k)?;
        shift = shift.max(circular_distance(base, coarse));
        doubling = doubling.max(circular_distance(coarse, fine));
    }
    ensure(shift <= 1e-8 && doubling <= 1e-8, || format!("shift {shift:e}, doubling {doubling:e}"))?;
    Ok(format!("μ + dν max {shift:.1e}; 1024 vs 2048 max {doubling:.1e}"))
}

fn non_degeneracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let tol = 1e-9;
    let mut samples = Vec::with_capacity(1000);
    for i in 0..1000 {
        let n = [2, 4, 6][i % 3];
        let s = ModelManifold::Sphere(n);
        let m0: f64 = rng.random_range(0.0..1.0);
        let x = RZK0Cocycle::new(K1Element::identity(1), Form::constant(&s, Scalar::Float(m0)).map_err(e)?, s)
            .map_err(e)?;
        let v = pair_k0(&x, &sphere_generator(n)?).map_err(e)?.value;
        let expected = CircleValue::from_scalar(Scalar::Float(0.5 - m0)).map_err(e)?;
        ensure(circular_distance(v, expected) <= tol, || format!("μ₀ = {m0}: {v}, expected {expected}"))?;
        samples.push((m0, v));
    }
    for (i, &(a, va)) in samples.iter().enumerate() {
        for &(b, vb) in &samples[i + 1..] {
            let inputs_differ = (a - b).abs().min(1.0 - (a - b).abs()) > tol;
            ensure(!(inputs_differ && circular_distance(va, vb) <= tol), || format!("μ₀ = {a} and {b} collide"))?;
        }
    }
    Ok("1000 samples, injective".into())
}

fn reproduce() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_rz-pairing-lab")).arg("reproduce").output().map_err(e)?;
    let took = start.elapsed();
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}\n{}{}", out.status.code(), String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })?;
    within(Duration::from_secs(10), took)?;
    let summary = String::from_utf8_lossy(&out.stdout).lines().last().unwrap_or_default().to_string();
    Ok(format!("{summary} in {took:.2?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("circle eta closed form", circle_eta),
        ("reduced circle eta", reduced_circle_eta),
        ("sharp-product oracle equivalence", sharp_oracle),
        ("index integrals", index_integrals),
        ("headline analytic values", headline_values),
        ("degree-one pairing", h1_pairing),
        ("transgression differential", transgression_property),
        ("exactness condition", exactness),
        ("K0 relation additivity", k0_relation),
        ("K-homology relations", khomology),
        ("spectral flow", spectral_flow_counts),
        ("representative independence", representative_independence),
        ("non-degeneracy at the generator", non_degeneracy),
        ("golden table reproduction", reproduce),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
