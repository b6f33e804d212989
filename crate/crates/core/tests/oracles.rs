//! Checks against independently computed reference values.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rz_pairing::circlevals::{CircleValue, Scalar};
use rz_pairing::eta::{eta_circle_flat, eta_sharp, eta_sharp_bruteforce, hurwitz_eta_zero, twisted_circle_eta, HurwitzConfig};
use rz_pairing::forms::{
    ch_bundle, odd_ch, transgression, BundleData, CatalogMap, Form, K1Element, ModelManifold, UnitaryHomotopy,
};
use rz_pairing::pairing::{pair_h1, pair_k0, GeometricKCycle, RZK0Cocycle};
use rz_pairing::spectra::{
    circle_twisted_spectrum, eta_partial_sum, sharp_product_spectrum, BlockOperatorData, Spectrum,
};
use rz_pairing::spectral_flow::{spectral_flow, PiecewiseLinear, SpectralFamily};

/// `lim_{t→0} Σ sgn(λ) e^{-t|λ|}` for `λ = n + a`, by Richardson
/// extrapolation of the closed-form heat-type sum.
fn exponential_eta(a: f64) -> f64 {
    let f = |t: f64| ((-t * a).exp_m1() - (-t * (1.0 - a)).exp_m1()) / -(-t).exp_m1();
    let levels = 8;
    let mut table: Vec<f64> = (0..levels).map(|k| f(0.2 / 2f64.powi(k))).collect();
    for order in 1..levels {
        let factor = 2f64.powi(order);
        for k in (order as usize..levels as usize).rev() {
            table[k] = (factor * table[k] - table[k - 1]) / (factor - 1.0);
        }
    }
    table[levels as usize - 1]
}

/// `ζ(2, a)` by direct summation plus the asymptotic tail of the remainder.
fn hurwitz_two(a: f64) -> f64 {
    let n = 100_000usize;
    let direct: f64 = (0..n).rev().map(|k| (k as f64 + a).powi(-2)).sum();
    let x = n as f64 + a;
    direct + 1.0 / x + 0.5 / (x * x) + 1.0 / (6.0 * x * x * x)
}

#[test]
fn hurwitz_at_zero_matches_exponential_regularization() {
    for a in [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95] {
        let oracle = exponential_eta(a);
        assert!((oracle - (1.0 - 2.0 * a)).abs() < 1e-10, "oracle drifted at {a}: {oracle}");
        let engine = hurwitz_eta_zero(a).unwrap();
        assert!((engine - oracle).abs() <= 1e-8, "a={a}: {engine} vs {oracle}");
    }
    assert!((hurwitz_eta_zero(0.9).unwrap() + 0.8).abs() <= 1e-8);
}

#[test]
fn hurwitz_at_two_matches_direct_series() {
    let cfg = HurwitzConfig::default();
    for a in [0.1, 0.25, 0.6] {
        let engine = twisted_circle_eta(a, 2.0, &cfg).unwrap();
        let oracle = hurwitz_two(a) - hurwitz_two(1.0 - a);
        assert!((engine - oracle).abs() < 1e-10, "a={a}: {engine} vs {oracle}");
    }
    // truncated circle spectrum against the series
    let spec = circle_twisted_spectrum(0.25, 1000).unwrap();
    let truncated = eta_partial_sum(&spec, 2.0);
    assert!((truncated - (hurwitz_two(0.25) - hurwitz_two(0.75))).abs() <= 1e-6);
}

#[test]
fn circle_closed_form_against_numeric() {
    let r = eta_circle_flat(Scalar::ratio(1, 4)).unwrap();
    assert!((r.eta.to_f64() - hurwitz_eta_zero(0.25).unwrap()).abs() <= 1e-8);
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

/// Assembles `[[A, P*], [P, -A]]` on `(E⁺ ⊕ E⁻) ⊗ V` with `P` built from its
/// singular values in random orthonormal bases, and diagonalizes it.
fn block_matrix_eigenvalues(p: &BlockOperatorData, a_modes: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sv: Vec<f64> = p.positive_eigs().iter().flat_map(|&(l, m)| std::iter::repeat_n(l.sqrt(), m as usize)).collect();
    let l = sv.len();
    let (dp, dm) = (p.h_plus() as usize + l, p.h_minus() as usize + l);
    let mut core = DMatrix::zeros(dm, dp);
    for (i, s) in sv.iter().enumerate() {
        core[(i, i)] = *s;
    }
    let pm = random_orthogonal(dm, rng) * core * random_orthogonal(dp, rng).transpose();
    let k = a_modes.len();
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(a_modes.to_vec()));
    let dim = (dp + dm) * k;
    let mut d = DMatrix::zeros(dim, dim);
    let kron = |x: &DMatrix<f64>, y: &DMatrix<f64>| x.kronecker(y);
    d.view_mut((0, 0), (dp * k, dp * k)).copy_from(&kron(&DMatrix::identity(dp, dp), &a));
    d.view_mut((dp * k, dp * k), (dm * k, dm * k)).copy_from(&(-kron(&DMatrix::identity(dm, dm), &a)));
    d.view_mut((dp * k, 0), (dm * k, dp * k)).copy_from(&kron(&pm, &DMatrix::identity(k, k)));
    d.view_mut((0, dp * k), (dp * k, dm * k)).copy_from(&kron(&pm.transpose(), &DMatrix::identity(k, k)));
    let mut ev: Vec<f64> = d.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn expand(spec: &Spectrum) -> Vec<f64> {
    let mut out: Vec<f64> = spec.eigenvalues().iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m as usize)).collect();
    out.extend(std::iter::repeat_n(0.0, spec.kernel_dim() as usize));
    out.sort_by(f64::total_cmp);
    out
}

fn assert_same_multiset(engine: &[f64], oracle: &[f64]) {
    assert_eq!(engine.len(), oracle.len());
    for (x, y) in engine.iter().zip(oracle) {
        assert!((x - y).abs() < 1e-9, "{engine:?} vs {oracle:?}");
    }
}

#[test]
fn sharp_product_matches_block_diagonalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fixed = BlockOperatorData::new(2, 1, vec![(1.0, 1)]).unwrap();
    let a = [-1.0, 1.0];
    let engine = expand(&sharp_product_spectrum(&fixed, &Spectrum::from_values(&a).unwrap()));
    assert_same_multiset(&engine, &block_matrix_eigenvalues(&fixed, &a, &mut rng));

    let p = BlockOperatorData::new(1, 0, vec![(4.0, 1)]).unwrap();
    let engine = expand(&sharp_product_spectrum(&p, &Spectrum::from_values(&[1.0]).unwrap()));
    assert_same_multiset(&engine, &[-5f64.sqrt(), 1.0, 5f64.sqrt()]);

    for _ in 0..25 {
        let hp = rng.random_range(0..4u64);
        let hm = rng.random_range(0..4u64);
        let eigs: Vec<(f64, u64)> = (0..rng.random_range(0..4)).map(|_| (rng.random_range(0.1..5.0), 1)).collect();
        let p = BlockOperatorData::new(hp, hm, eigs).unwrap();
        let modes: Vec<f64> = (0..rng.random_range(1..5)).map(|_| rng.random_range(-3.0..3.0)).collect();
        let engine = expand(&sharp_product_spectrum(&p, &Spectrum::from_values(&modes).unwrap()));
        assert_same_multiset(&engine, &block_matrix_eigenvalues(&p, &modes, &mut rng));
    }
}

#[test]
fn sharp_eta_enumeration() {
    let p = BlockOperatorData::new(2, 0, vec![(1.0, 1), (4.0, 1)]).unwrap();
    let a = Spectrum::from_values(&[0.25]).unwrap();
    let full = sharp_product_spectrum(&p, &a);
    let oracle: f64 = expand(&full).iter().filter(|v| **v != 0.0).map(|v| v.signum()).sum();
    assert_eq!(oracle, 2.0);
    assert_eq!(eta_sharp_bruteforce(&p, &a).value, 2.0);

    let p = BlockOperatorData::new(3, 1, vec![(2.0, 2)]).unwrap();
    let a = Spectrum::from_values(&[-0.5, 0.5, 1.5]).unwrap();
    let half = Spectrum::from_values(&[0.5]).unwrap();
    assert_eq!(eta_sharp(Scalar::int(2), Scalar::ONE).to_f64(), eta_sharp_bruteforce(&p, &half).value);
    assert!(eta_sharp_bruteforce(&p, &a).truncation_bias);
}

/// Signed count of solutions of `n + a(s) = 0` on each linear piece.
fn crossing_oracle(path: &PiecewiseLinear) -> i64 {
    let mut total = 0;
    for w in path.knots().windows(2) {
        let (a0, a1) = (w[0].1, w[1].1);
        // with zero modes counted as positive, the non-negative branches are
        // n ≥ -a, so the count moves with ⌊a⌋
        total += a1.floor() as i64 - a0.floor() as i64;
    }
    total
}

#[test]
fn spectral_flow_matches_crossing_enumeration() {
    let cases = [
        PiecewiseLinear::affine(0.25, 1.25).unwrap(),
        PiecewiseLinear::affine(0.25, -1.75).unwrap(),
        PiecewiseLinear::new(vec![(0.0, 0.1), (0.4, 2.7), (0.8, -1.3), (1.0, 0.6)]).unwrap(),
        PiecewiseLinear::affine(-2.0, 2.0).unwrap(),
    ];
    for path in cases {
        let engine = spectral_flow(&SpectralFamily::circle_twist(path.clone(), 128)).unwrap().flow;
        assert_eq!(engine, crossing_oracle(&path), "{path:?}");
    }
    assert_eq!(spectral_flow(&SpectralFamily::circle_twist(PiecewiseLinear::affine(0.25, 1.25).unwrap(), 16)).unwrap().flow, 1);
    assert_eq!(spectral_flow(&SpectralFamily::circle_twist(PiecewiseLinear::affine(0.25, -1.75).unwrap(), 16)).unwrap().flow, -2);
}

#[test]
fn line_bundle_against_curvature_exponential() {
    // B = 2πk ω, so exp(B/2π) has degree-2 part k ω
    let s2 = ModelManifold::Sphere(2);
    for k in -3..=3 {
        let b_over_2pi = Form::top(&s2, Scalar::int(k) * Scalar::Float(TAU) / Scalar::Float(TAU)).unwrap();
        let oracle = 1.0 + b_over_2pi.integrate(&s2).unwrap().to_f64();
        let ch = ch_bundle(&BundleData::Line(k), &s2).unwrap();
        assert_eq!(ch.degree_part(2).integrate(&s2).unwrap(), Scalar::int(k));
        assert_eq!(1.0 + ch.integrate(&s2).unwrap().to_f64(), oracle);
    }
}

fn phase(x: f64) -> DMatrix<Complex64> {
    DMatrix::from_element(1, 1, Complex64::from_polar(1.0, x))
}

#[test]
fn winding_odd_character_against_trace_formula() {
    // Tr(g⁻¹dg) = 3i dθ, times 1/(2πi), integrates to 3
    let n = 512;
    let g = K1Element::grid_from_fn(n, 3, |t| phase(3.0 * t)).unwrap();
    let ch = odd_ch(&g, &ModelManifold::Circle).unwrap();
    for v in ch.grid().unwrap().component(1).unwrap() {
        assert!((v - 3.0 / TAU).abs() < 1e-12);
    }
    assert_eq!(odd_ch(&K1Element::Winding(3), &ModelManifold::Circle).unwrap().integrate(&ModelManifold::Circle).unwrap(), Scalar::int(3));
}

#[test]
fn phase_rotation_transgression_against_closed_form() {
    for c in [-2i32, 1, 4] {
        let g = K1Element::Winding(1);
        let path = UnitaryHomotopy::from_fn(64, 512, |t, th| phase(th + TAU * t * c as f64)).unwrap();
        let tch = transgression(&g, &g, &path).unwrap();
        // ∫₀¹ Tr(g⁻¹∂_t g)/(2πi) dt = c
        for v in tch.grid().unwrap().component(0).unwrap() {
            assert!((v - c as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn pairings_against_componentwise_evaluation() {
    for (a, w) in [(Scalar::ratio(1, 4), 1), (Scalar::ratio(3, 10), 2), (Scalar::ratio(7, 9), -1)] {
        let a_pulled = CircleValue::from_scalar(a * Scalar::int(w)).unwrap().to_scalar();
        let oracle = CircleValue::from_scalar((Scalar::ONE - a_pulled) - a_pulled).unwrap();
        assert_eq!(pair_h1(a, w).unwrap().value, oracle);
    }

    let s2 = ModelManifold::Sphere(2);
    let m0 = Scalar::ratio(3, 11);
    let x = RZK0Cocycle::new(K1Element::identity(1), Form::constant(&s2, m0).unwrap(), s2.clone()).unwrap();
    let gen = GeometricKCycle::new(s2.clone(), BundleData::Bott(1), CatalogMap::Identity).unwrap();
    assert_eq!(pair_k0(&x, &gen).unwrap().value, CircleValue::from_scalar(Scalar::HALF - m0).unwrap());

    // line(k) on S²: index k, kernel |k|, topological term k m₀
    for k in [-2i64, 1, 3] {
        let c = GeometricKCycle::new(s2.clone(), BundleData::Line(k), CatalogMap::Identity).unwrap();
        let oracle = CircleValue::from_scalar(Scalar::ratio(k.abs(), 2) - Scalar::int(k) * m0).unwrap();
        assert_eq!(pair_k0(&x, &c).unwrap().value, oracle);
    }
}

#[test]
fn torus_grid_topological_term_against_quadrature() {
    // ∫_{T²} f dθ₁dθ₂ for a trigonometric f with known mean
    let t = ModelManifold::Torus2;
    let n = 64;
    let f = Form::grid_from_fn(&t, n, 0b11, |a| 0.5 + (a[0] + a[1]).cos() * a[1].sin()).unwrap();
    let v = f.integrate(&t).unwrap().to_f64();
    assert!((v - 0.5 * 4.0 * PI * PI).abs() < 1e-10);
}
