//! Seeded random inputs for the verification checks.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rz_pairing::circlevals::Scalar;
use rz_pairing::forms::{
    odd_ch, transgression, BundleData, CatalogMap, Form, K1Element, ModelManifold, Unitary, UnitaryHomotopy,
};
use rz_pairing::pairing::{GeometricKCycle, RZK0Cocycle};
use rz_pairing::spectra::{circle_twisted_spectrum, BlockOperatorData, Spectrum};
use rz_pairing::Result;

/// Kernel block with index in `[-3, 3]` and at most 20 positive eigenvalues.
pub fn block_data(rng: &mut ChaCha8Rng) -> BlockOperatorData {
    let index: i64 = rng.random_range(-3..=3);
    let h_minus: i64 = rng.random_range(0..=3);
    let h_plus = (h_minus + index).max(0);
    let h_minus = h_plus - index;
    let eigs = (0..rng.random_range(0..=20)).map(|_| (rng.random_range(0.05..50.0), rng.random_range(1..=2))).collect();
    BlockOperatorData::new(h_plus as u64, h_minus as u64, eigs).expect("positive eigenvalues")
}

/// Mirror-symmetric circle spectrum: twist `0`, or twist `½` with the
/// unpaired top mode dropped.
pub fn symmetric_circle_spectrum(half_twist: bool, cutoff: u64) -> Result<Spectrum> {
    if !half_twist {
        return circle_twisted_spectrum(0.0, cutoff);
    }
    let n = cutoff as i64;
    Spectrum::from_modes((-n..n).map(|k| (k as f64 + 0.5, 1)), 0)
}

fn rotation(angle: f64) -> Unitary {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c]).map(|x| Complex64::new(x, 0.0))
}

fn phases(values: &[f64]) -> Unitary {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&x| Complex64::from_polar(1.0, x)),
    ))
}

/// A homotopy from a sum of windings to a deformed, conjugated copy of it.
pub struct CircleHomotopy {
    pub g0: K1Element,
    pub g1: K1Element,
    pub path: UnitaryHomotopy,
}

/// Random smooth homotopy of rank 1 or 2 on the `n`-point circle grid.
pub fn circle_homotopy(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> Result<CircleHomotopy> {
    let rank = rng.random_range(1..=2usize);
    let windings: Vec<i64> = (0..rank).map(|_| rng.random_range(-3..=3)).collect();
    let w: i64 = windings.iter().sum();
    let modes: Vec<Vec<(f64, f64)>> =
        (0..rank).map(|_| (0..3).map(|_| (rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8))).collect()).collect();
    let shift: Vec<f64> = (0..rank).map(|_| rng.random_range(-1.5..1.5)).collect();
    let (alpha, beta) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let g = move |t: f64, th: f64| {
        let ph: Vec<f64> = (0..rank)
            .map(|j| {
                let wave: f64 = modes[j]
                    .iter()
                    .enumerate()
                    .map(|(m, (a, b))| a * ((m + 1) as f64 * th).cos() + b * ((m + 1) as f64 * th).sin())
                    .sum();
                windings[j] as f64 * th + t * (wave + TAU * shift[j])
            })
            .collect();
        let d = phases(&ph);
        if rank == 2 {
            let r = rotation(t * (alpha * th.cos() + beta));
            &r * d * r.adjoint()
        } else {
            d
        }
    };
    let path = UnitaryHomotopy::from_fn(n, steps, &g)?;
    let g0 = K1Element::grid_unitary(path.start().to_vec(), w)?;
    let g1 = K1Element::grid_unitary(path.end().to_vec(), w)?;
    Ok(CircleHomotopy { g0, g1, path })
}

/// `‖d Tch - (ch g₁ - ch g₀)‖_∞` for one homotopy.
pub fn transgression_defect(h: &CircleHomotopy) -> Result<f64> {
    let circle = ModelManifold::Circle;
    let tch = transgression(&h.g0, &h.g1, &h.path)?;
    let expected = odd_ch(&h.g1, &circle)?.sub(&odd_ch(&h.g0, &circle)?)?;
    Ok(tch.exterior_derivative()?.sub(&expected)?.sup_norm())
}

fn small_rational(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::ratio(rng.random_range(-60..=60), rng.random_range(1..=24))
}

/// Cocycles `e₁, e₂, e₃` with `g₂ = g₁ ⊕ g₃` and `μ₂ = μ₁ + μ₃ - tch`, a
/// transgression `tch`, and a cycle to pair against.
pub struct K0Triple {
    pub e1: RZK0Cocycle,
    pub e2: RZK0Cocycle,
    pub e3: RZK0Cocycle,
    pub tch: Form,
    pub cycle: GeometricKCycle,
}

pub fn k0_triple(rng: &mut ChaCha8Rng) -> Result<K0Triple> {
    let on_circle = rng.random_bool(0.5);
    let base = if on_circle { ModelManifold::Circle } else { ModelManifold::Sphere(2) };
    let pick_g = |rng: &mut ChaCha8Rng| {
        if on_circle {
            K1Element::Winding(rng.random_range(-4..=4))
        } else {
            K1Element::identity(rng.random_range(1..=2))
        }
    };
    let (g1, g3) = (pick_g(rng), pick_g(rng));
    let g2 = K1Element::direct_sum(vec![g1.clone(), g3.clone()]);
    // a global phase rotation by c full turns transgresses by rank · c
    let turns = rng.random_range(-2..=2i64);
    let tch = Form::constant(&base, Scalar::int(turns * g2.rank() as i64))?;
    let mu = |rng: &mut ChaCha8Rng| -> Result<Form> {
        let f = Form::constant(&base, small_rational(rng))?;
        if on_circle {
            Ok(f)
        } else {
            f.add(&Form::top(&base, small_rational(rng))?)
        }
    };
    let (mu1, mu3) = (mu(rng)?, mu(rng)?);
    let mu2 = mu1.add(&mu3)?.sub(&tch)?;
    let cycle = if on_circle {
        let (m, e) = match rng.random_range(0..4) {
            0 => (ModelManifold::Sphere(2), BundleData::Bott(1)),
            1 => (ModelManifold::Point, BundleData::Trivial(rng.random_range(1..=3))),
            2 => (ModelManifold::Sphere(2), BundleData::Line(rng.random_range(-3..=3))),
            _ => (ModelManifold::Torus2, BundleData::Line(rng.random_range(-3..=3))),
        };
        GeometricKCycle::new(m, e, CatalogMap::constant(base.clone()))?
    } else {
        let e = match rng.random_range(0..3) {
            0 => BundleData::Bott(1),
            1 => BundleData::Line(rng.random_range(-3..=3)),
            _ => BundleData::Sum(vec![BundleData::Trivial(2), BundleData::Line(rng.random_range(-2..=2))]),
        };
        GeometricKCycle::new(base.clone(), e, CatalogMap::SelfMap { degree: rng.random_range(-2..=2) })?
    };
    Ok(K0Triple {
        e1: RZK0Cocycle::new(g1, mu1, base.clone())?,
        e2: RZK0Cocycle::new(g2, mu2, base.clone())?,
        e3: RZK0Cocycle::new(g3, mu3, base)?,
        tch,
        cycle,
    })
}

/// A random 1-form `ν` on the torus grid; `dν` is a top-degree grid form.
pub fn torus_one_form(rng: &mut ChaCha8Rng, n: usize) -> Result<Form> {
    let t = ModelManifold::Torus2;
    let c: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (p, q) = (rng.random_range(1..=4) as f64, rng.random_range(1..=4) as f64);
    let a = Form::grid_from_fn(&t, n, 0b01, |x| c[0] * (p * x[1]).sin() + c[1] * (x[0] + q * x[1]).cos() + c[2])?;
    let b = Form::grid_from_fn(&t, n, 0b10, |x| c[3] * (q * x[0]).cos() * x[1].sin() + c[4] * (p * x[0]).sin() + c[5])?;
    a.add(&b)
}
