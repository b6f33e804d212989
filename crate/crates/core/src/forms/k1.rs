//! Unitary maps into `U(N)`, their odd Chern characters and transgression
//! forms.
//!
//! Normalization: the degree-`2n+1` term of the odd Chern character is
//! `(-1)ⁿ n! / ((2πi)^{n+1} (2n+1)!) Tr (g⁻¹dg)^{2n+1}`, so the circle map
//! `θ ↦ e^{ikθ}` has `∫ ch = k`. The transgression uses the same constant and
//! satisfies `d Tch(g₀, g₁) = ch(g₁) - ch(g₀)`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::form::Form;
use super::manifold::ModelManifold;
use super::spectral::derivative_complex;
use crate::circlevals::Scalar;
use crate::error::{domain, Error, Result};

/// Tolerance for unitarity of sampled matrices.
pub const UNITARY_TOLERANCE: f64 = 1e-10;
/// Minimum number of `t`-steps of a sampled homotopy.
pub const MIN_HOMOTOPY_STEPS: usize = 64;
const ENDPOINT_TOLERANCE: f64 = 1e-8;

pub type Unitary = DMatrix<Complex64>;

/// A unitary-valued map on a catalog manifold.
#[derive(Clone, Debug, PartialEq)]
pub enum K1Element {
    /// The constant identity of rank `N`, on any manifold.
    Identity { rank: usize },
    /// `θ ↦ e^{ikθ}` on the circle.
    Winding(i64),
    DirectSum(Vec<K1Element>),
    /// Samples on the uniform circle grid, with the caller's winding number.
    GridUnitary { samples: Vec<Unitary>, winding: i64 },
}

fn unitarity_defect(u: &Unitary) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - Unitary::identity(n, n)).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Total winding of `det g` along a closed sampled loop.
fn loop_winding(samples: &[Unitary]) -> Result<f64> {
    let n = samples.len();
    let mut total = 0.0;
    for i in 0..n {
        let step = (samples[(i + 1) % n].determinant() / samples[i].determinant()).arg();
        if step.abs() > PI / 2.0 {
            return Err(Error::Resolution(format!(
                "det g jumps by {step:.3} rad between samples {i} and {}; use a finer grid",
                (i + 1) % n
            )));
        }
        total += step;
    }
    Ok(total / TAU)
}

impl K1Element {
    pub fn identity(rank: usize) -> Self {
        K1Element::Identity { rank }
    }

    pub fn direct_sum(parts: Vec<K1Element>) -> Self {
        K1Element::DirectSum(parts)
    }

    /// Checks unitarity and that the asserted winding matches the sampled
    /// loop.
    pub fn grid_unitary(samples: Vec<Unitary>, winding: i64) -> Result<Self> {
        if samples.len() < 2 {
            return domain("a sampled unitary needs at least two grid points");
        }
        let rank = samples[0].nrows();
        for (i, u) in samples.iter().enumerate() {
            if u.nrows() != rank || u.ncols() != rank {
                return domain(format!("sample {i} is not {rank}x{rank}"));
            }
            let defect = unitarity_defect(u);
            if !(defect <= UNITARY_TOLERANCE) {
                return domain(format!("sample {i} is not unitary (defect {defect:.2e})"));
            }
        }
        let w = loop_winding(&samples)?;
        if (w - winding as f64).abs() > 1e-6 {
            return domain(format!("asserted winding {winding} but the samples wind {w:.6} times"));
        }
        Ok(K1Element::GridUnitary { samples, winding })
    }

    /// Samples `θ ↦ g(θ)` on `n` grid points.
    pub fn grid_from_fn(n: usize, winding: i64, g: impl Fn(f64) -> Unitary) -> Result<Self> {
        K1Element::grid_unitary((0..n).map(|i| g(TAU * i as f64 / n as f64)).collect(), winding)
    }

    pub fn rank(&self) -> usize {
        match self {
            K1Element::Identity { rank } => *rank,
            K1Element::Winding(_) => 1,
            K1Element::DirectSum(parts) => parts.iter().map(K1Element::rank).sum(),
            K1Element::GridUnitary { samples, .. } => samples[0].nrows(),
        }
    }

    /// Winding of `det g`, which decides the homotopy class on the circle.
    pub fn total_winding(&self) -> i64 {
        match self {
            K1Element::Identity { .. } => 0,
            K1Element::Winding(k) => *k,
            K1Element::DirectSum(parts) => parts.iter().map(K1Element::total_winding).sum(),
            K1Element::GridUnitary { winding, .. } => *winding,
        }
    }

    /// Whether the map is constant (defined on every catalog manifold).
    pub fn is_identity(&self) -> bool {
        match self {
            K1Element::Identity { .. } => true,
            K1Element::Winding(k) => *k == 0,
            K1Element::DirectSum(parts) => parts.iter().all(K1Element::is_identity),
            K1Element::GridUnitary { .. } => false,
        }
    }

    fn check_carrier(&self, m: &ModelManifold) -> Result<()> {
        if !self.is_identity() && m != &ModelManifold::Circle {
            return domain(format!("{self} is only catalogued on S^1, not {m}"));
        }
        Ok(())
    }

    /// Values on the `n`-point circle grid.
    pub fn sample(&self, n: usize) -> Result<Vec<Unitary>> {
        match self {
            K1Element::Identity { rank } => Ok(vec![Unitary::identity(*rank, *rank); n]),
            K1Element::Winding(k) => Ok((0..n)
                .map(|i| Unitary::from_element(1, 1, Complex64::from_polar(1.0, *k as f64 * TAU * i as f64 / n as f64)))
                .collect()),
            K1Element::DirectSum(parts) => {
                let rank = self.rank();
                let blocks: Vec<Vec<Unitary>> = parts.iter().map(|p| p.sample(n)).collect::<Result<_>>()?;
                Ok((0..n)
                    .map(|i| {
                        let mut m = Unitary::zeros(rank, rank);
                        let mut off = 0;
                        for b in &blocks {
                            let r = b[i].nrows();
                            m.view_mut((off, off), (r, r)).copy_from(&b[i]);
                            off += r;
                        }
                        m
                    })
                    .collect())
            }
            K1Element::GridUnitary { samples, .. } => {
                if samples.len() != n {
                    return Err(Error::Resolution(format!(
                        "sampled unitary has {} points, requested grid {n}",
                        samples.len()
                    )));
                }
                Ok(samples.clone())
            }
        }
    }

    fn has_grid(&self) -> bool {
        match self {
            K1Element::GridUnitary { .. } => true,
            K1Element::DirectSum(parts) => parts.iter().any(K1Element::has_grid),
            _ => false,
        }
    }

    fn grid_size(&self) -> Option<usize> {
        match self {
            K1Element::GridUnitary { samples, .. } => Some(samples.len()),
            K1Element::DirectSum(parts) => parts.iter().find_map(K1Element::grid_size),
            _ => None,
        }
    }
}

impl fmt::Display for K1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            K1Element::Identity { rank } => write!(f, "id({rank})"),
            K1Element::Winding(k) => write!(f, "winding({k})"),
            K1Element::DirectSum(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "sum({})", s.join(", "))
            }
            K1Element::GridUnitary { samples, winding } => {
                write!(f, "grid_unitary(n={}, rank={}, winding={winding})", samples.len(), samples[0].nrows())
            }
        }
    }
}

impl Serialize for K1Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Coefficient of `Tr (g⁻¹dg)^{2n+1}` in the odd Chern character.
pub fn odd_ch_coefficient(n: u32) -> Complex64 {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let denom = Complex64::new(0.0, TAU).powu(n + 1) * fact(2 * n + 1);
    Complex64::new(sign * fact(n), 0.0) / denom
}

/// `(1/2πi) Tr(g⁻¹ ∂θ g)` sampled on the grid, the `dθ` coefficient of the
/// degree-1 part.
fn grid_odd_ch(samples: &[Unitary]) -> Vec<f64> {
    let n = samples.len();
    let rank = samples[0].nrows();
    let mut deriv = vec![Unitary::zeros(rank, rank); n];
    for r in 0..rank {
        for c in 0..rank {
            let line: Vec<Complex64> = samples.iter().map(|u| u[(r, c)]).collect();
            for (i, z) in derivative_complex(&line).into_iter().enumerate() {
                deriv[i][(r, c)] = z;
            }
        }
    }
    samples.iter().zip(&deriv).map(|(u, du)| (u.adjoint() * du).trace().im / TAU).collect()
}

/// Odd Chern character of `g` over `m`. On the circle only the degree-1
/// term survives.
pub fn odd_ch(g: &K1Element, m: &ModelManifold) -> Result<Form> {
    g.check_carrier(m)?;
    match g {
        K1Element::Identity { .. } => Form::zero(m),
        K1Element::Winding(k) => Form::atom(m, 1, Scalar::int(*k)),
        K1Element::DirectSum(parts) => {
            let mut acc = Form::zero(m)?;
            for p in parts {
                acc = acc.add(&odd_ch(p, m)?)?;
            }
            Ok(acc)
        }
        K1Element::GridUnitary { samples, .. } => Form::grid_component(m, samples.len(), 1, grid_odd_ch(samples)),
    }
}

/// A sampled path `t ↦ g_t` of circle maps on a uniform `t`-grid.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryHomotopy {
    /// `frames[j][i] = g_{t_j}(θ_i)` with `t_j = j / steps`.
    frames: Vec<Vec<Unitary>>,
}

impl UnitaryHomotopy {
    pub fn new(frames: Vec<Vec<Unitary>>) -> Result<Self> {
        if frames.len() < 2 {
            return domain("a homotopy needs at least two frames");
        }
        let n = frames[0].len();
        if n < 2 {
            return domain("homotopy frames need at least two grid points");
        }
        let rank = frames[0][0].nrows();
        for (j, frame) in frames.iter().enumerate() {
            if frame.len() != n {
                return domain(format!("frame {j} has {} points, expected {n}", frame.len()));
            }
            for u in frame {
                if u.nrows() != rank || u.ncols() != rank {
                    return domain(format!("frame {j} changes rank"));
                }
                let defect = unitarity_defect(u);
                if !(defect <= UNITARY_TOLERANCE) {
                    return domain(format!("frame {j} is not unitary (defect {defect:.2e})"));
                }
            }
        }
        Ok(UnitaryHomotopy { frames })
    }

    /// Samples `(t, θ) ↦ g_t(θ)` with `steps` intervals in `t` and `n`
    /// points in `θ`.
    pub fn from_fn(n: usize, steps: usize, g: impl Fn(f64, f64) -> Unitary) -> Result<Self> {
        let frames = (0..=steps)
            .map(|j| {
                let t = j as f64 / steps as f64;
                (0..n).map(|i| g(t, TAU * i as f64 / n as f64)).collect()
            })
            .collect();
        UnitaryHomotopy::new(frames)
    }

    /// `g_t = g` for all `t`.
    pub fn constant(g: &K1Element, n: usize, steps: usize) -> Result<Self> {
        UnitaryHomotopy::new(vec![g.sample(n)?; steps + 1])
    }

    pub fn steps(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn grid_size(&self) -> usize {
        self.frames[0].len()
    }

    pub fn rank(&self) -> usize {
        self.frames[0][0].nrows()
    }

    pub fn start(&self) -> &[Unitary] {
        &self.frames[0]
    }

    pub fn end(&self) -> &[Unitary] {
        &self.frames[self.frames.len() - 1]
    }
}

fn max_distance(a: &[Unitary], b: &[Unitary]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))).fold(0.0, f64::max)
}

/// Transgression form `Tch(g₀, g₁)` along a sampled path on the circle.
///
/// Each `t`-step contributes `arg det(g_j⁻¹ g_{j+1}) / 2π`, the exact
/// integral of `(1/2πi) Tr(g⁻¹∂_t g)` over that step for the geodesic
/// interpolation, so the sum telescopes without quadrature error in `t`.
pub fn transgression(g0: &K1Element, g1: &K1Element, path: &UnitaryHomotopy) -> Result<Form> {
    if g0.rank() != g1.rank() || g0.rank() != path.rank() {
        return domain(format!("ranks differ: {} , {} and path {}", g0.rank(), g1.rank(), path.rank()));
    }
    if path.steps() < MIN_HOMOTOPY_STEPS {
        return domain(format!("homotopy needs at least {MIN_HOMOTOPY_STEPS} t-steps, got {}", path.steps()));
    }
    let n = path.grid_size();
    for (label, g, frame) in [("start", g0, path.start()), ("end", g1, path.end())] {
        let d = max_distance(&g.sample(n)?, frame);
        if !(d <= ENDPOINT_TOLERANCE) {
            return domain(format!("path {label} differs from the given map by {d:.2e}"));
        }
    }
    let mut tch = vec![0.0; n];
    for (j, w) in path.frames.windows(2).enumerate() {
        for (i, acc) in tch.iter_mut().enumerate() {
            let step = (w[0][i].adjoint() * &w[1][i]).determinant().arg();
            if step.abs() > PI / 2.0 {
                return Err(Error::Resolution(format!(
                    "det moves by {step:.3} rad in t-step {j} at grid point {i}; refine the homotopy"
                )));
            }
            *acc += step / TAU;
        }
    }
    Form::grid_component(&ModelManifold::Circle, n, 0, tch)
}

/// `Tch(g₂, g₁ ⊕ g₃)`, so that `d Tch = ch(g₁) + ch(g₃) - ch(g₂)`.
pub fn transgression_triple(
    g1: &K1Element,
    g2: &K1Element,
    g3: &K1Element,
    path: &UnitaryHomotopy,
) -> Result<Form> {
    transgression(g2, &K1Element::direct_sum(vec![g1.clone(), g3.clone()]), path)
}

/// `‖dμ - (ch(g) - ch(g)₁)‖_∞`. On the circle the bracket vanishes, so this
/// is `‖dμ‖`.
pub fn exactness_residual(mu: &Form, g: &K1Element) -> Result<f64> {
    if !mu.is_even() {
        return domain("μ must have even degree");
    }
    let ch = odd_ch(g, mu.manifold())?;
    let higher = ch.sub(&ch.degree_part(1))?;
    Ok(mu.exterior_derivative()?.sub(&higher)?.sup_norm())
}

impl K1Element {
    /// Sampled version at grid `n` (identity stays symbolic).
    pub fn to_grid(&self, n: usize) -> Result<K1Element> {
        if self.is_identity() && !self.has_grid() {
            return Ok(self.clone());
        }
        if let Some(m) = self.grid_size() {
            if m != n {
                return Err(Error::Resolution(format!("sampled unitary has {m} points, requested {n}")));
            }
        }
        K1Element::grid_unitary(self.sample(n)?, self.total_winding())
    }
}
