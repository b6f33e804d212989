//! ℝ/ℤ-valued pairings: the holonomy pairings in degrees 1 and 2 and the
//! K⁰ pairing between ℝ/ℤ cocycles and geometric K-cycles.

mod relations;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circlevals::{CircleValue, Scalar};
use crate::error::{domain, Error, Result};
use crate::eta::{eta_circle_flat, reduced_eta, EtaResult};
use crate::forms::{
    ch_bundle, exactness_residual, odd_ch, pullback, todd_form, BundleData, CatalogMap, Form, K1Element,
    ModelManifold,
};

pub use relations::{cap, ch_rq, k0_relation_residual, khomology_residual, module_action, KHomologyRelation};

/// Largest admissible exactness residual of a cocycle.
pub const EXACTNESS_TOLERANCE: f64 = 1e-8;

/// Whether the lowest-degree part of `μ` must carry zero virtual trace.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CocycleMode {
    #[default]
    Unreduced,
    Reduced,
}

/// `(g, μ)` over `base`, with `dμ` fixed by the odd Chern character of `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct RZK0Cocycle {
    g: K1Element,
    mu: Form,
    base: ModelManifold,
    coefficients: BundleData,
    mode: CocycleMode,
}

impl RZK0Cocycle {
    pub fn new(g: K1Element, mu: Form, base: ModelManifold) -> Result<Self> {
        RZK0Cocycle::build(g, mu, base, BundleData::Trivial(1), CocycleMode::Unreduced)
    }

    fn build(g: K1Element, mu: Form, base: ModelManifold, coefficients: BundleData, mode: CocycleMode) -> Result<Self> {
        base.validate()?;
        if mu.manifold() != &base {
            return domain(format!("μ lives on {}, cocycle base is {base}", mu.manifold()));
        }
        odd_ch(&g, &base)?;
        ch_bundle(&coefficients, &base)?;
        let residual = exactness_residual(&mu, &g)?;
        if !(residual <= EXACTNESS_TOLERANCE) {
            return domain(format!("exactness residual {residual:.3e} exceeds {EXACTNESS_TOLERANCE:e}"));
        }
        let x = RZK0Cocycle { g, mu, base, coefficients, mode };
        x.check_mode()?;
        Ok(x)
    }

    /// Zero-virtual-trace check: with `g` the identity, the degree-0 part of
    /// `μ` must vanish on average.
    fn check_mode(&self) -> Result<()> {
        if self.mode == CocycleMode::Unreduced || !self.g.is_identity() {
            return Ok(());
        }
        let low = self.mu.degree_part(0);
        let mut trace = low.atom_coefficient(0).to_f64();
        if let Some(v) = low.grid().and_then(|g| g.component(0)) {
            trace += v.iter().sum::<f64>() / v.len() as f64;
        }
        if trace.abs() > 1e-12 {
            return domain(format!("reduced cocycle needs zero virtual trace in degree 0, got {trace:.3e}"));
        }
        Ok(())
    }

    pub fn with_mode(self, mode: CocycleMode) -> Result<Self> {
        let x = RZK0Cocycle { mode, ..self };
        x.check_mode()?;
        Ok(x)
    }

    pub fn g(&self) -> &K1Element {
        &self.g
    }

    pub fn mu(&self) -> &Form {
        &self.mu
    }

    pub fn base(&self) -> &ModelManifold {
        &self.base
    }

    /// Bundle the cocycle is twisted by after module actions (trivial line by
    /// default).
    pub fn coefficients(&self) -> &BundleData {
        &self.coefficients
    }

    pub fn mode(&self) -> CocycleMode {
        self.mode
    }

    pub fn exactness_residual(&self) -> f64 {
        exactness_residual(&self.mu, &self.g).expect("validated on construction")
    }
}

/// `(M, E, f)`: an even-dimensional closed manifold, a bundle and a map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometricKCycle {
    pub manifold: ModelManifold,
    pub bundle: BundleData,
    pub map: CatalogMap,
}

impl GeometricKCycle {
    pub fn new(manifold: ModelManifold, bundle: BundleData, map: CatalogMap) -> Result<Self> {
        manifold.validate()?;
        if !manifold.dimension().is_multiple_of(2) || !manifold.is_closed() {
            return domain(format!("K-cycles need an even-dimensional closed manifold, got {manifold}"));
        }
        ch_bundle(&bundle, &manifold)?;
        map.codomain(&manifold)?;
        Ok(GeometricKCycle { manifold, bundle, map })
    }

    pub fn target(&self) -> ModelManifold {
        self.map.codomain(&self.manifold).expect("validated on construction")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Closed-form entry that produced the analytic term.
    pub table_key: Option<String>,
    /// Set when the entry follows from the index/kernel rule rather than a
    /// directly stated generator value.
    pub derived: bool,
    pub kernel_dim: Option<u64>,
    pub notes: Vec<String>,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    pub analytic_term: CircleValue,
    pub topological_term: Scalar,
    pub value: CircleValue,
    pub diagnostics: Diagnostics,
}

impl PairingReport {
    fn assemble(analytic_term: CircleValue, topological_term: Scalar, diagnostics: Diagnostics) -> Result<Self> {
        let value = analytic_term - CircleValue::from_scalar(topological_term)?;
        Ok(PairingReport { analytic_term, topological_term, value, diagnostics })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

/// Degree-1 pairing of a flat circle class `a` with a loop of winding `w`.
pub fn pair_h1(a_class: Scalar, loop_winding: i64) -> Result<PairingReport> {
    let twist = CircleValue::from_scalar(a_class * Scalar::int(loop_winding))?;
    let mut diag = Diagnostics { kernel_dim: Some(1), ..Default::default() };
    if twist.representative() == 0.0 {
        diag.table_key = Some("circle-untwisted".into());
        diag.notes.push("pulled-back holonomy is trivial: eta 0 with one-dimensional kernel".into());
        let eta = reduced_eta(Scalar::ZERO, 1)?;
        return PairingReport::assemble(eta.reduced, Scalar::ZERO, diag);
    }
    diag.table_key = Some("circle-twisted".into());
    let a = twist.to_scalar();
    PairingReport::assemble(eta_circle_flat(a)?.reduced, a, diag)
}

/// Degree-2 pairing of a class with `∫B/2π = b` against a surface mapping
/// with degree `deg`.
pub fn pair_h2(b: Scalar, cycle_degree: i64) -> Result<PairingReport> {
    if !b.is_finite() {
        return domain(format!("b must be finite, got {b}"));
    }
    let eta = reduced_eta(Scalar::ZERO, 1)?;
    let diag = Diagnostics { table_key: Some("projective-surface".into()), kernel_dim: Some(1), ..Default::default() };
    PairingReport::assemble(eta.reduced, Scalar::int(cycle_degree) * b, diag)
}

/// Whether `g ∘ f` is null-homotopic as decided by winding numbers.
fn pullback_is_trivial(g: &K1Element, base: &ModelManifold, cycle: &GeometricKCycle) -> Result<bool> {
    if g.total_winding() == 0 {
        return Ok(true);
    }
    let class = Form::atom(base, 1, Scalar::ONE)?;
    Ok(pullback(&class, &cycle.map, &cycle.manifold)?.is_zero())
}

fn integer_index(value: Scalar, what: &str) -> Result<i64> {
    match value.exact() {
        Some(r) if r.is_integer() => Ok(*r.numer() as i64),
        _ => Err(Error::UnsupportedCycle(format!("{what}: index integral {value} is not an exact integer"))),
    }
}

/// Reduced Dai–Zhang eta of the cylinder operator for `(M, E)` glued by
/// `h = g ∘ f`, read off the closed-form table.
///
/// With `h` null-homotopic the operator splits into `rank(g)` copies of the
/// untwisted circle operator on the index bundle, so `η = 0` and the kernel
/// has dimension `rank(g) · |Ind|`. The index is `∫ ch(E) ∧ ch(f*W) ∧ Td`.
pub fn analytic_term_k0(cycle: &GeometricKCycle, g: &K1Element) -> Result<(EtaResult, Diagnostics)> {
    analytic_with_coefficients(cycle, g, &BundleData::Trivial(1))
}

fn analytic_with_coefficients(
    cycle: &GeometricKCycle,
    g: &K1Element,
    coefficients: &BundleData,
) -> Result<(EtaResult, Diagnostics)> {
    let base = cycle.target();
    if !pullback_is_trivial(g, &base, cycle)? {
        return Err(Error::UnsupportedCycle(format!(
            "({}, {}, {}) with gluing map {} ∘ {} of nonzero winding",
            cycle.manifold, cycle.bundle, cycle.map, g, cycle.map
        )));
    }
    let m = &cycle.manifold;
    let w = pullback(&ch_bundle(coefficients, &base)?, &cycle.map, m)?;
    let integrand = ch_bundle(&cycle.bundle, m)?.wedge(&w)?.wedge(&todd_form(m)?)?;
    let index = integer_index(integrand.integrate(m)?, &format!("({m}, {})", cycle.bundle))?;
    let kernel = g.rank() as u64 * index.unsigned_abs();

    let (key, derived) = match (m, &cycle.bundle) {
        (ModelManifold::Sphere(n), BundleData::Bott(p)) if *n == 2 * p => ("sphere-bott", false),
        (ModelManifold::Point, BundleData::Trivial(_)) => ("point-trivial", true),
        _ => ("index-kernel", true),
    };
    let eta = reduced_eta(Scalar::ZERO, kernel)?;
    let mut diag =
        Diagnostics { table_key: Some(key.into()), derived, kernel_dim: Some(kernel), ..Default::default() };
    diag.notes.push(format!("index {index}, rank(g) {}", g.rank()));
    Ok((eta, diag))
}

/// `⟨x, (M, E, f)⟩ = η̄ - ∫_M f*μ ∧ ch(E) ∧ Td(M) mod ℤ`.
pub fn pair_k0(x: &RZK0Cocycle, c: &GeometricKCycle) -> Result<PairingReport> {
    let target = c.target();
    if target != x.base {
        return domain(format!("cycle maps into {target}, cocycle lives on {}", x.base));
    }
    let (eta, mut diag) = analytic_with_coefficients(c, &x.g, &x.coefficients)?;
    let m = &c.manifold;
    let integrand = pullback(&x.mu, &c.map, m)?.wedge(&ch_bundle(&c.bundle, m)?)?.wedge(&todd_form(m)?)?;
    let topological = integrand.integrate(m)?;
    if let Some(n) = integrand.grid_size() {
        diag.notes.push(format!("topological term by trapezoid rule on grid {n}"));
    }
    diag.residuals.insert("exactness".into(), x.exactness_residual());
    PairingReport::assemble(eta.reduced, topological, diag)
}
