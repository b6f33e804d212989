use crate::circlevals::{circular_distance, CircleValue, Scalar};
use crate::error::{domain, Result};
use crate::eta::reduced_eta;
use crate::forms::{ch_bundle, odd_ch, BundleData, CatalogMap, Form, K1Element, ModelManifold};

use super::{analytic_with_coefficients, pair_k0, GeometricKCycle, RZK0Cocycle};

/// Largest `‖d tch - (ch g₁ + ch g₃ - ch g₂)‖_∞` accepted as a transgression.
const TRANSGRESSION_TOLERANCE: f64 = 1e-6;

/// Distance between `⟨e₂, c⟩` and `⟨e₁, c⟩ + ⟨e₃, c⟩` for a triple with
/// `g₂ ≃ g₁ ⊕ g₃`, after checking that `tch` transgresses between them.
pub fn k0_relation_residual(
    e1: &RZK0Cocycle,
    e2: &RZK0Cocycle,
    e3: &RZK0Cocycle,
    tch: &Form,
    c: &GeometricKCycle,
) -> Result<f64> {
    if e1.base != e2.base || e2.base != e3.base {
        return domain("the three cocycles must share a base");
    }
    if e2.g.rank() != e1.g.rank() + e3.g.rank() || e2.g.total_winding() != e1.g.total_winding() + e3.g.total_winding()
    {
        return domain(format!(
            "cannot certify {} ≃ {} ⊕ {}: ranks and windings must add",
            e2.g, e1.g, e3.g
        ));
    }
    if tch.manifold() != &e1.base || !tch.is_even() {
        return domain("tch must be an even form on the common base");
    }
    let base = &e1.base;
    let expected = odd_ch(&e1.g, base)?.add(&odd_ch(&e3.g, base)?)?.sub(&odd_ch(&e2.g, base)?)?;
    let defect = tch.exterior_derivative()?.sub(&expected)?.sup_norm();
    if !(defect <= TRANSGRESSION_TOLERANCE) {
        return domain(format!("tch is not a transgression for the triple (defect {defect:.3e})"));
    }
    let lhs = pair_k0(e2, c)?.value;
    let rhs = pair_k0(e1, c)?.value + pair_k0(e3, c)?.value;
    Ok(circular_distance(lhs, rhs))
}

/// Relations generating geometric K-homology.
#[derive(Clone, Debug, PartialEq)]
pub enum KHomologyRelation {
    /// `(M, E₁ ⊕ E₂, f) ~ (M, E₁, f) + (M, E₂, f)`.
    DirectSum { manifold: ModelManifold, map: CatalogMap, e1: BundleData, e2: BundleData },
    /// `(M₁ ⊔ M₂, E₁ ⊔ E₂, f₁ ⊔ f₂) ~ (M₁, E₁, f₁) + (M₂, E₂, f₂)`.
    DisjointUnion(GeometricKCycle, GeometricKCycle),
    /// `(M, E, f) ~ (M × S^{2p}, E ⊠ β, f ∘ pr₁)`.
    BundleModification { cycle: GeometricKCycle, p: u32 },
}

/// Distance between the pairings of `x` with the two sides of `relation`.
pub fn khomology_residual(x: &RZK0Cocycle, relation: &KHomologyRelation) -> Result<f64> {
    match relation {
        KHomologyRelation::DirectSum { manifold, map, e1, e2 } => {
            let sum = BundleData::Sum(vec![e1.clone(), e2.clone()]);
            let whole = pair_k0(x, &GeometricKCycle::new(manifold.clone(), sum, map.clone())?)?.value;
            let a = pair_k0(x, &GeometricKCycle::new(manifold.clone(), e1.clone(), map.clone())?)?.value;
            let b = pair_k0(x, &GeometricKCycle::new(manifold.clone(), e2.clone(), map.clone())?)?.value;
            Ok(circular_distance(whole, a + b))
        }
        KHomologyRelation::DisjointUnion(c1, c2) => {
            // the union's operator is the direct sum: etas and kernels add
            // before reduction
            let (a1, _) = analytic_with_coefficients(c1, &x.g, &x.coefficients)?;
            let (a2, _) = analytic_with_coefficients(c2, &x.g, &x.coefficients)?;
            let r1 = pair_k0(x, c1)?;
            let r2 = pair_k0(x, c2)?;
            let union = reduced_eta(a1.eta + a2.eta, a1.kernel_dim + a2.kernel_dim)?.reduced
                - CircleValue::from_scalar(r1.topological_term + r2.topological_term)?;
            Ok(circular_distance(union, r1.value + r2.value))
        }
        KHomologyRelation::BundleModification { cycle, p } => {
            if *p == 0 {
                return domain("bundle modification needs p ≥ 1");
            }
            let sphere = ModelManifold::sphere(2 * p)?;
            let modified = GeometricKCycle::new(
                ModelManifold::product(cycle.manifold.clone(), sphere.clone()),
                BundleData::external(cycle.bundle.clone(), cycle.manifold.clone(), BundleData::Bott(*p), sphere),
                CatalogMap::compose(CatalogMap::ProjectLeft, cycle.map.clone()),
            )?;
            Ok(circular_distance(pair_k0(x, cycle)?.value, pair_k0(x, &modified)?.value))
        }
    }
}

/// `V · x`. A trivial bundle of rank `r` replaces `g` by `r` copies and
/// scales `μ`; any other `V` multiplies `μ` by `ch(V)` and twists the
/// coefficients by `V`, which keeps `⟨V·x, c⟩ = ⟨x, cap(V, c)⟩`.
pub fn module_action(v: &BundleData, x: &RZK0Cocycle) -> Result<RZK0Cocycle> {
    let chv = ch_bundle(v, &x.base)?;
    match v {
        BundleData::Trivial(0) => domain("module action by the zero bundle"),
        BundleData::Trivial(1) => Ok(x.clone()),
        BundleData::Trivial(r) => {
            let g = K1Element::direct_sum(vec![x.g.clone(); *r as usize]);
            RZK0Cocycle::build(g, x.mu.scale(Scalar::int(*r as i64)), x.base.clone(), x.coefficients.clone(), x.mode)
        }
        _ => RZK0Cocycle::build(
            x.g.clone(),
            chv.wedge(&x.mu)?,
            x.base.clone(),
            BundleData::tensor(v.clone(), x.coefficients.clone()),
            x.mode,
        ),
    }
}

/// `cap(V, (M, E, f)) = (M, f*V ⊗ E, f)`.
pub fn cap(v: &BundleData, c: &GeometricKCycle) -> Result<GeometricKCycle> {
    let base = c.target();
    ch_bundle(v, &base)?;
    GeometricKCycle::new(
        c.manifold.clone(),
        BundleData::tensor(BundleData::pullback(v.clone(), base, c.map.clone()), c.bundle.clone()),
        c.map.clone(),
    )
}

/// Representative `(1/k) tch - μ` of the ℝ/ℚ Chern character, where `tch`
/// transgresses from `k` copies of `g` to the identity.
pub fn ch_rq(x: &RZK0Cocycle, k: u32, tch_path: &Form) -> Result<Form> {
    if k == 0 {
        return domain("the torsion multiplier k must be positive");
    }
    if x.g.total_winding() != 0 {
        return domain(format!(
            "{} has nonzero winding, so no positive multiple of it is homotopic to the identity",
            x.g
        ));
    }
    if tch_path.manifold() != &x.base {
        return domain(format!("tch lives on {}, cocycle base is {}", tch_path.manifold(), x.base));
    }
    tch_path.scale(Scalar::ratio(1, k as i64)).sub(&x.mu)
}
