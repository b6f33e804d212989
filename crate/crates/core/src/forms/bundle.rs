use std::fmt;

use serde::{Serialize, Serializer};

use super::form::Form;
use super::manifold::ModelManifold;
use super::maps::{pullback, CatalogMap};
use crate::circlevals::Scalar;
use crate::error::{domain, Result};

/// Closed catalog of (virtual) complex vector bundles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleData {
    Trivial(u32),
    /// Line bundle with first Chern number `k` on `S²` or `T²`.
    Line(i64),
    /// Rank-zero virtual Bott class on `S^{2p}`.
    Bott(u32),
    Sum(Vec<BundleData>),
    Tensor(Box<BundleData>, Box<BundleData>),
    /// `map* bundle`, where `bundle` lives over `base`.
    Pullback { bundle: Box<BundleData>, base: ModelManifold, map: CatalogMap },
}

impl BundleData {
    pub fn tensor(a: BundleData, b: BundleData) -> Self {
        BundleData::Tensor(Box::new(a), Box::new(b))
    }

    pub fn pullback(bundle: BundleData, base: ModelManifold, map: CatalogMap) -> Self {
        BundleData::Pullback { bundle: Box::new(bundle), base, map }
    }

    /// `pr₁*E ⊗ pr₂*F` over `A × B`.
    pub fn external(e: BundleData, a: ModelManifold, f: BundleData, b: ModelManifold) -> Self {
        BundleData::tensor(
            BundleData::pullback(e, a, CatalogMap::ProjectLeft),
            BundleData::pullback(f, b, CatalogMap::ProjectRight),
        )
    }

    /// Virtual rank.
    pub fn rank(&self) -> i64 {
        match self {
            BundleData::Trivial(r) => *r as i64,
            BundleData::Line(_) => 1,
            BundleData::Bott(_) => 0,
            BundleData::Sum(parts) => parts.iter().map(BundleData::rank).sum(),
            BundleData::Tensor(a, b) => a.rank() * b.rank(),
            BundleData::Pullback { bundle, .. } => bundle.rank(),
        }
    }
}

impl fmt::Display for BundleData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleData::Trivial(r) => write!(f, "trivial({r})"),
            BundleData::Line(k) => write!(f, "line({k})"),
            BundleData::Bott(p) => write!(f, "bott({p})"),
            BundleData::Sum(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "sum({})", s.join(", "))
            }
            BundleData::Tensor(a, b) => write!(f, "tensor({a}, {b})"),
            BundleData::Pullback { bundle, map, .. } => write!(f, "{map}*{bundle}"),
        }
    }
}

impl Serialize for BundleData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Chern character form of `e` over `m`.
pub fn ch_bundle(e: &BundleData, m: &ModelManifold) -> Result<Form> {
    m.validate()?;
    match e {
        BundleData::Trivial(r) => Form::constant(m, Scalar::int(*r as i64)),
        BundleData::Line(k) => match m {
            ModelManifold::Sphere(2) | ModelManifold::Torus2 => Form::top(m, Scalar::int(*k))?.exp(),
            _ => domain(format!("line bundles are catalogued on S^2 and T^2, not {m}")),
        },
        BundleData::Bott(p) => match m {
            ModelManifold::Sphere(n) if *n == 2 * p => Form::top(m, Scalar::ONE),
            _ => domain(format!("bott({p}) lives on S^{}, not {m}", 2 * p)),
        },
        BundleData::Sum(parts) => {
            let mut acc = Form::zero(m)?;
            for part in parts {
                acc = acc.add(&ch_bundle(part, m)?)?;
            }
            Ok(acc)
        }
        BundleData::Tensor(a, b) => ch_bundle(a, m)?.wedge(&ch_bundle(b, m)?),
        BundleData::Pullback { bundle, base, map } => {
            let target = map.codomain(m)?;
            if &target != base {
                return domain(format!("map {map} lands in {target}, bundle lives over {base}"));
            }
            pullback(&ch_bundle(bundle, base)?, map, m)
        }
    }
}

/// Every catalog manifold is stably parallelizable.
pub fn todd_form(m: &ModelManifold) -> Result<Form> {
    Form::constant(m, Scalar::ONE)
}
