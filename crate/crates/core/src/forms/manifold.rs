use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{domain, Result};

/// Closed catalog of model manifolds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModelManifold {
    Point,
    Circle,
    /// Even-dimensional round sphere `Sⁿ`.
    Sphere(u32),
    Torus2,
    Product(Box<ModelManifold>, Box<ModelManifold>),
    /// `base × [0, 1]`.
    Cylinder(Box<ModelManifold>),
}

/// One normalized closed generator of a manifold's forms. Every generator
/// integrates to 1 over its own factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    /// `dθ / 2π` on a circle factor.
    Angle,
    /// Normalized volume form of `Sⁿ`.
    SphereVolume(u32),
    /// `dt` on the unit interval.
    Interval,
}

impl Slot {
    pub fn degree(self) -> usize {
        match self {
            Slot::Angle | Slot::Interval => 1,
            Slot::SphereVolume(n) => n as usize,
        }
    }

    pub fn name(self) -> String {
        match self {
            Slot::Angle => "dθ/2π".to_string(),
            Slot::SphereVolume(n) => format!("ω_S{n}"),
            Slot::Interval => "dt".to_string(),
        }
    }
}

impl ModelManifold {
    pub fn sphere(n: u32) -> Result<Self> {
        let m = ModelManifold::Sphere(n);
        m.validate()?;
        Ok(m)
    }

    pub fn product(a: ModelManifold, b: ModelManifold) -> Self {
        ModelManifold::Product(Box::new(a), Box::new(b))
    }

    pub fn cylinder(base: ModelManifold) -> Self {
        ModelManifold::Cylinder(Box::new(base))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelManifold::Sphere(n) if *n < 2 || n % 2 != 0 => {
                domain(format!("catalog spheres are even-dimensional with n ≥ 2, got S^{n}"))
            }
            ModelManifold::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            ModelManifold::Cylinder(b) => b.validate(),
            _ => Ok(()),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ModelManifold::Point => 0,
            ModelManifold::Circle => 1,
            ModelManifold::Sphere(n) => *n as usize,
            ModelManifold::Torus2 => 2,
            ModelManifold::Product(a, b) => a.dimension() + b.dimension(),
            ModelManifold::Cylinder(b) => b.dimension() + 1,
        }
    }

    /// Every catalog manifold carries its standard orientation.
    pub fn is_oriented(&self) -> bool {
        true
    }

    pub fn is_closed(&self) -> bool {
        match self {
            ModelManifold::Cylinder(_) => false,
            ModelManifold::Product(a, b) => a.is_closed() && b.is_closed(),
            _ => true,
        }
    }

    /// Whether sampled (grid) coefficients are available.
    pub fn supports_grid(&self) -> bool {
        matches!(self, ModelManifold::Circle | ModelManifold::Torus2)
    }

    /// Generator layout: left factor first, then right; cylinders append `dt`.
    pub fn slots(&self) -> Vec<Slot> {
        match self {
            ModelManifold::Point => vec![],
            ModelManifold::Circle => vec![Slot::Angle],
            ModelManifold::Sphere(n) => vec![Slot::SphereVolume(*n)],
            ModelManifold::Torus2 => vec![Slot::Angle, Slot::Angle],
            ModelManifold::Product(a, b) => {
                let mut s = a.slots();
                s.extend(b.slots());
                s
            }
            ModelManifold::Cylinder(b) => {
                let mut s = b.slots();
                s.push(Slot::Interval);
                s
            }
        }
    }
}

impl fmt::Display for ModelManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelManifold::Point => write!(f, "pt"),
            ModelManifold::Circle => write!(f, "S^1"),
            ModelManifold::Sphere(n) => write!(f, "S^{n}"),
            ModelManifold::Torus2 => write!(f, "T^2"),
            ModelManifold::Product(a, b) => write!(f, "({a} x {b})"),
            ModelManifold::Cylinder(b) => write!(f, "({b} x [0,1])"),
        }
    }
}

impl Serialize for ModelManifold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
