use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::form::{Form, GridData, Monomial};
use super::manifold::ModelManifold;
use crate::circlevals::Scalar;
use crate::error::{domain, Error, Result};

/// Closed catalog of smooth maps between catalog manifolds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogMap {
    Identity,
    /// Constant map onto the base point of `target`.
    Constant { target: ModelManifold },
    /// `A × B → A`; on `T²`, the first angle.
    ProjectLeft,
    /// `A × B → B`; on `T²`, the second angle.
    ProjectRight,
    /// `θ ↦ wθ` on the circle, or a degree-`w` self-map of an even sphere.
    SelfMap { degree: i64 },
    /// `then ∘ first`.
    Compose { first: Box<CatalogMap>, then: Box<CatalogMap> },
}

impl CatalogMap {
    pub fn constant(target: ModelManifold) -> Self {
        CatalogMap::Constant { target }
    }

    pub fn compose(first: CatalogMap, then: CatalogMap) -> Self {
        CatalogMap::Compose { first: Box::new(first), then: Box::new(then) }
    }

    pub fn codomain(&self, domain_m: &ModelManifold) -> Result<ModelManifold> {
        domain_m.validate()?;
        match self {
            CatalogMap::Identity => Ok(domain_m.clone()),
            CatalogMap::Constant { target } => {
                target.validate()?;
                Ok(target.clone())
            }
            CatalogMap::ProjectLeft | CatalogMap::ProjectRight => match domain_m {
                ModelManifold::Torus2 => Ok(ModelManifold::Circle),
                ModelManifold::Product(a, b) => {
                    Ok(if matches!(self, CatalogMap::ProjectLeft) { (**a).clone() } else { (**b).clone() })
                }
                _ => domain(format!("{domain_m} is not a product")),
            },
            CatalogMap::SelfMap { .. } => match domain_m {
                ModelManifold::Circle | ModelManifold::Sphere(_) => Ok(domain_m.clone()),
                _ => domain(format!("no degree self-maps of {domain_m} in the catalog")),
            },
            CatalogMap::Compose { first, then } => then.codomain(&first.codomain(domain_m)?),
        }
    }
}

impl fmt::Display for CatalogMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogMap::Identity => write!(f, "id"),
            CatalogMap::Constant { target } => write!(f, "const->{target}"),
            CatalogMap::ProjectLeft => write!(f, "pr1"),
            CatalogMap::ProjectRight => write!(f, "pr2"),
            CatalogMap::SelfMap { degree } => write!(f, "deg{degree}"),
            CatalogMap::Compose { first, then } => write!(f, "{then}.{first}"),
        }
    }
}

impl Serialize for CatalogMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn remap_atoms(atoms: &BTreeMap<Monomial, Scalar>, shift: u32) -> BTreeMap<Monomial, Scalar> {
    atoms.iter().map(|(&m, &c)| (m << shift, c)).collect()
}

/// `f*ω` for `ω` on `f`'s codomain, returned on `domain_m`.
pub fn pullback(form: &Form, map: &CatalogMap, domain_m: &ModelManifold) -> Result<Form> {
    let target = map.codomain(domain_m)?;
    if form.manifold() != &target {
        return domain(format!("map {map} lands in {target}, but the form lives on {}", form.manifold()));
    }
    match map {
        CatalogMap::Identity => Ok(form.clone()),
        CatalogMap::Constant { .. } => Form::constant(domain_m, form.value_at_base_point()),
        CatalogMap::ProjectLeft | CatalogMap::ProjectRight => {
            let left = matches!(map, CatalogMap::ProjectLeft);
            if let ModelManifold::Torus2 = domain_m {
                return project_torus(form, left);
            }
            if form.has_grid() {
                return Err(Error::Unsupported(format!("grid pullback to {domain_m}")));
            }
            let shift = match (left, domain_m) {
                (false, ModelManifold::Product(a, _)) => a.slots().len() as u32,
                _ => 0,
            };
            Ok(Form { manifold: domain_m.clone(), atoms: remap_atoms(&form.atoms, shift), grid: None })
        }
        CatalogMap::SelfMap { degree } => self_map(form, *degree),
        CatalogMap::Compose { first, then } => {
            let mid = first.codomain(domain_m)?;
            pullback(&pullback(form, then, &mid)?, first, domain_m)
        }
    }
}

fn project_torus(form: &Form, left: bool) -> Result<Form> {
    let bit: Monomial = if left { 0b01 } else { 0b10 };
    let atoms = form.atoms.iter().map(|(&m, &c)| (if m == 0 { 0 } else { bit }, c)).collect();
    let grid = form.grid.as_ref().map(|g| {
        let n = g.n;
        let comps = g
            .comps
            .iter()
            .map(|(&m, v)| {
                let out = (0..n * n).map(|k| if left { v[k / n] } else { v[k % n] }).collect();
                (if m == 0 { 0 } else { bit }, out)
            })
            .collect();
        GridData { n, comps }
    });
    Ok(Form { manifold: ModelManifold::Torus2, atoms, grid })
}

fn self_map(form: &Form, w: i64) -> Result<Form> {
    let ws = Scalar::int(w);
    let atoms = form.atoms.iter().map(|(&m, &c)| (m, if m == 0 { c } else { c * ws })).collect();
    let grid = form.grid.as_ref().map(|g| {
        let n = g.n as i64;
        let comps = g
            .comps
            .iter()
            .map(|(&m, v)| {
                let factor = if m == 0 { 1.0 } else { w as f64 };
                let out = (0..n).map(|i| factor * v[(w * i).rem_euclid(n) as usize]).collect();
                (m, out)
            })
            .collect();
        GridData { n: g.n, comps }
    });
    Ok(Form { manifold: form.manifold().clone(), atoms, grid }.scale(Scalar::ONE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn codomains() {
        let p = ModelManifold::product(ModelManifold::Sphere(2), ModelManifold::Sphere(4));
        assert_eq!(CatalogMap::ProjectRight.codomain(&p).unwrap(), ModelManifold::Sphere(4));
        assert_eq!(CatalogMap::ProjectLeft.codomain(&ModelManifold::Torus2).unwrap(), ModelManifold::Circle);
        assert!(CatalogMap::ProjectLeft.codomain(&ModelManifold::Circle).is_err());
        assert!(CatalogMap::SelfMap { degree: 2 }.codomain(&ModelManifold::Torus2).is_err());
        let c = CatalogMap::compose(CatalogMap::ProjectLeft, CatalogMap::SelfMap { degree: 3 });
        assert_eq!(c.codomain(&ModelManifold::Torus2).unwrap(), ModelManifold::Circle);
    }

    #[test]
    fn degree_map_scales_top_class() {
        let s2 = ModelManifold::Sphere(2);
        let w = Form::top(&s2, Scalar::ONE).unwrap().add(&Form::constant(&s2, Scalar::int(4)).unwrap()).unwrap();
        let p = pullback(&w, &CatalogMap::SelfMap { degree: -3 }, &s2).unwrap();
        assert_eq!(p.integrate(&s2).unwrap(), Scalar::int(-3));
        assert_eq!(p.atom_coefficient(0), Scalar::int(4));
    }

    #[test]
    fn circle_grid_resampling() {
        let n = 64;
        let f = Form::grid_from_fn(&ModelManifold::Circle, n, 1, |t| t[0].cos()).unwrap();
        let p = pullback(&f, &CatalogMap::SelfMap { degree: 2 }, &ModelManifold::Circle).unwrap();
        let v = p.grid().unwrap().component(1).unwrap();
        for (i, x) in v.iter().enumerate() {
            let t = TAU * i as f64 / n as f64;
            assert!((x - 2.0 * (2.0 * t).cos()).abs() < 1e-12);
        }
        // integral of a pulled-back 1-form scales by the degree
        let one = Form::atom(&ModelManifold::Circle, 1, Scalar::ONE).unwrap();
        let p = pullback(&one, &CatalogMap::SelfMap { degree: 5 }, &ModelManifold::Circle).unwrap();
        assert_eq!(p.integrate(&ModelManifold::Circle).unwrap(), Scalar::int(5));
    }

    #[test]
    fn projections_and_constants() {
        let prod = ModelManifold::product(ModelManifold::Sphere(2), ModelManifold::Sphere(2));
        let w = Form::top(&ModelManifold::Sphere(2), Scalar::ONE).unwrap();
        let l = pullback(&w, &CatalogMap::ProjectLeft, &prod).unwrap();
        let r = pullback(&w, &CatalogMap::ProjectRight, &prod).unwrap();
        assert_eq!(l.wedge(&r).unwrap().integrate(&prod).unwrap(), Scalar::ONE);

        let c = pullback(&w, &CatalogMap::constant(ModelManifold::Sphere(2)), &ModelManifold::Point).unwrap();
        assert!(c.is_zero());

        let g = Form::grid_from_fn(&ModelManifold::Circle, 8, 0, |t| 1.0 + t[0].sin()).unwrap();
        let t = pullback(&g, &CatalogMap::ProjectRight, &ModelManifold::Torus2).unwrap();
        assert_eq!(t.grid().unwrap().component(0).unwrap()[3], g.grid().unwrap().component(0).unwrap()[3]);
        let at_point = pullback(&g, &CatalogMap::constant(ModelManifold::Circle), &ModelManifold::Point).unwrap();
        assert_eq!(at_point.atom_coefficient(0).to_f64(), 1.0);
    }
}
