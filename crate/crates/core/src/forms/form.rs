use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use super::manifold::{ModelManifold, Slot};
use super::spectral;
use crate::circlevals::Scalar;
use crate::error::{domain, Error, Result};

/// Default number of samples per angle for grid forms.
pub const DEFAULT_GRID: usize = 1024;

/// A set of generator slots, one bit per slot of the carrier manifold.
pub type Monomial = u32;

/// Sampled coefficients on the uniform angular grid. Coefficients are taken
/// against the coordinate differentials `dθᵢ` (not `dθᵢ/2π`). Torus samples
/// are row-major with the first angle as the row index.
#[derive(Clone, Debug, PartialEq)]
pub struct GridData {
    pub(crate) n: usize,
    pub(crate) comps: BTreeMap<Monomial, Vec<f64>>,
}

impl GridData {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn component(&self, mask: Monomial) -> Option<&[f64]> {
        self.comps.get(&mask).map(|v| v.as_slice())
    }
}

/// A graded differential form on a catalog manifold: exact multiples of
/// normalized generator monomials, plus optional sampled coefficients on
/// circles and tori.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub(crate) manifold: ModelManifold,
    pub(crate) atoms: BTreeMap<Monomial, Scalar>,
    pub(crate) grid: Option<GridData>,
}

pub(crate) fn mask_degree(slots: &[Slot], mask: Monomial) -> usize {
    slots.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, s)| s.degree()).sum()
}

fn top_mask(slots: &[Slot]) -> Monomial {
    ((1u64 << slots.len()) - 1) as Monomial
}

/// Sign of reordering `a ∧ b` into slot order.
pub(crate) fn wedge_sign(slots: &[Slot], a: Monomial, b: Monomial) -> f64 {
    let mut swaps = 0usize;
    for (i, si) in slots.iter().enumerate() {
        if a & (1 << i) == 0 {
            continue;
        }
        for (j, sj) in slots.iter().enumerate().take(i) {
            if b & (1 << j) != 0 {
                swaps += si.degree() * sj.degree();
            }
        }
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn grid_len(n: usize, dim: usize) -> usize {
    n.pow(dim as u32)
}

impl Form {
    pub fn zero(manifold: &ModelManifold) -> Result<Form> {
        manifold.validate()?;
        Ok(Form { manifold: manifold.clone(), atoms: BTreeMap::new(), grid: None })
    }

    pub fn constant(manifold: &ModelManifold, c: Scalar) -> Result<Form> {
        Form::atom(manifold, 0, c)
    }

    /// `c` times the wedge of the generators in `mask`.
    pub fn atom(manifold: &ModelManifold, mask: Monomial, c: Scalar) -> Result<Form> {
        let mut f = Form::zero(manifold)?;
        if mask > top_mask(&manifold.slots()) {
            return domain(format!("monomial {mask:#b} has no slots on {manifold}"));
        }
        if !c.is_zero() {
            f.atoms.insert(mask, c);
        }
        Ok(f)
    }

    /// `c` times the normalized top-degree generator (integral `c`).
    pub fn top(manifold: &ModelManifold, c: Scalar) -> Result<Form> {
        Form::atom(manifold, top_mask(&manifold.slots()), c)
    }

    /// A sampled component `f dθ_mask` on a circle or torus grid of `n` points
    /// per angle.
    pub fn grid_component(manifold: &ModelManifold, n: usize, mask: Monomial, samples: Vec<f64>) -> Result<Form> {
        if !manifold.supports_grid() {
            return Err(Error::Unsupported(format!("grid coefficients are not available on {manifold}")));
        }
        let slots = manifold.slots();
        if mask > top_mask(&slots) {
            return domain(format!("monomial {mask:#b} has no slots on {manifold}"));
        }
        if n < 2 || samples.len() != grid_len(n, slots.len()) {
            return domain(format!("expected {} samples for grid {n} on {manifold}", grid_len(n, slots.len())));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return domain("grid samples must be finite");
        }
        let mut comps = BTreeMap::new();
        comps.insert(mask, samples);
        Ok(Form { manifold: manifold.clone(), atoms: BTreeMap::new(), grid: Some(GridData { n, comps }) })
    }

    /// Samples `f(θ)` (one angle per circle slot) into a grid component.
    pub fn grid_from_fn(
        manifold: &ModelManifold,
        n: usize,
        mask: Monomial,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Form> {
        let dim = manifold.slots().len();
        let samples = (0..grid_len(n, dim))
            .map(|k| {
                let angles: Vec<f64> = match dim {
                    1 => vec![TAU * k as f64 / n as f64],
                    _ => vec![TAU * (k / n) as f64 / n as f64, TAU * (k % n) as f64 / n as f64],
                };
                f(&angles)
            })
            .collect();
        Form::grid_component(manifold, n, mask, samples)
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn atoms(&self) -> impl Iterator<Item = (Monomial, Scalar)> + '_ {
        self.atoms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn atom_coefficient(&self, mask: Monomial) -> Scalar {
        self.atoms.get(&mask).copied().unwrap_or(Scalar::ZERO)
    }

    pub fn grid(&self) -> Option<&GridData> {
        self.grid.as_ref()
    }

    pub fn grid_size(&self) -> Option<usize> {
        self.grid.as_ref().map(|g| g.n)
    }

    pub fn has_grid(&self) -> bool {
        self.grid.is_some()
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        let slots = self.manifold.slots();
        let mut out: BTreeSet<usize> = self.atoms.keys().map(|&m| mask_degree(&slots, m)).collect();
        if let Some(g) = &self.grid {
            out.extend(g.comps.keys().map(|&m| mask_degree(&slots, m)));
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.degrees().iter().all(|d| d % 2 == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.values().all(|c| c.is_zero())
            && self.grid.as_ref().is_none_or(|g| g.comps.values().all(|v| v.iter().all(|&x| x == 0.0)))
    }

    /// The homogeneous part of the given degree.
    pub fn degree_part(&self, degree: usize) -> Form {
        let slots = self.manifold.slots();
        let atoms = self.atoms.iter().filter(|(&m, _)| mask_degree(&slots, m) == degree).map(|(&m, &c)| (m, c)).collect();
        let grid = self.grid.as_ref().and_then(|g| {
            let comps: BTreeMap<_, _> =
                g.comps.iter().filter(|(&m, _)| mask_degree(&slots, m) == degree).map(|(&m, v)| (m, v.clone())).collect();
            (!comps.is_empty()).then_some(GridData { n: g.n, comps })
        });
        Form { manifold: self.manifold.clone(), atoms, grid }
    }

    fn check_same_manifold(&self, other: &Form) -> Result<()> {
        if self.manifold != other.manifold {
            return domain(format!("forms live on different manifolds: {} vs {}", self.manifold, other.manifold));
        }
        Ok(())
    }

    fn common_grid(&self, other: &Form) -> Result<Option<usize>> {
        match (self.grid_size(), other.grid_size()) {
            (Some(a), Some(b)) if a != b => domain(format!("grid sizes differ: {a} vs {b}")),
            (a, b) => Ok(a.or(b)),
        }
    }

    fn prune(mut self) -> Form {
        self.atoms.retain(|_, c| !c.is_zero());
        self
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check_same_manifold(other)?;
        self.common_grid(other)?;
        let mut out = self.clone();
        for (&m, &c) in &other.atoms {
            let e = out.atoms.entry(m).or_insert(Scalar::ZERO);
            *e = *e + c;
        }
        if let Some(g) = &other.grid {
            let target = out.grid.get_or_insert_with(|| GridData { n: g.n, comps: BTreeMap::new() });
            for (&m, v) in &g.comps {
                let e = target.comps.entry(m).or_insert_with(|| vec![0.0; v.len()]);
                e.iter_mut().zip(v).for_each(|(a, b)| *a += b);
            }
        }
        Ok(out.prune())
    }

    pub fn scale(&self, c: Scalar) -> Form {
        let atoms = self.atoms.iter().map(|(&m, &a)| (m, a * c)).collect();
        let grid = self.grid.as_ref().map(|g| GridData {
            n: g.n,
            comps: g.comps.iter().map(|(&m, v)| (m, v.iter().map(|x| x * c.to_f64()).collect())).collect(),
        });
        Form { manifold: self.manifold.clone(), atoms, grid }.prune()
    }

    pub fn neg(&self) -> Form {
        self.scale(Scalar::int(-1))
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    /// All components in the coordinate basis on a grid of `n` points.
    fn to_grid_comps(&self, n: usize) -> BTreeMap<Monomial, Vec<f64>> {
        let dim = self.manifold.slots().len();
        let len = grid_len(n, dim);
        let mut comps: BTreeMap<Monomial, Vec<f64>> = BTreeMap::new();
        for (&m, &c) in &self.atoms {
            let coord = c.to_f64() / TAU.powi(m.count_ones() as i32);
            let e = comps.entry(m).or_insert_with(|| vec![0.0; len]);
            e.iter_mut().for_each(|x| *x += coord);
        }
        if let Some(g) = &self.grid {
            for (&m, v) in &g.comps {
                let e = comps.entry(m).or_insert_with(|| vec![0.0; len]);
                e.iter_mut().zip(v).for_each(|(a, b)| *a += b);
            }
        }
        comps
    }

    /// Graded product. Components above the manifold dimension vanish.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check_same_manifold(other)?;
        let slots = self.manifold.slots();
        match self.common_grid(other)? {
            None => {
                let mut atoms: BTreeMap<Monomial, Scalar> = BTreeMap::new();
                for (&a, &ca) in &self.atoms {
                    for (&b, &cb) in &other.atoms {
                        if a & b != 0 {
                            continue;
                        }
                        let sign = Scalar::int(wedge_sign(&slots, a, b) as i64);
                        let e = atoms.entry(a | b).or_insert(Scalar::ZERO);
                        *e = *e + sign * ca * cb;
                    }
                }
                Ok(Form { manifold: self.manifold.clone(), atoms, grid: None }.prune())
            }
            Some(n) => {
                let lhs = self.to_grid_comps(n);
                let rhs = other.to_grid_comps(n);
                let mut comps: BTreeMap<Monomial, Vec<f64>> = BTreeMap::new();
                for (&a, va) in &lhs {
                    for (&b, vb) in &rhs {
                        if a & b != 0 {
                            continue;
                        }
                        let sign = wedge_sign(&slots, a, b);
                        let e = comps.entry(a | b).or_insert_with(|| vec![0.0; va.len()]);
                        for ((o, x), y) in e.iter_mut().zip(va).zip(vb) {
                            *o += sign * x * y;
                        }
                    }
                }
                Ok(Form { manifold: self.manifold.clone(), atoms: BTreeMap::new(), grid: Some(GridData { n, comps }) })
            }
        }
    }

    /// `d`. Generator monomials are closed; grid components are differentiated
    /// spectrally.
    pub fn exterior_derivative(&self) -> Result<Form> {
        let mut out = Form::zero(&self.manifold)?;
        let Some(g) = &self.grid else {
            return Ok(out);
        };
        if !self.manifold.supports_grid() {
            return Err(Error::Unsupported(format!("cannot differentiate grid data on {}", self.manifold)));
        }
        let slots = self.manifold.slots();
        let mut comps: BTreeMap<Monomial, Vec<f64>> = BTreeMap::new();
        for (&m, v) in &g.comps {
            for k in 0..slots.len() {
                if m & (1 << k) != 0 {
                    continue;
                }
                let partial = if slots.len() == 1 { spectral::derivative(v) } else { spectral::torus_partial(v, g.n, k) };
                // dθ_k moves past the lower slots already present in m
                let sign = if (m & ((1 << k) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                let e = comps.entry(m | (1 << k)).or_insert_with(|| vec![0.0; v.len()]);
                e.iter_mut().zip(partial).for_each(|(a, b)| *a += sign * b);
            }
        }
        if !comps.is_empty() {
            out.grid = Some(GridData { n: g.n, comps });
        }
        Ok(out)
    }

    /// Integral of the top-degree component over `manifold`; exact when only
    /// generator atoms contribute.
    pub fn integrate(&self, manifold: &ModelManifold) -> Result<Scalar> {
        if &self.manifold != manifold {
            return domain(format!("form on {} cannot be integrated over {manifold}", self.manifold));
        }
        let slots = manifold.slots();
        let top = top_mask(&slots);
        let mut total = self.atom_coefficient(top);
        if let Some(g) = &self.grid {
            if let Some(v) = g.comps.get(&top) {
                let cell = (TAU / g.n as f64).powi(slots.len() as i32);
                total = total + Scalar::Float(v.iter().sum::<f64>() * cell);
            }
        }
        Ok(total)
    }

    /// Largest coefficient in absolute value. On circles and tori the
    /// coefficients are taken against `dθ`; elsewhere against the normalized
    /// generators.
    pub fn sup_norm(&self) -> f64 {
        if self.manifold.supports_grid() {
            let n = self.grid_size().unwrap_or(1);
            self.to_grid_comps(n).values().flat_map(|v| v.iter()).fold(0.0, |acc, x| acc.max(x.abs()))
        } else {
            self.atoms.values().fold(0.0, |acc, c| acc.max(c.to_f64().abs()))
        }
    }

    /// Degree-0 coefficient at the base point (`θ = 0` on grids).
    pub fn value_at_base_point(&self) -> Scalar {
        let mut v = self.atom_coefficient(0);
        if let Some(g) = &self.grid {
            if let Some(s) = g.comps.get(&0) {
                v = v + Scalar::Float(s[0]);
            }
        }
        v
    }

    /// `exp(f)` truncated by degree; generator atoms only.
    pub fn exp(&self) -> Result<Form> {
        if self.has_grid() {
            return Err(Error::Unsupported("exp is only implemented for generator atoms".into()));
        }
        let c0 = self.atom_coefficient(0);
        let mut rest = self.clone();
        rest.atoms.remove(&0);
        let one = Form::constant(&self.manifold, Scalar::ONE)?;
        let mut sum = one.clone();
        let mut term = one;
        for k in 1..=self.manifold.dimension() {
            term = term.wedge(&rest)?.scale(Scalar::ratio(1, k as i64));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        let factor = if c0.is_zero() { Scalar::ONE } else { Scalar::Float(c0.to_f64().exp()) };
        Ok(sum.scale(factor))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

fn monomial_name(slots: &[Slot], mask: Monomial, normalized: bool) -> String {
    if mask == 0 {
        return "1".into();
    }
    let parts: Vec<String> = slots
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(i, s)| match (s, normalized) {
            (Slot::Angle, false) => format!("dθ{}", i + 1),
            _ => s.name(),
        })
        .collect();
    parts.join("^")
}

struct AtomEntry<'a> {
    generator: String,
    coefficient: &'a Scalar,
}

impl Serialize for AtomEntry<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("generator", &self.generator)?;
        m.serialize_entry("coefficient", self.coefficient)?;
        m.end()
    }
}

struct GridEntry<'a> {
    basis: String,
    n: usize,
    samples: &'a [f64],
}

impl Serialize for GridEntry<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("basis", &self.basis)?;
        m.serialize_entry("n", &self.n)?;
        m.serialize_entry("samples", self.samples)?;
        m.end()
    }
}

struct DegreeEntry<'a> {
    degree: usize,
    atoms: Vec<AtomEntry<'a>>,
    grid: Vec<GridEntry<'a>>,
}

impl Serialize for DegreeEntry<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("degree", &self.degree)?;
        m.serialize_entry("atoms", &self.atoms)?;
        m.serialize_entry("grid", &self.grid)?;
        m.end()
    }
}

/// `{"manifold": .., "components": [{"degree", "atoms", "grid"}, ..]}`
impl Serialize for Form {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let slots = self.manifold.slots();
        let entries: Vec<DegreeEntry> = self
            .degrees()
            .into_iter()
            .map(|d| DegreeEntry {
                degree: d,
                atoms: self
                    .atoms
                    .iter()
                    .filter(|(&m, _)| mask_degree(&slots, m) == d)
                    .map(|(&m, c)| AtomEntry { generator: monomial_name(&slots, m, true), coefficient: c })
                    .collect(),
                grid: self
                    .grid
                    .iter()
                    .flat_map(|g| g.comps.iter().map(move |(m, v)| (g.n, m, v)))
                    .filter(|(_, &m, _)| mask_degree(&slots, m) == d)
                    .map(|(n, &m, v)| GridEntry { basis: monomial_name(&slots, m, false), n, samples: v })
                    .collect(),
            })
            .collect();
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("manifold", &self.manifold)?;
        m.serialize_entry("components", &Components(&entries))?;
        m.end()
    }
}

struct Components<'a>(&'a [DegreeEntry<'a>]);

impl Serialize for Components<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for e in self.0 {
            seq.serialize_element(e)?;
        }
        seq.end()
    }
}
