//! Scenario documents: TOML parsing, parameter validation and sweep
//! expansion into evaluable [`Planned`] items.
//!
//! ```toml
//! [[scenario]]
//! id = "eta-quarter"
//! kind = "eta"
//! a = "1/4"
//! origin = "closed-form"
//! [scenario.expect]
//! eta = "1/2"
//! reduced = "3/4"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use toml::Value as Toml;

use rz_pairing::forms::{BundleData, Form, K1Element, ModelManifold};
use rz_pairing::pairing::{CocycleMode, GeometricKCycle, KHomologyRelation, RZK0Cocycle};
use rz_pairing::spectra::BlockOperatorData;
use rz_pairing::spectral_flow::PiecewiseLinear;
use rz_pairing::{Error, Result, Scalar};

use crate::catalog;
use crate::Options;

/// Declared value an output is compared against.
#[derive(Clone, Debug, PartialEq)]
pub enum Expected {
    Number(Scalar),
    Text(String),
    AtMost(f64),
    AtLeast(f64),
}

#[derive(Clone, Debug)]
pub enum EtaSource {
    Twist(Scalar),
    Given { eta: Scalar, kernel_dim: u64 },
}

#[derive(Clone, Debug)]
pub enum SpectrumSource {
    Twist { a: f64, cutoff: u64 },
    Values(Vec<f64>),
}

#[derive(Clone, Debug)]
pub enum Task {
    Eta { source: EtaSource, numeric: bool },
    Spectrum { source: SpectrumSource, s: f64, block: Option<BlockOperatorData> },
    PairH1 { a: Scalar, w: i64 },
    PairH2 { b: Scalar, deg: i64 },
    PairK0 { x: Box<RZK0Cocycle>, cycle: GeometricKCycle },
    Flow { path: PiecewiseLinear, grid: usize },
    Index { manifold: ModelManifold, bundle: BundleData },
    SharpOracle { cases: usize, seed: u64, cutoff: u64 },
    Transgression { cases: usize, seed: u64, grid: usize, steps: usize },
    Exactness { mu: Form, g: K1Element },
    DaiZhang { eta: Scalar, kernel_dim: u64, sf: i64 },
    K0Relation { cases: usize, seed: u64 },
    KHomology { x: Box<RZK0Cocycle>, relation: KHomologyRelation },
}

impl Task {
    /// Output names the task produces, in report order.
    pub fn outputs(&self) -> Vec<&'static str> {
        let pairing = vec!["analytic", "topological", "value"];
        match self {
            Task::Eta { source, numeric } => {
                let mut v = vec!["eta", "kernel_dim", "hat_eta", "reduced"];
                if *numeric && matches!(source, EtaSource::Twist(_)) {
                    v.push("eta_numeric");
                }
                v
            }
            Task::Spectrum { block, .. } => {
                let mut v = vec!["mode_count", "kernel_dim", "eta_partial"];
                if block.is_some() {
                    v.extend(["index", "eta_bruteforce", "eta_formula", "truncation_bias"]);
                }
                v
            }
            Task::PairH1 { .. } | Task::PairH2 { .. } => pairing,
            Task::PairK0 { .. } => {
                let mut v = pairing;
                v.extend(["kernel_dim", "table_key", "derived", "exactness"]);
                v
            }
            Task::Flow { .. } => vec!["flow", "zero_mode_on_grid"],
            Task::Index { .. } => vec!["index"],
            Task::SharpOracle { .. } => vec!["cases", "max_deviation"],
            Task::Transgression { .. } | Task::K0Relation { .. } => vec!["cases", "max_residual"],
            Task::Exactness { .. } | Task::KHomology { .. } => vec!["residual"],
            Task::DaiZhang { .. } => vec!["reduced"],
        }
    }

    fn primary(&self) -> &'static str {
        match self {
            Task::Eta { .. } | Task::DaiZhang { .. } => "reduced",
            Task::Spectrum { .. } => "eta_partial",
            Task::PairH1 { .. } | Task::PairH2 { .. } | Task::PairK0 { .. } => "value",
            Task::Flow { .. } => "flow",
            Task::Index { .. } => "index",
            Task::SharpOracle { .. } => "max_deviation",
            Task::Transgression { .. } | Task::K0Relation { .. } => "max_residual",
            Task::Exactness { .. } | Task::KHomology { .. } => "residual",
        }
    }
}

/// A validated scenario ready for evaluation.
#[derive(Clone, Debug)]
pub struct Planned {
    pub id: String,
    pub kind: String,
    pub origin: Option<String>,
    pub inputs: Vec<(String, String)>,
    pub task: Task,
    pub expect: Vec<(String, Expected)>,
    pub tol: f64,
}

fn invalid<T>(id: &str, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Parse(format!("scenario '{id}': {msg}")))
}

fn display_toml(v: &Toml) -> String {
    match v {
        Toml::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parameters of one scenario; every key must be consumed exactly once.
struct Params {
    id: String,
    map: BTreeMap<String, Toml>,
}

impl Params {
    fn take(&mut self, key: &str) -> Option<Toml> {
        self.map.remove(key)
    }

    fn err<T>(&self, key: &str, msg: impl std::fmt::Display) -> Result<T> {
        invalid(&self.id, format!("parameter '{key}': {msg}"))
    }

    fn scalar_opt(&mut self, key: &str) -> Result<Option<Scalar>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => to_scalar(&v).map(Some).or_else(|e| self.err(key, e)),
        }
    }

    fn scalar(&mut self, key: &str) -> Result<Scalar> {
        match self.scalar_opt(key)? {
            Some(s) => Ok(s),
            None => self.err(key, "missing"),
        }
    }

    fn float(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.scalar_opt(key)?.map_or(default, Scalar::to_f64))
    }

    fn int_opt(&mut self, key: &str) -> Result<Option<i64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Toml::Integer(n)) => Ok(Some(n)),
            Some(other) => self.err(key, format!("expected an integer, got {other}")),
        }
    }

    fn int(&mut self, key: &str, default: i64) -> Result<i64> {
        Ok(self.int_opt(key)?.unwrap_or(default))
    }

    fn count(&mut self, key: &str, default: u64) -> Result<u64> {
        let n = self.int(key, default as i64)?;
        u64::try_from(n).or_else(|_| self.err(key, format!("must be non-negative, got {n}")))
    }

    fn positive(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.count(key, default)? {
            0 => self.err(key, "must be positive"),
            n => Ok(n),
        }
    }

    fn text_opt(&mut self, key: &str) -> Result<Option<String>> {
        match self.take(key) {
            None => Ok(None),
            Some(Toml::String(s)) => Ok(Some(s)),
            Some(other) => self.err(key, format!("expected a string, got {other}")),
        }
    }

    fn text(&mut self, key: &str, default: Option<&str>) -> Result<String> {
        match (self.text_opt(key)?, default) {
            (Some(s), _) => Ok(s),
            (None, Some(d)) => Ok(d.to_string()),
            (None, None) => self.err(key, "missing"),
        }
    }

    fn bool(&mut self, key: &str) -> Result<bool> {
        match self.take(key) {
            None => Ok(false),
            Some(Toml::Boolean(b)) => Ok(b),
            Some(other) => self.err(key, format!("expected true or false, got {other}")),
        }
    }

    fn pairs(&mut self, key: &str) -> Result<Option<Vec<(f64, f64)>>> {
        let Some(v) = self.take(key) else { return Ok(None) };
        let parse = |v: &Toml| -> Option<(f64, f64)> {
            let pair = v.as_array()?;
            if pair.len() != 2 {
                return None;
            }
            Some((to_scalar(&pair[0]).ok()?.to_f64(), to_scalar(&pair[1]).ok()?.to_f64()))
        };
        match v.as_array().map(|items| items.iter().map(parse).collect::<Option<Vec<_>>>()) {
            Some(Some(p)) => Ok(Some(p)),
            _ => self.err(key, "expected an array of [x, y] pairs"),
        }
    }

    fn catalog<T>(&mut self, key: &str, default: Option<&str>, f: impl Fn(&str) -> Result<T>) -> Result<T> {
        let src = self.text(key, default)?;
        f(&src).or_else(|e| self.err(key, e))
    }

    fn finish(self, kind: &str) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => invalid(&self.id, format!("unknown key '{k}' for kind {kind}")),
            None => Ok(()),
        }
    }
}

/// Exact rationals for integers, `p/q` strings and plain decimals; floats
/// are read through their shortest decimal form so `0.1` means `1/10`.
pub fn to_scalar(v: &Toml) -> Result<Scalar> {
    match v {
        Toml::Integer(n) => Ok(Scalar::int(*n)),
        Toml::Float(x) if x.is_finite() => Scalar::from_str(&x.to_string()),
        Toml::String(s) => Scalar::from_str(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn to_expected(v: &Toml) -> Result<Expected> {
    match v {
        Toml::String(s) => Ok(Scalar::from_str(s).map(Expected::Number).unwrap_or_else(|_| Expected::Text(s.clone()))),
        Toml::Boolean(b) => Ok(Expected::Text(b.to_string())),
        Toml::Table(t) if t.len() == 1 => {
            let (k, bound) = t.iter().next().expect("one entry");
            let bound = to_scalar(bound)?.to_f64();
            match k.as_str() {
                "max" => Ok(Expected::AtMost(bound)),
                "min" => Ok(Expected::AtLeast(bound)),
                _ => Err(Error::Parse(format!("bound must be 'max' or 'min', got '{k}'"))),
            }
        }
        other => to_scalar(other).map(Expected::Number),
    }
}

fn unitary_on(src: &str, base: &ModelManifold) -> Result<K1Element> {
    let g = catalog::unitary(src)?;
    if !g.is_identity() && base != &ModelManifold::Circle {
        return Err(Error::Parse(format!("{g} needs base S^1, got {base}")));
    }
    Ok(g)
}

fn cocycle(p: &mut Params) -> Result<RZK0Cocycle> {
    let base = p.catalog("base", None, catalog::manifold)?;
    let g = p.catalog("g", Some("id(1)"), |s| unitary_on(s, &base))?;
    let mu0 = p.scalar_opt("mu0")?.unwrap_or(Scalar::ZERO);
    let mu_top = p.scalar_opt("mu_top")?.unwrap_or(Scalar::ZERO);
    let mode = match p.text("mode", Some("unreduced"))?.as_str() {
        "unreduced" => CocycleMode::Unreduced,
        "reduced" => CocycleMode::Reduced,
        other => return p.err("mode", format!("expected 'reduced' or 'unreduced', got '{other}'")),
    };
    let id = p.id.clone();
    let build = || -> Result<RZK0Cocycle> {
        let mut mu = Form::constant(&base, mu0)?;
        if !mu_top.is_zero() {
            mu = mu.add(&Form::top(&base, mu_top)?)?;
        }
        RZK0Cocycle::new(g, mu, base)?.with_mode(mode)
    };
    build().or_else(|e| invalid(&id, e))
}

fn cycle_with(p: &mut Params, target: &ModelManifold, manifold_key: &str, bundle_key: &str) -> Result<GeometricKCycle> {
    let default_m = target.to_string();
    let m = p.catalog(manifold_key, Some(&default_m), catalog::manifold)?;
    let e = p.catalog(bundle_key, None, catalog::bundle)?;
    let f = p.catalog("map", Some("id"), |s| catalog::map(s, target))?;
    GeometricKCycle::new(m, e, f).or_else(|err| p.err(bundle_key, err))
}

fn circle_grid(p: &mut Params, opts: &Options) -> Result<usize> {
    let n = p.positive("grid", opts.grid as u64)? as usize;
    if n < 8 {
        return p.err("grid", format!("needs at least 8 points, got {n}"));
    }
    Ok(n)
}

fn eta_task(p: &mut Params) -> Result<Task> {
    let numeric = p.bool("numeric")?;
    let source = match p.scalar_opt("a")? {
        Some(a) => {
            if !(a.to_f64() > 0.0 && a.to_f64() < 1.0) {
                return p.err("a", format!("twist must lie in (0, 1), got {a}"));
            }
            EtaSource::Twist(a)
        }
        None => EtaSource::Given { eta: p.scalar("eta")?, kernel_dim: p.count("kernel_dim", 0)? },
    };
    if numeric && !matches!(source, EtaSource::Twist(_)) {
        return p.err("numeric", "only available for a twist 'a'");
    }
    Ok(Task::Eta { source, numeric })
}

fn spectrum_task(p: &mut Params, opts: &Options) -> Result<Task> {
    let s = p.float("s", 0.0)?;
    let source = match p.take("modes") {
        Some(v) => {
            let vals = v.as_array().and_then(|items| items.iter().map(|x| to_scalar(x).ok()).collect::<Option<Vec<_>>>());
            match vals {
                Some(vals) => SpectrumSource::Values(vals.into_iter().map(Scalar::to_f64).collect()),
                None => return p.err("modes", "expected an array of numbers"),
            }
        }
        None => {
            let a = p.float("a", 0.0)?;
            if !(0.0..1.0).contains(&a) {
                return p.err("a", format!("twist must lie in [0, 1), got {a}"));
            }
            SpectrumSource::Twist { a, cutoff: p.positive("cutoff", opts.cutoff)? }
        }
    };
    let h_plus = p.int_opt("h_plus")?;
    let h_minus = p.int_opt("h_minus")?;
    let eigs = p.pairs("eigs")?;
    let block = if h_plus.is_some() || h_minus.is_some() || eigs.is_some() {
        let hp = u64::try_from(h_plus.unwrap_or(0)).or_else(|_| p.err("h_plus", "must be non-negative"))?;
        let hm = u64::try_from(h_minus.unwrap_or(0)).or_else(|_| p.err("h_minus", "must be non-negative"))?;
        let mut modes = Vec::new();
        for (lam, m) in eigs.unwrap_or_default() {
            if m < 1.0 || m.fract() != 0.0 {
                return p.err("eigs", format!("multiplicity must be a positive integer, got {m}"));
            }
            modes.push((lam, m as u64));
        }
        Some(BlockOperatorData::new(hp, hm, modes).or_else(|e| p.err("eigs", e))?)
    } else {
        None
    };
    Ok(Task::Spectrum { source, s, block })
}

fn verify_task(p: &mut Params, opts: &Options) -> Result<(String, Task)> {
    let check = p.text("check", None)?;
    let task = match check.as_str() {
        "spectral_flow" => {
            let Some(knots) = p.pairs("knots")? else { return p.err("knots", "missing") };
            let path = PiecewiseLinear::new(knots).or_else(|e| p.err("knots", e))?;
            Task::Flow { path, grid: p.positive("grid", opts.grid as u64)? as usize }
        }
        "index" => Task::Index {
            manifold: p.catalog("manifold", None, catalog::manifold)?,
            bundle: p.catalog("bundle", None, catalog::bundle)?,
        },
        "sharp_oracle" => Task::SharpOracle {
            cases: p.positive("cases", 50)? as usize,
            seed: p.count("seed", 0)?,
            cutoff: p.positive("cutoff", opts.cutoff)?,
        },
        "transgression" => Task::Transgression {
            cases: p.positive("cases", 10)? as usize,
            seed: p.count("seed", 0)?,
            grid: circle_grid(p, opts)?,
            steps: p.positive("steps", 64)? as usize,
        },
        "exactness" => {
            let base = p.catalog("base", None, catalog::manifold)?;
            let g = p.catalog("g", Some("id(1)"), |s| unitary_on(s, &base))?;
            let mu0 = p.scalar_opt("mu0")?.unwrap_or(Scalar::ZERO);
            let corrupt = p.float("corrupt", 0.0)?;
            let n = circle_grid(p, opts)?;
            let mut mu = Form::constant(&base, mu0).or_else(|e| p.err("base", e))?;
            if corrupt != 0.0 {
                let wave = Form::grid_from_fn(&base, n, 0, |x| corrupt * x[0].sin()).or_else(|e| p.err("corrupt", e))?;
                mu = mu.add(&wave)?;
            }
            Task::Exactness { mu, g }
        }
        "dai_zhang" => Task::DaiZhang { eta: p.scalar("eta")?, kernel_dim: p.count("kernel_dim", 0)?, sf: p.int("sf", 0)? },
        "k0_relation" => Task::K0Relation { cases: p.positive("cases", 100)? as usize, seed: p.count("seed", 0)? },
        "khomology" => {
            let x = cocycle(p)?;
            let target = x.base().clone();
            let relation = match p.text("relation", None)?.as_str() {
                "direct_sum" => {
                    let c = cycle_with(p, &target, "manifold", "bundle")?;
                    let e2 = p.catalog("bundle2", None, catalog::bundle)?;
                    KHomologyRelation::DirectSum { manifold: c.manifold, map: c.map, e1: c.bundle, e2 }
                }
                "disjoint_union" => {
                    let c1 = cycle_with(p, &target, "manifold", "bundle")?;
                    let default_m = c1.manifold.to_string();
                    let m2 = p.catalog("manifold2", Some(&default_m), catalog::manifold)?;
                    let e2 = p.catalog("bundle2", None, catalog::bundle)?;
                    let c2 = GeometricKCycle::new(m2, e2, c1.map.clone()).or_else(|e| p.err("bundle2", e))?;
                    KHomologyRelation::DisjointUnion(c1, c2)
                }
                "bundle_modification" => {
                    let cycle = cycle_with(p, &target, "manifold", "bundle")?;
                    let deg = p.positive("p", 1)?;
                    KHomologyRelation::BundleModification { cycle, p: deg as u32 }
                }
                other => return p.err("relation", format!("unknown relation '{other}'")),
            };
            Task::KHomology { x: Box::new(x), relation }
        }
        other => return p.err("check", format!("unknown check '{other}'")),
    };
    Ok((format!("verify:{check}"), task))
}

fn plain_task(kind: &str, p: &mut Params, opts: &Options) -> Result<(String, Task)> {
    let task = match kind {
        "eta" => eta_task(p)?,
        "spectrum" => spectrum_task(p, opts)?,
        "pair_h1" => Task::PairH1 { a: p.scalar("a")?, w: p.int("w", 1)? },
        "pair_h2" => Task::PairH2 { b: p.scalar("b")?, deg: p.int("deg", 1)? },
        "pair_k0" => {
            let x = cocycle(p)?;
            let cycle = cycle_with(p, &x.base().clone(), "manifold", "bundle")?;
            Task::PairK0 { x: Box::new(x), cycle }
        }
        "verify" => return verify_task(p, opts),
        other => return invalid(&p.id, format!("unknown kind '{other}'")),
    };
    Ok((kind.to_string(), task))
}

struct Header {
    id: String,
    kind: String,
    origin: Option<String>,
    tol: Option<f64>,
    expect: Option<Toml>,
}

fn header(index: usize, table: &mut toml::Table) -> Result<Header> {
    let id = match table.remove("id") {
        Some(Toml::String(s)) if !s.is_empty() => s,
        Some(other) => return invalid(&format!("#{}", index + 1), format!("id must be a non-empty string, got {other}")),
        None => return invalid(&format!("#{}", index + 1), "missing id"),
    };
    let kind = match table.remove("kind") {
        Some(Toml::String(s)) => s,
        _ => return invalid(&id, "missing or non-string kind"),
    };
    let origin = match table.remove("origin") {
        None => None,
        Some(Toml::String(s)) => Some(s),
        Some(other) => return invalid(&id, format!("origin must be a string, got {other}")),
    };
    let tol = match table.remove("tol") {
        None => None,
        Some(v) => match to_scalar(&v).map(Scalar::to_f64) {
            Ok(t) if t >= 0.0 => Some(t),
            _ => return invalid(&id, format!("tol must be a non-negative number, got {v}")),
        },
    };
    Ok(Header { id, kind, origin, tol, expect: table.remove("expect") })
}

fn expectations(id: &str, task: &Task, raw: Option<Toml>) -> Result<Vec<(String, Expected)>> {
    let outputs = task.outputs();
    let entries: Vec<(String, Toml)> = match raw {
        None => Vec::new(),
        Some(Toml::Table(t)) if !t.contains_key("max") && !t.contains_key("min") => t.into_iter().collect(),
        Some(v) => vec![(task.primary().to_string(), v)],
    };
    let mut out = Vec::new();
    for (key, v) in entries {
        if !outputs.contains(&key.as_str()) {
            return invalid(id, format!("expectation on unknown output '{key}' (outputs: {})", outputs.join(", ")));
        }
        let e = to_expected(&v).or_else(|e| invalid(id, format!("expectation '{key}': {e}")))?;
        out.push((key, e));
    }
    out.sort_by_key(|(k, _)| outputs.iter().position(|o| o == k));
    Ok(out)
}

fn inputs(map: &BTreeMap<String, Toml>) -> Vec<(String, String)> {
    map.iter().map(|(k, v)| (k.clone(), display_toml(v))).collect()
}

fn expand_sweep(h: Header, mut map: BTreeMap<String, Toml>, opts: &Options) -> Result<Vec<Planned>> {
    let id = h.id;
    if h.expect.is_some() {
        return invalid(&id, "sweeps take 'affine' instead of 'expect'");
    }
    let target = match map.remove("target") {
        Some(Toml::String(s)) if s != "sweep" => s,
        _ => return invalid(&id, "sweep needs a string 'target' kind"),
    };
    let param = match map.remove("param") {
        Some(Toml::String(s)) => s,
        _ => return invalid(&id, "sweep needs a string 'param'"),
    };
    let values = match map.remove("values") {
        Some(Toml::Array(v)) if !v.is_empty() => v,
        _ => return invalid(&id, "sweep needs a non-empty 'values' array"),
    };
    let affine = match map.remove("affine") {
        None => None,
        Some(Toml::Table(mut t)) => {
            let output = match t.remove("output") {
                Some(Toml::String(s)) => s,
                _ => return invalid(&id, "affine needs a string 'output'"),
            };
            let coef = |t: &mut toml::Table, k: &str| -> Result<Scalar> {
                t.remove(k).as_ref().map_or(Ok(Scalar::ZERO), to_scalar).or_else(|e| invalid(&id, format!("affine {k}: {e}")))
            };
            let (intercept, slope) = (coef(&mut t, "intercept")?, coef(&mut t, "slope")?);
            if let Some(k) = t.keys().next() {
                return invalid(&id, format!("unknown affine key '{k}'"));
            }
            Some((output, intercept, slope))
        }
        Some(_) => return invalid(&id, "affine must be a table"),
    };
    if map.contains_key(&param) {
        return invalid(&id, format!("swept parameter '{param}' also given as a fixed value"));
    }
    let mut out = Vec::with_capacity(values.len());
    for (i, v) in values.into_iter().enumerate() {
        let sub_id = format!("{id}[{i}]");
        let mut params = map.clone();
        params.insert(param.clone(), v.clone());
        let shown = inputs(&params);
        let mut p = Params { id: sub_id.clone(), map: params };
        let (kind, task) = plain_task(&target, &mut p, opts)?;
        p.finish(&kind)?;
        let mut expect = Vec::new();
        if let Some((output, intercept, slope)) = &affine {
            if !task.outputs().contains(&output.as_str()) {
                return invalid(&id, format!("affine output '{output}' is not produced by {kind}"));
            }
            let x = to_scalar(&v).or_else(|e| invalid(&sub_id, e))?;
            expect.push((output.clone(), Expected::Number(*intercept + *slope * x)));
        }
        out.push(Planned {
            id: sub_id,
            kind,
            origin: h.origin.clone(),
            inputs: shown,
            task,
            expect,
            tol: h.tol.unwrap_or(opts.tol),
        });
    }
    Ok(out)
}

/// Parses and validates a whole scenario document. Nothing is evaluated.
pub fn plan(src: &str, opts: &Options) -> Result<Vec<Planned>> {
    let mut doc: toml::Table = toml::from_str(src).map_err(|e| Error::Parse(format!("scenario file: {e}")))?;
    let list = match doc.remove("scenario") {
        Some(Toml::Array(items)) => items,
        Some(_) => return Err(Error::Parse("'scenario' must be an array of tables ([[scenario]])".into())),
        None => Vec::new(),
    };
    if let Some(k) = doc.keys().next() {
        return Err(Error::Parse(format!("unknown top-level key '{k}'")));
    }
    let mut planned = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, item) in list.into_iter().enumerate() {
        let Toml::Table(mut table) = item else {
            return Err(Error::Parse(format!("scenario #{} is not a table", i + 1)));
        };
        let h = header(i, &mut table)?;
        if !seen.insert(h.id.clone()) {
            return invalid(&h.id, "duplicate id");
        }
        let map: BTreeMap<String, Toml> = table.into_iter().collect();
        if h.kind == "sweep" {
            planned.extend(expand_sweep(h, map, opts)?);
            continue;
        }
        let shown = inputs(&map);
        let mut p = Params { id: h.id.clone(), map };
        let (kind, task) = plain_task(&h.kind, &mut p, opts)?;
        p.finish(&kind)?;
        let expect = expectations(&h.id, &task, h.expect)?;
        planned.push(Planned {
            id: h.id,
            kind,
            origin: h.origin,
            inputs: shown,
            task,
            expect,
            tol: h.tol.unwrap_or(opts.tol),
        });
    }
    let mut ids = BTreeSet::new();
    for p in &planned {
        if !ids.insert(p.id.as_str()) {
            return invalid(&p.id, "duplicate id after sweep expansion");
        }
    }
    Ok(planned)
}
