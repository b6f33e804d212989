//! Evaluation of planned scenarios.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rz_pairing::eta::{dai_zhang_reduced, eta_circle_flat, eta_sharp_bruteforce, hurwitz_eta_zero, reduced_eta, EtaResult};
use rz_pairing::forms::{ch_bundle, exactness_residual, todd_form};
use rz_pairing::pairing::{k0_relation_residual, khomology_residual, pair_h1, pair_h2, pair_k0, PairingReport};
use rz_pairing::spectra::{circle_twisted_spectrum, eta_partial_sum, Spectrum};
use rz_pairing::spectral_flow::{spectral_flow, SpectralFamily};
use rz_pairing::{CircleValue, Result, Scalar};

use crate::generators;
use crate::scenario::{EtaSource, SpectrumSource, Task};

/// One computed output.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(Scalar),
    Circle(CircleValue),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Value {
    fn float(x: f64) -> Value {
        Value::Number(Scalar::Float(x))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(s) => Some(s.to_f64()),
            Value::Circle(c) => Some(c.representative()),
            Value::Int(n) => Some(*n as f64),
            Value::Bool(_) | Value::Text(_) => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Number(s) => write!(f, "{s}"),
            Value::Circle(c) => match c.exact() {
                Some((0, _)) => write!(f, "0"),
                Some((p, q)) => write!(f, "{p}/{q}"),
                None => write!(f, "{}", c.representative()),
            },
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

pub type Outputs = Vec<(&'static str, Value)>;

fn eta_outputs(r: &EtaResult) -> Outputs {
    vec![
        ("eta", Value::Number(r.eta)),
        ("kernel_dim", Value::Int(r.kernel_dim as i64)),
        ("hat_eta", Value::Number(r.hat_eta)),
        ("reduced", Value::Circle(r.reduced)),
    ]
}

fn pairing_outputs(r: &PairingReport) -> Outputs {
    vec![
        ("analytic", Value::Circle(r.analytic_term)),
        ("topological", Value::Number(r.topological_term)),
        ("value", Value::Circle(r.value)),
    ]
}

fn spectrum(source: &SpectrumSource) -> Result<Spectrum> {
    match source {
        SpectrumSource::Twist { a, cutoff } => circle_twisted_spectrum(*a, *cutoff),
        SpectrumSource::Values(v) => Spectrum::from_values(v),
    }
}

fn max_over(cases: usize, mut f: impl FnMut() -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        worst = worst.max(f()?);
    }
    Ok(worst)
}

pub fn evaluate(task: &Task) -> Result<Outputs> {
    let out = match task {
        Task::Eta { source, numeric } => match source {
            EtaSource::Twist(a) => {
                let mut out = eta_outputs(&eta_circle_flat(*a)?);
                if *numeric {
                    out.push(("eta_numeric", Value::float(hurwitz_eta_zero(a.to_f64())?)));
                }
                out
            }
            EtaSource::Given { eta, kernel_dim } => eta_outputs(&reduced_eta(*eta, *kernel_dim)?),
        },
        Task::Spectrum { source, s, block } => {
            let spec = spectrum(source)?;
            let partial = eta_partial_sum(&spec, *s);
            let mut out = vec![
                ("mode_count", Value::Int(spec.mode_count() as i64)),
                ("kernel_dim", Value::Int(spec.kernel_dim() as i64)),
                ("eta_partial", Value::float(partial)),
            ];
            if let Some(p) = block {
                let brute = eta_sharp_bruteforce(p, &spec);
                out.extend([
                    ("index", Value::Int(p.index_plus())),
                    ("eta_bruteforce", Value::float(brute.value)),
                    ("eta_formula", Value::float(p.index_plus() as f64 * eta_partial_sum(&spec, 0.0))),
                    ("truncation_bias", Value::Bool(brute.truncation_bias)),
                ]);
            }
            out
        }
        Task::PairH1 { a, w } => pairing_outputs(&pair_h1(*a, *w)?),
        Task::PairH2 { b, deg } => pairing_outputs(&pair_h2(*b, *deg)?),
        Task::PairK0 { x, cycle } => {
            let r = pair_k0(x, cycle)?;
            let mut out = pairing_outputs(&r);
            let d = &r.diagnostics;
            out.extend([
                ("kernel_dim", Value::Int(d.kernel_dim.unwrap_or(0) as i64)),
                ("table_key", Value::Text(d.table_key.clone().unwrap_or_default())),
                ("derived", Value::Bool(d.derived)),
                ("exactness", Value::float(x.exactness_residual())),
            ]);
            out
        }
        Task::Flow { path, grid } => {
            let sf = spectral_flow(&SpectralFamily::circle_twist(path.clone(), *grid))?;
            vec![("flow", Value::Int(sf.flow)), ("zero_mode_on_grid", Value::Bool(sf.zero_mode_on_grid))]
        }
        Task::Index { manifold, bundle } => {
            let integrand = ch_bundle(bundle, manifold)?.wedge(&todd_form(manifold)?)?;
            vec![("index", Value::Number(integrand.integrate(manifold)?))]
        }
        Task::SharpOracle { cases, seed, cutoff } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let specs = [
                generators::symmetric_circle_spectrum(false, *cutoff)?,
                generators::symmetric_circle_spectrum(true, *cutoff)?,
            ];
            let mut i = 0;
            let worst = max_over(*cases, || {
                let spec = &specs[i % 2];
                i += 1;
                let p = generators::block_data(&mut rng);
                let brute = eta_sharp_bruteforce(&p, spec).value;
                Ok((brute - p.index_plus() as f64 * eta_partial_sum(spec, 0.0)).abs())
            })?;
            vec![("cases", Value::Int(*cases as i64)), ("max_deviation", Value::float(worst))]
        }
        Task::Transgression { cases, seed, grid, steps } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let worst = max_over(*cases, || {
                generators::transgression_defect(&generators::circle_homotopy(&mut rng, *grid, *steps)?)
            })?;
            vec![("cases", Value::Int(*cases as i64)), ("max_residual", Value::float(worst))]
        }
        Task::Exactness { mu, g } => vec![("residual", Value::float(exactness_residual(mu, g)?))],
        Task::DaiZhang { eta, kernel_dim, sf } => {
            vec![("reduced", Value::Circle(dai_zhang_reduced(&reduced_eta(*eta, *kernel_dim)?, *sf)?))]
        }
        Task::K0Relation { cases, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let worst = max_over(*cases, || {
                let t = generators::k0_triple(&mut rng)?;
                k0_relation_residual(&t.e1, &t.e2, &t.e3, &t.tch, &t.cycle)
            })?;
            vec![("cases", Value::Int(*cases as i64)), ("max_residual", Value::float(worst))]
        }
        Task::KHomology { x, relation } => vec![("residual", Value::float(khomology_residual(x, relation)?))],
    };
    debug_assert_eq!(out.iter().map(|(k, _)| *k).collect::<Vec<_>>(), task.outputs());
    Ok(out)
}
