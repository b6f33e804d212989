//! Signed counting of eigenvalue crossings through zero along one-parameter
//! families of spectra.
//!
//! Zero modes are counted as if perturbed to `+ε`. With this convention a
//! branch sitting at zero at the start and moving up contributes nothing, and a
//! branch that ends exactly at zero coming from below counts as a crossing.

use crate::error::{domain, Error, Result};
use crate::spectra::Spectrum;

/// A continuous piecewise-linear function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    /// Knots `(s, value)` with `s` strictly increasing from 0 to 1.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return domain("a piecewise-linear path needs at least two knots");
        }
        if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
            return domain("knots must start at s = 0 and end at s = 1");
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return domain("knot parameters must be strictly increasing");
        }
        if knots.iter().any(|(s, v)| !s.is_finite() || !v.is_finite()) {
            return domain("knots must be finite");
        }
        Ok(PiecewiseLinear { knots })
    }

    /// `a(s) = start + (end - start) s`.
    pub fn affine(start: f64, end: f64) -> Result<Self> {
        PiecewiseLinear::new(vec![(0.0, start), (1.0, end)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let i = self.knots.partition_point(|&(k, _)| k <= s).clamp(1, self.knots.len() - 1);
        let (s0, v0) = self.knots[i - 1];
        let (s1, v1) = self.knots[i];
        if s == s1 {
            return v1;
        }
        v0 + (v1 - v0) * (s - s0) / (s1 - s0)
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> PiecewiseLinear {
        PiecewiseLinear { knots: self.knots.iter().rev().map(|&(s, v)| (1.0 - s, v)).collect() }
    }

    /// The restriction to `[lo, hi]`, reparametrized over `[0, 1]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<PiecewiseLinear> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return domain(format!("invalid sub-interval [{lo}, {hi}]"));
        }
        let mut knots = vec![(0.0, self.eval(lo))];
        knots.extend(
            self.knots.iter().filter(|&&(s, _)| s > lo && s < hi).map(|&(s, v)| ((s - lo) / (hi - lo), v)),
        );
        knots.push((1.0, self.eval(hi)));
        PiecewiseLinear::new(knots)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    /// A family that does not move.
    Constant(Spectrum),
    /// The circle operator with eigenvalues `n + a(s)`, `n ∈ ℤ`.
    CircleTwistPath(PiecewiseLinear),
    /// Sampled spectra at increasing parameters covering `0` and `1`.
    Tabulated(Vec<(f64, Spectrum)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFamily {
    pub kind: FamilyKind,
    /// Number of evaluation steps for path families.
    pub grid: usize,
}

impl SpectralFamily {
    pub fn new(kind: FamilyKind, grid: usize) -> Self {
        SpectralFamily { kind, grid }
    }

    pub fn circle_twist(path: PiecewiseLinear, grid: usize) -> Self {
        SpectralFamily { kind: FamilyKind::CircleTwistPath(path), grid }
    }

    pub fn reversed(&self) -> SpectralFamily {
        let kind = match &self.kind {
            FamilyKind::Constant(s) => FamilyKind::Constant(s.clone()),
            FamilyKind::CircleTwistPath(p) => FamilyKind::CircleTwistPath(p.reversed()),
            FamilyKind::Tabulated(samples) => {
                FamilyKind::Tabulated(samples.iter().rev().map(|(s, sp)| (1.0 - s, sp.clone())).collect())
            }
        };
        SpectralFamily { kind, grid: self.grid }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralFlow {
    /// Net number of upward crossings.
    pub flow: i64,
    /// A zero eigenvalue sat exactly on an evaluation point and was counted
    /// as `+ε`.
    pub zero_mode_on_grid: bool,
}

/// Net count of eigenvalues crossing zero upward minus downward.
pub fn spectral_flow(fam: &SpectralFamily) -> Result<SpectralFlow> {
    if fam.grid < 2 {
        return domain(format!("spectral flow needs at least 2 grid steps, got {}", fam.grid));
    }
    match &fam.kind {
        FamilyKind::Constant(spec) => Ok(SpectralFlow { flow: 0, zero_mode_on_grid: spec.kernel_dim() > 0 }),
        FamilyKind::CircleTwistPath(path) => circle_path_flow(path, fam.grid),
        FamilyKind::Tabulated(samples) => tabulated_flow(samples),
    }
}

fn circle_path_flow(path: &PiecewiseLinear, grid: usize) -> Result<SpectralFlow> {
    let mut params: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    params.extend(path.knots().iter().map(|&(s, _)| s));
    params.sort_by(f64::total_cmp);
    params.dedup();

    let values: Vec<f64> = params.iter().map(|&s| path.eval(s)).collect();
    let zero_mode_on_grid = values.iter().any(|a| a.fract() == 0.0);

    let mut flow = 0i64;
    for (w, s) in values.windows(2).zip(params.windows(2)) {
        let (a0, a1) = (w[0], w[1]);
        if (a1 - a0).abs() >= 0.5 {
            return Err(Error::Resolution(format!(
                "twist moves by {:.3} on [{:.4}, {:.4}]; refine the grid so each step moves by less than 1/2",
                a1 - a0,
                s[0],
                s[1]
            )));
        }
        // Only branches n with n + a near zero can change sign in this step.
        let lo = (-a0.max(a1)).floor() as i64 - 1;
        let hi = (-a0.min(a1)).ceil() as i64 + 1;
        for n in lo..=hi {
            let before = n as f64 + a0 >= 0.0;
            let after = n as f64 + a1 >= 0.0;
            match (before, after) {
                (false, true) => flow += 1,
                (true, false) => flow -= 1,
                _ => {}
            }
        }
    }
    Ok(SpectralFlow { flow, zero_mode_on_grid })
}

fn tabulated_flow(samples: &[(f64, Spectrum)]) -> Result<SpectralFlow> {
    if samples.len() < 2 {
        return domain("a tabulated family needs at least two samples");
    }
    if samples[0].0 != 0.0 || samples[samples.len() - 1].0 != 1.0 {
        return domain("tabulated samples must cover s = 0 and s = 1");
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return domain("tabulated samples must be strictly increasing in s");
    }
    let modes = samples[0].1.mode_count();
    if samples.iter().any(|(_, sp)| sp.mode_count() != modes) {
        return domain("tabulated spectra must all carry the same number of modes");
    }
    let flow = samples
        .windows(2)
        .map(|w| w[1].1.nonnegative_count() as i64 - w[0].1.nonnegative_count() as i64)
        .sum();
    let zero_mode_on_grid = samples.iter().any(|(_, sp)| sp.kernel_dim() > 0);
    Ok(SpectralFlow { flow, zero_mode_on_grid })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn twist(start: f64, end: f64, grid: usize) -> i64 {
        spectral_flow(&SpectralFamily::circle_twist(PiecewiseLinear::affine(start, end).unwrap(), grid))
            .unwrap()
            .flow
    }

    #[test]
    fn constant_family_has_no_flow() {
        let spec = Spectrum::from_values(&[-1.0, 0.5]).unwrap();
        let fam = SpectralFamily::new(FamilyKind::Constant(spec), 8);
        assert_eq!(spectral_flow(&fam).unwrap().flow, 0);
    }

    #[test]
    fn affine_twists() {
        assert_eq!(twist(0.25, 1.25, 16), 1);
        assert_eq!(twist(0.25, -1.75, 16), -2);
        assert_eq!(twist(0.25, 0.75, 16), 0);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let fam = SpectralFamily::circle_twist(PiecewiseLinear::affine(0.25, -1.75).unwrap(), 2);
        assert!(matches!(spectral_flow(&fam), Err(Error::Resolution(_))));
        let fam = SpectralFamily::circle_twist(PiecewiseLinear::affine(0.0, 0.1).unwrap(), 1);
        assert!(matches!(spectral_flow(&fam), Err(Error::Domain(_))));
    }

    #[test]
    fn endpoint_zero_uses_plus_epsilon() {
        // starts at zero and moves up: the zero mode already counts as positive
        let fam = SpectralFamily::circle_twist(PiecewiseLinear::affine(0.0, 0.3).unwrap(), 4);
        let r = spectral_flow(&fam).unwrap();
        assert_eq!(r.flow, 0);
        assert!(r.zero_mode_on_grid);
        // moves down from zero: one branch leaves the non-negative side
        assert_eq!(twist(0.0, -0.3, 4), -1);
    }

    #[test]
    fn zigzag_path_with_knots() {
        let p = PiecewiseLinear::new(vec![(0.0, 0.25), (0.3, 1.6), (0.7, -0.4), (1.0, 0.25)]).unwrap();
        let fam = SpectralFamily::circle_twist(p, 64);
        assert_eq!(spectral_flow(&fam).unwrap().flow, 0);
    }

    #[test]
    fn piecewise_validation() {
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (0.5, 1.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (0.5, 1.0), (0.5, 2.0), (1.0, 0.0)]).is_err());
        let p = PiecewiseLinear::new(vec![(0.0, 0.0), (0.5, 2.0), (1.0, 1.0)]).unwrap();
        assert_eq!(p.eval(0.25), 1.0);
        assert_eq!(p.eval(0.75), 1.5);
        assert_eq!(p.reversed().eval(0.25), 1.5);
        let r = p.restrict(0.25, 0.75).unwrap();
        assert_eq!(r.eval(0.0), 1.0);
        assert_eq!(r.eval(0.5), 2.0);
        assert_eq!(r.eval(1.0), 1.5);
    }

    #[test]
    fn tabulated_family() {
        let s0 = Spectrum::from_values(&[-0.5, 1.0]).unwrap();
        let s1 = Spectrum::from_values(&[0.5, 1.0]).unwrap();
        let fam = SpectralFamily::new(FamilyKind::Tabulated(vec![(0.0, s0.clone()), (0.5, s0.clone()), (1.0, s1)]), 2);
        assert_eq!(spectral_flow(&fam).unwrap().flow, 1);
        assert_eq!(spectral_flow(&fam.reversed()).unwrap().flow, -1);

        let bad = SpectralFamily::new(
            FamilyKind::Tabulated(vec![(0.0, s0.clone()), (1.0, Spectrum::from_values(&[1.0]).unwrap())]),
            2,
        );
        assert!(spectral_flow(&bad).is_err());
        let bad = SpectralFamily::new(FamilyKind::Tabulated(vec![(0.0, s0.clone()), (0.9, s0)]), 2);
        assert!(spectral_flow(&bad).is_err());
    }
}
