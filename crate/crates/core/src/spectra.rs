//! Eigenvalue data for the model operators: the twisted circle Dirac
//! operator, the 2×2 block ("sharp product") operator, and truncated eta sums.

use std::io::{Read, Write};

use crate::error::{domain, Error, Result};

/// Values within this distance of each other are collated into one entry,
/// and values within this distance of zero are routed to the kernel.
pub const COLLATION_TOLERANCE: f64 = 1e-12;

/// A finite multiset of real eigenvalues, with zero modes counted separately.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Spectrum {
    eigenvalues: Vec<(f64, u64)>,
    kernel_dim: u64,
}

impl Spectrum {
    /// Collates arbitrary `(value, multiplicity)` pairs. Near-zero values go to
    /// the kernel; zero multiplicities are dropped.
    pub fn from_modes<I>(modes: I, kernel_dim: u64) -> Result<Spectrum>
    where
        I: IntoIterator<Item = (f64, u64)>,
    {
        let mut kernel = kernel_dim;
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for (v, m) in modes {
            if !v.is_finite() {
                return domain(format!("non-finite eigenvalue {v}"));
            }
            if m == 0 {
                continue;
            }
            if v.abs() <= COLLATION_TOLERANCE {
                kernel += m;
            } else if v < 0.0 {
                neg.push((-v, m));
            } else {
                pos.push((v, m));
            }
        }
        // Both halves are collated by magnitude with the same procedure, so a
        // negation-symmetric input yields a bitwise mirror-symmetric spectrum.
        let neg = collate(neg);
        let pos = collate(pos);
        let mut eigenvalues: Vec<(f64, u64)> = neg.into_iter().rev().map(|(v, m)| (-v, m)).collect();
        eigenvalues.extend(pos);
        Ok(Spectrum { eigenvalues, kernel_dim: kernel })
    }

    /// Each value with multiplicity one.
    pub fn from_values(values: &[f64]) -> Result<Spectrum> {
        Spectrum::from_modes(values.iter().map(|&v| (v, 1)), 0)
    }

    /// Nonzero eigenvalues, ascending, with multiplicities.
    pub fn eigenvalues(&self) -> &[(f64, u64)] {
        &self.eigenvalues
    }

    pub fn kernel_dim(&self) -> u64 {
        self.kernel_dim
    }

    /// Total number of modes including the kernel.
    pub fn mode_count(&self) -> u64 {
        self.kernel_dim + self.eigenvalues.iter().map(|&(_, m)| m).sum::<u64>()
    }

    /// Number of modes that are `≥ 0` (zero modes count as non-negative).
    pub fn nonnegative_count(&self) -> u64 {
        self.kernel_dim + self.eigenvalues.iter().filter(|(v, _)| *v > 0.0).map(|&(_, m)| m).sum::<u64>()
    }

    /// Disjoint union of two spectra.
    pub fn union(&self, other: &Spectrum) -> Spectrum {
        Spectrum::from_modes(
            self.eigenvalues.iter().chain(other.eigenvalues.iter()).copied(),
            self.kernel_dim + other.kernel_dim,
        )
        .expect("finite inputs")
    }

    pub fn negated(&self) -> Spectrum {
        Spectrum {
            eigenvalues: self.eigenvalues.iter().rev().map(|&(v, m)| (-v, m)).collect(),
            kernel_dim: self.kernel_dim,
        }
    }

    /// True when the nonzero part is invariant under `λ ↦ -λ`.
    pub fn is_symmetric(&self) -> bool {
        let n = self.eigenvalues.len();
        (0..n).all(|i| {
            let (a, ma) = self.eigenvalues[i];
            let (b, mb) = self.eigenvalues[n - 1 - i];
            ma == mb && (a + b).abs() <= COLLATION_TOLERANCE
        })
    }

    /// CSV with a leading `# kernel_dim,<n>` line, then `value,multiplicity` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# kernel_dim,{}", self.kernel_dim).map_err(io_err)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["value", "multiplicity"]).map_err(csv_err)?;
        for &(v, m) in &self.eigenvalues {
            w.write_record([format!("{v:e}"), m.to_string()]).map_err(csv_err)?;
        }
        w.flush().map_err(io_err)?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: Read>(mut input: R) -> Result<Spectrum> {
        let mut text = String::new();
        input.read_to_string(&mut text).map_err(io_err)?;
        let (header, body) = text.split_once('\n').unwrap_or((&text, ""));
        let kernel_dim = header
            .trim()
            .strip_prefix("# kernel_dim,")
            .and_then(|k| k.trim().parse::<u64>().ok())
            .ok_or_else(|| Error::Parse(format!("expected '# kernel_dim,<n>' header, got {header:?}")))?;
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let mut modes = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let v: f64 = rec.get(0).unwrap_or("").trim().parse().map_err(|_| Error::Parse(format!("bad value in {rec:?}")))?;
            let m: u64 = rec
                .get(1)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad multiplicity in {rec:?}")))?;
            if m == 0 {
                return Err(Error::Parse(format!("multiplicity must be positive in {rec:?}")));
            }
            modes.push((v, m));
        }
        Spectrum::from_modes(modes, kernel_dim)
    }
}

fn collate(mut mags: Vec<(f64, u64)>) -> Vec<(f64, u64)> {
    mags.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, u64)> = Vec::with_capacity(mags.len());
    for (v, m) in mags {
        match out.last_mut() {
            Some(last) if v - last.0 <= COLLATION_TOLERANCE => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(e.to_string())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Spectral data of an even operator `P` with `Δ⁺ = P*P`, `Δ⁻ = PP*`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperatorData {
    h_plus: u64,
    h_minus: u64,
    positive_eigs: Vec<(f64, u64)>,
}

impl BlockOperatorData {
    pub fn new(h_plus: u64, h_minus: u64, positive_eigs: Vec<(f64, u64)>) -> Result<Self> {
        if let Some(&(v, _)) = positive_eigs.iter().find(|(v, _)| !(v.is_finite() && *v > 0.0)) {
            return domain(format!("nonzero spectrum of P*P must be strictly positive, got {v}"));
        }
        Ok(BlockOperatorData { h_plus, h_minus, positive_eigs })
    }

    /// `dim ker Δ⁺ - dim ker Δ⁻`.
    pub fn index_plus(&self) -> i64 {
        self.h_plus as i64 - self.h_minus as i64
    }

    pub fn h_plus(&self) -> u64 {
        self.h_plus
    }

    pub fn h_minus(&self) -> u64 {
        self.h_minus
    }

    pub fn positive_eigs(&self) -> &[(f64, u64)] {
        &self.positive_eigs
    }
}

/// Spectrum of `n + a` for `-N ≤ n ≤ N`.
///
/// `a = 0` is admitted: the `n = 0` mode then lands in the kernel.
pub fn circle_twisted_spectrum(a: f64, cutoff: u64) -> Result<Spectrum> {
    if !(0.0..1.0).contains(&a) {
        return domain(format!("twist parameter must lie in [0, 1), got {a}"));
    }
    if cutoff < 1 {
        return domain("cutoff must be at least 1");
    }
    let n = cutoff as i64;
    let mut modes = Vec::with_capacity(2 * cutoff as usize + 1);
    let mut kernel = 0;
    for k in -n..=n {
        if a == 0.0 && k == 0 {
            kernel = 1;
        } else {
            modes.push((k as f64 + a, 1));
        }
    }
    Spectrum::from_modes(modes, kernel)
}

/// The two pieces of the block operator's spectrum: the paired modes
/// `±√(k² + λᵢ)` and the kernel block (`k` on `ker Δ⁺`, `-k` on `ker Δ⁻`).
pub fn sharp_product_parts(p: &BlockOperatorData, a_spec: &Spectrum) -> (Spectrum, Spectrum) {
    let a_modes: Vec<(f64, u64)> = a_spec
        .eigenvalues()
        .iter()
        .copied()
        .chain(std::iter::once((0.0, a_spec.kernel_dim())))
        .filter(|&(_, m)| m > 0)
        .collect();

    let mut paired = Vec::with_capacity(2 * a_modes.len() * p.positive_eigs.len());
    let mut w_block = Vec::with_capacity(2 * a_modes.len());
    for &(k, mk) in &a_modes {
        for &(lam, ml) in &p.positive_eigs {
            let r = (k * k + lam).sqrt();
            paired.push((r, mk * ml));
            paired.push((-r, mk * ml));
        }
        w_block.push((k, mk * p.h_plus));
        w_block.push((-k, mk * p.h_minus));
    }
    (
        Spectrum::from_modes(paired, 0).expect("finite"),
        Spectrum::from_modes(w_block, 0).expect("finite"),
    )
}

/// Full spectrum of the block operator `[[A, P*], [P, -A]]`.
pub fn sharp_product_spectrum(p: &BlockOperatorData, a_spec: &Spectrum) -> Spectrum {
    let (paired, w) = sharp_product_parts(p, a_spec);
    paired.union(&w)
}

/// `Σ_{λ≠0} sgn(λ) mult / |λ|^s` over the finite spectrum.
///
/// Negative and positive halves are summed separately in the same magnitude
/// order, so mirror-symmetric spectra give exactly zero.
pub fn eta_partial_sum(spec: &Spectrum, s: f64) -> f64 {
    let term = |v: f64, m: u64| m as f64 * v.abs().powf(-s);
    let neg: f64 = spec.eigenvalues.iter().take_while(|(v, _)| *v < 0.0).map(|&(v, m)| term(v, m)).sum();
    let pos: f64 = spec.eigenvalues.iter().rev().take_while(|(v, _)| *v > 0.0).map(|&(v, m)| term(v, m)).sum();
    pos - neg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(s: &Spectrum) -> Vec<f64> {
        s.eigenvalues().iter().map(|&(v, _)| v).collect()
    }

    #[test]
    fn circle_spectrum_examples() {
        let s = circle_twisted_spectrum(0.25, 2).unwrap();
        assert_eq!(values(&s), vec![-1.75, -0.75, 0.25, 1.25, 2.25]);
        assert_eq!(s.kernel_dim(), 0);

        let s = circle_twisted_spectrum(0.0, 1).unwrap();
        assert_eq!(values(&s), vec![-1.0, 1.0]);
        assert_eq!(s.kernel_dim(), 1);

        let s = circle_twisted_spectrum(0.5, 1).unwrap();
        assert_eq!(values(&s), vec![-0.5, 0.5, 1.5]);
    }

    #[test]
    fn circle_spectrum_rejects_bad_input() {
        assert!(circle_twisted_spectrum(1.0, 3).is_err());
        assert!(circle_twisted_spectrum(-0.1, 3).is_err());
        assert!(circle_twisted_spectrum(0.3, 0).is_err());
    }

    #[test]
    fn mode_count_is_2n_plus_1() {
        for &a in &[0.0, 0.1, 0.5, 0.9] {
            for n in [1u64, 2, 17, 100] {
                assert_eq!(circle_twisted_spectrum(a, n).unwrap().mode_count(), 2 * n + 1);
            }
        }
    }

    #[test]
    fn sharp_product_small_examples() {
        let p = BlockOperatorData::new(1, 0, vec![(4.0, 1)]).unwrap();
        let a = Spectrum::from_values(&[1.0]).unwrap();
        let s = sharp_product_spectrum(&p, &a);
        let r5 = 5f64.sqrt();
        assert_eq!(s.eigenvalues(), &[(-r5, 1), (1.0, 1), (r5, 1)]);
        assert_eq!(s.kernel_dim(), 0);

        let p = BlockOperatorData::new(1, 0, vec![]).unwrap();
        let a = Spectrum::from_modes(std::iter::empty(), 1).unwrap();
        let s = sharp_product_spectrum(&p, &a);
        assert!(s.eigenvalues().is_empty());
        assert_eq!(s.kernel_dim(), 1);
    }

    #[test]
    fn sharp_product_collated_multiset() {
        // h⁺ = 2, h⁻ = 1, λ = {1}, A = {-1, 1}
        let p = BlockOperatorData::new(2, 1, vec![(1.0, 1)]).unwrap();
        let a = Spectrum::from_values(&[-1.0, 1.0]).unwrap();
        let s = sharp_product_spectrum(&p, &a);
        let r2 = 2f64.sqrt();
        // paired: ±√2 twice; W-block: k=-1 gives -1 (×2) and 1 (×1);
        // k=1 gives 1 (×2) and -1 (×1)
        assert_eq!(s.eigenvalues(), &[(-r2, 2), (-1.0, 3), (1.0, 3), (r2, 2)]);
        assert_eq!(s.kernel_dim(), 0);
    }

    #[test]
    fn block_data_validation() {
        assert!(BlockOperatorData::new(1, 0, vec![(0.0, 1)]).is_err());
        assert!(BlockOperatorData::new(1, 0, vec![(-2.0, 1)]).is_err());
        assert_eq!(BlockOperatorData::new(3, 5, vec![]).unwrap().index_plus(), -2);
    }

    #[test]
    fn eta_sum_examples() {
        let s = Spectrum::from_values(&[-1.0, 1.0]).unwrap();
        for x in [0.0, 0.5, 2.0, 7.3] {
            assert_eq!(eta_partial_sum(&s, x), 0.0);
        }
        let s = Spectrum::from_values(&[0.25]).unwrap();
        assert_eq!(eta_partial_sum(&s, 0.0), 1.0);
        // kernel modes are excluded
        let s = Spectrum::from_modes(vec![(0.0, 3), (2.0, 1)], 0).unwrap();
        assert_eq!(s.kernel_dim(), 3);
        assert_eq!(eta_partial_sum(&s, 0.0), 1.0);
    }

    #[test]
    fn collation_merges_rounding_noise() {
        let s = Spectrum::from_values(&[1.0, 1.0 + 1e-13, 2.0, 1e-14]).unwrap();
        assert_eq!(s.eigenvalues(), &[(1.0, 2), (2.0, 1)]);
        assert_eq!(s.kernel_dim(), 1);
    }

    #[test]
    fn csv_roundtrip() {
        let s = circle_twisted_spectrum(0.0, 3).unwrap();
        let text = s.to_csv();
        assert!(text.starts_with("# kernel_dim,1\nvalue,multiplicity\n"));
        assert_eq!(Spectrum::read_csv(text.as_bytes()).unwrap(), s);
        assert!(Spectrum::read_csv("value,multiplicity\n1,1\n".as_bytes()).is_err());
    }
}
