//! Spectral metrics of a channel: Gram matrix, effective rank, capacity and
//! the orthogonality-ratio map.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Value reported for an exactly zero off-diagonal Gram entry.
pub const ORTHO_FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerPolicy {
    Equipower,
    Waterfilling,
}

/// `G = H^* H`.
pub fn gram(h: &ChannelMatrix) -> DMatrix<Complex64> {
    gram_of(&h.entries)
}

pub fn gram_of(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    h.adjoint() * h
}

/// Eigenvalues of `G` sorted descending, with round-off negatives clamped to zero.
pub fn gram_eigenvalues(g: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let mut ev = hermitian_eigenvalues(g)?;
    let top = ev[0].max(0.0);
    for e in &mut ev {
        if *e < 0.0 {
            if *e < -1e-10 * top {
                log::warn!("Gram eigenvalue {e:e} is negative beyond round-off (largest {top:e})");
            }
            *e = 0.0;
        }
    }
    Ok(ev)
}

/// The eigenvalues above the numeric cutoff.
fn active(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    if eigenvalues.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let top = eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(top > 0.0) {
        return Err(Error::ZeroSpectrum);
    }
    Ok(eigenvalues.iter().cloned().filter(|&e| e > RANK_CUTOFF * top).collect())
}

pub fn numeric_rank(eigenvalues: &[f64]) -> Result<usize> {
    Ok(active(eigenvalues)?.len())
}

/// Effective rank: `exp` of the entropy of the normalized singular values `sqrt(λ_i)`.
pub fn effective_rank(eigenvalues: &[f64]) -> Result<f64> {
    let sv: Vec<f64> = active(eigenvalues)?.into_iter().map(f64::sqrt).collect();
    let sum: f64 = sv.iter().sum();
    let entropy: f64 = sv
        .iter()
        .map(|s| {
            let p = s / sum;
            -p * p.ln()
        })
        .sum();
    Ok(entropy.exp())
}

fn check_powers(noise_power: f64, total_power: f64) -> Result<()> {
    if !(noise_power > 0.0 && total_power > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise and total power must be positive, got {noise_power} and {total_power}"
        )));
    }
    Ok(())
}

/// Waterfilling allocation over the active modes, in the order given.
///
/// Returns the per-mode powers (zero for modes below the cutoff) and the water level.
pub fn waterfilling(eigenvalues: &[f64], noise_power: f64, total_power: f64) -> Result<(Vec<f64>, f64)> {
    check_powers(noise_power, total_power)?;
    let act = active(eigenvalues)?;
    let cutoff = act.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut inv: Vec<f64> = act.iter().map(|e| noise_power / e).collect();
    inv.sort_by(f64::total_cmp);
    // shrink the active set from the weakest mode until its level is below water
    let mut k = inv.len();
    let mut level;
    loop {
        level = (total_power + inv[..k].iter().sum::<f64>()) / k as f64;
        if level > inv[k - 1] || k == 1 {
            break;
        }
        k -= 1;
    }
    let powers = eigenvalues
        .iter()
        .map(|&e| if e >= cutoff && e > 0.0 { (level - noise_power / e).max(0.0) } else { 0.0 })
        .collect();
    Ok((powers, level))
}

/// `C = Σ log2(1 + P_i λ_i / σ²)` in bit/s/Hz.
pub fn capacity(eigenvalues: &[f64], noise_power: f64, total_power: f64, policy: PowerPolicy) -> Result<f64> {
    check_powers(noise_power, total_power)?;
    let act = active(eigenvalues)?;
    Ok(match policy {
        PowerPolicy::Equipower => {
            let p = total_power / act.len() as f64;
            act.iter().map(|e| (1.0 + p * e / noise_power).log2()).sum()
        }
        PowerPolicy::Waterfilling => {
            let (powers, _) = waterfilling(eigenvalues, noise_power, total_power)?;
            eigenvalues.iter().zip(&powers).map(|(e, p)| (1.0 + p * e / noise_power).log2()).sum()
        }
    })
}

/// `20 log10(|G(u,v)| / sqrt(G(u,u) G(v,v)))`, floored at [`ORTHO_FLOOR_DB`].
pub fn orthogonality_ratio(g: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::InvalidArgument("Gram matrix must be square".into()));
    }
    let diag: Vec<f64> = (0..n).map(|i| g[(i, i)].re).collect();
    if let Some((index, &value)) = diag.iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
        return Err(Error::NonPositiveDiagonal { index, value });
    }
    Ok(DMatrix::from_fn(n, n, |u, v| {
        if u == v {
            0.0
        } else {
            let r = g[(u, v)].norm() / (diag[u] * diag[v]).sqrt();
            if r > 0.0 {
                (20.0 * r.log10()).max(ORTHO_FLOOR_DB)
            } else {
                ORTHO_FLOOR_DB
            }
        }
    }))
}

/// Largest off-diagonal entry of an orthogonality-ratio map.
pub fn max_off_diagonal(ratio_db: &DMatrix<f64>) -> f64 {
    let n = ratio_db.nrows();
    let mut m = ORTHO_FLOOR_DB;
    for u in 0..n {
        for v in 0..n {
            if u != v {
                m = m.max(ratio_db[(u, v)]);
            }
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub effective_rank: f64,
    pub rank_numeric: usize,
    pub capacity_equipower: f64,
    pub capacity_waterfilling: f64,
    /// Row-major `L x L` map in dB.
    pub ortho_ratio_db: Vec<Vec<f64>>,
}

impl SpectralReport {
    pub fn from_channel(h: &ChannelMatrix, noise_power: f64, total_power: f64) -> Result<Self> {
        Self::from_gram(&gram(h), noise_power, total_power)
    }

    pub fn from_gram(g: &DMatrix<Complex64>, noise_power: f64, total_power: f64) -> Result<Self> {
        let eigenvalues = gram_eigenvalues(g)?;
        let ratio = orthogonality_ratio(g)?;
        Ok(Self {
            effective_rank: effective_rank(&eigenvalues)?,
            rank_numeric: numeric_rank(&eigenvalues)?,
            capacity_equipower: capacity(&eigenvalues, noise_power, total_power, PowerPolicy::Equipower)?,
            capacity_waterfilling: capacity(&eigenvalues, noise_power, total_power, PowerPolicy::Waterfilling)?,
            ortho_ratio_db: ratio.row_iter().map(|r| r.iter().cloned().collect()).collect(),
            eigenvalues,
        })
    }

    pub fn max_off_diagonal_db(&self) -> f64 {
        let n = self.ortho_ratio_db.len();
        max_off_diagonal(&DMatrix::from_fn(n, n, |u, v| self.ortho_ratio_db[u][v]))
    }

    pub const CSV_HEADER: [&'static str; 5] = ["id", "n_eff", "rank", "capacity_equipower", "capacity_waterfilling"];

    pub fn csv_record(&self, id: &str) -> [String; 5] {
        [
            id.to_string(),
            format!("{:.12}", self.effective_rank),
            self.rank_numeric.to_string(),
            format!("{:.12}", self.capacity_equipower),
            format!("{:.12}", self.capacity_waterfilling),
        ]
    }

    /// Writes the header and a single summary row.
    pub fn write_csv<W: Write>(&self, id: &str, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        w.write_record(self.csv_record(id))?;
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn effective_rank_examples() {
        assert_relative_eq!(effective_rank(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 4.0, epsilon = 1e-14);
        assert_relative_eq!(effective_rank(&[1.0, 0.0, 0.0]).unwrap(), 1.0, epsilon = 1e-14);
        let p: [f64; 2] = [2.0 / 3.0, 1.0 / 3.0];
        let oracle = (-(p[0] * p[0].ln() + p[1] * p[1].ln())).exp();
        assert_relative_eq!(effective_rank(&[4.0, 1.0]).unwrap(), oracle, epsilon = 1e-14);
        assert_relative_eq!(oracle, 1.8899, epsilon = 1e-4);
        assert!(matches!(effective_rank(&[]), Err(Error::EmptySpectrum)));
        assert!(matches!(effective_rank(&[0.0, 0.0]), Err(Error::ZeroSpectrum)));
    }

    #[test]
    fn capacity_examples() {
        assert_relative_eq!(capacity(&[2.0], 1.0, 0.5, PowerPolicy::Equipower).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(capacity(&[2.0], 1.0, 0.5, PowerPolicy::Waterfilling).unwrap(), 1.0, epsilon = 1e-15);
        let eq = [3.0, 3.0, 3.0];
        assert_eq!(
            capacity(&eq, 0.1, 2.0, PowerPolicy::Equipower).unwrap(),
            capacity(&eq, 0.1, 2.0, PowerPolicy::Waterfilling).unwrap()
        );
    }

    #[test]
    fn waterfilling_matches_line_search() {
        let ev = [10.0, 1.0];
        let wf = capacity(&ev, 1.0, 1.0, PowerPolicy::Waterfilling).unwrap();
        let ep = capacity(&ev, 1.0, 1.0, PowerPolicy::Equipower).unwrap();
        assert!(wf >= ep);
        // scan the water level and keep the best allocation that spends the whole budget
        let mut best = f64::NEG_INFINITY;
        let n = 200_000;
        for i in 0..=n {
            let p1 = i as f64 / n as f64;
            let c = (1.0 + p1 * 10.0).log2() + (1.0 + (1.0 - p1) * 1.0).log2();
            best = best.max(c);
        }
        assert!((wf - best).abs() < 1e-8, "{wf} vs {best}");
        // water level (1 + 0.1 + 1) / 2 = 1.05 keeps both modes on
        let (powers, level) = waterfilling(&ev, 1.0, 1.0).unwrap();
        assert!((level - 1.05).abs() < 1e-15);
        assert!((powers[0] - 0.95).abs() < 1e-15 && (powers[1] - 0.05).abs() < 1e-15);
        let (powers, _) = waterfilling(&ev, 1.0, 0.5).unwrap();
        assert_eq!(powers, vec![0.5, 0.0]);
    }

    #[test]
    fn orthogonality_ratio_examples() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(2.0), c(3.0)]));
        let r = orthogonality_ratio(&d).unwrap();
        assert_eq!(r[(0, 0)], 0.0);
        assert_eq!(r[(0, 1)], ORTHO_FLOOR_DB);
        let ones = DMatrix::from_element(3, 3, c(1.0));
        assert!(orthogonality_ratio(&ones).unwrap().iter().all(|v| v.abs() < 1e-12));
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.0)]));
        assert!(matches!(orthogonality_ratio(&bad), Err(Error::NonPositiveDiagonal { index: 1, .. })));
    }

    #[test]
    fn gram_matches_brute_force() {
        let h = DMatrix::from_fn(5, 3, |m, l| Complex64::new((m * 3 + l) as f64 * 0.1, (m as f64 - l as f64) * 0.2));
        let g = gram_of(&h);
        for u in 0..3 {
            for v in 0..3 {
                let mut s = Complex64::new(0.0, 0.0);
                for m in 0..5 {
                    s += h[(m, u)].conj() * h[(m, v)];
                }
                assert!((g[(u, v)] - s).norm() < 1e-14);
            }
        }
        let rank1 = DMatrix::from_fn(4, 3, |m, _| c(m as f64 + 1.0));
        let ev = gram_eigenvalues(&gram_of(&rank1)).unwrap();
        assert_eq!(numeric_rank(&ev).unwrap(), 1);
    }

    #[test]
    fn report_csv_and_json() {
        let h = DMatrix::from_fn(2, 2, |m, l| if m == l { c(1.0) } else { c(0.0) });
        let r = SpectralReport::from_gram(&gram_of(&h), 1.0, 1.0).unwrap();
        assert_eq!(r.rank_numeric, 2);
        let mut buf = Vec::new();
        r.write_csv("eye", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("id,n_eff,rank,capacity_equipower,capacity_waterfilling\neye,2.000000000000,2,"));
        let back: SpectralReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
