//! Sub-array placement for non-paraxial receivers.
//!
//! The receiver is split into mirror-symmetric sub-arrays facing a linear
//! transmitter. Half-partition index `i = 1..K` runs from the outermost
//! sub-array inwards; the full partition is laid out as
//! `[-x_1, ..., -x_K, +x_K, ..., +x_1]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::{bracketed_roots, Cubic, RootMethod};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Point3, SubArrayPartition, SubArraySpec, Waveband};
use crate::paraxial::{dirichlet_ratio, gamma_from_tau, tau_at};

/// Slack added before rounding minimum counts up, so that the strict inequality
/// `M > γ(L − 1)` is decided deterministically at integer boundaries.
pub const MIN_COUNT_EPS: f64 = 1e-9;

/// Roots closer than this to the interval ends are rejected.
const ROOT_EDGE: f64 = 1e-9;

const SHOOTING_SAMPLES: usize = 4096;

/// Per-sub-array phase and Dirichlet coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaGamma {
    pub eta_x: Vec<f64>,
    pub eta_z: Vec<f64>,
    pub gamma: Vec<[[f64; 2]; 2]>,
    /// `|c_o^i|` in meters.
    pub c_norm: Vec<f64>,
    pub counts: Vec<[usize; 2]>,
}

pub fn eta_gamma(tx: &ArrayGeometry, p: &SubArrayPartition, w: Waveband) -> Result<EtaGamma> {
    if tx.rotation() != 0.0 || tx.tilt() != 0.0 {
        return Err(Error::InvalidGeometry("transmitter must lie in the xz-plane (zero rotation and tilt)".into()));
    }
    let lam = w.wavelength();
    let mut out = EtaGamma { eta_x: vec![], eta_z: vec![], gamma: vec![], c_norm: vec![], counts: vec![] };
    for s in p.subarrays() {
        let c = s.center - tx.center();
        let cn = c.norm();
        let (tau, _, _) = tau_at(c, p.rotation(), p.tilt())?;
        out.eta_x.push(2.0 * c.x * tx.d1() / (lam * cn));
        out.eta_z.push(2.0 * c.z * tx.d2() / (lam * cn));
        out.gamma.push(gamma_from_tau(tau, [s.n1, s.n2], [s.d1, s.d2], [tx.d1(), tx.d2()], lam, cn));
        out.c_norm.push(cn);
        out.counts.push([s.n1, s.n2]);
    }
    Ok(out)
}

impl EtaGamma {
    /// Closed-form Gram entry for transmit index differences `(Δ1, Δ2)`, up to a common factor.
    pub fn condition_sum(&self, d1: i64, d2: i64) -> Complex64 {
        let (f1, f2) = (d1 as f64, d2 as f64);
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..self.c_norm.len() {
            let g = &self.gamma[i];
            let [m1, m2] = self.counts[i];
            let amp = dirichlet_ratio(g[0][0] * f1 + g[0][1] * f2, m1) * dirichlet_ratio(g[1][0] * f1 + g[1][1] * f2, m2);
            let phase = PI * (self.eta_x[i] * f1 + self.eta_z[i] * f2);
            s += Complex64::from_polar(amp / (self.c_norm[i] * self.c_norm[i]), phase);
        }
        s
    }

    /// The value of [`Self::condition_sum`] at zero difference.
    pub fn diagonal(&self) -> f64 {
        (0..self.c_norm.len()).map(|i| (self.counts[i][0] * self.counts[i][1]) as f64 / self.c_norm[i].powi(2)).sum()
    }
}

/// Largest closed-form Gram magnitude over all transmit index differences,
/// relative to the diagonal. Zero means orthogonal under the sub-array model.
pub fn nonparaxial_orthogonality_residual(tx: &ArrayGeometry, p: &SubArrayPartition, w: Waveband) -> Result<f64> {
    let eg = eta_gamma(tx, p, w)?;
    let (r1, r2) = (tx.n1() as i64 - 1, tx.n2() as i64 - 1);
    let diag = eg.diagonal();
    let mut worst = 0.0_f64;
    for d1 in -r1..=r1 {
        for d2 in -r2..=r2 {
            if d1 != 0 || d2 != 0 {
                worst = worst.max(eg.condition_sum(d1, d2).norm() / diag);
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NonParaxialDiagnostic {
    /// `4δ^t ≤ λ`: the two-sub-array centers have no real solution.
    TransmitSpacingTooSmall,
    /// Total receive count is odd where an even split is required.
    OddTotalCount { total: usize },
    /// No admissible `|η_x^1|` in `(1/2, min(1, 2δ^t/λ))`.
    NoRootInRange,
    /// `3 M_1^2 ≥ 4 M_1^1` at `δ^t = λ/2`.
    PartitionInfeasible { m11: usize, m12: usize },
    /// `M_1^i` does not exceed `γ^i (L_1 − 1)`; `index` is 1-based.
    BelowMinimumCount { index: usize, have: usize, need: usize },
    /// Fewer receive than transmit elements.
    TooFewTotal { have: usize, need: usize },
    /// More than one admissible root; the one nearest the paraxial seed was taken.
    AmbiguousRoot { roots: Vec<f64> },
}

impl std::fmt::Display for NonParaxialDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TransmitSpacingTooSmall => write!(f, "transmit spacing must exceed a quarter wavelength"),
            Self::OddTotalCount { total } => write!(f, "total receive count {total} is odd"),
            Self::NoRootInRange => write!(f, "no admissible |eta_x^1| in (1/2, min(1, 2 delta_t / lambda))"),
            Self::PartitionInfeasible { m11, m12 } => write!(f, "3*M1^2 < 4*M1^1 violated ({m12}, {m11})"),
            Self::BelowMinimumCount { index, have, need } => {
                write!(f, "sub-array {index} has {have} elements, needs at least {need}")
            }
            Self::TooFewTotal { have, need } => write!(f, "{have} receive elements, needs at least {need}"),
            Self::AmbiguousRoot { roots } => write!(f, "several admissible roots {roots:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    ClosedForm,
    Cardano,
    Bisection,
    Quadratic,
    Shooting,
}

impl From<RootMethod> for SolveMethod {
    fn from(m: RootMethod) -> Self {
        match m {
            RootMethod::Cardano => Self::Cardano,
            RootMethod::Bisection => Self::Bisection,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonParaxialSolution {
    /// Solved receiver; absent when no admissible root exists.
    #[serde(skip)]
    pub partition: Option<SubArrayPartition>,
    /// Half-partition counts `M_1^i`, outermost first.
    pub counts: Vec<usize>,
    /// `|η_x^i|` per half-partition sub-array.
    pub eta: Vec<f64>,
    /// `γ_11^i` per half-partition sub-array.
    pub gamma: Vec<f64>,
    /// `|x_o^{r,i}|` in meters.
    pub centers: Vec<f64>,
    /// `δ_1^{r,i}` in meters.
    pub spacings: Vec<f64>,
    pub feasible: bool,
    /// Smallest `M_1^i` satisfying `M_1^i > γ_11^i (L_1 − 1)`.
    pub min_counts: Vec<usize>,
    pub diagnostics: Vec<NonParaxialDiagnostic>,
    pub method: SolveMethod,
    /// Exactly one admissible root was found.
    pub unique: bool,
    pub y_o: f64,
    pub d_t: f64,
    pub l1: usize,
    pub wavelength: f64,
}

impl NonParaxialSolution {
    pub const CSV_HEADER: [&'static str; 9] =
        ["Nr", "i", "M1_i", "x_center_lam", "delta_r_lam", "eta", "gamma", "feasible", "min_count"];

    /// One row per sub-array of the full partition, left to right.
    pub fn csv_records(&self) -> Vec<[String; 9]> {
        let k = self.counts.len();
        let nr = 2 * k;
        let lam = self.wavelength;
        (0..nr)
            .map(|j| {
                let (h, sign) = if j < k { (j, -1.0) } else { (nr - 1 - j, 1.0) };
                let fmt = |v: Option<&f64>, s: f64| v.map_or("nan".to_string(), |v| format!("{:.6}", s * v / lam));
                [
                    nr.to_string(),
                    (j + 1).to_string(),
                    self.counts[h].to_string(),
                    fmt(self.centers.get(h), sign),
                    fmt(self.spacings.get(h), 1.0),
                    self.eta.get(h).map_or("nan".into(), |v| format!("{v:.9}")),
                    self.gamma.get(h).map_or("nan".into(), |v| format!("{v:.9}")),
                    self.feasible.to_string(),
                    self.min_counts.get(h).map_or("nan".into(), |v| v.to_string()),
                ]
            })
            .collect()
    }

    /// Total receive element count `2 Σ M_1^i`.
    pub fn total_count(&self) -> usize {
        2 * self.counts.iter().sum::<usize>()
    }
}

struct Setup {
    y_o: f64,
    d_t: f64,
    l1: usize,
    lam: f64,
    /// `2δ^t/λ`.
    big_d: f64,
}

fn broadside_setup(tx: &ArrayGeometry, y_o: f64, w: Waveband) -> Result<Setup> {
    if tx.n2() != 1 {
        return Err(Error::InvalidGeometry("transmitter must be a linear array".into()));
    }
    if tx.rotation() != 0.0 || tx.tilt() != 0.0 || tx.center() != Point3::zeros() {
        return Err(Error::InvalidGeometry("transmitter must sit at the origin with zero rotation and tilt".into()));
    }
    if !(y_o.is_finite() && y_o > 0.0) {
        return Err(Error::InvalidArgument(format!("broadside distance must be positive, got {y_o}")));
    }
    Ok(Setup { y_o, d_t: tx.d1(), l1: tx.n1(), lam: w.wavelength(), big_d: 2.0 * tx.d1() / w.wavelength() })
}

fn min_count(gamma: f64, l1: usize) -> usize {
    (gamma * (l1 as f64 - 1.0) + MIN_COUNT_EPS).ceil().max(1.0) as usize
}

/// Converts solved `(η, γ)` pairs into a partition and checks the count inequalities.
fn build_solution(
    s: &Setup,
    counts: &[usize],
    eta: Vec<f64>,
    gamma: Vec<f64>,
    method: SolveMethod,
    mut diagnostics: Vec<NonParaxialDiagnostic>,
    unique: bool,
) -> Result<NonParaxialSolution> {
    let mut centers = Vec::with_capacity(counts.len());
    let mut spacings = Vec::with_capacity(counts.len());
    let mut half = Vec::with_capacity(counts.len());
    for i in 0..counts.len() {
        let x = eta[i] * s.lam * s.y_o / ((2.0 * s.d_t).powi(2) - (eta[i] * s.lam).powi(2)).sqrt();
        let c = Point3::new(-x, s.y_o, 0.0);
        let (tau, _, _) = tau_at(c, 0.0, 0.0)?;
        let d = gamma[i] * s.lam * c.norm() / (tau[0][0].abs() * counts[i] as f64 * s.d_t);
        half.push(SubArraySpec::new(c, counts[i], 1, d, d)?);
        centers.push(x);
        spacings.push(d);
    }
    let min_counts: Vec<usize> = gamma.iter().map(|&g| min_count(g, s.l1)).collect();
    for (i, (&have, &need)) in counts.iter().zip(&min_counts).enumerate() {
        if have < need {
            diagnostics.push(NonParaxialDiagnostic::BelowMinimumCount { index: i + 1, have, need });
        }
    }
    let total = 2 * counts.iter().sum::<usize>();
    if total < s.l1 {
        diagnostics.push(NonParaxialDiagnostic::TooFewTotal { have: total, need: s.l1 });
    }
    let partition = SubArrayPartition::symmetric(half, 0.0, 0.0)?;
    Ok(NonParaxialSolution {
        partition: Some(partition),
        counts: counts.to_vec(),
        eta,
        gamma,
        centers,
        spacings,
        feasible: diagnostics.iter().all(|d| matches!(d, NonParaxialDiagnostic::AmbiguousRoot { .. })),
        min_counts,
        diagnostics,
        method,
        unique,
        y_o: s.y_o,
        d_t: s.d_t,
        l1: s.l1,
        wavelength: s.lam,
    })
}

fn unsolved(s: &Setup, counts: &[usize], method: SolveMethod, diagnostics: Vec<NonParaxialDiagnostic>) -> NonParaxialSolution {
    NonParaxialSolution {
        partition: None,
        counts: counts.to_vec(),
        eta: vec![],
        gamma: vec![],
        centers: vec![],
        spacings: vec![],
        feasible: false,
        min_counts: vec![],
        diagnostics,
        method,
        unique: false,
        y_o: s.y_o,
        d_t: s.d_t,
        l1: s.l1,
        wavelength: s.lam,
    }
}

/// Two mirror sub-arrays of `M1/2` elements with `γ = |η_x| = 1/2`.
pub fn solve_two_subarrays(tx: &ArrayGeometry, m1: usize, y_o: f64, w: Waveband) -> Result<NonParaxialSolution> {
    let s = broadside_setup(tx, y_o, w)?;
    let counts = [m1 / 2];
    if 4.0 * s.d_t <= s.lam {
        return Ok(unsolved(&s, &counts, SolveMethod::ClosedForm, vec![NonParaxialDiagnostic::TransmitSpacingTooSmall]));
    }
    if !m1.is_multiple_of(2) || m1 == 0 {
        return Ok(unsolved(&s, &counts, SolveMethod::ClosedForm, vec![NonParaxialDiagnostic::OddTotalCount { total: m1 }]));
    }
    build_solution(&s, &counts, vec![0.5], vec![0.5], SolveMethod::ClosedForm, vec![], true)
}

/// Coefficients of the four-sub-array cubic in `|η_x^1|`.
pub fn four_subarray_cubic(m11: usize, m12: usize, big_d: f64) -> Cubic {
    let (a, b, d2) = (m11 as f64, m12 as f64, big_d * big_d);
    Cubic {
        c3: 2.0 * a + 2.0 * b,
        c2: -a - 4.0 * b,
        c1: -2.0 * d2 * a + 2.0 * b * (1.25 - d2),
        c0: d2 * a + 2.0 * b * (d2 - 0.25),
    }
}

/// Positive root of the quadratic left after removing `|η_x^1| = 1` at `δ^t = λ/2`.
pub fn half_wavelength_eta(m11: usize, m12: usize) -> f64 {
    let (a, b) = (m11 as f64, m12 as f64);
    let m1 = 2.0 * a + 2.0 * b;
    (2.0 * b - a) / (2.0 * m1) + (9.0 * a * a + 16.0 * a * b + 16.0 * b * b).sqrt() / (2.0 * m1)
}

/// Admissible interval for `|η_x^1|`: `γ_11^1 = 1 − |η_x^1| > 0` and the inner
/// sub-arrays need `|η_x^1| > 1/2`.
fn eta1_interval(big_d: f64) -> (f64, f64) {
    (0.5, big_d.min(1.0))
}

fn admissible(roots: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    roots.iter().cloned().filter(|&r| r > lo + ROOT_EDGE && r < hi - ROOT_EDGE).collect()
}

fn pick_nearest(roots: &[f64], seed: f64) -> f64 {
    *roots.iter().min_by(|a, b| (*a - seed).abs().total_cmp(&(*b - seed).abs())).expect("non-empty")
}

pub fn solve_four_subarrays(tx: &ArrayGeometry, m11: usize, m12: usize, y_o: f64, w: Waveband) -> Result<NonParaxialSolution> {
    if m11 == 0 || m12 == 0 {
        return Err(Error::InvalidArgument("sub-array counts must be at least 1".into()));
    }
    let s = broadside_setup(tx, y_o, w)?;
    let counts = [m11, m12];
    let (lo, hi) = eta1_interval(s.big_d);
    let half_wave = (s.big_d - 1.0).abs() <= 1e-12;
    let (roots, method) = if half_wave {
        (admissible(&[half_wavelength_eta(m11, m12)], lo, hi), SolveMethod::Quadratic)
    } else {
        let (r, m) = four_subarray_cubic(m11, m12, s.big_d).roots_in(lo, hi);
        (admissible(&r, lo, hi), m.into())
    };
    let mut diagnostics = vec![];
    if half_wave && 3 * m12 >= 4 * m11 {
        diagnostics.push(NonParaxialDiagnostic::PartitionInfeasible { m11, m12 });
    }
    if roots.is_empty() {
        diagnostics.push(NonParaxialDiagnostic::NoRootInRange);
        return Ok(unsolved(&s, &counts, method, diagnostics));
    }
    let seed = 1.0 - m11 as f64 / (2 * (m11 + m12)) as f64;
    if roots.len() > 1 {
        diagnostics.push(NonParaxialDiagnostic::AmbiguousRoot { roots: roots.clone() });
    }
    let e1 = pick_nearest(&roots, seed);
    let e2 = e1 - 0.5;
    build_solution(&s, &counts, vec![e1, e2], vec![1.0 - e1, e2], method, diagnostics, roots.len() == 1)
}

/// How the sub-array distance enters the amplitude-matching conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weighting {
    /// `1/|c_o^i|² ∝ (2δ^t/λ)² − |η_x^i|²`.
    Exact,
    /// All sub-arrays at the common distance `|c_o|`.
    Uniform,
}

/// Propagates the chain from `|η_x^1|` and returns `(η, γ)`, or `None` when a
/// step leaves the admissible region.
fn shoot(eta1: f64, counts: &[usize], big_d: f64, weighting: Weighting) -> Option<(Vec<f64>, Vec<f64>)> {
    let d2 = big_d * big_d;
    let weight = |e: f64| match weighting {
        Weighting::Exact => d2 - e * e,
        Weighting::Uniform => 1.0,
    };
    let mut eta = vec![eta1];
    let mut gamma = vec![1.0 - eta1];
    for i in 0..counts.len() - 1 {
        let (e, g) = (eta[i], gamma[i]);
        // zero matching: γ_{i+1} + η_{i+1} = η_i − γ_i
        let s = e - g;
        if !(s > 0.0) {
            return None;
        }
        // amplitude matching: γ_{i+1} = k w(η_{i+1}), k = γ_i M_{i+1} / (M_i w(η_i))
        let k = g * counts[i + 1] as f64 / (counts[i] as f64 * weight(e));
        let next_g = match weighting {
            Weighting::Uniform => k,
            Weighting::Exact => {
                // k g² − (2ks − 1) g − k (D² − s²) = 0, positive root
                let b = 2.0 * k * s - 1.0;
                let disc = b * b + 4.0 * k * k * (d2 - s * s);
                if disc < 0.0 {
                    return None;
                }
                let root = disc.sqrt();
                // stable form of (b + root) / (2k)
                if b >= 0.0 {
                    (b + root) / (2.0 * k)
                } else {
                    2.0 * k * (d2 - s * s) / (root - b)
                }
            }
        };
        let next_e = s - next_g;
        if !(next_g > 0.0 && next_e > 0.0 && next_e < big_d) {
            return None;
        }
        eta.push(next_e);
        gamma.push(next_g);
    }
    Some((eta, gamma))
}

fn chain_residual(eta1: f64, counts: &[usize], big_d: f64, weighting: Weighting) -> f64 {
    match shoot(eta1, counts, big_d, weighting) {
        Some((eta, gamma)) => gamma[gamma.len() - 1] - eta[eta.len() - 1],
        None => f64::NAN,
    }
}

fn solve_chain_eta(counts: &[usize], big_d: f64, weighting: Weighting) -> Vec<f64> {
    let (lo, hi) = eta1_interval(big_d);
    let roots = bracketed_roots(|e| chain_residual(e, counts, big_d, weighting), lo, hi, SHOOTING_SAMPLES);
    admissible(&roots, lo, hi)
}

/// Generic even-`N_r` chain: `counts` are the half-partition counts, outermost first.
///
/// The chain is integrated from `|η_x^1|` using the zero- and amplitude-matching
/// conditions between consecutive sub-arrays, and `|η_x^1|` is found by
/// bisection on the innermost boundary condition `γ^K = |η_x^K|`.
pub fn solve_chain(tx: &ArrayGeometry, counts: &[usize], y_o: f64, w: Waveband) -> Result<NonParaxialSolution> {
    if counts.is_empty() || counts.contains(&0) {
        return Err(Error::InvalidArgument("chain needs at least one sub-array pair with non-zero counts".into()));
    }
    if counts.len() == 1 {
        return solve_two_subarrays(tx, 2 * counts[0], y_o, w);
    }
    let s = broadside_setup(tx, y_o, w)?;
    let roots = solve_chain_eta(counts, s.big_d, Weighting::Exact);
    if roots.is_empty() {
        return Ok(unsolved(&s, counts, SolveMethod::Shooting, vec![NonParaxialDiagnostic::NoRootInRange]));
    }
    let total: usize = 2 * counts.iter().sum::<usize>();
    let seed = 1.0 - counts[0] as f64 / total as f64;
    let e1 = pick_nearest(&roots, seed);
    let mut diagnostics = vec![];
    if roots.len() > 1 {
        diagnostics.push(NonParaxialDiagnostic::AmbiguousRoot { roots: roots.clone() });
    }
    let (eta, gamma) = shoot(e1, counts, s.big_d, Weighting::Exact).expect("root lies in the admissible region");
    build_solution(&s, counts, eta, gamma, SolveMethod::Shooting, diagnostics, roots.len() == 1)
}

/// Residuals of the defining chain equations for a solved `(η, γ)` sequence,
/// each relative to the size of its terms.
pub fn chain_equation_residuals(sol: &NonParaxialSolution) -> Vec<f64> {
    let (eta, gamma, m) = (&sol.eta, &sol.gamma, &sol.counts);
    let d2 = (2.0 * sol.d_t / sol.wavelength).powi(2);
    let k = eta.len();
    let mut r = vec![(gamma[0] + eta[0] - 1.0).abs()];
    for i in 0..k.saturating_sub(1) {
        let lhs = gamma[i] - eta[i];
        let rhs = -(gamma[i + 1] + eta[i + 1]);
        r.push((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
        let a = m[i] as f64 * (d2 - eta[i] * eta[i]) * (gamma[i] - eta[i]) / gamma[i];
        let b = -(m[i + 1] as f64) * (d2 - eta[i + 1] * eta[i + 1]) * (gamma[i + 1] + eta[i + 1]) / gamma[i + 1];
        r.push((a - b).abs() / a.abs().max(b.abs()));
    }
    r.push((gamma[k - 1] - eta[k - 1]).abs() / gamma[k - 1].abs().max(eta[k - 1].abs()));
    r
}

/// Comparison of a solution with its paraxial limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParaxialLimitReport {
    /// `λ|c_o| / (M_1 δ^t)` in meters.
    pub paraxial_spacing: f64,
    /// Spacings recomputed with `|c_o^i| → |c_o|`, `τ_11^i → 1`.
    pub limit_spacings: Vec<f64>,
    /// Centers recomputed in the same limit.
    pub limit_centers: Vec<f64>,
    /// Centers of the matching contiguous blocks of a uniform `M_1`-element array.
    pub contiguous_centers: Vec<f64>,
    /// Largest relative deviation of `limit_spacings` from `paraxial_spacing`.
    pub limit_deviation: f64,
    /// Largest relative deviation of the solved spacings from `paraxial_spacing`.
    pub solved_deviation: f64,
}

pub fn paraxial_limit_check(sol: &NonParaxialSolution, tx: &ArrayGeometry, w: Waveband) -> Result<ParaxialLimitReport> {
    let s = broadside_setup(tx, sol.y_o, w)?;
    let counts = &sol.counts;
    let total = sol.total_count();
    let paraxial_spacing = s.lam * s.y_o / (total as f64 * s.d_t);
    let (eta, gamma) = if counts.len() == 1 {
        (vec![0.5], vec![0.5])
    } else {
        let roots = solve_chain_eta(counts, s.big_d, Weighting::Uniform);
        let seed = 1.0 - counts[0] as f64 / total as f64;
        if roots.is_empty() {
            return Err(Error::InvalidArgument("no paraxial-limit solution for these counts".into()));
        }
        shoot(pick_nearest(&roots, seed), counts, s.big_d, Weighting::Uniform).expect("admissible root")
    };
    let limit_spacings: Vec<f64> =
        gamma.iter().zip(counts).map(|(g, &m)| g * s.lam * s.y_o / (m as f64 * s.d_t)).collect();
    let limit_centers: Vec<f64> = eta.iter().map(|e| e * s.lam * s.y_o / (2.0 * s.d_t)).collect();
    let mut before = 0usize;
    let contiguous_centers = counts
        .iter()
        .map(|&m| {
            let x = (total as f64 / 2.0 - before as f64 - m as f64 / 2.0) * paraxial_spacing;
            before += m;
            x
        })
        .collect();
    let dev = |v: &[f64]| v.iter().map(|d| (d / paraxial_spacing - 1.0).abs()).fold(0.0, f64::max);
    Ok(ParaxialLimitReport {
        paraxial_spacing,
        limit_deviation: dev(&limit_spacings),
        solved_deviation: dev(&sol.spacings),
        limit_spacings,
        limit_centers,
        contiguous_centers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::exact_partition_channel;
    use crate::geometry::expand_uniform;
    use crate::spectral::{effective_rank, gram, gram_eigenvalues};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const Y: f64 = 256.0;

    fn w() -> Waveband {
        Waveband::from_wavelength(1.0).unwrap()
    }

    fn tx(dt: f64) -> ArrayGeometry {
        ArrayGeometry::linear(16, dt).unwrap()
    }

    fn exact_neff(tx: &ArrayGeometry, p: &SubArrayPartition) -> f64 {
        let h = exact_partition_channel(tx, p, w()).unwrap();
        effective_rank(&gram_eigenvalues(&gram(&h)).unwrap()).unwrap()
    }

    #[test]
    fn single_subarray_reduces_to_paraxial() {
        let t = tx(2.0);
        let d = Y / (16.0 * 2.0);
        let p = SubArrayPartition::new(vec![SubArraySpec::new(Point3::new(0.0, Y, 0.0), 16, 1, d, d).unwrap()], 0.0, 0.0).unwrap();
        assert!(nonparaxial_orthogonality_residual(&t, &p, w()).unwrap() < 1e-9);
    }

    #[test]
    fn residual_matches_brute_force_over_factors() {
        let t = ArrayGeometry::new(3, 2, 0.6, 0.9).unwrap();
        let p = SubArrayPartition::new(
            vec![
                SubArraySpec::new(Point3::new(-40.0, 200.0, 10.0), 4, 3, 3.0, 2.5).unwrap(),
                SubArraySpec::new(Point3::new(25.0, 210.0, -5.0), 5, 2, 2.0, 4.0).unwrap(),
                SubArraySpec::new(Point3::new(70.0, 190.0, 0.0), 3, 3, 1.5, 1.5).unwrap(),
            ],
            0.2,
            -0.1,
        )
        .unwrap();
        let eg = eta_gamma(&t, &p, w()).unwrap();
        let k0 = w().wavenumber();
        let tl = t.local_positions();
        let f = t.flattening();
        for u in 0..t.len() {
            for v in 0..t.len() {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..p.count() {
                    let g = p.geometry(i);
                    let c = g.center() - t.center();
                    let cn = c.norm();
                    let r = g.local_positions();
                    let lin = Complex64::from_polar(1.0, k0 * c.dot(&(tl[u] - tl[v])) / cn);
                    let mut inner = Complex64::new(0.0, 0.0);
                    for rm in &r {
                        let pu = -k0 / cn * (rm.dot(&tl[u]) - c.dot(rm) * c.dot(&tl[u]) / (cn * cn));
                        let pv = -k0 / cn * (rm.dot(&tl[v]) - c.dot(rm) * c.dot(&tl[v]) / (cn * cn));
                        inner += Complex64::from_polar(1.0, pv - pu);
                    }
                    s += lin * inner / (cn * cn);
                }
                let (u1, u2) = f.principal(u);
                let (v1, v2) = f.principal(v);
                let closed = eg.condition_sum(u1 as i64 - v1 as i64, u2 as i64 - v2 as i64);
                assert!((s - closed).norm() <= 1e-9 * eg.diagonal(), "{u},{v}: {s} vs {closed}");
            }
        }
    }

    #[test]
    fn two_subarray_closed_form() {
        let sol = solve_two_subarrays(&tx(0.5), 48, Y, w()).unwrap();
        assert!(sol.feasible);
        assert_relative_eq!(sol.centers[0], Y / 3f64.sqrt(), max_relative = 1e-12);
        let c = (Y * Y + sol.centers[0].powi(2)).sqrt();
        let tau = Y * Y / (c * c);
        assert_relative_eq!(sol.spacings[0], c / (tau * 48.0 * 0.5), max_relative = 1e-12);
        let p = sol.partition.as_ref().unwrap();
        assert!(nonparaxial_orthogonality_residual(&tx(0.5), p, w()).unwrap() < 1e-6);

        let bad = solve_two_subarrays(&tx(0.25), 48, Y, w()).unwrap();
        assert!(!bad.feasible);
        assert_eq!(bad.diagnostics, vec![NonParaxialDiagnostic::TransmitSpacingTooSmall]);
        assert!(!solve_two_subarrays(&tx(0.5), 47, Y, w()).unwrap().feasible);
    }

    #[test]
    fn four_subarray_equal_partition() {
        let e = (1.0 + 41f64.sqrt()) / 8.0;
        assert_relative_eq!(half_wavelength_eta(12, 12), e, max_relative = 1e-15);
        let sol = solve_four_subarrays(&tx(0.5), 12, 12, Y, w()).unwrap();
        assert!(sol.feasible && sol.unique);
        assert_relative_eq!(sol.eta[0], e, max_relative = 1e-15);
        assert!((sol.spacings[0] - 58.46).abs() < 0.05 && (sol.spacings[1] - 24.48).abs() < 0.05);
        // the quadratic agrees with the full cubic at D = 1
        let c = four_subarray_cubic(12, 12, 1.0);
        assert!(c.eval(e).abs() <= 1e-12 * c.term_scale(e));
        // minimum counts: (η − 1/2)(L − 1) = 6.38 → 7
        assert_eq!(sol.min_counts, vec![2, 7]);
        let threshold = 4.0 * (e - 0.5) * 15.0;
        assert!((threshold - 25.5).abs() < 0.05);
        let below = solve_four_subarrays(&tx(0.5), 6, 6, Y, w()).unwrap();
        assert!(!below.feasible);
        assert!(below.partition.is_some());
    }

    #[test]
    fn four_subarray_infeasible_partition() {
        let sol = solve_four_subarrays(&tx(0.5), 10, 14, Y, w()).unwrap();
        assert!(!sol.feasible);
        assert!(sol.diagnostics.contains(&NonParaxialDiagnostic::PartitionInfeasible { m11: 10, m12: 14 }));
        assert!(sol.diagnostics.contains(&NonParaxialDiagnostic::NoRootInRange));
    }

    #[test]
    fn chain_reduces_to_closed_forms() {
        let a = solve_chain(&tx(0.5), &[24], Y, w()).unwrap();
        let b = solve_two_subarrays(&tx(0.5), 48, Y, w()).unwrap();
        assert_eq!(a, b);
        for &dt in &[0.5, 0.75, 1.0, 2.0, 3.0] {
            for &(m11, m12) in &[(12, 12), (14, 8), (9, 11), (20, 5)] {
                let f = solve_four_subarrays(&tx(dt), m11, m12, Y, w()).unwrap();
                let c = solve_chain(&tx(dt), &[m11, m12], Y, w()).unwrap();
                assert_eq!(f.partition.is_some(), c.partition.is_some(), "dt={dt} {m11},{m12}");
                for (x, y) in f.eta.iter().zip(&c.eta).chain(f.spacings.iter().zip(&c.spacings)) {
                    assert_relative_eq!(*x, *y, max_relative = 1e-6);
                }
            }
        }
    }

    #[test]
    fn chain_solutions_satisfy_their_equations() {
        for counts in [vec![12, 12], vec![8, 8, 8], vec![10, 6, 8], vec![6, 6, 6, 6]] {
            for &dt in &[0.5, 1.0, 2.0] {
                let sol = solve_chain(&tx(dt), &counts, Y, w()).unwrap();
                if sol.partition.is_none() {
                    continue;
                }
                for r in chain_equation_residuals(&sol) {
                    assert!(r < 1e-9, "{counts:?} dt={dt}: {r}");
                }
            }
        }
    }

    #[test]
    fn limit_check_matches_contiguous_array() {
        let sol = solve_four_subarrays(&tx(2.0), 12, 12, Y, w()).unwrap();
        let r = paraxial_limit_check(&sol, &tx(2.0), w()).unwrap();
        assert_relative_eq!(r.paraxial_spacing, 8.0 / 3.0, max_relative = 1e-12);
        assert!(r.limit_deviation < 1e-9);
        assert_relative_eq!(r.limit_centers[0], (48.0 - 12.0) / 2.0 * r.paraxial_spacing, max_relative = 1e-9);
        assert_relative_eq!(r.limit_centers[1], 12.0 / 2.0 * r.paraxial_spacing, max_relative = 1e-9);
        for (a, b) in r.limit_centers.iter().zip(&r.contiguous_centers) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
        assert!((sol.spacings[0] - 2.77).abs() < 0.05 && (sol.spacings[1] - 2.72).abs() < 0.05);
        // the non-paraxial correction shrinks as the transmit spacing grows
        let mut last = f64::INFINITY;
        for &dt in &[2.0, 4.0, 8.0, 16.0] {
            let sol = solve_four_subarrays(&tx(dt), 12, 12, Y, w()).unwrap();
            let dev = paraxial_limit_check(&sol, &tx(dt), w()).unwrap().solved_deviation;
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 0.01);
    }

    #[test]
    fn large_distance_limit_recomputation() {
        let sol = solve_four_subarrays(&tx(2.0), 12, 12, 1e6, w()).unwrap();
        let r = paraxial_limit_check(&sol, &tx(2.0), w()).unwrap();
        for d in &r.limit_spacings {
            assert!((d / r.paraxial_spacing - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn design3_exact_channel_rank() {
        for m1 in (28..=48).step_by(4) {
            let sol = solve_four_subarrays(&tx(0.5), m1 / 4, m1 / 4, Y, w()).unwrap();
            assert!(sol.feasible);
            let n = exact_neff(&tx(0.5), sol.partition.as_ref().unwrap());
            assert!(n >= 15.0, "M1={m1}: {n}");
        }
    }

    #[test]
    fn csv_rows() {
        let sol = solve_four_subarrays(&tx(0.5), 12, 12, Y, w()).unwrap();
        let rows = sol.csv_records();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0][0], "4");
        assert!(rows[0][3].starts_with('-'));
        assert_eq!(rows[0][3][1..], rows[3][3]);
        assert_eq!(rows[1][4], rows[2][4]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn cardano_and_bisection_agree(m11 in 1usize..40, m12 in 1usize..40, dt in 0.3f64..5.0) {
            let c = four_subarray_cubic(m11, m12, 2.0 * dt);
            let hi = 2.0 * dt;
            let cardano: Vec<f64> = c.cardano_roots().into_iter().filter(|&x| x > 1e-6 && x < hi - 1e-6).collect();
            let bisect = c.bisection_roots(0.0, hi, 20_000);
            prop_assume!(!c.is_marginal());
            prop_assert_eq!(cardano.len(), bisect.len(), "{:?} vs {:?}", cardano, bisect);
            for (a, b) in cardano.iter().zip(&bisect) {
                prop_assert!((a - b).abs() < 1e-9);
                prop_assert!(c.eval(*a).abs() < 1e-9 * c.term_scale(*a));
            }
        }

        #[test]
        fn feasibility_is_monotone_in_total_count(m0 in 1usize..30) {
            let a = solve_four_subarrays(&tx(0.5), m0, m0, Y, w()).unwrap();
            let b = solve_four_subarrays(&tx(0.5), m0 + 1, m0 + 1, Y, w()).unwrap();
            prop_assert!(!a.feasible || b.feasible);
        }

        #[test]
        fn eta_stays_in_bounds(m11 in 1usize..40, m12 in 1usize..40, dt in 0.3f64..5.0) {
            let sol = solve_four_subarrays(&tx(dt), m11, m12, Y, w()).unwrap();
            for e in &sol.eta {
                prop_assert!(*e > 0.0 && *e < 2.0 * dt);
            }
            if let Some(e) = sol.eta.first() {
                prop_assert!(*e > 0.5);
            }
        }
    }

    #[test]
    fn half_partition_layout_is_used() {
        let sol = solve_four_subarrays(&tx(0.5), 12, 12, Y, w()).unwrap();
        let p = sol.partition.unwrap();
        let xs: Vec<f64> = p.subarrays().iter().map(|s| s.center.x).collect();
        assert!(xs[0] < xs[1] && xs[1] < 0.0 && xs[2] == -xs[1] && xs[3] == -xs[0]);
        assert_eq!(expand_uniform(&p.geometry(0)).len(), 12);
    }
}
