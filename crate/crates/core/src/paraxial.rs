//! Paraxial orthogonality algebra: the `τ`/`γ` coefficients, the closed-form
//! orthogonality condition and the spacing solver.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Point3, Waveband};

/// Relative tolerance for treating an off-diagonal `τ` as zero.
pub const TAU_ZERO_TOL: f64 = 1e-9;

/// Relative tolerance (to `M1·M2`) of the closed-form orthogonality check.
pub const ORTHO_CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParaxialCoefficients {
    /// `[[τ11, τ12], [τ21, τ22]]`.
    pub tau: [[f64; 2]; 2],
    pub tau1: f64,
    pub tau2: f64,
    /// `[[γ11, γ12], [γ21, γ22]]`.
    pub gamma: [[f64; 2]; 2],
}

/// `τ` coefficients for a receiver center offset `c` and receiver orientation.
///
/// Returns `(τ, τ_1, τ_2)`.
pub fn tau_at(c: Point3, rotation: f64, tilt: f64) -> Result<([[f64; 2]; 2], f64, f64)> {
    let c2 = c.norm_squared();
    if c2 == 0.0 {
        return Err(Error::CoincidentCenters);
    }
    let (sa, ca) = rotation.sin_cos();
    let (sb, cb) = tilt.sin_cos();
    let (x, y, z) = (c.x, c.y, c.z);
    let tau1 = (x * ca + y * sa) / c2;
    let tau2 = (-x * sb * sa + y * sb * ca + z * cb) / c2;
    let tau = [[ca - x * tau1, -z * tau1], [-sb * sa - x * tau2, cb - z * tau2]];
    Ok((tau, tau1, tau2))
}

/// `γ_ab = τ_ab M_a δ_a^r δ_b^t / (λ|c|)`.
///
/// Receiver direction `a` is the row index and transmit direction `b` the column index.
pub fn gamma_from_tau(tau: [[f64; 2]; 2], m: [usize; 2], d_r: [f64; 2], d_t: [f64; 2], lambda: f64, c_norm: f64) -> [[f64; 2]; 2] {
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            g[a][b] = tau[a][b] * m[a] as f64 * d_r[a] * d_t[b] / (lambda * c_norm);
        }
    }
    g
}

fn check_canonical_tx(tx: &ArrayGeometry) -> Result<()> {
    if tx.rotation() != 0.0 || tx.tilt() != 0.0 {
        return Err(Error::InvalidGeometry("transmitter must lie in the xz-plane (zero rotation and tilt)".into()));
    }
    Ok(())
}

pub fn compute_tau_gamma(tx: &ArrayGeometry, rx: &ArrayGeometry, w: Waveband) -> Result<ParaxialCoefficients> {
    check_canonical_tx(tx)?;
    let c = rx.center() - tx.center();
    let (tau, tau1, tau2) = tau_at(c, rx.rotation(), rx.tilt())?;
    let gamma = gamma_from_tau(tau, [rx.n1(), rx.n2()], [rx.d1(), rx.d2()], [tx.d1(), tx.d2()], w.wavelength(), c.norm());
    Ok(ParaxialCoefficients { tau, tau1, tau2, gamma })
}

/// `sin(πx) / sin(πx/m)` with the removable singularities at multiples of `m` taken as limits.
pub fn dirichlet_ratio(x: f64, m: usize) -> f64 {
    let mf = m as f64;
    let k = (x / mf).round();
    let delta = x - k * mf;
    // sin(π(km + δ)) / sin(πk + πδ/m) = (-1)^(k(m+1)) sin(πδ) / sin(πδ/m)
    let sign = if ((k as i64) * (m as i64 + 1)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if delta == 0.0 {
        sign * mf
    } else {
        sign * (PI * delta).sin() / (PI * delta / mf).sin()
    }
}

/// Value of the closed-form inner product for index differences `(Δ1, Δ2)`.
pub fn condition_value(gamma: &[[f64; 2]; 2], m1: usize, m2: usize, d1: i64, d2: i64) -> f64 {
    let (d1, d2) = (d1 as f64, d2 as f64);
    dirichlet_ratio(gamma[0][0] * d1 + gamma[0][1] * d2, m1) * dirichlet_ratio(gamma[1][0] * d1 + gamma[1][1] * d2, m2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub d1: i64,
    pub d2: i64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OrthogonalityVerdict {
    Orthogonal,
    Violations(Vec<Violation>),
}

impl OrthogonalityVerdict {
    pub fn is_orthogonal(&self) -> bool {
        matches!(self, Self::Orthogonal)
    }
}

/// Checks every index difference `(Δ1, Δ2) ≠ (0, 0)` with `|Δ_a| ≤ L_a − 1`.
pub fn verify_orthogonality_condition(
    coeffs: &ParaxialCoefficients,
    l1: usize,
    l2: usize,
    m1: usize,
    m2: usize,
) -> OrthogonalityVerdict {
    let tol = ORTHO_CONDITION_TOL * (m1 * m2) as f64;
    let (r1, r2) = (l1 as i64 - 1, l2 as i64 - 1);
    let mut violations = Vec::new();
    for d1 in -r1..=r1 {
        for d2 in -r2..=r2 {
            if d1 == 0 && d2 == 0 {
                continue;
            }
            let value = condition_value(&coeffs.gamma, m1, m2, d1, d2);
            if value.abs() > tol {
                violations.push(Violation { d1, d2, value });
            }
        }
    }
    if violations.is_empty() {
        OrthogonalityVerdict::Orthogonal
    } else {
        OrthogonalityVerdict::Violations(violations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanishingOffDiagonal {
    Tau12,
    Tau21,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParaxialDiagnostic {
    /// Both directions are active and neither `τ12` nor `τ21` vanishes.
    NoVanishingOffDiagonal { tau12: f64, tau21: f64 },
    /// `τ_aa = 0`; direction `a` is 1-based.
    ZeroTauDiagonal { direction: usize },
    /// `M_a < n·L_a`.
    TooFewElements { direction: usize, have: usize, need: usize },
}

impl std::fmt::Display for ParaxialDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NoVanishingOffDiagonal { tau12, tau21 } => {
                write!(f, "neither tau12 ({tau12:e}) nor tau21 ({tau21:e}) vanishes")
            }
            Self::ZeroTauDiagonal { direction } => write!(f, "tau{direction}{direction} is zero"),
            Self::TooFewElements { direction, have, need } => {
                write!(f, "M{direction} = {have} is below the required {need}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParaxialSolution {
    /// Solved receiver spacings in meters.
    pub d1_r: f64,
    pub d2_r: f64,
    pub feasible: bool,
    /// Whether `M_a ≥ n·L_a` holds per direction.
    pub required_counts: (bool, bool),
    pub zero_tau_offdiag: Option<VanishingOffDiagonal>,
    /// Coefficients evaluated with the solved spacings.
    pub coefficients: ParaxialCoefficients,
    pub diagnostics: Vec<ParaxialDiagnostic>,
    pub m: [usize; 2],
    pub l: [usize; 2],
    pub d_t: [f64; 2],
    pub wavelength: f64,
}

impl ParaxialSolution {
    pub const CSV_HEADER: [&'static str; 9] =
        ["M1", "M2", "L1", "L2", "delta_t1_lam", "delta_t2_lam", "delta_r1_lam", "delta_r2_lam", "feasible"];

    pub fn csv_record(&self) -> [String; 9] {
        let lam = self.wavelength;
        [
            self.m[0].to_string(),
            self.m[1].to_string(),
            self.l[0].to_string(),
            self.l[1].to_string(),
            format!("{:.6}", self.d_t[0] / lam),
            format!("{:.6}", self.d_t[1] / lam),
            format!("{:.6}", self.d1_r / lam),
            format!("{:.6}", self.d2_r / lam),
            self.feasible.to_string(),
        ]
    }
}

/// Solves `δ_a^r δ_a^t = n λ|c| / (M_a |τ_aa|)` for the receiver spacings.
///
/// Counts, center and orientation come from `rx_template`; its spacings are
/// kept for any direction with a single transmit element, where no condition
/// applies. Infeasibility is reported in the returned value.
pub fn solve_spacings(tx: &ArrayGeometry, rx_template: &ArrayGeometry, w: Waveband) -> Result<ParaxialSolution> {
    solve_spacings_multiple(tx, rx_template, w, 1)
}

/// As [`solve_spacings`] with `|γ_aa| = n`.
pub fn solve_spacings_multiple(tx: &ArrayGeometry, rx_template: &ArrayGeometry, w: Waveband, n: usize) -> Result<ParaxialSolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("spacing multiple must be at least 1".into()));
    }
    check_canonical_tx(tx)?;
    let c = rx_template.center() - tx.center();
    let (tau, _, _) = tau_at(c, rx_template.rotation(), rx_template.tilt())?;
    let m = [rx_template.n1(), rx_template.n2()];
    let l = [tx.n1(), tx.n2()];
    let d_t = [tx.d1(), tx.d2()];
    let mut d_r = [rx_template.d1(), rx_template.d2()];
    let mut diagnostics = Vec::new();

    let scale = tau.iter().flatten().fold(0.0_f64, |a, t| a.max(t.abs()));
    let z12 = tau[0][1].abs() <= TAU_ZERO_TOL * scale;
    let z21 = tau[1][0].abs() <= TAU_ZERO_TOL * scale;
    let zero_tau_offdiag = match (z12, z21) {
        (true, true) => Some(VanishingOffDiagonal::Both),
        (true, false) => Some(VanishingOffDiagonal::Tau12),
        (false, true) => Some(VanishingOffDiagonal::Tau21),
        (false, false) => None,
    };
    let active = [l[0] > 1, l[1] > 1];
    if active[0] && active[1] && zero_tau_offdiag.is_none() {
        diagnostics.push(ParaxialDiagnostic::NoVanishingOffDiagonal { tau12: tau[0][1], tau21: tau[1][0] });
    }

    let mut required_counts = (true, true);
    for a in 0..2 {
        if !active[a] {
            continue;
        }
        let need = n * l[a];
        if m[a] < need {
            diagnostics.push(ParaxialDiagnostic::TooFewElements { direction: a + 1, have: m[a], need });
            if a == 0 {
                required_counts.0 = false;
            } else {
                required_counts.1 = false;
            }
        }
        let t = tau[a][a].abs();
        if t <= TAU_ZERO_TOL * scale {
            diagnostics.push(ParaxialDiagnostic::ZeroTauDiagonal { direction: a + 1 });
            continue;
        }
        d_r[a] = n as f64 * w.wavelength() * c.norm() / (m[a] as f64 * t * d_t[a]);
    }

    let gamma = gamma_from_tau(tau, m, d_r, d_t, w.wavelength(), c.norm());
    let (_, tau1, tau2) = tau_at(c, rx_template.rotation(), rx_template.tilt())?;
    Ok(ParaxialSolution {
        d1_r: d_r[0],
        d2_r: d_r[1],
        feasible: diagnostics.is_empty(),
        required_counts,
        zero_tau_offdiag,
        coefficients: ParaxialCoefficients { tau, tau1, tau2, gamma },
        diagnostics,
        m,
        l,
        d_t,
        wavelength: w.wavelength(),
    })
}

impl ParaxialSolution {
    /// The receiver template with the solved spacings applied.
    pub fn apply(&self, rx_template: &ArrayGeometry) -> Result<ArrayGeometry> {
        rx_template.clone().with_spacings(self.d1_r, self.d2_r)
    }
}
