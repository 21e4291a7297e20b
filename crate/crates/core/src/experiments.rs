//! Numerical studies: elevation sweep, receive-count sweep, transmit-spacing
//! sweep with the spacing table, and orthogonality-ratio maps.
//!
//! The broadside studies compare four receivers of a linear link:
//!
//! 1. four sub-arrays with analytic centers and grid-searched spacings on the exact channel;
//! 2. as 1, with the search run on the per-sub-array quartic channel;
//! 3. the analytic four-sub-array solution;
//! 4. a uniform array with the paraxial spacing.
//!
//! Every reported effective rank is measured on the exact channel.

use rayon::prelude::*;

use crate::channel::exact_channel;
use crate::config::{rx_center_at, ExperimentConfig, ReceiverConfig, Strategy, SweepVariable};
use crate::error::{Error, Result};
use crate::geometry::{expand_partition, expand_uniform, ArrayGeometry, Point3, SubArrayPartition, Waveband};
use crate::grid::{evaluate_partition, grid_search, worker_pool, GridResult, GridSpec, ObjectiveChannel, SpacingTemplate};
use crate::nonparaxial::{solve_chain, solve_four_subarrays, solve_two_subarrays, NonParaxialSolution};
use crate::paraxial::{solve_spacings, ParaxialSolution};
use crate::spectral::{effective_rank, gram, gram_eigenvalues, orthogonality_ratio, SpectralReport};
use crate::table::{cell, PlotHint, Table};

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn require_sweep(cfg: &ExperimentConfig, v: SweepVariable) -> Result<Vec<f64>> {
    match &cfg.sweep {
        Some(s) if s.variable == v => Ok(s.values.values()),
        _ => Err(bad(format!("scenario {:?} needs a {v:?} sweep", cfg.scenario))),
    }
}

fn tx_spacings(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.tx_spacings_lam.is_empty() {
        vec![cfg.transmitter.d1_lam]
    } else {
        cfg.tx_spacings_lam.clone()
    }
}

fn par_collect<T: Send, F: Fn(&f64) -> Result<T> + Sync + Send>(values: &[f64], f: F) -> Result<Vec<T>> {
    worker_pool().install(|| values.par_iter().map(&f).collect())
}

fn exact_neff_uniform(tx: &ArrayGeometry, rx: &ArrayGeometry, w: Waveband) -> Result<f64> {
    effective_rank(&gram_eigenvalues(&gram(&exact_channel(&expand_uniform(tx), &expand_uniform(rx), w)?))?)
}

fn grid_spec(cfg: &ExperimentConfig, axes: usize, objective: ObjectiveChannel) -> GridSpec {
    GridSpec::new(vec![cfg.grid.axis; axes], objective)
}

/// Linear broadside link at distance `y_o`: transmitter of `cfg` with spacing `d_t_lam`.
struct Broadside {
    tx: ArrayGeometry,
    y_o: f64,
    w: Waveband,
}

impl Broadside {
    fn new(cfg: &ExperimentConfig, d_t_lam: f64) -> Result<Self> {
        if !cfg.is_linear_broadside() {
            return Err(bad(format!("scenario {:?} needs linear broadside arrays", cfg.scenario)));
        }
        let w = cfg.waveband()?;
        let tx = ArrayGeometry::linear(cfg.transmitter.n1, w.lam(d_t_lam))?;
        Ok(Self { tx, y_o: w.lam(cfg.distance_lam), w })
    }

    fn design3(&self, m1: usize) -> Result<NonParaxialSolution> {
        if !m1.is_multiple_of(4) || m1 == 0 {
            return Err(bad(format!("M1 = {m1} is not a positive multiple of 4")));
        }
        solve_four_subarrays(&self.tx, m1 / 4, m1 / 4, self.y_o, self.w)
    }

    fn design4(&self, m1: usize) -> Result<ParaxialSolution> {
        let template = ArrayGeometry::linear(m1, self.w.lam(0.5))?.with_center(Point3::new(0.0, self.y_o, 0.0))?;
        solve_spacings(&self.tx, &template, self.w)
    }

    fn design4_neff(&self, sol: &ParaxialSolution) -> Result<f64> {
        let rx = ArrayGeometry::linear(sol.m[0], sol.d1_r)?.with_center(Point3::new(0.0, self.y_o, 0.0))?;
        exact_neff_uniform(&self.tx, &rx, self.w)
    }

    /// Grid search over the spacings of the analytic partition, keeping its centers.
    fn grid_design(&self, d3: &NonParaxialSolution, spec: &GridSpec) -> Result<(SubArrayPartition, GridResult)> {
        let p = d3.partition.clone().ok_or_else(|| bad("the analytic partition has no admissible root"))?;
        let mut spec = spec.clone();
        spec.axes.truncate(p.free_pairs());
        while spec.axes.len() < p.free_pairs() {
            spec.axes.push(spec.axes[0]);
        }
        let template = SpacingTemplate::Partition(p.clone());
        let r = grid_search(&self.tx, &template, self.w, &spec)?;
        let mut q = p;
        for (i, &d) in r.best_params.iter().enumerate() {
            q.set_spacing_pair(i, self.w.lam(d))?;
        }
        Ok((q, r))
    }

    fn exact_neff(&self, p: &SubArrayPartition) -> Result<f64> {
        evaluate_partition(&self.tx, p, self.w, ObjectiveChannel::Exact)
    }
}

/// Minimum total receive count `4 max γ (L1 − 1)` of the equal four-way partition.
pub fn count_threshold(cfg: &ExperimentConfig) -> Result<f64> {
    let b = Broadside::new(cfg, cfg.transmitter.d1_lam)?;
    let sol = b.design3(4)?;
    let g = sol.gamma.iter().cloned().fold(f64::NAN, f64::max);
    Ok(4.0 * g * (cfg.transmitter.n1 as f64 - 1.0))
}

/// Paraxial design and grid optimum per elevation angle and transmit spacing.
pub fn run_elevation_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let angles = require_sweep(cfg, SweepVariable::ElevationDeg)?;
    let rx_cfg = match &cfg.receiver {
        ReceiverConfig::Uniform(a) => a.clone(),
        _ => return Err(bad("the elevation sweep needs a uniform receiver")),
    };
    let w = cfg.waveband()?;
    let dist = w.lam(cfg.distance_lam);
    let points: Vec<(f64, f64)> =
        angles.iter().flat_map(|&a| tx_spacings(cfg).into_iter().map(move |d| (a, d))).collect();
    let index: Vec<f64> = (0..points.len()).map(|i| i as f64).collect();
    let rows = par_collect(&index, |&i| {
        let (theta, dt) = points[i as usize];
        let mut tx_cfg = cfg.transmitter.clone();
        tx_cfg.d1_lam = dt;
        tx_cfg.d2_lam = dt;
        let tx = tx_cfg.to_geometry(w, Point3::zeros())?;
        let template = rx_cfg.to_geometry(w, rx_center_at(dist, theta))?;
        let sol = solve_spacings(&tx, &template, w)?;
        let neff_p = exact_neff_uniform(&tx, &sol.apply(&template)?, w)?;
        let axes = if template.n2() > 1 { 2 } else { 1 };
        let g = grid_search(&tx, &SpacingTemplate::Uniform(template.clone()), w, &grid_spec(cfg, axes, cfg.grid.objective))?;
        let g2 = g.best_params.get(1).copied().unwrap_or(w.to_lam(template.d2()));
        let g_rx = template.with_spacings(w.lam(g.best_params[0]), w.lam(g2))?;
        let neff_g = exact_neff_uniform(&tx, &g_rx, w)?;
        Ok(vec![
            cell(theta, 3),
            cell(dt, 4),
            cell(w.to_lam(sol.d1_r), 6),
            cell(w.to_lam(sol.d2_r), 6),
            sol.feasible.to_string(),
            cell(neff_p, 9),
            cell(g.best_params[0], 4),
            cell(g2, 4),
            cell(neff_g, 9),
        ])
    })?;
    let mut t = Table::new(
        "fig_elevation",
        [
            "elevation_deg",
            "delta_t_lam",
            "paraxial_d1_lam",
            "paraxial_d2_lam",
            "paraxial_feasible",
            "neff_paraxial",
            "grid_d1_lam",
            "grid_d2_lam",
            "neff_grid",
        ],
    )
    .with_plot(PlotHint {
        x: "elevation_deg".into(),
        ys: vec!["neff_paraxial".into(), "neff_grid".into()],
        group: Some("delta_t_lam".into()),
        title: "Effective rank versus elevation".into(),
        heatmap: false,
    });
    for r in rows {
        t.push(r)?;
    }
    Ok(t)
}

/// Effective rank of Designs 1 to 4 per receive count, with the count threshold.
pub fn run_antenna_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let counts = require_sweep(cfg, SweepVariable::ReceiveCount)?;
    let b = Broadside::new(cfg, cfg.transmitter.d1_lam)?;
    let threshold = count_threshold(cfg)?;
    let exact_spec = grid_spec(cfg, 2, ObjectiveChannel::Exact);
    let large_spec = grid_spec(cfg, 2, ObjectiveChannel::QuarticSubArray);
    let rows = par_collect(&counts, |&m| {
        let m1 = m as usize;
        let d3 = b.design3(m1)?;
        let (p1, _) = b.grid_design(&d3, &exact_spec)?;
        let (p2, _) = b.grid_design(&d3, &large_spec)?;
        let p3 = d3.partition.as_ref().ok_or_else(|| bad("the analytic partition has no admissible root"))?;
        let d4 = b.design4(m1)?;
        Ok(vec![
            m1.to_string(),
            cell(b.exact_neff(&p1)?, 9),
            cell(b.exact_neff(&p2)?, 9),
            cell(b.exact_neff(p3)?, 9),
            cell(b.design4_neff(&d4)?, 9),
            d3.feasible.to_string(),
            cell(threshold, 6),
        ])
    })?;
    let mut t = Table::new(
        "fig_antennas",
        ["M1", "neff_design1", "neff_design2", "neff_design3", "neff_design4", "design3_feasible", "threshold_M1"],
    )
    .with_plot(PlotHint {
        x: "M1".into(),
        ys: vec!["neff_design1".into(), "neff_design2".into(), "neff_design3".into(), "neff_design4".into()],
        group: None,
        title: "Effective rank versus receive count".into(),
        heatmap: false,
    });
    for r in rows {
        t.push(r)?;
    }
    Ok(t)
}

fn broadside_m1(cfg: &ExperimentConfig) -> Result<usize> {
    match &cfg.receiver {
        ReceiverConfig::Partition { counts } if counts.len() == 2 && counts[0] == counts[1] => Ok(4 * counts[0]),
        ReceiverConfig::Uniform(a) if a.n1 % 4 == 0 => Ok(a.n1),
        _ => Err(bad("the broadside studies need an equal two-count partition or a uniform receiver with M1 divisible by 4")),
    }
}

/// One row of the spacing table, all spacings in wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingRow {
    pub delta_t: f64,
    pub design1: [f64; 2],
    pub design2: [f64; 2],
    pub design3: [f64; 2],
    pub design4: f64,
    pub neff: [f64; 4],
}

fn spacing_row(cfg: &ExperimentConfig, m1: usize, dt: f64) -> Result<SpacingRow> {
    let b = Broadside::new(cfg, dt)?;
    let d3 = b.design3(m1)?;
    let p3 = d3.partition.as_ref().ok_or_else(|| bad("the analytic partition has no admissible root"))?;
    let (p1, g1) = b.grid_design(&d3, &grid_spec(cfg, 2, ObjectiveChannel::Exact))?;
    let (p2, g2) = b.grid_design(&d3, &grid_spec(cfg, 2, ObjectiveChannel::QuarticSubArray))?;
    let d4 = b.design4(m1)?;
    let lam = b.w.wavelength();
    Ok(SpacingRow {
        delta_t: dt,
        design1: [g1.best_params[0], g1.best_params[1]],
        design2: [g2.best_params[0], g2.best_params[1]],
        design3: [d3.spacings[0] / lam, d3.spacings[1] / lam],
        design4: d4.d1_r / lam,
        neff: [b.exact_neff(&p1)?, b.exact_neff(&p2)?, b.exact_neff(p3)?, b.design4_neff(&d4)?],
    })
}

/// Spacing table rows for every configured transmit spacing.
pub fn spacing_table_rows(cfg: &ExperimentConfig) -> Result<Vec<SpacingRow>> {
    let m1 = broadside_m1(cfg)?;
    par_collect(&tx_spacings(cfg), |&dt| spacing_row(cfg, m1, dt))
}

pub fn spacing_table(rows: &[SpacingRow]) -> Result<Table> {
    let mut t = Table::new(
        "table2",
        [
            "delta_t_lam",
            "design1_r1_lam",
            "design1_r2_lam",
            "design2_r1_lam",
            "design2_r2_lam",
            "design3_r1_lam",
            "design3_r2_lam",
            "design4_r_lam",
        ],
    );
    for r in rows {
        t.push([
            cell(r.delta_t, 4),
            cell(r.design1[0], 4),
            cell(r.design1[1], 4),
            cell(r.design2[0], 4),
            cell(r.design2[1], 4),
            cell(r.design3[0], 4),
            cell(r.design3[1], 4),
            cell(r.design4, 4),
        ])?;
    }
    Ok(t)
}

pub fn run_table2(cfg: &ExperimentConfig) -> Result<Table> {
    spacing_table(&spacing_table_rows(cfg)?)
}

/// Effective rank per transmit spacing, plus the spacing table.
///
/// Designs 3 and 4 are evaluated at every swept value; the grid-searched
/// Designs 1 and 2 only at the table spacings, `nan` elsewhere.
pub fn run_spacing_sweep(cfg: &ExperimentConfig) -> Result<(Table, Table)> {
    let values = require_sweep(cfg, SweepVariable::TxSpacingLam)?;
    let m1 = broadside_m1(cfg)?;
    let rows = spacing_table_rows(cfg)?;
    let sweep = par_collect(&values, |&dt| {
        if let Some(r) = rows.iter().find(|r| (r.delta_t - dt).abs() <= 1e-9) {
            return Ok(r.neff);
        }
        let b = Broadside::new(cfg, dt)?;
        let d3 = b.design3(m1)?;
        let n3 = match &d3.partition {
            Some(p) => b.exact_neff(p)?,
            None => f64::NAN,
        };
        Ok([f64::NAN, f64::NAN, n3, b.design4_neff(&b.design4(m1)?)?])
    })?;
    let mut t = Table::new(
        "fig_spacing",
        ["delta_t_lam", "neff_design1", "neff_design2", "neff_design3", "neff_design4"],
    )
    .with_plot(PlotHint {
        x: "delta_t_lam".into(),
        ys: vec!["neff_design1".into(), "neff_design2".into(), "neff_design3".into(), "neff_design4".into()],
        group: None,
        title: "Effective rank versus transmit spacing".into(),
        heatmap: false,
    });
    for (dt, n) in values.iter().zip(sweep) {
        t.push([cell(*dt, 4), cell(n[0], 9), cell(n[1], 9), cell(n[2], 9), cell(n[3], 9)])?;
    }
    Ok((t, spacing_table(&rows)?))
}

/// Orthogonality-ratio maps of Designs 1 to 3 and a summary table, summary last.
pub fn run_ortho_map(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let m1 = broadside_m1(cfg)?;
    let b = Broadside::new(cfg, cfg.transmitter.d1_lam)?;
    let d3 = b.design3(m1)?;
    let p3 = d3.partition.clone().ok_or_else(|| bad("the analytic partition has no admissible root"))?;
    let (p1, _) = b.grid_design(&d3, &grid_spec(cfg, 2, ObjectiveChannel::Exact))?;
    let (p2, _) = b.grid_design(&d3, &grid_spec(cfg, 2, ObjectiveChannel::QuarticSubArray))?;
    let mut tables = Vec::new();
    let mut summary = Table::new("ortho_summary", ["design", "max_offdiag_db", "neff"]);
    for (k, p) in [p1, p2, p3].iter().enumerate() {
        let h = exact_channel(&expand_uniform(&b.tx), &expand_partition(p), b.w)?;
        let report = SpectralReport::from_channel(&h, cfg.noise_power, cfg.total_power)?;
        let map = orthogonality_ratio(&gram(&h))?;
        let n = map.nrows();
        let mut header = vec!["u".to_string()];
        header.extend((1..=n).map(|v| format!("v{v}")));
        let mut t = Table::new(format!("ortho_design{}", k + 1), header).with_plot(PlotHint {
            x: "u".into(),
            ys: (1..=n).map(|v| format!("v{v}")).collect(),
            group: None,
            title: format!("Orthogonality ratio (dB), Design {}", k + 1),
            heatmap: true,
        });
        for u in 0..n {
            let mut row = vec![(u + 1).to_string()];
            row.extend((0..n).map(|v| cell(map[(u, v)], 6)));
            t.push(row)?;
        }
        summary.push([format!("design{}", k + 1), cell(report.max_off_diagonal_db(), 6), cell(report.effective_rank, 9)])?;
        tables.push(t);
    }
    tables.push(summary);
    Ok(tables)
}

/// Outcome of a closed-form design.
#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub table: Table,
    pub feasible: bool,
    /// Human-readable reasons for infeasibility.
    pub diagnostics: Vec<String>,
    /// Exact-channel effective rank of the designed receiver, when one exists.
    pub neff: Option<f64>,
}

fn half_counts(cfg: &ExperimentConfig, strategy: Strategy) -> Result<Vec<usize>> {
    match (&cfg.receiver, strategy) {
        (ReceiverConfig::Partition { counts }, _) => Ok(counts.clone()),
        (ReceiverConfig::Uniform(a), Strategy::TwoSub) => Ok(vec![a.n1 / 2]),
        (ReceiverConfig::Uniform(a), Strategy::FourSub) if a.n1 % 4 == 0 => Ok(vec![a.n1 / 4, a.n1 / 4]),
        _ => Err(bad(format!("strategy {strategy:?} needs a partition receiver"))),
    }
}

/// Runs the configured closed-form design.
pub fn run_design(cfg: &ExperimentConfig, strategy: Strategy) -> Result<DesignOutcome> {
    cfg.check_strategy_for(strategy)?;
    let w = cfg.waveband()?;
    if strategy == Strategy::Paraxial {
        let tx = cfg.tx_geometry()?;
        let template = cfg.rx_uniform()?;
        let sol = solve_spacings(&tx, &template, w)?;
        let mut table = Table::new("design_paraxial", ParaxialSolution::CSV_HEADER);
        table.push(sol.csv_record())?;
        let neff = exact_neff_uniform(&tx, &sol.apply(&template)?, w).ok();
        return Ok(DesignOutcome {
            table,
            feasible: sol.feasible,
            diagnostics: sol.diagnostics.iter().map(|d| d.to_string()).collect(),
            neff,
        });
    }
    if !cfg.is_linear_broadside() {
        return Err(bad(format!("strategy {strategy:?} requires linear broadside arrays")));
    }
    let b = Broadside::new(cfg, cfg.transmitter.d1_lam)?;
    let counts = half_counts(cfg, strategy)?;
    let (sol, name) = match strategy {
        Strategy::TwoSub => {
            if counts.len() != 1 {
                return Err(bad("strategy TwoSub needs one half-partition count"));
            }
            (solve_two_subarrays(&b.tx, 2 * counts[0], b.y_o, w)?, "design_two_sub")
        }
        Strategy::FourSub => {
            if counts.len() != 2 {
                return Err(bad("strategy FourSub needs two half-partition counts"));
            }
            (solve_four_subarrays(&b.tx, counts[0], counts[1], b.y_o, w)?, "design_four_sub")
        }
        Strategy::Chain => (solve_chain(&b.tx, &counts, b.y_o, w)?, "design_chain"),
        _ => return Err(bad(format!("strategy {strategy:?} is not a closed-form design"))),
    };
    let mut table = Table::new(name, NonParaxialSolution::CSV_HEADER);
    for r in sol.csv_records() {
        table.push(r)?;
    }
    let neff = match &sol.partition {
        Some(p) if sol.eta.len() == counts.len() => b.exact_neff(p).ok(),
        _ => None,
    };
    Ok(DesignOutcome {
        table,
        feasible: sol.feasible,
        diagnostics: sol.diagnostics.iter().map(|d| d.to_string()).collect(),
        neff,
    })
}

/// Spectral report of the configured receiver on the exact channel.
pub fn run_evaluate(cfg: &ExperimentConfig) -> Result<SpectralReport> {
    let w = cfg.waveband()?;
    let tx = cfg.tx_geometry()?;
    let rx = cfg.rx_explicit()?;
    let h = exact_channel(&expand_uniform(&tx), &expand_partition(&rx), w)?;
    SpectralReport::from_channel(&h, cfg.noise_power, cfg.total_power)
}

/// Grid search for the configured receiver; a partition receiver keeps its analytic centers.
pub fn run_grid_search(cfg: &ExperimentConfig) -> Result<(GridResult, Table)> {
    let axes = cfg.strategy.and_then(Strategy::grid_axes).ok_or_else(|| bad("grid-search needs strategy grid1 or grid2"))?;
    let w = cfg.waveband()?;
    let spec = grid_spec(cfg, axes, cfg.grid.objective).with_trace();
    let r = match &cfg.receiver {
        ReceiverConfig::Uniform(_) => {
            grid_search(&cfg.tx_geometry()?, &SpacingTemplate::Uniform(cfg.rx_uniform()?), w, &spec)?
        }
        ReceiverConfig::Partition { counts } => {
            let b = Broadside::new(cfg, cfg.transmitter.d1_lam)?;
            let sol = match counts.len() {
                1 => solve_two_subarrays(&b.tx, 2 * counts[0], b.y_o, w)?,
                2 => solve_four_subarrays(&b.tx, counts[0], counts[1], b.y_o, w)?,
                _ => solve_chain(&b.tx, counts, b.y_o, w)?,
            };
            b.grid_design(&sol, &spec)?.1
        }
        ReceiverConfig::Explicit { .. } => return Err(bad("grid search needs a uniform or partition receiver")),
    };
    let mut header: Vec<String> = (1..=axes).map(|k| format!("param{k}_lam")).collect();
    header.push("neff".into());
    let mut t = Table::new("grid_trace", header);
    if axes == 1 {
        t = t.with_plot(PlotHint {
            x: "param1_lam".into(),
            ys: vec!["neff".into()],
            group: None,
            title: "Grid search".into(),
            heatmap: false,
        });
    }
    for (p, n) in r.trace.as_deref().unwrap_or_default() {
        let mut row: Vec<String> = p.iter().map(|v| cell(*v, 4)).collect();
        row.push(cell(*n, 9));
        t.push(row)?;
    }
    Ok((r, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ArrayConfig, GridConfig, Sweep, SweepValues};
    use crate::grid::GridAxis;

    fn broadside_cfg() -> ExperimentConfig {
        ExperimentConfig {
            scenario: "t".into(),
            frequency_ghz: 28.0,
            distance_lam: 256.0,
            elevation_deg: 0.0,
            paraxial_threshold: 0.1,
            transmitter: ArrayConfig::linear(16, 0.5),
            receiver: ReceiverConfig::Partition { counts: vec![12, 12] },
            strategy: Some(Strategy::FourSub),
            sweep: None,
            tx_spacings_lam: vec![2.0],
            grid: GridConfig { axis: GridAxis::new(2.0, 3.5, 0.25), objective: ObjectiveChannel::Exact },
            noise_power: 1.0,
            total_power: 1.0,
            output_dir: None,
        }
    }

    #[test]
    fn threshold_matches_equal_split() {
        let t = count_threshold(&broadside_cfg()).unwrap();
        let eta = (1.0 + 41f64.sqrt()) / 8.0;
        assert!((t - 4.0 * (eta - 0.5) * 15.0).abs() < 1e-9, "{t}");
    }

    #[test]
    fn table_rows_follow_designs() {
        let cfg = broadside_cfg();
        let rows = spacing_table_rows(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!((r.design4 - 256.0 / 96.0 * 1.0).abs() < 1e-9);
        assert!((r.design3[0] - 2.77).abs() < 0.05 && (r.design3[1] - 2.72).abs() < 0.05);
        // the grid optimum is never worse than its coarse starting points
        assert!(r.neff[0] >= r.neff[2] - 0.05);
        let t = spacing_table(&rows).unwrap();
        assert_eq!(t.rows[0][0], "2.0000");
    }

    #[test]
    fn design_outcomes() {
        let cfg = broadside_cfg();
        let out = run_design(&cfg, Strategy::FourSub).unwrap();
        assert!(out.feasible);
        assert_eq!(out.table.rows.len(), 4);
        assert!(out.neff.unwrap() > 15.0);

        let mut small = broadside_cfg();
        small.receiver = ReceiverConfig::Partition { counts: vec![4, 4] };
        let out = run_design(&small, Strategy::FourSub).unwrap();
        assert!(!out.feasible);
        assert!(!out.diagnostics.is_empty());

        let mut two = broadside_cfg();
        two.transmitter.d1_lam = 0.25;
        two.receiver = ReceiverConfig::Partition { counts: vec![24] };
        let out = run_design(&two, Strategy::TwoSub).unwrap();
        assert!(!out.feasible);
    }

    #[test]
    fn sweep_variable_is_checked() {
        let mut cfg = broadside_cfg();
        cfg.sweep = Some(Sweep { variable: SweepVariable::ElevationDeg, values: SweepValues::List(vec![0.0]) });
        assert!(matches!(run_antenna_sweep(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn evaluate_uniform() {
        let mut cfg = broadside_cfg();
        cfg.receiver = ReceiverConfig::Uniform(ArrayConfig::linear(48, 256.0 / 96.0));
        cfg.strategy = None;
        let rep = run_evaluate(&cfg).unwrap();
        assert_eq!(rep.eigenvalues.len(), 16);
        assert!(rep.effective_rank > 1.0 && rep.effective_rank <= 16.0);
    }
}
