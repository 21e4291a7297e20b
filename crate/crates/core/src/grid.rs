//! Exhaustive grid search over receiver spacings, maximizing effective rank.

use std::io::Write;
use std::sync::OnceLock;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{exact_channel, subarray_channel_quiet};
use crate::error::{Error, Result};
use crate::geometry::{expand_partition, expand_uniform, ArrayGeometry, SubArrayPartition, SubArraySpec, Waveband};
use crate::spectral::{effective_rank, gram, gram_eigenvalues};

/// Upper bound on evaluated points per search.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Effective ranks closer than this are treated as tied.
pub const TIE_TOL: f64 = 1e-12;

/// One swept spacing, in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for GridAxis {
    fn default() -> Self {
        Self { min: 0.5, max: 80.0, step: 0.25 }
    }
}

impl GridAxis {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        Self { min, max, step }
    }

    fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(Error::DegenerateGrid("non-finite axis bounds".into()));
        }
        if !(self.min > 0.0) {
            return Err(Error::DegenerateGrid(format!("spacings must be positive, axis starts at {}", self.min)));
        }
        if !(self.min < self.max) || !(self.step > 0.0) {
            return Err(Error::DegenerateGrid(format!("need min < max and step > 0, got {:?}", self)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + self.step * i as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveChannel {
    Exact,
    QuarticSubArray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    /// Prefer the smallest sum of spacings among tied points.
    #[default]
    SmallestSpacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<GridAxis>,
    pub objective: ObjectiveChannel,
    #[serde(default)]
    pub tie_break: TieBreak,
    #[serde(default)]
    pub record_trace: bool,
}

impl GridSpec {
    pub fn new(axes: Vec<GridAxis>, objective: ObjectiveChannel) -> Self {
        Self { axes, objective, tie_break: TieBreak::SmallestSpacing, record_trace: false }
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    /// Total number of grid points.
    pub fn size(&self) -> Result<usize> {
        if self.axes.is_empty() || self.axes.len() > 3 {
            return Err(Error::DegenerateGrid(format!("need 1 to 3 axes, got {}", self.axes.len())));
        }
        let mut n: usize = 1;
        for a in &self.axes {
            a.validate()?;
            n = n.saturating_mul(a.len());
        }
        if n > MAX_GRID_POINTS {
            return Err(Error::DegenerateGrid(format!("{n} points exceed the limit of {MAX_GRID_POINTS}")));
        }
        Ok(n)
    }

    fn point(&self, mut index: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            let n = a.len();
            p[k] = a.value(index % n);
            index /= n;
        }
        p
    }
}

/// The receiver whose spacings are swept.
#[derive(Debug, Clone, PartialEq)]
pub enum SpacingTemplate {
    /// One axis sets `δ_1^r`; two axes set `δ_1^r` and `δ_2^r`.
    Uniform(ArrayGeometry),
    /// One axis per free sub-array (mirror pairs share an axis).
    Partition(SubArrayPartition),
}

impl SpacingTemplate {
    pub fn free_dims(&self) -> usize {
        match self {
            Self::Uniform(_) => 2,
            Self::Partition(p) => p.free_pairs(),
        }
    }

    fn check_axes(&self, n: usize) -> Result<()> {
        let ok = match self {
            Self::Uniform(_) => n == 1 || n == 2,
            Self::Partition(p) => n == p.free_pairs(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DegenerateGrid(format!("{n} axes do not match the {} free spacings of the template", self.free_dims())))
        }
    }

    /// Receiver as a partition with the spacings of `params` (meters) applied.
    fn instantiate(&self, params: &[f64]) -> Result<SubArrayPartition> {
        match self {
            Self::Uniform(g) => {
                let d2 = if params.len() > 1 { params[1] } else { g.d2() };
                let spec = SubArraySpec::new(g.center(), g.n1(), g.n2(), params[0], d2)?;
                SubArrayPartition::new(vec![spec], g.rotation(), g.tilt())
            }
            Self::Partition(p) => {
                let mut q = p.clone();
                for (i, &d) in params.iter().enumerate() {
                    q.set_spacing_pair(i, d)?;
                }
                Ok(q)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    /// Best spacings in wavelengths, one per axis.
    pub best_params: Vec<f64>,
    pub best_effective_rank: f64,
    pub evaluated: usize,
    /// Every point in grid order, when requested.
    pub trace: Option<Vec<(Vec<f64>, f64)>>,
}

impl GridResult {
    /// Writes `param1_lam,...,neff` rows.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let trace = self.trace.as_ref().ok_or_else(|| Error::InvalidArgument("no trace was recorded".into()))?;
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.best_params.len()).map(|k| format!("param{k}_lam")).collect();
        header.push("neff".into());
        w.write_record(&header)?;
        for (p, n) in trace {
            let mut row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
            row.push(format!("{n:.12}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Worker pool capped by `NFMIMO_THREADS` when set.
pub fn worker_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Ok(v) = std::env::var("NFMIMO_THREADS") {
            match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => b = b.num_threads(n),
                _ => warn!("ignoring NFMIMO_THREADS={v:?}: expected a positive integer"),
            }
        }
        b.build().expect("thread pool")
    })
}

/// Effective rank of a receiver against `tx` under the chosen model.
pub fn evaluate_partition(tx: &ArrayGeometry, p: &SubArrayPartition, w: Waveband, objective: ObjectiveChannel) -> Result<f64> {
    let h = match objective {
        ObjectiveChannel::Exact => exact_channel(&expand_uniform(tx), &expand_partition(p), w)?,
        ObjectiveChannel::QuarticSubArray => subarray_channel_quiet(tx, p, w)?,
    };
    effective_rank(&gram_eigenvalues(&gram(&h))?)
}

pub fn grid_search(tx: &ArrayGeometry, template: &SpacingTemplate, w: Waveband, spec: &GridSpec) -> Result<GridResult> {
    let n = spec.size()?;
    template.check_axes(spec.axes.len())?;
    let lam = w.wavelength();
    let values: Vec<f64> = worker_pool().install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let params: Vec<f64> = spec.point(i).iter().map(|v| v * lam).collect();
                let r = template.instantiate(&params).and_then(|p| evaluate_partition(tx, &p, w, spec.objective));
                r.unwrap_or(f64::NAN)
            })
            .collect()
    });

    let mut best: Option<(usize, f64, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        let total: f64 = spec.point(i).iter().sum();
        best = match best {
            None => Some((i, v, total)),
            Some((bi, bv, bt)) => {
                if v > bv + TIE_TOL || ((v - bv).abs() <= TIE_TOL && total < bt) {
                    Some((i, v, total))
                } else {
                    Some((bi, bv, bt))
                }
            }
        };
    }
    let skipped = values.iter().filter(|v| !v.is_finite()).count();
    if skipped > 0 {
        warn!("grid search: {skipped} of {n} points could not be evaluated");
    }
    let (bi, bv, _) = best.ok_or_else(|| Error::DegenerateGrid("no grid point could be evaluated".into()))?;
    let trace = spec.record_trace.then(|| values.iter().enumerate().map(|(i, &v)| (spec.point(i), v)).collect());
    Ok(GridResult { best_params: spec.point(bi), best_effective_rank: bv, evaluated: n, trace })
}
