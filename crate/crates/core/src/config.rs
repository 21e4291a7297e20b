//! JSON experiment configuration.
//!
//! Lengths are multiples of the wavelength and the carrier is in GHz. A file
//! holds either one [`ExperimentConfig`] or a [`ConfigSuite`] of them keyed by
//! scenario id.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Point3, SubArrayPartition, SubArraySpec, Waveband, DEFAULT_PARAXIAL_THRESHOLD};
use crate::grid::{GridAxis, ObjectiveChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Paraxial,
    TwoSub,
    FourSub,
    Chain,
    /// Grid search over one receiver spacing (or one free sub-array pair).
    Grid1,
    /// Grid search over two receiver spacings (or two free sub-array pairs).
    Grid2,
}

impl Strategy {
    pub fn grid_axes(self) -> Option<usize> {
        match self {
            Self::Grid1 => Some(1),
            Self::Grid2 => Some(2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub n1: usize,
    #[serde(default = "one")]
    pub n2: usize,
    pub d1_lam: f64,
    #[serde(default = "half")]
    pub d2_lam: f64,
    #[serde(default)]
    pub rotation: f64,
    #[serde(default)]
    pub tilt: f64,
}

fn one() -> usize {
    1
}

fn half() -> f64 {
    0.5
}

impl ArrayConfig {
    pub fn linear(n: usize, d_lam: f64) -> Self {
        Self { n1: n, n2: 1, d1_lam: d_lam, d2_lam: 0.5, rotation: 0.0, tilt: 0.0 }
    }

    pub fn planar(n1: usize, n2: usize, d1_lam: f64, d2_lam: f64) -> Self {
        Self { n1, n2, d1_lam, d2_lam, rotation: 0.0, tilt: 0.0 }
    }

    pub fn to_geometry(&self, w: Waveband, center: Point3) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.n1, self.n2, w.lam(self.d1_lam), w.lam(self.d2_lam))?
            .with_center(center)?
            .with_orientation(self.rotation, self.tilt)
    }

    fn is_linear_canonical(&self) -> bool {
        self.n2 == 1 && self.rotation == 0.0 && self.tilt == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubArrayConfig {
    pub center_lam: [f64; 3],
    pub n1: usize,
    #[serde(default = "one")]
    pub n2: usize,
    pub d1_lam: f64,
    #[serde(default = "half")]
    pub d2_lam: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverConfig {
    /// One uniform array at the configured distance and elevation.
    Uniform(ArrayConfig),
    /// Mirror-symmetric linear partition; half counts listed outermost first.
    Partition { counts: Vec<usize> },
    /// Fully specified sub-arrays, for evaluation only.
    Explicit { subarrays: Vec<SubArrayConfig>, #[serde(default)] rotation: f64, #[serde(default)] tilt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    ElevationDeg,
    /// Total receive count `M1`.
    ReceiveCount,
    TxSpacingLam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValues {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl SweepValues {
    /// The swept values; a range includes `stop` when it lands on the grid.
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Range { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0 && start.is_finite() && stop.is_finite()) || stop < start {
                    return vec![];
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..n).map(|i| start + step * i as f64).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: SweepValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Axis applied to every swept spacing, in wavelengths.
    #[serde(default)]
    pub axis: GridAxis,
    #[serde(default = "exact")]
    pub objective: ObjectiveChannel,
}

fn exact() -> ObjectiveChannel {
    ObjectiveChannel::Exact
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { axis: GridAxis::default(), objective: ObjectiveChannel::Exact }
    }
}

fn default_threshold() -> f64 {
    DEFAULT_PARAXIAL_THRESHOLD
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub frequency_ghz: f64,
    /// `|c_o|` in wavelengths.
    pub distance_lam: f64,
    /// Receiver elevation `θ_o`, with `sin θ_o = z_o / |c_o|` and `x_o = 0`.
    #[serde(default)]
    pub elevation_deg: f64,
    #[serde(default = "default_threshold")]
    pub paraxial_threshold: f64,
    pub transmitter: ArrayConfig,
    pub receiver: ReceiverConfig,
    /// Design strategy; `evaluate` needs none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    /// Transmit spacings reported as separate series or table rows.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tx_spacings_lam: Vec<f64>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "unit")]
    pub noise_power: f64,
    #[serde(default = "unit")]
    pub total_power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSuite {
    pub experiments: Vec<ExperimentConfig>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_array(name: &str, a: &ArrayConfig) -> Result<()> {
    if a.n1 == 0 || a.n2 == 0 {
        return Err(bad(format!("{name}: element counts must be at least 1")));
    }
    positive(&format!("{name}.d1_lam"), a.d1_lam)?;
    positive(&format!("{name}.d2_lam"), a.d2_lam)?;
    if !(a.rotation.is_finite() && a.tilt.is_finite()) {
        return Err(bad(format!("{name}: rotation and tilt must be finite")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn waveband(&self) -> Result<Waveband> {
        Waveband::from_ghz(self.frequency_ghz).map_err(|e| bad(e.to_string()))
    }

    /// Transmitter at the origin.
    pub fn tx_geometry(&self) -> Result<ArrayGeometry> {
        self.transmitter.to_geometry(self.waveband()?, Point3::zeros())
    }

    /// Receiver center `|c_o| (0, cos θ_o, sin θ_o)` in meters.
    pub fn rx_center(&self) -> Result<Point3> {
        let w = self.waveband()?;
        Ok(rx_center_at(w.lam(self.distance_lam), self.elevation_deg))
    }

    /// The uniform receiver template, for strategies that need one.
    pub fn rx_uniform(&self) -> Result<ArrayGeometry> {
        match &self.receiver {
            ReceiverConfig::Uniform(a) => a.to_geometry(self.waveband()?, self.rx_center()?),
            _ => Err(bad("this operation needs a uniform receiver")),
        }
    }

    /// The explicit receiver as a partition.
    pub fn rx_explicit(&self) -> Result<SubArrayPartition> {
        let w = self.waveband()?;
        match &self.receiver {
            ReceiverConfig::Explicit { subarrays, rotation, tilt } => {
                let specs = subarrays
                    .iter()
                    .map(|s| {
                        let c = Point3::new(w.lam(s.center_lam[0]), w.lam(s.center_lam[1]), w.lam(s.center_lam[2]));
                        SubArraySpec::new(c, s.n1, s.n2, w.lam(s.d1_lam), w.lam(s.d2_lam))
                    })
                    .collect::<Result<Vec<_>>>()?;
                SubArrayPartition::new(specs, *rotation, *tilt)
            }
            ReceiverConfig::Uniform(_) => {
                let g = self.rx_uniform()?;
                let spec = SubArraySpec::new(g.center(), g.n1(), g.n2(), g.d1(), g.d2())?;
                SubArrayPartition::new(vec![spec], g.rotation(), g.tilt())
            }
            ReceiverConfig::Partition { .. } => Err(bad("a partition receiver has no explicit geometry before it is solved")),
        }
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        self.sweep.as_ref().map(|s| s.values.values()).unwrap_or_default()
    }

    /// Linear broadside: linear transmitter and receiver, no elevation, no rotation or tilt.
    pub fn is_linear_broadside(&self) -> bool {
        let rx_ok = match &self.receiver {
            ReceiverConfig::Uniform(a) => a.is_linear_canonical(),
            ReceiverConfig::Partition { .. } => true,
            ReceiverConfig::Explicit { .. } => false,
        };
        self.transmitter.is_linear_canonical() && rx_ok && self.elevation_deg == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenario.trim().is_empty() {
            return Err(bad("scenario id is empty"));
        }
        positive("frequency_ghz", self.frequency_ghz)?;
        positive("distance_lam", self.distance_lam)?;
        if !(self.elevation_deg.is_finite() && self.elevation_deg.abs() < 90.0) {
            return Err(bad(format!("elevation_deg must lie in (-90, 90), got {}", self.elevation_deg)));
        }
        if !(self.paraxial_threshold > 0.0 && self.paraxial_threshold < 1.0) {
            return Err(bad(format!("paraxial_threshold must lie in (0, 1), got {}", self.paraxial_threshold)));
        }
        positive("noise_power", self.noise_power)?;
        positive("total_power", self.total_power)?;
        check_array("transmitter", &self.transmitter)?;
        match &self.receiver {
            ReceiverConfig::Uniform(a) => check_array("receiver", a)?,
            ReceiverConfig::Partition { counts } => {
                if counts.is_empty() || counts.contains(&0) {
                    return Err(bad("partition counts must be non-empty and positive"));
                }
            }
            ReceiverConfig::Explicit { subarrays, .. } => {
                if subarrays.is_empty() {
                    return Err(bad("explicit receiver has no sub-arrays"));
                }
            }
        }
        for &d in &self.tx_spacings_lam {
            positive("tx_spacings_lam", d)?;
        }
        if let Some(s) = &self.sweep {
            let v = s.values.values();
            if v.is_empty() {
                return Err(bad("sweep range is empty"));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(bad("sweep values must be finite"));
            }
            match s.variable {
                SweepVariable::ElevationDeg => {
                    if v.iter().any(|x| x.abs() >= 90.0) {
                        return Err(bad("elevation sweep values must lie in (-90, 90)"));
                    }
                }
                SweepVariable::ReceiveCount => {
                    if v.iter().any(|x| *x < 1.0 || x.fract() != 0.0) {
                        return Err(bad("receive counts must be positive integers"));
                    }
                }
                SweepVariable::TxSpacingLam => {
                    if v.iter().any(|x| *x <= 0.0) {
                        return Err(bad("transmit spacings must be positive"));
                    }
                }
            }
        }
        match self.strategy {
            Some(s) => self.check_strategy_for(s),
            None => Ok(()),
        }
    }

    /// Checks that `strategy` suits the configured geometry.
    pub fn check_strategy_for(&self, strategy: Strategy) -> Result<()> {
        let linear = || -> Result<()> {
            if self.is_linear_broadside() {
                Ok(())
            } else {
                Err(bad(format!("strategy {strategy:?} requires linear broadside arrays")))
            }
        };
        match strategy {
            Strategy::Paraxial => match self.receiver {
                ReceiverConfig::Uniform(_) => Ok(()),
                _ => Err(bad("strategy Paraxial requires a uniform receiver")),
            },
            Strategy::TwoSub => linear(),
            Strategy::FourSub => {
                linear()?;
                match &self.receiver {
                    ReceiverConfig::Partition { counts } if counts.len() != 2 => {
                        Err(bad("strategy FourSub needs exactly two half-partition counts"))
                    }
                    _ => Ok(()),
                }
            }
            Strategy::Chain => linear(),
            Strategy::Grid1 | Strategy::Grid2 => {
                let n = strategy.grid_axes().unwrap_or(0);
                match &self.receiver {
                    ReceiverConfig::Uniform(a) => {
                        if n == 2 && a.n2 == 1 {
                            Err(bad("strategy Grid2 on a uniform receiver needs a planar array"))
                        } else {
                            Ok(())
                        }
                    }
                    ReceiverConfig::Partition { counts } => {
                        linear()?;
                        if counts.len() == n {
                            Ok(())
                        } else {
                            Err(bad(format!("{strategy:?} needs {n} half-partition counts, got {}", counts.len())))
                        }
                    }
                    ReceiverConfig::Explicit { .. } => Err(bad("grid search needs a uniform or partition receiver")),
                }
            }
        }
    }
}

/// Receiver center at distance `dist` and elevation `elevation_deg`, with `x_o = 0`.
pub fn rx_center_at(dist: f64, elevation_deg: f64) -> Point3 {
    let t = elevation_deg.to_radians();
    Point3::new(0.0, dist * t.cos(), dist * t.sin())
}

impl ConfigSuite {
    pub fn get(&self, scenario: &str) -> Option<&ExperimentConfig> {
        self.experiments.iter().find(|e| e.scenario == scenario)
    }
}

/// Parses a single config or a suite, validating every experiment.
pub fn parse_configs(s: &str) -> Result<ConfigSuite> {
    let value: serde_json::Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
    let suite = if value.get("experiments").is_some() {
        serde_json::from_value::<ConfigSuite>(value).map_err(|e| bad(e.to_string()))?
    } else {
        ConfigSuite { experiments: vec![serde_json::from_value(value).map_err(|e| bad(e.to_string()))?] }
    };
    if suite.experiments.is_empty() {
        return Err(bad("config suite has no experiments"));
    }
    for e in &suite.experiments {
        e.validate().map_err(|err| match err {
            Error::Config(m) => bad(format!("scenario {:?}: {m}", e.scenario)),
            other => other,
        })?;
    }
    Ok(suite)
}

pub fn load_configs(path: &Path) -> Result<ConfigSuite> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    parse_configs(&text)
}
