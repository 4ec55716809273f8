//! Experiment configuration files.
//!
//! A config is a JSON document. Every key except `scenario` is optional and
//! unknown keys are rejected. Powers, thresholds and penalties may be written
//! as strings with a `dB` suffix (`"-3dB"`, `"20dB"`), which are converted to
//! linear values on load; powers in dB are relative to 1 W.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "scenario": "coverage",
//!   "params": { "noise_power": "-130dB", "mean_ris": 5 },
//!   "sweep": { "field": "params.threshold", "values": ["-10dB", "0dB", "10dB"] },
//!   "mc_samples": 100000,
//!   "seed": 7
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use risnet_core::analytic::SystemParams;
use risnet_core::fading::{BeamOverlap, RicianSpec};
use risnet_core::geometry::{free_space_beta, PathlossParams};
use risnet_core::montecarlo::{GammaSrMode, DEFAULT_TAIL_BUDGET};
use risnet_core::variants::{CoverageHoleConfig, VariantModel, VariantParams};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

/// A config file that could not be loaded. `path` is the dotted location of
/// the offending key, or empty for document-level problems.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
    pub line: Option<usize>,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
            line: None,
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.path.is_empty() {
            write!(f, "{}: ", self.path)?;
        }
        write!(f, "{}", self.message)?;
        if let Some(line) = self.line {
            write!(f, " (line {line})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Coverage,
    Rate,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Validate,
}

/// A number as written in the config: either plain or in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    /// Linear value.
    pub value: f64,
    /// The number as written, in dB when `in_db`.
    pub written: f64,
    pub in_db: bool,
}

impl Quantity {
    pub fn plain(v: f64) -> Self {
        Quantity {
            value: v,
            written: v,
            in_db: false,
        }
    }

    pub fn db(db: f64) -> Self {
        Quantity {
            value: 10f64.powf(db / 10.0),
            written: db,
            in_db: true,
        }
    }

    fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let number = t
            .strip_suffix("dB")
            .ok_or_else(|| format!("expected a number or a dB string like \"-3dB\", found \"{text}\""))?;
        let db: f64 = number
            .trim()
            .parse()
            .map_err(|_| format!("\"{text}\" is not a valid dB value"))?;
        if !db.is_finite() {
            return Err(format!("\"{text}\" is not finite"));
        }
        Ok(Quantity::db(db))
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Quantity;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a string like \"-3dB\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Quantity, E> {
                Ok(Quantity::plain(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Quantity, E> {
                Ok(Quantity::plain(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Quantity, E> {
                Ok(Quantity::plain(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Quantity, E> {
                Quantity::parse(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSrConfig {
    Gaussian,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    PppRing,
    PppWedge,
    BppWedge,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    lambda_bs: Option<Quantity>,
    lambda_ris: Option<Quantity>,
    mean_ris: Option<Quantity>,
    r_in: Option<Quantity>,
    r_out: Option<Quantity>,
    p0: Option<Quantity>,
    noise_power: Option<Quantity>,
    m_total: Option<Quantity>,
    m_batch: Option<Quantity>,
    f_c: Option<Quantity>,
    beta: Option<Quantity>,
    alpha_los: Option<Quantity>,
    alpha_nlos: Option<Quantity>,
    alpha_ir: Option<Quantity>,
    beamwidth_deg: Option<Quantity>,
    overlap_prob: Option<Quantity>,
    serving_distance: Option<Quantity>,
    threshold: Option<Quantity>,
    k_factor: Option<Quantity>,
    reflected_interference: Option<bool>,
    gamma_sr: Option<GammaSrConfig>,
    tail_budget: Option<Quantity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariant {
    model: Option<ModelKind>,
    serving_distance: Option<Quantity>,
    hole_radius: Option<Quantity>,
    r_in: Option<Quantity>,
    r_out: Option<Quantity>,
    c_d: Option<Quantity>,
    c_r: Option<Quantity>,
    mean_ris: Option<Quantity>,
    n_ris: Option<Quantity>,
    wedge_angle_deg: Option<Quantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    field: String,
    values: Vec<Quantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    total_elements: Option<Quantity>,
    users_per_ris: Option<Quantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: Option<u32>,
    scenario: Scenario,
    #[serde(default)]
    params: RawParams,
    variant: Option<RawVariant>,
    element_budget: Option<RawBudget>,
    mc_samples: Option<u64>,
    seed: Option<u64>,
    sweep: Option<RawSweep>,
    output_path: Option<PathBuf>,
    record_runtime: Option<bool>,
}

/// Network parameters with every value resolved to linear units.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamsConfig {
    pub lambda_bs: f64,
    /// Mean number of RISs per cluster; `lambda_ris` in the file is converted
    /// with the cluster area.
    pub mean_ris: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub p0: f64,
    pub noise_power: f64,
    pub m_total: u32,
    pub m_batch: u32,
    pub f_c: f64,
    /// Explicit path-loss intercept; when absent it is `(c / (4 pi f_c))^2`.
    pub beta: Option<f64>,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub alpha_ir: f64,
    pub overlap_prob: f64,
    pub serving_distance: f64,
    pub threshold: f64,
    pub k_factor: f64,
    pub reflected_interference: bool,
    pub gamma_sr: GammaSrConfig,
    pub tail_budget: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let b = SystemParams::baseline();
        ParamsConfig {
            lambda_bs: b.lambda_bs,
            mean_ris: b.mean_ris_per_cluster(),
            r_in: b.r_in,
            r_out: b.r_out,
            p0: b.p0,
            noise_power: b.noise_power,
            m_total: b.m_total,
            m_batch: b.m_batch,
            f_c: b.pathloss.f_c,
            beta: None,
            alpha_los: b.pathloss.alpha_los,
            alpha_nlos: b.pathloss.alpha_nlos,
            alpha_ir: b.pathloss.alpha_ir,
            overlap_prob: b.beam.overlap_prob,
            serving_distance: b.serving_distance,
            threshold: b.threshold,
            k_factor: b.rician.k_factor,
            reflected_interference: b.reflected_interference,
            gamma_sr: GammaSrConfig::Gaussian,
            tail_budget: DEFAULT_TAIL_BUDGET,
        }
    }
}

impl ParamsConfig {
    pub fn gamma_sr_mode(&self) -> GammaSrMode {
        match self.gamma_sr {
            GammaSrConfig::Gaussian => GammaSrMode::Gaussian,
            GammaSrConfig::Exact => GammaSrMode::Exact,
        }
    }

    pub fn cluster_area(&self) -> f64 {
        std::f64::consts::PI * (self.r_out * self.r_out - self.r_in * self.r_in)
    }

    /// Builds the core parameter set. Errors carry the config path of the field.
    pub fn to_system(&self) -> Result<SystemParams, ConfigError> {
        positive("params.lambda_bs", self.lambda_bs)?;
        non_negative("params.mean_ris", self.mean_ris)?;
        non_negative("params.r_in", self.r_in)?;
        positive("params.r_out", self.r_out)?;
        if self.r_in >= self.r_out {
            return Err(ConfigError::at(
                "params.r_in",
                format!("params.r_in ({}) must be smaller than params.r_out ({})", self.r_in, self.r_out),
            ));
        }
        positive("params.p0", self.p0)?;
        non_negative("params.noise_power", self.noise_power)?;
        if self.m_batch == 0 || self.m_batch > self.m_total {
            return Err(ConfigError::at(
                "params.m_batch",
                format!(
                    "params.m_batch ({}) must lie in 1..=params.m_total ({})",
                    self.m_batch, self.m_total
                ),
            ));
        }
        positive("params.f_c", self.f_c)?;
        if let Some(beta) = self.beta {
            positive("params.beta", beta)?;
        }
        for (path, a) in [
            ("params.alpha_los", self.alpha_los),
            ("params.alpha_nlos", self.alpha_nlos),
            ("params.alpha_ir", self.alpha_ir),
        ] {
            if !(a > 2.0 && a.is_finite()) {
                return Err(ConfigError::at(path, format!("path-loss exponent must exceed 2, got {a}")));
            }
        }
        if !(self.overlap_prob > 0.0 && self.overlap_prob <= 1.0) {
            return Err(ConfigError::at(
                "params.overlap_prob",
                format!("overlap probability must lie in (0, 1], got {}", self.overlap_prob),
            ));
        }
        positive("params.serving_distance", self.serving_distance)?;
        positive("params.threshold", self.threshold)?;
        non_negative("params.k_factor", self.k_factor)?;
        if !(self.tail_budget > 0.0 && self.tail_budget < 1.0) {
            return Err(ConfigError::at(
                "params.tail_budget",
                format!("tail budget must lie in (0, 1), got {}", self.tail_budget),
            ));
        }

        let core = |path: &str, e: risnet_core::Error| ConfigError::at(path, e.to_string());
        let mut pathloss = PathlossParams::from_carrier(self.f_c, self.alpha_los, self.alpha_nlos, self.alpha_ir)
            .map_err(|e| core("params.f_c", e))?;
        pathloss.beta = self.beta.unwrap_or_else(|| free_space_beta(self.f_c));
        let rician = RicianSpec::unit(self.k_factor).map_err(|e| core("params.k_factor", e))?;
        let base = SystemParams {
            lambda_bs: self.lambda_bs,
            r_in: self.r_in,
            r_out: self.r_out,
            p0: self.p0,
            noise_power: self.noise_power,
            pathloss,
            beam: BeamOverlap {
                beamwidth: 360.0 * self.overlap_prob,
                overlap_prob: self.overlap_prob,
            },
            serving_distance: self.serving_distance,
            threshold: self.threshold,
            reflected_interference: self.reflected_interference,
            ..SystemParams::baseline()
        };
        let p = base
            .with_rician(rician)
            .map_err(|e| core("params.k_factor", e))?
            .with_elements(self.m_total, self.m_batch)
            .map_err(|e| core("params.m_batch", e))?
            .with_mean_ris(self.mean_ris);
        p.validate().map_err(|e| core("params", e))?;
        Ok(p)
    }
}

/// The coverage-hole scenario of `fig8`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantConfig {
    pub model: ModelKind,
    pub serving_distance: f64,
    pub hole_radius: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub c_d: f64,
    pub c_r: f64,
    /// Mean RIS count of the Poisson models.
    pub mean_ris: f64,
    /// RIS count of the binomial model.
    pub n_ris: u32,
    pub wedge_angle_deg: f64,
}

impl Default for VariantConfig {
    fn default() -> Self {
        let h = CoverageHoleConfig::baseline();
        VariantConfig {
            model: ModelKind::BppWedge,
            serving_distance: h.serving_distance,
            hole_radius: h.hole_radius,
            r_in: h.r_in,
            r_out: h.r_out,
            c_d: h.c_d,
            c_r: h.c_r,
            mean_ris: 4.0,
            n_ris: 4,
            wedge_angle_deg: 90.0,
        }
    }
}

impl VariantConfig {
    pub fn model(&self) -> VariantModel {
        match self.model {
            ModelKind::PppRing => VariantModel::PppRing { mean: self.mean_ris },
            ModelKind::PppWedge => VariantModel::PppWedge { mean: self.mean_ris },
            ModelKind::BppWedge => VariantModel::BppWedge { n: self.n_ris },
        }
    }

    pub fn to_variant(&self, base: SystemParams) -> Result<VariantParams, ConfigError> {
        positive("variant.serving_distance", self.serving_distance)?;
        non_negative("variant.hole_radius", self.hole_radius)?;
        if !(self.hole_radius < self.r_in) {
            return Err(ConfigError::at(
                "variant.hole_radius",
                format!(
                    "variant.hole_radius ({}) must be smaller than variant.r_in ({})",
                    self.hole_radius, self.r_in
                ),
            ));
        }
        if !(self.r_in < self.r_out) {
            return Err(ConfigError::at(
                "variant.r_in",
                format!("variant.r_in ({}) must be smaller than variant.r_out ({})", self.r_in, self.r_out),
            ));
        }
        for (path, c) in [("variant.c_d", self.c_d), ("variant.c_r", self.c_r)] {
            if !(c > 0.0 && c <= 1.0) {
                return Err(ConfigError::at(
                    path,
                    format!("penalty must be a linear factor in (0, 1] (0 dB or below), got {c}"),
                ));
            }
        }
        non_negative("variant.mean_ris", self.mean_ris)?;
        if !(self.wedge_angle_deg > 0.0 && self.wedge_angle_deg <= 360.0) {
            return Err(ConfigError::at(
                "variant.wedge_angle_deg",
                format!("wedge angle must lie in (0, 360], got {}", self.wedge_angle_deg),
            ));
        }
        let hole = CoverageHoleConfig {
            serving_distance: self.serving_distance,
            hole_radius: self.hole_radius,
            r_in: self.r_in,
            r_out: self.r_out,
            c_d: self.c_d,
            c_r: self.c_r,
        };
        let v = VariantParams::new(base, hole, self.model(), self.wedge_angle_deg);
        v.validate().map_err(|e| ConfigError::at("variant", e.to_string()))?;
        Ok(v)
    }
}

/// Total elements per cluster shared by its RISs in `fig7`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementBudget {
    pub total_elements: f64,
    /// Each RIS splits its elements evenly over this many UEs.
    pub users_per_ris: f64,
}

impl Default for ElementBudget {
    fn default() -> Self {
        ElementBudget {
            total_elements: 1e4,
            users_per_ris: 5.0,
        }
    }
}

impl ElementBudget {
    /// Element counts per RIS and per batch for a mean of `mean_ris` RISs.
    pub fn split(&self, mean_ris: f64) -> Result<(u32, u32), ConfigError> {
        if !(mean_ris > 0.0) {
            return Err(ConfigError::at(
                "params.mean_ris",
                format!("fig7 needs a positive mean RIS count, got {mean_ris}"),
            ));
        }
        let m_total = (self.total_elements / mean_ris).round();
        let m_batch = (m_total / self.users_per_ris).round();
        if !(m_batch >= 1.0 && m_total <= u32::MAX as f64) {
            return Err(ConfigError::at(
                "element_budget",
                format!("{mean_ris} RISs leave {m_total} elements per RIS and {m_batch} per batch"),
            ));
        }
        Ok((m_total as u32, m_batch as u32))
    }
}

/// Config keys that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepField {
    LambdaBs,
    LambdaRis,
    MeanRis,
    RIn,
    ROut,
    P0,
    NoisePower,
    MTotal,
    MBatch,
    FC,
    Beta,
    AlphaLos,
    AlphaNlos,
    AlphaIr,
    BeamwidthDeg,
    OverlapProb,
    ServingDistance,
    Threshold,
    KFactor,
    VariantServingDistance,
    VariantHoleRadius,
    VariantRIn,
    VariantROut,
    VariantCD,
    VariantCR,
    VariantMeanRis,
    VariantNRis,
    VariantWedgeAngleDeg,
}

const SWEEP_FIELDS: [(&str, SweepField); 28] = [
    ("params.lambda_bs", SweepField::LambdaBs),
    ("params.lambda_ris", SweepField::LambdaRis),
    ("params.mean_ris", SweepField::MeanRis),
    ("params.r_in", SweepField::RIn),
    ("params.r_out", SweepField::ROut),
    ("params.p0", SweepField::P0),
    ("params.noise_power", SweepField::NoisePower),
    ("params.m_total", SweepField::MTotal),
    ("params.m_batch", SweepField::MBatch),
    ("params.f_c", SweepField::FC),
    ("params.beta", SweepField::Beta),
    ("params.alpha_los", SweepField::AlphaLos),
    ("params.alpha_nlos", SweepField::AlphaNlos),
    ("params.alpha_ir", SweepField::AlphaIr),
    ("params.beamwidth_deg", SweepField::BeamwidthDeg),
    ("params.overlap_prob", SweepField::OverlapProb),
    ("params.serving_distance", SweepField::ServingDistance),
    ("params.threshold", SweepField::Threshold),
    ("params.k_factor", SweepField::KFactor),
    ("variant.serving_distance", SweepField::VariantServingDistance),
    ("variant.hole_radius", SweepField::VariantHoleRadius),
    ("variant.r_in", SweepField::VariantRIn),
    ("variant.r_out", SweepField::VariantROut),
    ("variant.c_d", SweepField::VariantCD),
    ("variant.c_r", SweepField::VariantCR),
    ("variant.mean_ris", SweepField::VariantMeanRis),
    ("variant.n_ris", SweepField::VariantNRis),
    ("variant.wedge_angle_deg", SweepField::VariantWedgeAngleDeg),
];

impl SweepField {
    pub fn parse(name: &str) -> Option<Self> {
        SWEEP_FIELDS.iter().find(|(n, _)| *n == name).map(|&(_, f)| f)
    }

    pub fn name(self) -> &'static str {
        SWEEP_FIELDS.iter().find(|(_, f)| *f == self).map(|(n, _)| *n).unwrap()
    }

    /// Fields for which `"..dB"` values are meaningful.
    pub fn accepts_db(self) -> bool {
        matches!(
            self,
            SweepField::P0 | SweepField::NoisePower | SweepField::Threshold | SweepField::VariantCD | SweepField::VariantCR
        )
    }

    fn integral(self) -> bool {
        matches!(self, SweepField::MTotal | SweepField::MBatch | SweepField::VariantNRis)
    }

    fn on_variant(self) -> bool {
        self.name().starts_with("variant.")
    }
}

/// One sweep point: the linear value applied to the field and the number
/// reported in the `sweep_value` column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub label: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub field: SweepField,
    pub points: Vec<SweepPoint>,
}

/// A fully defaulted and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: ParamsConfig,
    pub variant: VariantConfig,
    pub element_budget: ElementBudget,
    pub mc_samples: usize,
    pub seed: u64,
    /// Empty for `validate`.
    pub sweep: Option<Sweep>,
    pub output_path: Option<PathBuf>,
    /// When false, the `runtime_s` column is written as 0.
    pub record_runtime: bool,
}

pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

/// The network and variant parameters of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    pub params: ParamsConfig,
    pub variant: VariantConfig,
}

impl PointConfig {
    pub fn system(&self, scenario: Scenario, budget: &ElementBudget) -> Result<SystemParams, ConfigError> {
        let mut p = self.params.clone();
        if scenario == Scenario::Fig7 {
            let (m_total, m_batch) = budget.split(p.mean_ris)?;
            p.m_total = m_total;
            p.m_batch = m_batch;
        }
        p.to_system()
    }

    pub fn variant(&self, scenario: Scenario, budget: &ElementBudget) -> Result<VariantParams, ConfigError> {
        self.variant.to_variant(self.system(scenario, budget)?)
    }
}

impl ExperimentConfig {
    /// Parameters of every sweep point, in sweep order.
    pub fn points(&self) -> Vec<PointConfig> {
        let base = PointConfig {
            params: self.params.clone(),
            variant: self.variant.clone(),
        };
        match &self.sweep {
            None => vec![base],
            Some(s) => s
                .points
                .iter()
                .map(|pt| {
                    let mut p = base.clone();
                    apply(&mut p, s.field, pt.value);
                    p
                })
                .collect(),
        }
    }

    /// Checks that every sweep point builds a valid model.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.mc_samples < 100 {
            return Err(ConfigError::at(
                "mc_samples",
                format!("at least 100 samples are needed, got {}", self.mc_samples),
            ));
        }
        if let Some(s) = &self.sweep {
            if s.field.on_variant() && self.scenario != Scenario::Fig8 {
                return Err(ConfigError::at(
                    "sweep.field",
                    format!("{} only exists in the fig8 scenario", s.field.name()),
                ));
            }
            if self.scenario == Scenario::Fig7 && matches!(s.field, SweepField::MTotal | SweepField::MBatch) {
                return Err(ConfigError::at(
                    "sweep.field",
                    "fig7 derives the element counts from element_budget and params.mean_ris",
                ));
            }
        }
        for (i, p) in self.points().iter().enumerate() {
            let res = if self.scenario == Scenario::Fig8 {
                p.variant(self.scenario, &self.element_budget).map(|_| ())
            } else {
                p.system(self.scenario, &self.element_budget).map(|_| ())
            };
            res.map_err(|mut e| {
                if self.sweep.is_some() {
                    e.message = format!("{} (sweep point {})", e.message, i + 1);
                }
                e
            })?;
        }
        Ok(())
    }
}

impl ExperimentConfig {
    /// Points whose clusters are not small against the typical BS spacing.
    /// The cluster model assumes `2 r_out` well below `1 / (2 sqrt(lambda_bs))`;
    /// a diameter above half that distance is reported but still evaluated.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, p) in self.points().iter().enumerate() {
            let spacing = 0.5 / p.params.lambda_bs.sqrt();
            let diameter = 2.0 * p.params.r_out;
            if diameter > 0.5 * spacing {
                let at = if self.sweep.is_some() { format!("sweep point {}: ", i + 1) } else { String::new() };
                out.push(format!(
                    "{at}cluster diameter {diameter:.1} m is not small against 1/(2 sqrt(lambda_bs)) = {spacing:.1} m"
                ));
            }
        }
        out
    }
}

fn apply(p: &mut PointConfig, field: SweepField, v: f64) {
    let q = &mut p.params;
    let w = &mut p.variant;
    match field {
        SweepField::LambdaBs => q.lambda_bs = v,
        SweepField::LambdaRis => q.mean_ris = v * q.cluster_area(),
        SweepField::MeanRis => q.mean_ris = v,
        SweepField::RIn => q.r_in = v,
        SweepField::ROut => q.r_out = v,
        SweepField::P0 => q.p0 = v,
        SweepField::NoisePower => q.noise_power = v,
        SweepField::MTotal => q.m_total = v as u32,
        SweepField::MBatch => q.m_batch = v as u32,
        SweepField::FC => q.f_c = v,
        SweepField::Beta => q.beta = Some(v),
        SweepField::AlphaLos => q.alpha_los = v,
        SweepField::AlphaNlos => q.alpha_nlos = v,
        SweepField::AlphaIr => q.alpha_ir = v,
        SweepField::BeamwidthDeg => q.overlap_prob = v / 360.0,
        SweepField::OverlapProb => q.overlap_prob = v,
        SweepField::ServingDistance => q.serving_distance = v,
        SweepField::Threshold => q.threshold = v,
        SweepField::KFactor => q.k_factor = v,
        SweepField::VariantServingDistance => w.serving_distance = v,
        SweepField::VariantHoleRadius => w.hole_radius = v,
        SweepField::VariantRIn => w.r_in = v,
        SweepField::VariantROut => w.r_out = v,
        SweepField::VariantCD => w.c_d = v,
        SweepField::VariantCR => w.c_r = v,
        SweepField::VariantMeanRis => w.mean_ris = v,
        SweepField::VariantNRis => w.n_ris = v as u32,
        SweepField::VariantWedgeAngleDeg => w.wedge_angle_deg = v,
    }
}

/// Sweep used when the config gives none.
pub fn default_sweep(scenario: Scenario) -> Option<Sweep> {
    let plain = |field, vs: &[f64]| Sweep {
        field,
        points: vs.iter().map(|&v| SweepPoint { value: v, label: v }).collect(),
    };
    let db = |field, vs: &[f64]| Sweep {
        field,
        points: vs
            .iter()
            .map(|&v| SweepPoint {
                value: Quantity::db(v).value,
                label: v,
            })
            .collect(),
    };
    match scenario {
        Scenario::Coverage => Some(db(SweepField::Threshold, &[-10.0, -5.0, 0.0, 5.0, 10.0])),
        Scenario::Rate => Some(plain(SweepField::ServingDistance, &[50.0, 100.0, 150.0, 200.0])),
        Scenario::Fig5 => Some(plain(SweepField::OverlapProb, &[0.01, 0.028, 0.05, 0.1, 0.2, 0.5, 1.0])),
        Scenario::Fig6 => Some(plain(SweepField::LambdaBs, &[1e-6, 2e-6, 4e-6, 6e-6, 8e-6, 1e-5])),
        Scenario::Fig7 => Some(plain(SweepField::MeanRis, &[1.0, 2.0, 3.0, 4.0, 5.0])),
        Scenario::Fig8 => Some(db(SweepField::VariantCD, &[0.0, -1.0, -2.0, -3.0, -4.0, -5.0])),
        Scenario::Validate => None,
    }
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::at(path, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<(), ConfigError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::at(path, format!("must be non-negative and finite, got {v}")))
    }
}

/// Reads, defaults and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::at("", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError {
            path: if path == "." { String::new() } else { path },
            message: strip_position(&inner.to_string()),
            line: (inner.line() > 0).then_some(inner.line()),
        }
    })?;
    resolve(raw)
}

/// serde_json appends " at line L column C"; the line is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn linear(path: &str, q: Option<Quantity>, db_ok: bool) -> Result<Option<f64>, ConfigError> {
    match q {
        Some(q) if q.in_db && !db_ok => Err(ConfigError::at(
            path,
            "dB values are accepted only for powers, thresholds and penalties",
        )),
        Some(q) => Ok(Some(q.value)),
        None => Ok(None),
    }
}

fn count(path: &str, q: Option<Quantity>) -> Result<Option<u32>, ConfigError> {
    match linear(path, q, false)? {
        Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(Some(v as u32)),
        Some(v) => Err(ConfigError::at(path, format!("expected a non-negative integer, got {v}"))),
        None => Ok(None),
    }
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig, ConfigError> {
    if let Some(v) = raw.schema {
        if v != SCHEMA_VERSION {
            return Err(ConfigError::at(
                "schema",
                format!("unsupported schema version {v}, expected {SCHEMA_VERSION}"),
            ));
        }
    }
    let scenario = raw.scenario;
    let mut params = ParamsConfig::default();
    if scenario == Scenario::Fig8 {
        params.lambda_bs = 4e-6;
    }
    if scenario == Scenario::Fig6 {
        params.overlap_prob = 3.6 / 360.0;
    }
    let r = raw.params;
    macro_rules! set {
        ($field:ident, $db:expr) => {
            if let Some(v) = linear(concat!("params.", stringify!($field)), r.$field, $db)? {
                params.$field = v;
            }
        };
    }
    set!(lambda_bs, false);
    set!(r_in, false);
    set!(r_out, false);
    set!(p0, true);
    set!(noise_power, true);
    set!(f_c, false);
    set!(alpha_los, false);
    set!(alpha_nlos, false);
    set!(alpha_ir, false);
    set!(serving_distance, false);
    set!(threshold, true);
    set!(k_factor, false);
    set!(tail_budget, false);
    set!(overlap_prob, false);
    params.beta = linear("params.beta", r.beta, false)?.or(params.beta);
    if let Some(v) = count("params.m_total", r.m_total)? {
        params.m_total = v;
    }
    if let Some(v) = count("params.m_batch", r.m_batch)? {
        params.m_batch = v;
    }
    match (r.beamwidth_deg, r.overlap_prob) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::at(
                "params.beamwidth_deg",
                "give either params.beamwidth_deg or params.overlap_prob, not both",
            ))
        }
        (Some(b), None) => params.overlap_prob = linear("params.beamwidth_deg", Some(b), false)?.unwrap() / 360.0,
        _ => {}
    }
    match (r.lambda_ris, r.mean_ris) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::at(
                "params.lambda_ris",
                "give either params.lambda_ris or params.mean_ris, not both",
            ))
        }
        (Some(l), None) => {
            params.mean_ris = linear("params.lambda_ris", Some(l), false)?.unwrap() * params.cluster_area()
        }
        (None, Some(m)) => params.mean_ris = linear("params.mean_ris", Some(m), false)?.unwrap(),
        (None, None) => {}
    }
    if let Some(b) = r.reflected_interference {
        params.reflected_interference = b;
    }
    if let Some(g) = r.gamma_sr {
        params.gamma_sr = g;
    }

    let mut variant = VariantConfig::default();
    if let Some(v) = raw.variant {
        if scenario != Scenario::Fig8 {
            return Err(ConfigError::at("variant", "only the fig8 scenario uses a variant section"));
        }
        if let Some(m) = v.model {
            variant.model = m;
        }
        macro_rules! setv {
            ($field:ident, $db:expr) => {
                if let Some(x) = linear(concat!("variant.", stringify!($field)), v.$field, $db)? {
                    variant.$field = x;
                }
            };
        }
        setv!(serving_distance, false);
        setv!(hole_radius, false);
        setv!(r_in, false);
        setv!(r_out, false);
        setv!(c_d, true);
        setv!(c_r, true);
        setv!(mean_ris, false);
        setv!(wedge_angle_deg, false);
        if let Some(n) = count("variant.n_ris", v.n_ris)? {
            variant.n_ris = n;
        }
    }

    let mut element_budget = ElementBudget::default();
    if let Some(b) = raw.element_budget {
        if scenario != Scenario::Fig7 {
            return Err(ConfigError::at("element_budget", "only the fig7 scenario uses an element budget"));
        }
        if let Some(t) = linear("element_budget.total_elements", b.total_elements, false)? {
            positive("element_budget.total_elements", t)?;
            element_budget.total_elements = t;
        }
        if let Some(u) = linear("element_budget.users_per_ris", b.users_per_ris, false)? {
            positive("element_budget.users_per_ris", u)?;
            element_budget.users_per_ris = u;
        }
    }

    let sweep = match raw.sweep {
        Some(_) if scenario == Scenario::Validate => {
            return Err(ConfigError::at("sweep", "the validate scenario does not take a sweep"));
        }
        Some(s) => {
            let field = SweepField::parse(&s.field).ok_or_else(|| {
                let names: Vec<&str> = SWEEP_FIELDS.iter().map(|(n, _)| *n).collect();
                ConfigError::at(
                    "sweep.field",
                    format!("unknown numeric field \"{}\"; expected one of {}", s.field, names.join(", ")),
                )
            })?;
            if s.values.is_empty() {
                return Err(ConfigError::at("sweep.values", "at least one value is required"));
            }
            let mut points = Vec::with_capacity(s.values.len());
            for (i, q) in s.values.iter().enumerate() {
                let path = format!("sweep.values[{i}]");
                if q.in_db && !field.accepts_db() {
                    return Err(ConfigError::at(path, format!("{} does not accept dB values", field.name())));
                }
                if field.integral() && (q.value.fract() != 0.0 || q.value < 0.0) {
                    return Err(ConfigError::at(
                        path,
                        format!("{} takes non-negative integers, got {}", field.name(), q.value),
                    ));
                }
                if !q.value.is_finite() {
                    return Err(ConfigError::at(path, "must be finite"));
                }
                points.push(SweepPoint {
                    value: q.value,
                    label: q.written,
                });
            }
            Some(Sweep { field, points })
        }
        None => default_sweep(scenario),
    };

    let mc_samples = match raw.mc_samples {
        Some(n) => usize::try_from(n).map_err(|_| ConfigError::at("mc_samples", "too large"))?,
        None => DEFAULT_MC_SAMPLES,
    };
    let cfg = ExperimentConfig {
        scenario,
        params,
        variant,
        element_budget,
        mc_samples,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        sweep,
        output_path: raw.output_path,
        record_runtime: raw.record_runtime.unwrap_or(true),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse_config(r#"{"scenario": "rate"}"#).unwrap();
        assert_eq!(c.params, ParamsConfig::default());
        assert_eq!(c.mc_samples, DEFAULT_MC_SAMPLES);
        assert_eq!(c.sweep, default_sweep(Scenario::Rate));
        assert_eq!(c.points()[0].system(c.scenario, &c.element_budget).unwrap(), {
            let mut b = SystemParams::baseline();
            b.serving_distance = 50.0;
            b
        });
    }

    #[test]
    fn db_strings_become_linear() {
        let c = parse_config(r#"{"scenario": "fig8", "variant": {"c_d": "-3dB", "c_r": " -0.5 dB"}}"#).unwrap();
        // 10^(-3/10)
        assert!((c.variant.c_d - 0.501_187_233_627_272_2).abs() < 1e-15);
        assert!((c.variant.c_r - 0.891_250_938_133_745_5).abs() < 1e-15);
        let q = Quantity::parse("20dB").unwrap();
        assert_eq!((q.value, q.written), (100.0, 20.0));
    }

    #[test]
    fn overlapping_radii_name_both_fields() {
        let e = parse_config(r#"{"scenario": "coverage", "params": {"r_in": 30, "r_out": 30}}"#).unwrap_err();
        assert!(e.to_string().contains("params.r_in") && e.to_string().contains("params.r_out"), "{e}");
        let e = parse_config(r#"{"scenario": "fig8", "variant": {"r_in": 40}}"#).unwrap_err();
        assert!(e.to_string().contains("variant.r_in") && e.to_string().contains("variant.r_out"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let e = parse_config(r#"{"scenario": "rate", "params": {"lamda_bs": 1e-5}}"#).unwrap_err();
        assert_eq!(e.path, "params.lamda_bs");
        assert!(e.message.contains("unknown field"), "{e}");
        let e = parse_config("{\n\"scenario\": \"rate\",\n\"colour\": 1}").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn malformed_values_report_their_path() {
        let e = parse_config(r#"{"scenario": "rate", "params": {"threshold": "ten"}}"#).unwrap_err();
        assert_eq!(e.path, "params.threshold");
        let e = parse_config(r#"{"scenario": "rate", "params": {"lambda_bs": "3dB"}}"#).unwrap_err();
        assert_eq!(e.path, "params.lambda_bs");
        let e = parse_config(r#"{"scenario": "rate", "params": {"m_total": 10.5}}"#).unwrap_err();
        assert_eq!(e.path, "params.m_total");
        let e = parse_config(r#"{"scenario": "dance"}"#).unwrap_err();
        assert_eq!(e.path, "scenario");
        let e = parse_config(r#"{"schema": 2, "scenario": "rate"}"#).unwrap_err();
        assert_eq!(e.path, "schema");
    }

    #[test]
    fn sweep_fields_are_checked() {
        let e = parse_config(r#"{"scenario": "rate", "sweep": {"field": "params.colour", "values": [1]}}"#).unwrap_err();
        assert_eq!(e.path, "sweep.field");
        let e = parse_config(r#"{"scenario": "rate", "sweep": {"field": "params.lambda_bs", "values": []}}"#).unwrap_err();
        assert_eq!(e.path, "sweep.values");
        let e = parse_config(r#"{"scenario": "rate", "sweep": {"field": "params.r_out", "values": ["3dB"]}}"#)
            .unwrap_err();
        assert_eq!(e.path, "sweep.values[0]");
        let e = parse_config(r#"{"scenario": "rate", "sweep": {"field": "variant.c_d", "values": [0.5]}}"#)
            .unwrap_err();
        assert_eq!(e.path, "sweep.field");
        // The second point makes r_in exceed r_out.
        let e = parse_config(r#"{"scenario": "rate", "sweep": {"field": "params.r_in", "values": [5, 40]}}"#)
            .unwrap_err();
        assert!(e.message.contains("sweep point 2"), "{e}");
    }

    #[test]
    fn sweep_points_carry_written_values() {
        let c = parse_config(
            r#"{"scenario": "coverage", "sweep": {"field": "params.threshold", "values": ["-10dB", 2]}}"#,
        )
        .unwrap();
        let s = c.sweep.as_ref().unwrap();
        assert_eq!(s.points[0].label, -10.0);
        assert!((s.points[0].value - 0.1).abs() < 1e-15);
        assert_eq!(s.points[1], SweepPoint { value: 2.0, label: 2.0 });
        assert_eq!(c.points()[1].params.threshold, 2.0);
    }

    #[test]
    fn lambda_ris_and_mean_ris_are_exclusive_and_equivalent() {
        assert!(parse_config(r#"{"scenario": "rate", "params": {"lambda_ris": 1e-3, "mean_ris": 2}}"#).is_err());
        let area = std::f64::consts::PI * (900.0 - 100.0);
        let c = parse_config(&format!(r#"{{"scenario": "rate", "params": {{"lambda_ris": {}}}}}"#, 2.0 / area)).unwrap();
        assert!((c.params.mean_ris - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fig7_splits_the_element_budget() {
        let c = parse_config(r#"{"scenario": "fig7"}"#).unwrap();
        let p = c.points();
        let s = p[3].system(c.scenario, &c.element_budget).unwrap();
        assert_eq!((s.m_total, s.m_batch), (2500, 500));
        assert!(parse_config(r#"{"scenario": "rate", "element_budget": {"total_elements": 5}}"#).is_err());
    }

    #[test]
    fn large_clusters_are_only_warned_about() {
        assert!(parse_config(r#"{"scenario": "rate"}"#).unwrap().warnings().is_empty());
        let c = parse_config(r#"{"scenario": "rate", "params": {"r_out": 60, "lambda_bs": 1e-5}}"#).unwrap();
        c.validate().unwrap();
        assert_eq!(c.warnings().len(), 4);
    }

    #[test]
    fn scenario_defaults() {
        let c = parse_config(r#"{"scenario": "fig8"}"#).unwrap();
        assert_eq!(c.params.lambda_bs, 4e-6);
        assert_eq!(c.sweep.unwrap().points.len(), 6);
        let c = parse_config(r#"{"scenario": "fig6"}"#).unwrap();
        assert!((c.params.overlap_prob - 0.01).abs() < 1e-15);
        assert!(parse_config(r#"{"scenario": "validate"}"#).unwrap().sweep.is_none());
    }
}
