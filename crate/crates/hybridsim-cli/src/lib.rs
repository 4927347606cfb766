//! Scenario driver for the hybrid entanglement distribution simulator.
//!
//! A [`ScenarioConfig`] names one distribution scheme (direct transmission,
//! DV-mode teleportation, or CV-mode teleportation), the hybrid-state
//! parameters, and a grid over the cat amplitude and the channel pair.
//! [`run_scenario`] expands the grid lexicographically, evaluates every
//! point (in parallel, with ordered collection, so output is deterministic),
//! and returns one [`SweepRecord`] per point. [`find_crossover`] bisects the
//! symmetric total loss at which direct distribution and DV teleportation
//! exchange the fidelity lead. [`emit_records`] writes CSV or JSON with
//! every float carrying 12 significant digits, so the two formats parse
//! back to identical values.
//!
//! Configs are single JSON documents; command-line flags override single
//! fields. Validation failures exit with code 2, runtime failures with 1.

use std::fmt;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use hybridsim_core::cv_teleport::{fidelity_cv_closed, fidelity_cv_exact};
use hybridsim_core::dv_teleport::{dv_fidelity_transfer_form, tuned_gain};
use hybridsim_core::fock::TruncationPolicy;
use hybridsim_core::{
    choose_kmax, direct_metrics, direct_metrics_for_state, dv_metrics, ChannelPair, CvError,
    ExponentReading, FockError, FockTruncation, HybridSpec, HybridVariant, TeleportParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// errors

/// Driver errors, split by exit code: configuration problems are caught
/// before any computation and exit with 2, everything after validation
/// exits with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<CvError> for CliError {
    fn from(e: CvError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

// ---------------------------------------------------------------------------
// vocabulary types

/// Distribution scheme under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Both modes through their lossy down-links.
    Direct,
    /// DV mode teleported through the attenuated TMSV channel.
    TeleportDv,
    /// CV mode teleported in the characteristic-function picture.
    TeleportCv,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Direct => "direct",
            Scheme::TeleportDv => "teleport-dv",
            Scheme::TeleportCv => "teleport-cv",
        })
    }
}

/// Hybrid-state variant, mirroring the core constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Exact,
    Large,
    Small,
    Coherent,
}

impl Variant {
    pub fn to_core(self) -> HybridVariant {
        match self {
            Variant::Exact => HybridVariant::Exact,
            Variant::Large => HybridVariant::Large,
            Variant::Small => HybridVariant::Small,
            Variant::Coherent => HybridVariant::Coherent,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Exact => "exact",
            Variant::Large => "large",
            Variant::Small => "small",
            Variant::Coherent => "coherent",
        })
    }
}

/// Requested metric columns. Fidelity is always computed (the classical
/// limit flags derive from it); this set only controls log-negativity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Fidelity,
    Logneg,
}

/// Teleportation gain policy. In JSON either the strings "unity"/"tuned"
/// or an object {"fixed": g}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainMode {
    Unity,
    Tuned,
    Fixed(f64),
}

impl GainMode {
    pub fn label(&self) -> &'static str {
        match self {
            GainMode::Unity => "unity",
            GainMode::Tuned => "tuned",
            GainMode::Fixed(_) => "fixed",
        }
    }

    /// Numeric gain at a concrete channel point.
    pub fn gain_at(&self, ch: ChannelPair) -> CliResult<f64> {
        match self {
            GainMode::Unity => Ok(1.0),
            GainMode::Tuned => Ok(tuned_gain(ch)?),
            GainMode::Fixed(g) => Ok(*g),
        }
    }
}

impl FromStr for GainMode {
    type Err = String;

    /// Accepts "unity", "tuned", "fixed:<g>", or a bare gain value.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unity" => Ok(GainMode::Unity),
            "tuned" => Ok(GainMode::Tuned),
            other => {
                let raw = other.strip_prefix("fixed:").unwrap_or(other);
                raw.parse::<f64>()
                    .map(GainMode::Fixed)
                    .map_err(|_| format!("expected unity, tuned, fixed:<g>, or a number, got {s:?}"))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// grids

/// Grid over one real axis: a single point, an explicit list, or a
/// "start:stop:count" range string (count evenly spaced points, inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Point(f64),
    List(Vec<f64>),
    Range(String),
}

impl GridSpec {
    pub fn expand(&self, axis: &str) -> CliResult<Vec<f64>> {
        let values = match self {
            GridSpec::Point(x) => vec![*x],
            GridSpec::List(xs) => xs.clone(),
            GridSpec::Range(spec) => expand_range(spec)
                .map_err(|e| CliError::Validation(format!("{axis}: {e}")))?,
        };
        if values.is_empty() {
            return Err(CliError::Validation(format!("{axis}: grid is empty")));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Validation(format!(
                "{axis}: grid value {bad} is not finite"
            )));
        }
        Ok(values)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    /// "a:b:n" parses as a range, "x,y,z" as a list, a bare number as a point.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(':') {
            expand_range(s)?;
            return Ok(GridSpec::Range(s.to_string()));
        }
        if s.contains(',') {
            let xs = s
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(GridSpec::List(xs));
        }
        s.parse::<f64>()
            .map(GridSpec::Point)
            .map_err(|_| format!("expected a number, list, or start:stop:count, got {s:?}"))
    }
}

fn expand_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range must be start:stop:count, got {spec:?}"));
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| format!("bad start in {spec:?}"))?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| format!("bad stop in {spec:?}"))?;
    let count: usize = parts[2].trim().parse().map_err(|_| format!("bad count in {spec:?}"))?;
    if count == 0 {
        return Err(format!("range {spec:?} has zero points"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

// ---------------------------------------------------------------------------
// scenario configuration

fn default_alpha0() -> GridSpec {
    GridSpec::Point(1.5)
}
fn default_r() -> f64 {
    2.5
}
fn default_gain() -> GainMode {
    GainMode::Unity
}
fn default_dim() -> usize {
    40
}
fn default_delta() -> f64 {
    1e-14
}
fn default_variant() -> Variant {
    Variant::Exact
}

/// One sweep scenario: scheme, state parameters, and the evaluation grid.
/// The channel is given either as `ta`/`tb` grids or as a symmetric
/// `loss_db` grid (total dB split evenly over the two arms); omitting both
/// means lossless.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub scheme: Option<Scheme>,
    #[serde(default = "default_alpha0")]
    pub alpha0: GridSpec,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_gain")]
    pub gain_mode: GainMode,
    #[serde(default)]
    pub ta: Option<GridSpec>,
    #[serde(default)]
    pub tb: Option<GridSpec>,
    #[serde(default)]
    pub loss_db: Option<GridSpec>,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub metrics: Option<Vec<Metric>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scheme: None,
            alpha0: default_alpha0(),
            r: default_r(),
            gain_mode: default_gain(),
            ta: None,
            tb: None,
            loss_db: None,
            variant: default_variant(),
            dim: default_dim(),
            k_max: None,
            delta: default_delta(),
            metrics: None,
        }
    }
}

impl ScenarioConfig {
    /// Parses a JSON config document.
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    /// Reads and parses a JSON config file.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// One channel grid point with its derived total loss.
#[derive(Debug, Clone, Copy)]
struct GridPoint {
    alpha0: f64,
    ch: ChannelPair,
}

/// Validated scenario ready for evaluation.
struct Resolved {
    scheme: Scheme,
    variant: Variant,
    gain_mode: GainMode,
    r: f64,
    dim: usize,
    k_max: Option<usize>,
    delta: f64,
    want_logneg: bool,
    points: Vec<GridPoint>,
}

fn validate(config: &ScenarioConfig) -> CliResult<Resolved> {
    let scheme = config
        .scheme
        .ok_or_else(|| CliError::Validation("scheme is required".into()))?;

    let alphas = config.alpha0.expand("alpha0")?;
    if let Some(bad) = alphas.iter().find(|&&a| a <= 0.0) {
        return Err(CliError::Validation(format!(
            "alpha0: cat amplitude must be positive, got {bad}"
        )));
    }
    if !(config.r.is_finite() && config.r >= 0.0) {
        return Err(CliError::Validation(format!(
            "r: squeezing must be a finite nonnegative real, got {}",
            config.r
        )));
    }
    if !(config.delta.is_finite() && config.delta > 0.0) {
        return Err(CliError::Validation(format!(
            "delta: trace-defect budget must be finite and positive, got {}",
            config.delta
        )));
    }
    TruncationPolicy::new(config.dim)
        .map_err(|e| CliError::Validation(format!("dim: {e}")))?;
    if let GainMode::Fixed(g) = config.gain_mode {
        if !(g.is_finite() && g > 0.0) {
            return Err(CliError::Validation(format!(
                "gain-mode: fixed gain must be a finite positive real, got {g}"
            )));
        }
    }

    // Channel axes: ta/tb together, or loss_db, or neither (lossless).
    let channels: Vec<ChannelPair> = match (&config.ta, &config.tb, &config.loss_db) {
        (Some(_), Some(_), Some(_)) => {
            return Err(CliError::Validation(
                "give either ta/tb grids or a loss-db grid, not both".into(),
            ))
        }
        (Some(_), None, _) | (None, Some(_), _) => {
            return Err(CliError::Validation(
                "ta and tb must be given together".into(),
            ))
        }
        (Some(ta), Some(tb), None) => {
            let tas = ta.expand("ta")?;
            let tbs = tb.expand("tb")?;
            let mut pairs = Vec::with_capacity(tas.len() * tbs.len());
            for &a in &tas {
                for &b in &tbs {
                    pairs.push(
                        ChannelPair::new(a, b)
                            .map_err(|e| CliError::Validation(format!("ta/tb: {e}")))?,
                    );
                }
            }
            pairs
        }
        (None, None, Some(loss)) => loss
            .expand("loss-db")?
            .into_iter()
            .map(|db| {
                ChannelPair::symmetric_from_total_loss_db(db)
                    .map_err(|e| CliError::Validation(format!("loss-db: {e}")))
            })
            .collect::<CliResult<Vec<_>>>()?,
        (None, None, None) => vec![ChannelPair::lossless()],
    };

    if config.gain_mode == GainMode::Tuned {
        if let Some(ch) = channels.iter().find(|ch| ch.t_a() == 0.0) {
            return Err(CliError::Validation(format!(
                "gain-mode tuned is undefined at T_A = 0 (grid contains T_A={}, T_B={})",
                ch.t_a(),
                ch.t_b()
            )));
        }
    }

    // Scheme-specific rules.
    match scheme {
        Scheme::Direct => {
            if config.gain_mode != GainMode::Unity {
                return Err(CliError::Validation(
                    "direct distribution has no teleportation gain; use unity".into(),
                ));
            }
        }
        Scheme::TeleportDv => {
            if config.variant != Variant::Exact {
                return Err(CliError::Validation(format!(
                    "teleport-dv metrics are variant-independent and defined for the \
                     exact hybrid only, got {}",
                    config.variant
                )));
            }
        }
        Scheme::TeleportCv => {
            if config.gain_mode != GainMode::Unity {
                return Err(CliError::Validation(
                    "teleport-cv closed forms hold at unity gain only".into(),
                ));
            }
            if config.variant == Variant::Coherent {
                return Err(CliError::Validation(
                    "teleport-cv has no closed form for the coherent variant".into(),
                ));
            }
        }
    }

    let supports_logneg = matches!(scheme, Scheme::Direct | Scheme::TeleportDv);
    let want_logneg = match &config.metrics {
        None => supports_logneg,
        Some(set) => {
            if set.is_empty() {
                return Err(CliError::Validation("metric set is empty".into()));
            }
            let logneg = set.contains(&Metric::Logneg);
            if logneg && !supports_logneg {
                return Err(CliError::Validation(format!(
                    "log negativity is not defined for scheme {scheme} \
                     (no density-matrix reconstruction)"
                )));
            }
            logneg
        }
    };

    // Lexicographic grid: alpha0 outermost, then ta, then tb (or loss_db).
    let mut points = Vec::with_capacity(alphas.len() * channels.len());
    for &alpha0 in &alphas {
        for &ch in &channels {
            points.push(GridPoint { alpha0, ch });
        }
    }

    Ok(Resolved {
        scheme,
        variant: config.variant,
        gain_mode: config.gain_mode,
        r: config.r,
        dim: config.dim,
        k_max: config.k_max,
        delta: config.delta,
        want_logneg,
        points,
    })
}

// ---------------------------------------------------------------------------
// sweep records

/// One evaluated grid point. Field order here is the CSV column order and
/// the JSON key order. `total_loss_db` is -10 log10(T_A T_B);
/// `above_qubit_limit` flags fidelity > 2/3 and `above_coherent_limit`
/// fidelity > 1/2 (classical teleportation references, not thresholds).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub scheme: String,
    pub variant: String,
    pub alpha0: f64,
    pub r: f64,
    pub g_mode: String,
    pub g: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub total_loss_db: f64,
    pub dim: usize,
    pub k_max: Option<usize>,
    pub fidelity: f64,
    pub log_negativity: Option<f64>,
    pub above_qubit_limit: bool,
    pub above_coherent_limit: bool,
    pub runtime_ms: f64,
}

pub const SWEEP_FIELDS: [&str; 16] = [
    "scheme",
    "variant",
    "alpha0",
    "r",
    "g_mode",
    "g",
    "t_a",
    "t_b",
    "total_loss_db",
    "dim",
    "k_max",
    "fidelity",
    "log_negativity",
    "above_qubit_limit",
    "above_coherent_limit",
    "runtime_ms",
];

/// Evaluates every grid point of a validated scenario. Points run in
/// parallel but collect in grid order, so repeated runs give identical
/// records (runtime_ms aside).
pub fn run_scenario(config: &ScenarioConfig) -> CliResult<Vec<SweepRecord>> {
    let resolved = validate(config)?;
    resolved
        .points
        .par_iter()
        .map(|point| evaluate_point(&resolved, point))
        .collect()
}

fn evaluate_point(scenario: &Resolved, point: &GridPoint) -> CliResult<SweepRecord> {
    let start = Instant::now();
    let ch = point.ch;
    let g = scenario.gain_mode.gain_at(ch)?;
    let (fidelity, logneg, k_max_used, dim_used) = match scenario.scheme {
        Scheme::Direct => {
            let policy = TruncationPolicy::new(scenario.dim)?;
            let (fid, ln) = if scenario.variant == Variant::Exact {
                direct_metrics(point.alpha0, ch, policy)?
            } else {
                let spec = HybridSpec::new(scenario.variant.to_core(), point.alpha0)?;
                let psi = spec.build(policy)?;
                direct_metrics_for_state(&psi, ch)?
            };
            (fid, Some(ln), None, scenario.dim)
        }
        Scheme::TeleportDv => {
            let params = TeleportParams::new(g, scenario.r, ch)?;
            let k = match scenario.k_max {
                Some(k) => k,
                None => choose_kmax(&params, scenario.delta)?,
            };
            let trunc = FockTruncation::new(k, scenario.delta)?;
            let (fid, ln) = dv_metrics(&params, trunc)?;
            (fid, Some(ln), Some(k), k + 2)
        }
        Scheme::TeleportCv => {
            let params = TeleportParams::new(g, scenario.r, ch)?;
            let fid = match scenario.variant {
                Variant::Exact => {
                    fidelity_cv_exact(point.alpha0, &params, ExponentReading::Quadratic)?
                }
                other => fidelity_cv_closed(other.to_core(), point.alpha0, &params)?,
            };
            (fid, None, None, scenario.dim)
        }
    };
    let log_negativity = if scenario.want_logneg { logneg } else { None };
    Ok(SweepRecord {
        scheme: scenario.scheme.to_string(),
        variant: scenario.variant.to_string(),
        alpha0: point.alpha0,
        r: scenario.r,
        g_mode: scenario.gain_mode.label().to_string(),
        g,
        t_a: ch.t_a(),
        t_b: ch.t_b(),
        total_loss_db: ch.total_loss_db(),
        dim: dim_used,
        k_max: k_max_used,
        fidelity,
        log_negativity,
        above_qubit_limit: fidelity > 2.0 / 3.0,
        above_coherent_limit: fidelity > 0.5,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

// ---------------------------------------------------------------------------
// crossover search

/// Result of the direct-vs-DV-teleport crossover search on symmetric loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossoverOutcome {
    /// F_direct - F_dv changes sign at this total loss (dB), located to
    /// within the bisection tolerance.
    At { loss_db: f64 },
    /// The sign is constant over the whole search interval.
    NoCrossover,
}

/// Search interval and tolerance for [`find_crossover`].
pub const CROSSOVER_MAX_DB: f64 = 40.0;
pub const CROSSOVER_TOL_DB: f64 = 0.05;

/// Bisects the symmetric total loss where the direct-distribution fidelity
/// stops beating unity-gain DV teleportation. Direct distribution wins at
/// zero loss (it is lossless there, fidelity 1); the search scans 1 dB
/// steps for a sign change of F_direct - F_dv and bisects the bracketing
/// interval to [`CROSSOVER_TOL_DB`].
pub fn find_crossover(alpha0: f64, r: f64, dim: usize, delta: f64) -> CliResult<CrossoverOutcome> {
    let policy =
        TruncationPolicy::new(dim).map_err(|e| CliError::Validation(format!("dim: {e}")))?;
    if !(alpha0.is_finite() && alpha0 > 0.0) {
        return Err(CliError::Validation(format!(
            "alpha0: cat amplitude must be positive, got {alpha0}"
        )));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(CliError::Validation(format!(
            "r: squeezing must be a finite nonnegative real, got {r}"
        )));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CliError::Validation(format!(
            "delta: trace-defect budget must be finite and positive, got {delta}"
        )));
    }
    let margin = |loss_db: f64| -> CliResult<f64> {
        let ch = ChannelPair::symmetric_from_total_loss_db(loss_db)?;
        let (f_direct, _) = direct_metrics(alpha0, ch, policy)?;
        let f_dv = dv_fidelity_transfer_form(&TeleportParams::new(1.0, r, ch)?);
        Ok(f_direct - f_dv)
    };

    let mut lo = 0.0;
    let mut d_lo = margin(lo)?;
    let mut bracket = None;
    let steps = CROSSOVER_MAX_DB as usize;
    for i in 1..=steps {
        let hi = i as f64;
        let d_hi = margin(hi)?;
        if d_lo > 0.0 && d_hi <= 0.0 {
            bracket = Some((lo, hi, d_lo));
            break;
        }
        lo = hi;
        d_lo = d_hi;
    }
    let (mut lo, mut hi, mut d_lo) = match bracket {
        Some(b) => b,
        None => return Ok(CrossoverOutcome::NoCrossover),
    };
    while hi - lo > CROSSOVER_TOL_DB {
        let mid = 0.5 * (lo + hi);
        let d_mid = margin(mid)?;
        if d_lo > 0.0 && d_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            d_lo = d_mid;
        }
    }
    Ok(CrossoverOutcome::At {
        loss_db: 0.5 * (lo + hi),
    })
}

/// One crossover search result, emitted with the same format discipline as
/// sweep records. `crossover_db` is empty/null when the ordering never
/// flips on the search interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverRecord {
    pub alpha0: f64,
    pub r: f64,
    pub crossover_db: Option<f64>,
}

pub const CROSSOVER_FIELDS: [&str; 3] = ["alpha0", "r", "crossover_db"];

/// Runs [`find_crossover`] for every amplitude on the grid.
pub fn run_crossover(
    alpha0: &GridSpec,
    r: f64,
    dim: usize,
    delta: f64,
) -> CliResult<Vec<CrossoverRecord>> {
    let alphas = alpha0.expand("alpha0")?;
    alphas
        .par_iter()
        .map(|&a| {
            let outcome = find_crossover(a, r, dim, delta)?;
            Ok(CrossoverRecord {
                alpha0: a,
                r,
                crossover_db: match outcome {
                    CrossoverOutcome::At { loss_db } => Some(loss_db),
                    CrossoverOutcome::NoCrossover => None,
                },
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// emission

/// Output encodings for record emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One emitted cell. Floats go through the 12-significant-digit rounding in
/// both encodings, so CSV and JSON parse back to identical values.
enum Cell {
    Str(String),
    Num(f64),
    Int(usize),
    OptNum(Option<f64>),
    OptInt(Option<usize>),
    Bool(bool),
}

/// Rounds through a 12-significant-digit decimal representation.
fn sig12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().expect("round-trip of finite float")
    } else {
        x
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Num(x) if x.is_finite() => format!("{x:.11e}"),
            Cell::Num(x) => format!("{x}"),
            Cell::Int(n) => n.to_string(),
            Cell::OptNum(Some(x)) => Cell::Num(*x).to_csv(),
            Cell::OptNum(None) => String::new(),
            Cell::OptInt(Some(n)) => n.to_string(),
            Cell::OptInt(None) => String::new(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            Cell::Str(s) => Value::from(s.as_str()),
            Cell::Num(x) if x.is_finite() => Value::from(sig12(*x)),
            Cell::Num(x) => Value::from(x.to_string()),
            Cell::Int(n) => Value::from(*n),
            Cell::OptNum(Some(x)) => Cell::Num(*x).to_json(),
            Cell::OptNum(None) => Value::Null,
            Cell::OptInt(Some(n)) => Value::from(*n),
            Cell::OptInt(None) => Value::Null,
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

trait Tabular {
    fn field_names() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

impl Tabular for SweepRecord {
    fn field_names() -> &'static [&'static str] {
        &SWEEP_FIELDS
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Str(self.scheme.clone()),
            Cell::Str(self.variant.clone()),
            Cell::Num(self.alpha0),
            Cell::Num(self.r),
            Cell::Str(self.g_mode.clone()),
            Cell::Num(self.g),
            Cell::Num(self.t_a),
            Cell::Num(self.t_b),
            Cell::Num(self.total_loss_db),
            Cell::Int(self.dim),
            Cell::OptInt(self.k_max),
            Cell::Num(self.fidelity),
            Cell::OptNum(self.log_negativity),
            Cell::Bool(self.above_qubit_limit),
            Cell::Bool(self.above_coherent_limit),
            Cell::Num(self.runtime_ms),
        ]
    }
}

impl Tabular for CrossoverRecord {
    fn field_names() -> &'static [&'static str] {
        &CROSSOVER_FIELDS
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.alpha0),
            Cell::Num(self.r),
            Cell::OptNum(self.crossover_db),
        ]
    }
}

fn render<T: Tabular>(records: &[T], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = T::field_names().join(",");
            out.push('\n');
            for record in records {
                let row: Vec<String> = record.cells().iter().map(Cell::to_csv).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let array: Vec<serde_json::Value> = records
                .iter()
                .map(|record| {
                    let mut object = serde_json::Map::new();
                    for (name, cell) in T::field_names().iter().zip(record.cells()) {
                        object.insert((*name).to_string(), cell.to_json());
                    }
                    serde_json::Value::Object(object)
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&array).expect("JSON of plain values");
            text.push('\n');
            text
        }
    }
}

fn write_out(text: &str, destination: Option<&Path>) -> CliResult<()> {
    match destination {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let mut file = File::create(path).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            file.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    }
}

/// Writes sweep records as CSV (header plus one line per record) or a JSON
/// array of flat objects; `None` destination means stdout.
pub fn emit_records(
    records: &[SweepRecord],
    format: OutputFormat,
    destination: Option<&Path>,
) -> CliResult<()> {
    write_out(&render(records, format), destination)
}

/// Writes crossover records with the same encodings as [`emit_records`].
pub fn emit_crossovers(
    records: &[CrossoverRecord],
    format: OutputFormat,
    destination: Option<&Path>,
) -> CliResult<()> {
    write_out(&render(records, format), destination)
}
