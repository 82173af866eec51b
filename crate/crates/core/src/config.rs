//! Experiment files: flat `key = value` lines with dotted section names.
//!
//! ```text
//! # comment
//! model = both
//! params.mu = 0.01
//! reference.omega = 0.025
//! funnel0.scale = 10
//! ```
//!
//! Unknown keys, duplicate keys and missing required keys are errors.
//! Frequencies may be given absolutely (`*.omega`, rad/s) or as a multiple
//! of `f = sqrt(g / h0)` (`*.omega_f`); the horizon either in seconds
//! (`grid.horizon`) or in multiples of `tau = 1/f` (`grid.horizon_tau`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::closed_loop::{ClosedLoopConfig, ModelKind};
use crate::error::{Error, Result};
use crate::funnel::FunnelSpec;
use crate::linear::LinearStepConfig;
use crate::model::{CartState, PhysicalParams, ReferenceSignal, SpatialGrid, StateField};

pub const PRESET_EXPERIMENT1: &str = include_str!("presets/experiment1.conf");
pub const PRESET_EXPERIMENT2: &str = include_str!("presets/experiment2.conf");

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 2] = ["experiment1", "experiment2"];

const KNOWN_KEYS: &[&str] = &[
    "model",
    "params.m",
    "params.h0",
    "params.g",
    "params.mu",
    "params.c_d",
    "params.c_s",
    "reference.kind",
    "reference.omega",
    "reference.omega_f",
    "funnel0.kind",
    "funnel0.scale",
    "funnel0.omega",
    "funnel0.omega_f",
    "funnel1.kind",
    "funnel1.scale",
    "funnel1.omega",
    "funnel1.omega_f",
    "initial.profile",
    "initial.amplitude",
    "initial.table",
    "cart.y0",
    "cart.y1",
    "grid.time_points",
    "grid.space_points",
    "grid.horizon",
    "grid.horizon_tau",
    "output.dir",
    "output.snapshots",
    "output.snapshot_times",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSelection {
    Linear,
    Nonlinear,
    Both,
}

impl ModelSelection {
    pub fn models(&self) -> Vec<ModelKind> {
        match self {
            ModelSelection::Linear => vec![ModelKind::Linear],
            ModelSelection::Nonlinear => vec![ModelKind::Nonlinear],
            ModelSelection::Both => vec![ModelKind::Linear, ModelKind::Nonlinear],
        }
    }
}

/// Initial water profile `(x1, x2)`, absolute velocity.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `(h0, amplitude * sin(4 pi zeta)^2)`
    PaperSine { amplitude: f64 },
    /// `(h0, 0)`
    Flat,
    /// Piecewise-linear interpolation of `(zeta, x1, x2)` rows covering `[0, 1]`.
    Table { path: PathBuf, rows: Vec<[f64; 3]> },
}

impl InitialProfile {
    pub fn sample(&self, p: &PhysicalParams, grid: &SpatialGrid) -> StateField {
        let (first, second) = match self {
            InitialProfile::PaperSine { amplitude } => {
                let a = *amplitude;
                (
                    vec![p.h0(); grid.n_points()],
                    grid.sample(|z| {
                        let s = (4.0 * std::f64::consts::PI * z).sin();
                        a * s * s
                    }),
                )
            }
            InitialProfile::Flat => (vec![p.h0(); grid.n_points()], vec![0.0; grid.n_points()]),
            InitialProfile::Table { rows, .. } => (
                grid.sample(|z| interpolate(rows, z, 1)),
                grid.sample(|z| interpolate(rows, z, 2)),
            ),
        };
        StateField { first, second, t: 0.0 }
    }
}

fn interpolate(rows: &[[f64; 3]], z: f64, col: usize) -> f64 {
    let j = rows.partition_point(|r| r[0] < z);
    if j == 0 {
        return rows[0][col];
    }
    if j == rows.len() {
        return rows[rows.len() - 1][col];
    }
    let (a, b) = (rows[j - 1], rows[j]);
    let s = (z - a[0]) / (b[0] - a[0]);
    a[col] + s * (b[col] - a[col])
}

#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotSpec {
    /// `n` equally spaced times `k T / n`, `k = 1..=n`.
    Count(usize),
    Times(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSelection,
    pub params: PhysicalParams,
    pub reference: ReferenceSignal,
    pub phi0: FunnelSpec,
    pub phi1: FunnelSpec,
    pub initial: InitialProfile,
    pub cart0: CartState,
    /// Number of time points `M`, including `t = 0`.
    pub time_points: usize,
    /// Explicit node count; derived from `M` when absent.
    pub space_points: Option<usize>,
    pub horizon: f64,
    pub output_dir: PathBuf,
    pub snapshots: SnapshotSpec,
}

/// Embedded preset by name.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = match name {
        "experiment1" => PRESET_EXPERIMENT1,
        "experiment2" => PRESET_EXPERIMENT2,
        other => {
            return Err(Error::config(
                "preset",
                format!("unknown preset `{other}` (expected one of {})", PRESET_NAMES.join(", ")),
            ))
        }
    };
    parse_config_str(text, Path::new("."))
}

/// Reads and validates a config file; relative table paths resolve against
/// the file's directory.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base)
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {lineno}"), "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::config(key, format!("unknown key (line {lineno})")));
            }
            if value.is_empty() {
                return Err(Error::config(key, format!("empty value (line {lineno})")));
            }
            if let Some((prev, _)) = map.insert(key.to_string(), (lineno, value.to_string())) {
                return Err(Error::config(key, format!("duplicate key (lines {prev} and {lineno})")));
            }
        }
        Ok(Self { map })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::config(key, format!("expected a finite number, got `{v}`")))
            })
            .transpose()
    }

    fn required_number(&self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::config(key, format!("expected a non-negative integer, got `{v}`")))
            })
            .transpose()
    }

    /// Exactly one of `base` and `base_f`; the latter is scaled by `f`.
    fn frequency(&self, base: &str, f: f64) -> Result<Option<f64>> {
        let scaled = format!("{base}_f");
        match (self.number(base)?, self.number(&scaled)?) {
            (Some(_), Some(_)) => Err(Error::config(base, format!("give either `{base}` or `{scaled}`, not both"))),
            (Some(w), None) => Ok(Some(w)),
            (None, Some(k)) => Ok(Some(k * f)),
            (None, None) => Ok(None),
        }
    }
}

fn funnel(entries: &Entries, section: &str, f: f64) -> Result<FunnelSpec> {
    let kind_key = format!("{section}.kind");
    let scale_key = format!("{section}.scale");
    let omega_key = format!("{section}.omega");
    let scale = entries.required_number(&scale_key)?;
    let omega = entries.frequency(&omega_key, f)?;
    match entries.get(&kind_key).unwrap_or("tanh") {
        "tanh" => {
            let omega = omega.ok_or_else(|| Error::config(&omega_key, "missing required key"))?;
            Ok(FunnelSpec::scaled_tanh(scale, omega))
        }
        "constant" => {
            if omega.is_some() {
                return Err(Error::config(&omega_key, "not used by a constant funnel"));
            }
            Ok(FunnelSpec::constant(scale))
        }
        other => Err(Error::config(kind_key, format!("expected `tanh` or `constant`, got `{other}`"))),
    }
}

fn read_table(path: &Path) -> Result<Vec<[f64; 3]>> {
    let key = "initial.table";
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("zeta")) {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::config(key, format!("{}:{}: {e}", path.display(), i + 1)))?;
        let row: [f64; 3] = fields
            .try_into()
            .map_err(|_| Error::config(key, format!("{}:{}: expected 3 columns", path.display(), i + 1)))?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::config(key, format!("{}:{}: non-finite entry", path.display(), i + 1)));
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(Error::config(key, "table needs at least two rows"));
    }
    if rows.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(Error::config(key, "zeta column must be strictly increasing"));
    }
    let (lo, hi) = (rows[0][0], rows[rows.len() - 1][0]);
    if lo > 0.0 || hi < 1.0 {
        return Err(Error::config(key, format!("table covers [{lo}, {hi}], must cover [0, 1]")));
    }
    Ok(rows)
}

/// Parses config text and runs every pre-run validation.
pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
    let e = Entries::parse(text)?;

    let model = match e.required("model")? {
        "linear" => ModelSelection::Linear,
        "nonlinear" => ModelSelection::Nonlinear,
        "both" => ModelSelection::Both,
        other => {
            return Err(Error::config(
                "model",
                format!("expected linear, nonlinear or both, got `{other}`"),
            ))
        }
    };

    let params = PhysicalParams::new(
        e.required_number("params.m")?,
        e.required_number("params.h0")?,
        e.required_number("params.g")?,
        e.required_number("params.mu")?,
        e.number("params.c_d")?.unwrap_or(0.0),
        e.number("params.c_s")?.unwrap_or(0.0),
    )?;
    let f = params.frequency();

    match e.get("reference.kind").unwrap_or("tanh_squared") {
        "tanh_squared" => {}
        other => return Err(Error::config("reference.kind", format!("expected `tanh_squared`, got `{other}`"))),
    }
    let omega = e
        .frequency("reference.omega", f)?
        .ok_or_else(|| Error::config("reference.omega", "missing required key"))?;
    let reference = ReferenceSignal::tanh_squared(omega)?;

    let phi0 = funnel(&e, "funnel0", f)?;
    let phi1 = funnel(&e, "funnel1", f)?;

    let amplitude = e.number("initial.amplitude")?;
    let table = e.get("initial.table");
    let initial = match e.get("initial.profile").unwrap_or("flat") {
        "paper-sine" => {
            if table.is_some() {
                return Err(Error::config("initial.table", "only used with profile `table`"));
            }
            InitialProfile::PaperSine {
                amplitude: amplitude.ok_or_else(|| Error::config("initial.amplitude", "missing required key"))?,
            }
        }
        "flat" => {
            if amplitude.is_some() || table.is_some() {
                return Err(Error::config("initial.profile", "`flat` takes no amplitude or table"));
            }
            InitialProfile::Flat
        }
        "table" => {
            if amplitude.is_some() {
                return Err(Error::config("initial.amplitude", "only used with profile `paper-sine`"));
            }
            let rel = table.ok_or_else(|| Error::config("initial.table", "missing required key"))?;
            let path = base_dir.join(rel);
            let rows = read_table(&path)?;
            InitialProfile::Table { path, rows }
        }
        other => {
            return Err(Error::config(
                "initial.profile",
                format!("expected paper-sine, flat or table, got `{other}`"),
            ))
        }
    };

    let cart0 = CartState::new(e.number("cart.y0")?.unwrap_or(0.0), e.number("cart.y1")?.unwrap_or(0.0));

    let time_points = e
        .count("grid.time_points")?
        .ok_or_else(|| Error::config("grid.time_points", "missing required key"))?;
    let space_points = e.count("grid.space_points")?;
    let horizon = match (e.number("grid.horizon")?, e.number("grid.horizon_tau")?) {
        (Some(_), Some(_)) => {
            return Err(Error::config("grid.horizon", "give either `grid.horizon` or `grid.horizon_tau`, not both"))
        }
        (Some(h), None) => h,
        (None, Some(k)) => k * params.tau(),
        (None, None) => return Err(Error::config("grid.horizon", "missing required key")),
    };
    if !(horizon > 0.0) {
        return Err(Error::config("grid.horizon", format!("must be > 0, got {horizon}")));
    }

    let output_dir = PathBuf::from(e.get("output.dir").unwrap_or("out"));
    let snapshots = match (e.count("output.snapshots")?, e.get("output.snapshot_times")) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "output.snapshots",
                "give either `output.snapshots` or `output.snapshot_times`, not both",
            ))
        }
        (Some(n), None) => SnapshotSpec::Count(n),
        (None, Some(list)) => {
            let times = list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|err| Error::config("output.snapshot_times", err.to_string()))?;
            if times.iter().any(|t| !(t.is_finite() && *t >= 0.0 && *t <= horizon)) {
                return Err(Error::config("output.snapshot_times", format!("times must lie in [0, {horizon}]")));
            }
            SnapshotSpec::Times(times)
        }
        (None, None) => SnapshotSpec::Count(10),
    };

    let cfg = ExperimentConfig {
        model,
        params,
        reference,
        phi0,
        phi1,
        initial,
        cart0,
        time_points,
        space_points,
        horizon,
        output_dir,
        snapshots,
    };
    cfg.to_closed_loop_config()?.validate()?;
    Ok(cfg)
}

/// `dt = T / (M - 1)` and `N = floor(M / (4 c tau))` nodes on the unit tank,
/// unless the node count is given explicitly.
pub fn derive_grids(cfg: &ExperimentConfig) -> Result<(f64, SpatialGrid)> {
    let m = cfg.time_points;
    if m < 2 {
        return Err(Error::config("grid.time_points", format!("need M >= 2, got {m}")));
    }
    let p = &cfg.params;
    let dt = cfg.horizon / (m - 1) as f64;
    let n = match cfg.space_points {
        Some(n) => n,
        None => {
            let exact = m as f64 / (4.0 * p.wave_speed() * p.tau());
            // c tau = h0, so the quotient is often an integer up to rounding
            (exact * (1.0 + 1e-12)).floor() as usize
        }
    };
    if n < 3 {
        return Err(Error::config(
            "grid.time_points",
            format!("derived spatial grid has {n} nodes, need at least 3"),
        ));
    }
    let grid = SpatialGrid::new(n)?;
    let courant = p.wave_speed() * dt / grid.spacing() + p.mu() * dt;
    if courant > LinearStepConfig::COURANT_LIMIT {
        let rate = p.wave_speed() / grid.spacing() + p.mu();
        let suggested_m = (cfg.horizon * rate / LinearStepConfig::COURANT_LIMIT).ceil() as usize + 1;
        return Err(Error::GridCfl {
            courant,
            limit: LinearStepConfig::COURANT_LIMIT,
            suggested_m,
        });
    }
    Ok((dt, grid))
}

impl ExperimentConfig {
    /// Snapshot times in seconds.
    pub fn snapshot_times(&self) -> Vec<f64> {
        match &self.snapshots {
            SnapshotSpec::Count(n) => (1..=*n).map(|k| self.horizon * k as f64 / *n as f64).collect(),
            SnapshotSpec::Times(t) => t.clone(),
        }
    }

    pub fn to_closed_loop_config(&self) -> Result<ClosedLoopConfig> {
        let (dt, grid) = derive_grids(self)?;
        Ok(ClosedLoopConfig {
            params: self.params,
            grid,
            dt,
            steps: self.time_points - 1,
            reference: self.reference,
            phi0: self.phi0,
            phi1: self.phi1,
            cart0: self.cart0,
            initial: self.initial.sample(&self.params, &grid),
            snapshot_times: self.snapshot_times(),
        })
    }
}
