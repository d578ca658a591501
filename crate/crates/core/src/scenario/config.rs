//! Flat key-value (TOML) configuration for single runs and sweeps.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::presets;
use crate::classical::ClassicalState;
use crate::error::{Error, Result};
use crate::fluctuation::{default_initial_covariance, CovarianceMatrix};
use crate::model::SystemParams;
use crate::sync::PhiMode;

pub const DEFAULT_T_END: f64 = 2000.0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_DECIMATE: usize = 100;
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCovariance {
    /// `n_th + 1/2` on the mechanical quadratures, `1/2` on the optical ones.
    #[default]
    Thermal,
    /// `1/2` everywhere.
    Vacuum,
}

impl InitialCovariance {
    pub fn build(&self, params: &SystemParams) -> CovarianceMatrix {
        match self {
            InitialCovariance::Thermal => default_initial_covariance(params),
            InitialCovariance::Vacuum => CovarianceMatrix::vacuum(),
        }
    }
}

/// A fully resolved single-run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub params: SystemParams,
    pub t_end: f64,
    pub dt: f64,
    pub decimate: usize,
    pub initial_state: ClassicalState,
    pub initial_covariance: InitialCovariance,
    pub phi_mode: PhiMode,
    pub window_fraction: f64,
    pub output_dir: PathBuf,
    /// Reserved; the dynamics are deterministic.
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            t_end: DEFAULT_T_END,
            dt: DEFAULT_DT,
            decimate: DEFAULT_DECIMATE,
            initial_state: ClassicalState::default(),
            initial_covariance: InitialCovariance::Thermal,
            phi_mode: PhiMode::ClassicalDifference,
            window_fraction: DEFAULT_WINDOW_FRACTION,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "`t_end` must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "`dt` must be positive, got {}",
                self.dt
            )));
        }
        if self.dt > self.t_end {
            return Err(Error::Config(format!(
                "`dt` ({}) exceeds `t_end` ({})",
                self.dt, self.t_end
            )));
        }
        if self.decimate == 0 {
            return Err(Error::Config("`decimate` must be at least 1".into()));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "`window_fraction` must lie in (0, 1], got {}",
                self.window_fraction
            )));
        }
        if !self.initial_state.is_finite() {
            return Err(Error::Config("`initial_*` values must be finite".into()));
        }
        if let PhiMode::Fixed(phi) = self.phi_mode {
            if !phi.is_finite() {
                return Err(Error::Config(format!("`phi` must be finite, got {phi}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: ScenarioConfig,
    /// One or two swept parameters; two axes are combined as a grid.
    pub axes: Vec<SweepAxis>,
    pub workers: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!(
                "a sweep needs one or two axes, got {}",
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            if SystemParams::default().get(&axis.param).is_none() {
                return Err(Error::Config(format!(
                    "`{}` is not a system parameter",
                    axis.param
                )));
            }
            if axis.values.is_empty() {
                return Err(Error::Config(format!(
                    "no values given for swept parameter `{}`",
                    axis.param
                )));
            }
        }
        if self.workers == 0 {
            return Err(Error::Config("`workers` must be at least 1".into()));
        }
        Ok(())
    }

    /// Every grid point as `(name, value)` assignments, first axis slowest.
    pub fn points(&self) -> Vec<Vec<(String, f64)>> {
        let mut points: Vec<Vec<(String, f64)>> = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push((axis.param.clone(), v));
                        p
                    })
                })
                .collect();
        }
        points
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    Scenario(ScenarioConfig),
    Sweep(SweepConfig),
}

impl Config {
    pub fn output_dir(&self) -> &Path {
        match self {
            Config::Scenario(c) => &c.output_dir,
            Config::Sweep(s) => &s.base.output_dir,
        }
    }

    pub fn set_output_dir(&mut self, dir: PathBuf) {
        match self {
            Config::Scenario(c) => c.output_dir = dir,
            Config::Sweep(s) => s.base.output_dir = dir,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Config::Scenario(c) => c.validate(),
            Config::Sweep(s) => s.validate(),
        }
    }
}

/// The on-disk key set. Every key is optional; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,

    omega1: Option<f64>,
    omega2: Option<f64>,
    delta1: Option<f64>,
    delta2: Option<f64>,
    g1: Option<f64>,
    g2: Option<f64>,
    gamma_m1: Option<f64>,
    gamma_m2: Option<f64>,
    kappa1: Option<f64>,
    kappa2: Option<f64>,
    tunnel_j: Option<f64>,
    chi_c: Option<f64>,
    drive1: Option<f64>,
    drive2: Option<f64>,
    n_th: Option<f64>,

    t_end: Option<f64>,
    dt: Option<f64>,
    decimate: Option<usize>,

    initial_q1s: Option<f64>,
    initial_p1s: Option<f64>,
    initial_re_a1: Option<f64>,
    initial_im_a1: Option<f64>,
    initial_q2s: Option<f64>,
    initial_p2s: Option<f64>,
    initial_re_a2: Option<f64>,
    initial_im_a2: Option<f64>,
    initial_covariance: Option<InitialCovariance>,

    phi_mode: Option<String>,
    phi: Option<f64>,
    window_fraction: Option<f64>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,

    sweep_param: Option<String>,
    sweep_values: Option<Vec<f64>>,
    sweep_param2: Option<String>,
    sweep_values2: Option<Vec<f64>>,
    workers: Option<usize>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<Config> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;

    let mut config = match &raw.preset {
        Some(name) => presets::preset(name)
            .ok_or_else(|| Error::Config(format!("unknown preset `{name}` (key `preset`)")))?,
        None => Config::Scenario(ScenarioConfig::default()),
    };

    let base = match &mut config {
        Config::Scenario(c) => c,
        Config::Sweep(s) => &mut s.base,
    };
    apply_overrides(base, &raw)?;

    let wants_sweep = raw.sweep_param.is_some()
        || raw.sweep_values.is_some()
        || raw.sweep_param2.is_some()
        || raw.sweep_values2.is_some()
        || raw.workers.is_some();
    if wants_sweep {
        let mut sweep = match config {
            Config::Sweep(s) => s,
            Config::Scenario(c) => SweepConfig {
                base: c,
                axes: Vec::new(),
                workers: default_workers(),
            },
        };
        match (&raw.sweep_param, &raw.sweep_values) {
            (Some(p), Some(v)) => set_axis(&mut sweep.axes, 0, p, v),
            (None, None) => {}
            (Some(_), None) => {
                return Err(Error::Config(
                    "`sweep_param` given without `sweep_values`".into(),
                ))
            }
            (None, Some(_)) if sweep.axes.is_empty() => {
                return Err(Error::Config(
                    "`sweep_values` given without `sweep_param`".into(),
                ))
            }
            (None, Some(v)) => sweep.axes[0].values = v.clone(),
        }
        match (&raw.sweep_param2, &raw.sweep_values2) {
            (Some(p), Some(v)) => set_axis(&mut sweep.axes, 1, p, v),
            (None, None) => {}
            (Some(_), None) => {
                return Err(Error::Config(
                    "`sweep_param2` given without `sweep_values2`".into(),
                ))
            }
            (None, Some(_)) => {
                return Err(Error::Config(
                    "`sweep_values2` given without `sweep_param2`".into(),
                ))
            }
        }
        if let Some(w) = raw.workers {
            sweep.workers = w;
        }
        config = Config::Sweep(sweep);
    }
    config.validate()?;
    Ok(config)
}

fn set_axis(axes: &mut Vec<SweepAxis>, slot: usize, param: &str, values: &[f64]) {
    let axis = SweepAxis {
        param: param.to_string(),
        values: values.to_vec(),
    };
    if slot < axes.len() {
        axes[slot] = axis;
    } else {
        axes.push(axis);
    }
}

fn apply_overrides(c: &mut ScenarioConfig, raw: &RawConfig) -> Result<()> {
    let params = [
        ("omega1", raw.omega1),
        ("omega2", raw.omega2),
        ("delta1", raw.delta1),
        ("delta2", raw.delta2),
        ("g1", raw.g1),
        ("g2", raw.g2),
        ("gamma_m1", raw.gamma_m1),
        ("gamma_m2", raw.gamma_m2),
        ("kappa1", raw.kappa1),
        ("kappa2", raw.kappa2),
        ("tunnel_j", raw.tunnel_j),
        ("chi_c", raw.chi_c),
        ("drive1", raw.drive1),
        ("drive2", raw.drive2),
        ("n_th", raw.n_th),
    ];
    for (name, value) in params {
        if let Some(v) = value {
            c.params.set(name, v)?;
        }
    }
    if let Some(v) = raw.t_end {
        c.t_end = v;
    }
    if let Some(v) = raw.dt {
        c.dt = v;
    }
    if let Some(v) = raw.decimate {
        c.decimate = v;
    }

    let mut y = c.initial_state.to_array();
    let initial = [
        raw.initial_q1s,
        raw.initial_p1s,
        raw.initial_re_a1,
        raw.initial_im_a1,
        raw.initial_q2s,
        raw.initial_p2s,
        raw.initial_re_a2,
        raw.initial_im_a2,
    ];
    for (slot, value) in y.iter_mut().zip(initial) {
        if let Some(v) = value {
            *slot = v;
        }
    }
    c.initial_state = ClassicalState::from_array(&y);

    if let Some(v) = raw.initial_covariance {
        c.initial_covariance = v;
    }
    c.phi_mode = match (raw.phi_mode.as_deref(), raw.phi) {
        (None, None) => c.phi_mode,
        (None, Some(phi)) | (Some("fixed"), Some(phi)) => PhiMode::Fixed(phi),
        (Some("fixed"), None) => {
            return Err(Error::Config(
                "`phi_mode = \"fixed\"` requires `phi`".into(),
            ))
        }
        (Some("classical_difference"), None) => PhiMode::ClassicalDifference,
        (Some("per_resonator"), None) => PhiMode::PerResonator,
        (Some(m @ ("classical_difference" | "per_resonator")), Some(_)) => {
            return Err(Error::Config(format!(
                "`phi` cannot be combined with `phi_mode = \"{m}\"`"
            )))
        }
        (Some(other), _) => {
            return Err(Error::Config(format!(
            "`phi_mode` must be one of fixed, classical_difference, per_resonator; got `{other}`"
        )))
        }
    };
    if let Some(v) = raw.window_fraction {
        c.window_fraction = v;
    }
    if let Some(v) = &raw.output_dir {
        c.output_dir = v.clone();
    }
    if let Some(v) = raw.seed {
        c.seed = v;
    }
    Ok(())
}

/// Reads and parses a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Commented listing of every key with its default value.
pub fn defaults_document() -> String {
    let c = ScenarioConfig::default();
    let p = &c.params;
    let mut out = String::new();
    out.push_str("# All rates and drives in units of omega1; time is tau = omega1 * t.\n");
    out.push_str("# Every key is optional. An empty file gives exactly these values.\n\n");
    out.push_str(
        "# preset = \"fig2a\"   # start from a named preset, then apply the keys below\n\n",
    );
    out.push_str("# system parameters\n");
    for name in SystemParams::FIELD_NAMES {
        out.push_str(&format!("{name} = {:?}\n", p.get(name).unwrap()));
    }
    out.push_str("\n# integration\n");
    out.push_str(&format!("t_end = {:?}\n", c.t_end));
    out.push_str(&format!("dt = {:?}\n", c.dt));
    out.push_str(&format!(
        "decimate = {}          # store every n-th step\n",
        c.decimate
    ));
    out.push_str("\n# initial mean values\n");
    for k in [
        "initial_q1s",
        "initial_p1s",
        "initial_re_a1",
        "initial_im_a1",
        "initial_q2s",
        "initial_p2s",
        "initial_re_a2",
        "initial_im_a2",
    ] {
        out.push_str(&format!("{k} = 0.0\n"));
    }
    out.push_str("initial_covariance = \"thermal\"   # or \"vacuum\"\n");
    out.push_str("\n# measures\n");
    out.push_str(
        "phi_mode = \"classical_difference\"   # or \"per_resonator\", or \"fixed\" with phi\n",
    );
    out.push_str("# phi = 0.0\n");
    out.push_str(&format!(
        "window_fraction = {:?}   # trailing steady window\n",
        c.window_fraction
    ));
    out.push_str("\n# output\n");
    out.push_str(&format!(
        "output_dir = {:?}\n",
        c.output_dir.display().to_string()
    ));
    out.push_str("seed = 0   # reserved, unused\n");
    out.push_str("\n# sweeps (any of these keys turns the file into a sweep)\n");
    out.push_str("# sweep_param = \"chi_c\"\n# sweep_values = [0.0, 0.2, 0.4, 0.6]\n");
    out.push_str("# sweep_param2 = \"tunnel_j\"\n# sweep_values2 = [0.0, 0.02]\n");
    out.push_str("# workers = <available cores>\n");
    out
}
