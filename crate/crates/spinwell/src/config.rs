//! Plain-text run configuration: one `key = value` per line, `#` starts a
//! comment. Every key is optional; [`SimConfig::default`] documents the
//! defaults and `spinwell print-config` prints them in loadable form.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use spinwell_core::initial::{initial_state, InductionInit, MagnetizationInit};
use spinwell_core::{
    AnisotropyPotential, CoeffsH, ForcingF, GalerkinState, InductionSign, ItoCorrection, Model,
    ModelParams, NoiseFamily, Scheme, SimOptions, SpectralBases,
};

use crate::error::{ConfigError, Error, Result};

/// One band-limited forcing coefficient: cosine mode index and its vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingMode {
    pub mode: [usize; 3],
    pub value: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub box_lengths: [f64; 3],
    /// Torus side over box side, per axis the same.
    pub torus_factor: f64,
    pub modes: [usize; 3],
    /// Quadrature nodes per axis; `None` means `4n + 1`.
    pub quad_nodes: Option<[usize; 3]>,
    pub em_wavenumber: [usize; 3],
    pub noise_modes: usize,
    pub noise_amplitude: f64,
    pub noise_decay: f64,
    pub anisotropy_axis: [f64; 3],
    pub anisotropy_strength: f64,
    pub anisotropy_cutoff: f64,
    /// Empty for `f ≡ 0`.
    pub forcing: Vec<ForcingMode>,
    pub final_time: f64,
    pub dt: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub ensemble_size: usize,
    pub initial_m: MagnetizationInit,
    pub initial_b: InductionInit,
    pub em_coupling: bool,
    pub induction_sign: InductionSign,
    pub ito_correction: ItoCorrection,
    pub record_every: usize,
    pub renormalize: bool,
    pub snapshot_every: usize,
    pub check_states: usize,
    pub convergence_levels: usize,
    pub convergence_paths: usize,
    pub output_dir: PathBuf,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lambda1: 1.0,
            lambda2: 0.5,
            box_lengths: [2.0 * PI; 3],
            torus_factor: 2.0,
            modes: [8; 3],
            quad_nodes: None,
            em_wavenumber: [8; 3],
            noise_modes: 8,
            noise_amplitude: 0.1,
            noise_decay: 2.0,
            anisotropy_axis: [0.0, 0.0, 1.0],
            anisotropy_strength: 0.5,
            anisotropy_cutoff: 10.0,
            forcing: Vec::new(),
            final_time: 1.0,
            dt: 0.01,
            seed: 0,
            scheme: Scheme::Heun,
            ensemble_size: 64,
            initial_m: MagnetizationInit::Wall,
            initial_b: InductionInit::CurlMode { amplitude: 0.1 },
            em_coupling: true,
            induction_sign: InductionSign::Galerkin,
            ito_correction: ItoCorrection::ChainRule,
            record_every: 1,
            renormalize: false,
            snapshot_every: 0,
            check_states: 8,
            convergence_levels: 4,
            convergence_paths: 2,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Keys in print order, with their documentation.
pub const KEYS: &[(&str, &str)] = &[
    ("lambda1", "precession coefficient"),
    ("lambda2", "damping coefficient, must be > 0"),
    ("box_lengths", "side lengths of the magnetic body D (one value or three)"),
    ("torus_factor", "torus side / box side, > 1; factor x quad nodes must be an integer"),
    ("modes", "cosine modes per axis of the magnetization"),
    ("quad_nodes", "quadrature nodes per axis, or `auto` for 4n+1"),
    ("em_wavenumber", "largest Fourier wavenumber per axis of B and E"),
    ("noise_modes", "number J of noise directions"),
    ("noise_amplitude", "sigma in h_j = sigma j^-decay e_kj"),
    ("noise_decay", "decay exponent of the noise amplitudes"),
    ("anisotropy_axis", "easy axis a"),
    ("anisotropy_strength", "K in phi(m) = K(1 - (m.a)^2) near the sphere"),
    ("anisotropy_cutoff", "radius beyond which phi vanishes"),
    ("forcing", "`zero` or `i,j,k:fx,fy,fz; ...` constant cosine coefficients of f"),
    ("final_time", "end time T"),
    ("dt", "time step; T/dt must be an integer"),
    ("seed", "master seed of the Brownian paths"),
    ("scheme", "`heun` (Stratonovich) or `em-ito` (Euler-Maruyama, Ito form)"),
    ("ensemble_size", "paths in an ensemble, >= 2"),
    ("initial_m", "`wall` or `constant:x,y,z`"),
    ("initial_b", "`zero` or `curl:amplitude` (divergence-free low mode)"),
    ("em_coupling", "couple to Maxwell's equations"),
    ("induction_sign", "`galerkin` (dB = -curl E) or `stated` (dB = +curl E, comparison only)"),
    ("ito_correction", "`chain-rule` or `stated` five-term form"),
    ("record_every", "steps between trajectory rows"),
    ("renormalize", "renormalize |M| = 1 at the nodes after each step (comparison only)"),
    ("snapshot_every", "steps between snapshots; 0 writes only the initial and final state"),
    ("check_states", "random states examined by `check`"),
    ("convergence_levels", "dt halvings (and ladder rungs) in `convergence`"),
    ("convergence_paths", "Brownian paths averaged in `convergence`"),
    ("output_dir", "directory for CSV and snapshot output"),
];

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("expected a number, got `{v}`"))
}

fn parse_usize(v: &str) -> std::result::Result<usize, String> {
    v.parse::<usize>()
        .map_err(|_| format!("expected a nonnegative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

/// One value for all axes, or three comma-separated values.
fn parse_axes<T: Copy>(
    v: &str,
    one: impl Fn(&str) -> std::result::Result<T, String>,
) -> std::result::Result<[T; 3], String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a] => Ok([one(a)?; 3]),
        [a, b, c] => Ok([one(a)?, one(b)?, one(c)?]),
        _ => Err(format!("expected one or three comma-separated values, got `{v}`")),
    }
}

fn parse_vec3(v: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b, c] => Ok([parse_f64(a)?, parse_f64(b)?, parse_f64(c)?]),
        _ => Err(format!("expected three comma-separated numbers, got `{v}`")),
    }
}

fn parse_forcing(v: &str) -> std::result::Result<Vec<ForcingMode>, String> {
    if v == "zero" {
        return Ok(Vec::new());
    }
    v.split(';')
        .map(str::trim)
        .filter(|e| !e.is_empty())
        .map(|entry| {
            let (mode, value) = entry
                .split_once(':')
                .ok_or_else(|| format!("forcing entry `{entry}` is not `i,j,k:fx,fy,fz`"))?;
            let idx: Vec<&str> = mode.split(',').map(str::trim).collect();
            let mode = match idx.as_slice() {
                [a, b, c] => [parse_usize(a)?, parse_usize(b)?, parse_usize(c)?],
                _ => return Err(format!("forcing mode `{mode}` needs three indices")),
            };
            Ok(ForcingMode {
                mode,
                value: parse_vec3(value)?,
            })
        })
        .collect()
}

fn fmt_axes<T: std::fmt::Display + PartialEq>(v: &[T; 3]) -> String {
    if v[0] == v[1] && v[1] == v[2] {
        v[0].to_string()
    } else {
        format!("{},{},{}", v[0], v[1], v[2])
    }
}

fn fmt_vec3(v: &[f64; 3]) -> String {
    format!("{},{},{}", v[0], v[1], v[2])
}

impl SimConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), SetError> {
        let bad = SetError::Value;
        match key {
            "lambda1" => self.lambda1 = parse_f64(v).map_err(bad)?,
            "lambda2" => self.lambda2 = parse_f64(v).map_err(bad)?,
            "box_lengths" => self.box_lengths = parse_axes(v, parse_f64).map_err(bad)?,
            "torus_factor" => self.torus_factor = parse_f64(v).map_err(bad)?,
            "modes" => self.modes = parse_axes(v, parse_usize).map_err(bad)?,
            "quad_nodes" => {
                self.quad_nodes = match v {
                    "auto" => None,
                    _ => Some(parse_axes(v, parse_usize).map_err(bad)?),
                }
            }
            "em_wavenumber" => self.em_wavenumber = parse_axes(v, parse_usize).map_err(bad)?,
            "noise_modes" => self.noise_modes = parse_usize(v).map_err(bad)?,
            "noise_amplitude" => self.noise_amplitude = parse_f64(v).map_err(bad)?,
            "noise_decay" => self.noise_decay = parse_f64(v).map_err(bad)?,
            "anisotropy_axis" => self.anisotropy_axis = parse_vec3(v).map_err(bad)?,
            "anisotropy_strength" => self.anisotropy_strength = parse_f64(v).map_err(bad)?,
            "anisotropy_cutoff" => self.anisotropy_cutoff = parse_f64(v).map_err(bad)?,
            "forcing" => self.forcing = parse_forcing(v).map_err(bad)?,
            "final_time" => self.final_time = parse_f64(v).map_err(bad)?,
            "dt" => self.dt = parse_f64(v).map_err(bad)?,
            "seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| SetError::Value(format!("expected a 64-bit seed, got `{v}`")))?
            }
            "scheme" => {
                self.scheme = match v {
                    "heun" => Scheme::Heun,
                    "em-ito" => Scheme::EulerMaruyama,
                    _ => return Err(bad(format!("expected heun or em-ito, got `{v}`"))),
                }
            }
            "ensemble_size" => self.ensemble_size = parse_usize(v).map_err(bad)?,
            "initial_m" => {
                self.initial_m = match v.split_once(':') {
                    None if v == "wall" => MagnetizationInit::Wall,
                    Some(("constant", d)) => MagnetizationInit::Constant(parse_vec3(d).map_err(bad)?),
                    _ => return Err(bad(format!("expected wall or constant:x,y,z, got `{v}`"))),
                }
            }
            "initial_b" => {
                self.initial_b = match v.split_once(':') {
                    None if v == "zero" => InductionInit::Zero,
                    Some(("curl", a)) => InductionInit::CurlMode {
                        amplitude: parse_f64(a).map_err(bad)?,
                    },
                    _ => return Err(bad(format!("expected zero or curl:amplitude, got `{v}`"))),
                }
            }
            "em_coupling" => self.em_coupling = parse_bool(v).map_err(bad)?,
            "induction_sign" => {
                self.induction_sign = match v {
                    "galerkin" => InductionSign::Galerkin,
                    "stated" => InductionSign::Stated,
                    _ => return Err(bad(format!("expected galerkin or stated, got `{v}`"))),
                }
            }
            "ito_correction" => {
                self.ito_correction = match v {
                    "chain-rule" => ItoCorrection::ChainRule,
                    "stated" => ItoCorrection::Stated,
                    _ => return Err(bad(format!("expected chain-rule or stated, got `{v}`"))),
                }
            }
            "record_every" => self.record_every = parse_usize(v).map_err(bad)?,
            "renormalize" => self.renormalize = parse_bool(v).map_err(bad)?,
            "snapshot_every" => self.snapshot_every = parse_usize(v).map_err(bad)?,
            "check_states" => self.check_states = parse_usize(v).map_err(bad)?,
            "convergence_levels" => self.convergence_levels = parse_usize(v).map_err(bad)?,
            "convergence_paths" => self.convergence_paths = parse_usize(v).map_err(bad)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            _ => return Err(SetError::UnknownKey),
        }
        Ok(())
    }

    /// Text form of one key, as accepted by [`SimConfig::set`].
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "lambda1" => self.lambda1.to_string(),
            "lambda2" => self.lambda2.to_string(),
            "box_lengths" => fmt_axes(&self.box_lengths),
            "torus_factor" => self.torus_factor.to_string(),
            "modes" => fmt_axes(&self.modes),
            "quad_nodes" => self.quad_nodes.as_ref().map_or("auto".into(), fmt_axes),
            "em_wavenumber" => fmt_axes(&self.em_wavenumber),
            "noise_modes" => self.noise_modes.to_string(),
            "noise_amplitude" => self.noise_amplitude.to_string(),
            "noise_decay" => self.noise_decay.to_string(),
            "anisotropy_axis" => fmt_vec3(&self.anisotropy_axis),
            "anisotropy_strength" => self.anisotropy_strength.to_string(),
            "anisotropy_cutoff" => self.anisotropy_cutoff.to_string(),
            "forcing" => {
                if self.forcing.is_empty() {
                    "zero".into()
                } else {
                    self.forcing
                        .iter()
                        .map(|f| format!("{}:{}", fmt_axes_plain(&f.mode), fmt_vec3(&f.value)))
                        .collect::<Vec<_>>()
                        .join("; ")
                }
            }
            "final_time" => self.final_time.to_string(),
            "dt" => self.dt.to_string(),
            "seed" => self.seed.to_string(),
            "scheme" => match self.scheme {
                Scheme::Heun => "heun".into(),
                Scheme::EulerMaruyama => "em-ito".into(),
            },
            "ensemble_size" => self.ensemble_size.to_string(),
            "initial_m" => match self.initial_m {
                MagnetizationInit::Wall => "wall".into(),
                MagnetizationInit::Constant(a) => format!("constant:{}", fmt_vec3(&a)),
            },
            "initial_b" => match self.initial_b {
                InductionInit::Zero => "zero".into(),
                InductionInit::CurlMode { amplitude } => format!("curl:{amplitude}"),
            },
            "em_coupling" => self.em_coupling.to_string(),
            "induction_sign" => match self.induction_sign {
                InductionSign::Galerkin => "galerkin".into(),
                InductionSign::Stated => "stated".into(),
            },
            "ito_correction" => match self.ito_correction {
                ItoCorrection::ChainRule => "chain-rule".into(),
                ItoCorrection::Stated => "stated".into(),
            },
            "record_every" => self.record_every.to_string(),
            "renormalize" => self.renormalize.to_string(),
            "snapshot_every" => self.snapshot_every.to_string(),
            "check_states" => self.check_states.to_string(),
            "convergence_levels" => self.convergence_levels.to_string(),
            "convergence_paths" => self.convergence_paths.to_string(),
            "output_dir" => self.output_dir.display().to_string(),
            _ => return None,
        })
    }

    /// Parses configuration text on top of the current values. `origin`
    /// names the source in error messages.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> std::result::Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                origin: origin.into(),
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            self.apply_pair(key.trim(), value.trim(), origin, line)?;
        }
        Ok(())
    }

    /// Applies `key=value` overrides (command line `--set`).
    pub fn apply_overrides(&mut self, pairs: &[String]) -> std::result::Result<(), ConfigError> {
        for (i, pair) in pairs.iter().enumerate() {
            let (key, value) = pair.split_once('=').ok_or_else(|| ConfigError::Parse {
                origin: "--set".into(),
                line: i + 1,
                message: format!("expected `key=value`, got `{pair}`"),
            })?;
            self.apply_pair(key.trim(), value.trim(), "--set", i + 1)?;
        }
        Ok(())
    }

    fn apply_pair(&mut self, key: &str, value: &str, origin: &str, line: usize) -> std::result::Result<(), ConfigError> {
        self.set(key, value).map_err(|e| match e {
            SetError::UnknownKey => ConfigError::UnknownKey {
                origin: origin.into(),
                line,
                key: key.into(),
            },
            SetError::Value(message) => ConfigError::Parse {
                origin: origin.into(),
                line,
                message: format!("{key}: {message}"),
            },
        })
    }

    /// Defaults, then the file (if any), then the overrides; validated.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut c = SimConfig::default();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            c.apply_text(&text, &p.display().to_string())?;
        }
        c.apply_overrides(overrides)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, doc) in KEYS {
            let _ = writeln!(out, "# {doc}");
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("every listed key has a value"));
        }
        out
    }

    pub fn steps(&self) -> usize {
        (self.final_time / self.dt).round() as usize
    }

    /// `λ_max` of `−Δ` on `H_n`.
    pub fn max_laplace_eigenvalue(&self) -> f64 {
        (0..3)
            .map(|i| {
                let k = PI * self.modes[i].saturating_sub(1) as f64 / self.box_lengths[i];
                k * k
            })
            .sum()
    }

    /// Largest `|κ|` of the curl on `Y_n`.
    pub fn max_curl_frequency(&self) -> f64 {
        (0..3)
            .map(|i| {
                let k = 2.0 * PI * self.em_wavenumber[i] as f64 / (self.torus_factor * self.box_lengths[i]);
                k * k
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Explicit-stepping bound `dt · max(λ_max(|λ₁| + λ₂), |κ|_max)`.
    pub fn stability_number(&self) -> f64 {
        let exch = self.max_laplace_eigenvalue() * (self.lambda1.abs() + self.lambda2);
        let maxwell = if self.em_coupling { self.max_curl_frequency() } else { 0.0 };
        self.dt * exch.max(maxwell)
    }

    // negated comparisons so that NaN fails
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if !(self.lambda2 > 0.0) {
            return invalid(format!(
                "lambda2 = {} violates the standing assumption lambda2 > 0 (the damping must be positive)",
                self.lambda2
            ));
        }
        if !self.lambda1.is_finite() || !self.lambda2.is_finite() {
            return invalid("lambda1 and lambda2 must be finite".into());
        }
        if self.box_lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return invalid(format!("box lengths must be positive, got {:?}", self.box_lengths));
        }
        if !(self.torus_factor > 1.0 && self.torus_factor.is_finite()) {
            return invalid(format!(
                "the torus must strictly contain the box: torus_factor = {} must exceed 1",
                self.torus_factor
            ));
        }
        if self.modes.contains(&0) {
            return invalid("modes must be at least 1 per axis".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return invalid(format!("dt and final_time must be positive, got {} and {}", self.dt, self.final_time));
        }
        let ratio = self.final_time / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return invalid(format!("final_time / dt = {ratio} is not an integer"));
        }
        if self.record_every == 0 {
            return invalid("record_every must be at least 1".into());
        }
        if !(self.noise_amplitude.is_finite() && self.noise_decay.is_finite()) {
            return invalid("noise amplitude and decay must be finite".into());
        }
        let s = self.stability_number();
        if s > 2.0 {
            return invalid(format!(
                "dt = {} is too large for the explicit steppers: dt * max(lambda_max (|lambda1| + lambda2), |kappa|_max) = {s:.3} > 2",
                self.dt
            ));
        }
        Ok(())
    }

    pub fn bases(&self) -> Result<SpectralBases> {
        let nodes = self.quad_nodes.unwrap_or(self.modes.map(|n| 4 * n + 1));
        Ok(SpectralBases::build(
            self.box_lengths,
            self.modes,
            nodes,
            self.torus_factor,
            self.em_wavenumber,
        )?)
    }

    pub fn forcing_coeffs(&self, bases: &SpectralBases) -> Result<ForcingF> {
        if self.forcing.is_empty() {
            return Ok(ForcingF::zero());
        }
        let mut c: CoeffsH = bases.mag.zeros();
        for f in &self.forcing {
            let k = bases.mag.mode_index(f.mode).ok_or_else(|| {
                ConfigError::Invalid(format!("forcing mode {:?} is outside the basis", f.mode))
            })?;
            c.as_mut_slice()[k] = f.value;
        }
        Ok(ForcingF::constant(c, self.final_time))
    }

    pub fn model(&self) -> Result<Model> {
        let bases = self.bases()?;
        let noise = NoiseFamily::lowest_modes(&bases.mag, self.noise_modes, self.noise_amplitude, self.noise_decay)?;
        let forcing = self.forcing_coeffs(&bases)?;
        let anisotropy = AnisotropyPotential::new(self.anisotropy_axis, self.anisotropy_strength, self.anisotropy_cutoff)?;
        let params = ModelParams {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            em_coupling: self.em_coupling,
            induction_sign: self.induction_sign,
            correction: self.ito_correction,
        };
        Ok(Model::new(bases, anisotropy, noise, forcing, params)?)
    }

    pub fn initial_state(&self, bases: &SpectralBases) -> Result<GalerkinState> {
        Ok(initial_state(bases, self.initial_m, self.initial_b)?)
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            scheme: self.scheme,
            dt: self.dt,
            steps: self.steps(),
            record_every: self.record_every,
            renormalize: self.renormalize,
            row_identities: true,
            ..SimOptions::default()
        }
    }
}

fn fmt_axes_plain(v: &[usize; 3]) -> String {
    format!("{},{},{}", v[0], v[1], v[2])
}

#[derive(Debug)]
pub enum SetError {
    UnknownKey,
    Value(String),
}
