//! Experiment configuration: JSON schema, bounds and validation.
//!
//! Matrices arrive as nested arrays of ["re", "im"] decimal strings (the
//! same wire format the core types use). Validation errors name the
//! offending field so a bad config can be fixed without reading code.

use std::fmt;

use serde::Deserialize;

use hca_core::{GaussMatrix, GaussVector, HermitianMatrix, SingleCa};

/// Desk-scale bounds: enough for every canned experiment, small enough that
/// dense clock windows stay cheap.
pub const MAX_CLOCKS: usize = 6;
pub const MAX_SINGLE_SLICES: usize = 64;
pub const MAX_MULTI_SLICES: usize = 16;

#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemCfg {
    pub h: GaussMatrix,
}

impl SystemCfg {
    pub fn build(&self, field: &str) -> ConfigResult<SingleCa> {
        let h = HermitianMatrix::new(self.h.clone())
            .map_err(|e| ConfigError::new(format!("{field}.h"), e.to_string()))?;
        Ok(SingleCa::new(h))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCfg {
    pub psi0: GaussVector,
    pub psi1: GaussVector,
}

impl InitialCfg {
    pub fn check_dim(&self, dim: usize, field: &str) -> ConfigResult<()> {
        for (name, v) in [("psi0", &self.psi0), ("psi1", &self.psi1)] {
            if v.dim() != dim {
                return Err(ConfigError::new(
                    format!("{field}.{name}"),
                    format!("expected dimension {dim}, found {}", v.dim()),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCfg {
    /// [re, im] of the mode amplitude.
    pub amplitude: [f64; 2],
    /// Physical angular frequency; per-sample frequency is `omega * l`.
    pub omega: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentCfg {
    /// March the recursion and check the action principle on the result.
    Evolve {
        system: SystemCfg,
        initial: InitialCfg,
        steps: usize,
    },
    /// Correlator conservation for a list of observables (default 1, H, H^2).
    Conserve {
        system: SystemCfg,
        initial: InitialCfg,
        steps: usize,
        #[serde(default)]
        observables: Option<Vec<GaussMatrix>>,
    },
    /// Integer stationarity at random interior sites of a solution.
    Variation {
        system: SystemCfg,
        initial: InitialCfg,
        steps: usize,
        #[serde(default = "default_sites")]
        sites: usize,
        #[serde(default = "default_deltas")]
        deltas: Vec<i64>,
        #[serde(default)]
        seed: u64,
    },
    /// Factorized many-time composition: residual and product witness.
    Compose {
        parts: Vec<SystemCfg>,
        initial: Vec<InitialCfg>,
        window_len: usize,
    },
    /// Shared-clock composite evolution against independent factors.
    Defect {
        parts: Vec<SystemCfg>,
        initial: Vec<InitialCfg>,
        steps: usize,
        #[serde(default)]
        expect_first_nonzero_n: Option<Option<i64>>,
    },
    /// The antisymmetric two-party wave and its entanglement witness.
    Bell {
        system: SystemCfg,
        a: InitialCfg,
        b: InitialCfg,
        window_len: usize,
    },
    /// Sinc reconstruction: round trip and lattice correlator agreement.
    Sample {
        system: SystemCfg,
        initial: InitialCfg,
        steps: usize,
        l: f64,
        #[serde(default)]
        csv: Option<String>,
    },
    /// Deformation-expansion scaling study over a list of scales.
    Scaling {
        modes: Vec<ModeCfg>,
        t: f64,
        l_values: Vec<f64>,
        #[serde(default)]
        csv: Option<String>,
    },
    /// Plane-wave dispersion classification and recursion residuals.
    Dispersion {
        energies: Vec<f64>,
        #[serde(default = "default_dispersion_steps")]
        steps: usize,
    },
}

fn default_sites() -> usize {
    20
}

fn default_deltas() -> Vec<i64> {
    vec![1, 2, 7]
}

fn default_dispersion_steps() -> usize {
    100
}

/// A full experiment file: the experiment plus output location.
#[derive(Debug)]
pub struct ConfigFile {
    pub experiment: ExperimentCfg,
    pub out_dir: String,
}

impl ConfigFile {
    /// Parse a config, peeling the `out_dir` field off before the tagged
    /// experiment payload so unknown experiment fields still get rejected.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let map = value
            .as_object_mut()
            .ok_or_else(|| "config must be a JSON object".to_string())?;
        let out_dir = match map.remove("out_dir") {
            None => "hca-out".to_string(),
            Some(serde_json::Value::String(s)) => s,
            Some(_) => return Err("out_dir: expected a string".into()),
        };
        let experiment: ExperimentCfg = serde_json::from_value(value).map_err(|e| e.to_string())?;
        Ok(ConfigFile {
            experiment,
            out_dir,
        })
    }
}

impl ExperimentCfg {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentCfg::Evolve { .. } => "evolve",
            ExperimentCfg::Conserve { .. } => "conserve",
            ExperimentCfg::Variation { .. } => "variation",
            ExperimentCfg::Compose { .. } => "compose",
            ExperimentCfg::Defect { .. } => "defect",
            ExperimentCfg::Bell { .. } => "bell",
            ExperimentCfg::Sample { .. } => "sample",
            ExperimentCfg::Scaling { .. } => "scaling",
            ExperimentCfg::Dispersion { .. } => "dispersion",
        }
    }

    /// Structural validation with field-named errors. Returns nothing; the
    /// runners re-build domain objects from the validated config.
    pub fn validate(&self) -> ConfigResult<()> {
        match self {
            ExperimentCfg::Evolve {
                system,
                initial,
                steps,
            }
            | ExperimentCfg::Conserve {
                system,
                initial,
                steps,
                ..
            }
            | ExperimentCfg::Variation {
                system,
                initial,
                steps,
                ..
            } => {
                let ca = system.build("system")?;
                initial.check_dim(ca.dim(), "initial")?;
                check_single_window(*steps, "steps")?;
                if let ExperimentCfg::Conserve {
                    observables: Some(obs),
                    ..
                } = self
                {
                    for (i, g) in obs.iter().enumerate() {
                        let field = format!("observables[{i}]");
                        let g = HermitianMatrix::new(g.clone())
                            .map_err(|e| ConfigError::new(field.clone(), e.to_string()))?;
                        if g.dim() != ca.dim() {
                            return Err(ConfigError::new(
                                field,
                                format!("expected dimension {}, found {}", ca.dim(), g.dim()),
                            ));
                        }
                    }
                }
                if let ExperimentCfg::Variation { steps, deltas, .. } = self {
                    if *steps < 1 {
                        return Err(ConfigError::new("steps", "need at least one interior site"));
                    }
                    if deltas.contains(&0) {
                        return Err(ConfigError::new(
                            "deltas",
                            "variation steps must be nonzero",
                        ));
                    }
                }
                Ok(())
            }
            ExperimentCfg::Compose {
                parts,
                initial,
                window_len,
            } => {
                let dims = check_parts(parts, initial)?;
                let _ = dims;
                check_multi_window(parts.len(), *window_len, "window_len")
            }
            ExperimentCfg::Defect {
                parts,
                initial,
                steps,
                ..
            } => {
                check_parts(parts, initial)?;
                check_single_window(*steps, "steps")
            }
            ExperimentCfg::Bell {
                system,
                a,
                b,
                window_len,
            } => {
                let ca = system.build("system")?;
                if ca.dim() != 2 {
                    return Err(ConfigError::new(
                        "system.h",
                        format!("the two-party wave needs dimension 2, found {}", ca.dim()),
                    ));
                }
                a.check_dim(2, "a")?;
                b.check_dim(2, "b")?;
                if *window_len < 4 {
                    return Err(ConfigError::new(
                        "window_len",
                        "need at least 4 slices to reach the (2,2) witness tuple",
                    ));
                }
                check_multi_window(2, *window_len, "window_len")
            }
            ExperimentCfg::Sample {
                system,
                initial,
                steps,
                l,
                ..
            } => {
                let ca = system.build("system")?;
                initial.check_dim(ca.dim(), "initial")?;
                check_single_window(*steps, "steps")?;
                if *steps + 2 <= 2 * hca_core::sampling::RELIABLE_PAD as usize + 2 {
                    return Err(ConfigError::new(
                        "steps",
                        format!(
                            "window of {} slices leaves no reliable interior (padding is {} samples per edge)",
                            steps + 2,
                            hca_core::sampling::RELIABLE_PAD
                        ),
                    ));
                }
                if l.is_nan() || *l <= 0.0 || !l.is_finite() {
                    return Err(ConfigError::new("l", "discreteness scale must be positive"));
                }
                Ok(())
            }
            ExperimentCfg::Scaling {
                modes, l_values, t, ..
            } => {
                if modes.is_empty() {
                    return Err(ConfigError::new("modes", "need at least one mode"));
                }
                if !t.is_finite() {
                    return Err(ConfigError::new("t", "evaluation point must be finite"));
                }
                if l_values.len() < 2 {
                    return Err(ConfigError::new(
                        "l_values",
                        "need at least two scales to fit a slope",
                    ));
                }
                for (i, l) in l_values.iter().enumerate() {
                    if l.is_nan() || *l <= 0.0 || !l.is_finite() {
                        return Err(ConfigError::new(
                            format!("l_values[{i}]"),
                            "scales must be positive",
                        ));
                    }
                    for (j, m) in modes.iter().enumerate() {
                        if (m.omega * l).abs() > std::f64::consts::PI {
                            return Err(ConfigError::new(
                                format!("modes[{j}].omega"),
                                format!(
                                    "per-sample frequency {} exceeds the band limit pi at l = {l}",
                                    m.omega * l
                                ),
                            ));
                        }
                    }
                }
                Ok(())
            }
            ExperimentCfg::Dispersion { energies, steps } => {
                if energies.is_empty() {
                    return Err(ConfigError::new("energies", "need at least one energy"));
                }
                if *steps == 0 {
                    return Err(ConfigError::new("steps", "need at least one step"));
                }
                Ok(())
            }
        }
    }
}

fn check_parts(parts: &[SystemCfg], initial: &[InitialCfg]) -> ConfigResult<Vec<usize>> {
    if parts.is_empty() {
        return Err(ConfigError::new("parts", "need at least one subsystem"));
    }
    if parts.len() > MAX_CLOCKS {
        return Err(ConfigError::new(
            "parts",
            format!(
                "at most {MAX_CLOCKS} clocks are supported, found {}",
                parts.len()
            ),
        ));
    }
    if initial.len() != parts.len() {
        return Err(ConfigError::new(
            "initial",
            format!("expected {} entries, found {}", parts.len(), initial.len()),
        ));
    }
    let mut dims = Vec::with_capacity(parts.len());
    for (k, (p, i)) in parts.iter().zip(initial).enumerate() {
        let ca = p.build(&format!("parts[{k}]"))?;
        i.check_dim(ca.dim(), &format!("initial[{k}]"))?;
        dims.push(ca.dim());
    }
    Ok(dims)
}

fn check_single_window(steps: usize, field: &str) -> ConfigResult<()> {
    if steps + 2 > MAX_SINGLE_SLICES {
        return Err(ConfigError::new(
            field,
            format!(
                "window of {} slices exceeds the single-clock bound of {MAX_SINGLE_SLICES}",
                steps + 2
            ),
        ));
    }
    Ok(())
}

fn check_multi_window(clocks: usize, window_len: usize, field: &str) -> ConfigResult<()> {
    if clocks > MAX_CLOCKS {
        return Err(ConfigError::new(
            field,
            format!("at most {MAX_CLOCKS} clocks are supported"),
        ));
    }
    if window_len < 3 {
        return Err(ConfigError::new(
            field,
            "need at least 3 slices per clock for an interior",
        ));
    }
    if window_len > MAX_MULTI_SLICES {
        return Err(ConfigError::new(
            field,
            format!("at most {MAX_MULTI_SLICES} slices per clock are supported"),
        ));
    }
    Ok(())
}
