//! Run configuration: JSON file plus flat dotted-key overrides, validated
//! before any computation starts.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use opwave_core::{
    Basis64, BasisFamily, EvolutionParams64, FrequencyGrid64, Potential64, SpatialGrid64,
    VerifySpec64, C64,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub kind: String,
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    /// gaussian-frame center spacing
    #[serde(default = "default_one", alias = "a")]
    pub spacing: f64,
    /// gaussian-frame width
    #[serde(default = "default_one", alias = "w")]
    pub width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: String,
    #[serde(default)]
    pub depth: Option<f64>,
    #[serde(default, alias = "b")]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub gamma_max: f64,
    pub m: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    /// paper-literal | imaginary-time | real-time, or explicit alpha/beta
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub alpha: Option<[f64; 2]>,
    #[serde(default)]
    pub beta: Option<[f64; 2]>,
    pub t: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_growth_cap")]
    pub growth_cap: f64,
    /// central-difference step for residual checks
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    #[serde(default = "default_seed")]
    pub rng: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub basis: BasisConfig,
    pub potential: PotentialConfig,
    pub grids: GridConfig,
    pub evolution: EvolutionConfig,
    #[serde(default = "default_kernel_config")]
    pub kernel: KernelConfig,
    #[serde(default = "default_seed_config")]
    pub seeds: SeedConfig,
    pub output_dir: String,
}

fn default_n_modes() -> usize {
    8
}
fn default_one() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    1e-6
}
fn default_growth_cap() -> f64 {
    opwave_core::DEFAULT_GROWTH_CAP
}
fn default_fd_step() -> f64 {
    1e-4
}
fn default_seed() -> u64 {
    42
}
fn default_trials() -> usize {
    8
}
fn default_kernel_config() -> KernelConfig {
    KernelConfig {
        epsilon: default_epsilon(),
        growth_cap: default_growth_cap(),
        fd_step: default_fd_step(),
    }
}
fn default_seed_config() -> SeedConfig {
    SeedConfig {
        rng: default_seed(),
        trials: default_trials(),
    }
}

impl RunConfig {
    /// Load a config file and apply `key=value` overrides with dotted paths
    /// (e.g. `grids.n=2048`, `basis.kind=gaussian-frame`).
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("config {} is not valid JSON", path.display()))?;
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        let config: RunConfig = serde_json::from_value(value)
            .with_context(|| format!("config {} failed schema validation", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match self.basis.kind.as_str() {
            "hermite" | "gaussian-frame" => {}
            other => bail!("basis.kind: unknown kind '{other}' (hermite | gaussian-frame)"),
        }
        if self.basis.n_modes < 2 {
            bail!("basis.n_modes: must be >= 2, got {}", self.basis.n_modes);
        }
        match self.potential.kind.as_str() {
            "zero" | "harmonic" => {}
            "finite-well" => {
                let depth = self
                    .potential
                    .depth
                    .ok_or_else(|| anyhow!("potential.depth: required for finite-well"))?;
                if depth >= 0.0 {
                    bail!("potential.depth: must be negative, got {depth}");
                }
                let b = self
                    .potential
                    .half_width
                    .ok_or_else(|| anyhow!("potential.half_width: required for finite-well"))?;
                if b <= 0.0 {
                    bail!("potential.half_width: must be > 0, got {b}");
                }
            }
            "tabulated" => {
                let values = self
                    .potential
                    .values
                    .as_ref()
                    .ok_or_else(|| anyhow!("potential.values: required for tabulated"))?;
                if values.len() != self.grids.n {
                    bail!(
                        "potential.values: length {} does not match grids.n = {}",
                        values.len(),
                        self.grids.n
                    );
                }
            }
            other => bail!(
                "potential.kind: unknown kind '{other}' (zero | harmonic | finite-well | tabulated)"
            ),
        }
        if !self.grids.x_min.is_finite()
            || !self.grids.x_max.is_finite()
            || self.grids.x_min >= self.grids.x_max
        {
            bail!(
                "grids: x_min must be < x_max (finite), got [{}, {}]",
                self.grids.x_min,
                self.grids.x_max
            );
        }
        if self.grids.n < 8 || self.grids.m < 8 {
            bail!("grids: n and m must be >= 8, got n={} m={}", self.grids.n, self.grids.m);
        }
        if self.grids.gamma_max <= 0.0 {
            bail!("grids.gamma_max: must be > 0, got {}", self.grids.gamma_max);
        }
        match (&self.evolution.preset, self.evolution.alpha, self.evolution.beta) {
            (Some(p), None, None) => match p.as_str() {
                "paper-literal" | "imaginary-time" | "real-time" => {}
                other => bail!(
                    "evolution.preset: unknown preset '{other}' \
                     (paper-literal | imaginary-time | real-time)"
                ),
            },
            (None, Some(_), Some(_)) => {}
            _ => bail!("evolution: set either preset, or both alpha and beta"),
        }
        if self.evolution.dt <= 0.0 {
            bail!("evolution.dt: must be > 0, got {}", self.evolution.dt);
        }
        if self.evolution.t < 0.0 {
            bail!("evolution.t: must be >= 0, got {}", self.evolution.t);
        }
        let steps = (self.evolution.t / self.evolution.dt).round();
        if steps < 1.0 || (steps * self.evolution.dt - self.evolution.t).abs() > 1e-9 * self.evolution.t.max(1.0)
        {
            bail!(
                "evolution: t = {} is not an integer multiple of dt = {}",
                self.evolution.t,
                self.evolution.dt
            );
        }
        if self.kernel.epsilon <= 0.0 {
            bail!("kernel.epsilon: must be > 0, got {}", self.kernel.epsilon);
        }
        if self.kernel.fd_step <= 0.0 || self.kernel.fd_step > self.evolution.t {
            bail!(
                "kernel.fd_step: must be in (0, t], got {} with t = {}",
                self.kernel.fd_step,
                self.evolution.t
            );
        }
        if self.seeds.trials == 0 {
            bail!("seeds.trials: must be >= 1");
        }
        if self.output_dir.is_empty() {
            bail!("output_dir: must not be empty");
        }
        Ok(())
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid64> {
        Ok(SpatialGrid64::new(self.grids.x_min, self.grids.x_max, self.grids.n)?)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid64> {
        Ok(FrequencyGrid64::new(self.grids.gamma_max, self.grids.m)?)
    }

    pub fn family(&self) -> Result<Basis64> {
        Ok(match self.basis.kind.as_str() {
            "hermite" => BasisFamily::hermite(self.basis.n_modes)?,
            _ => BasisFamily::gaussian_frame(self.basis.n_modes, self.basis.spacing, self.basis.width)?,
        })
    }

    pub fn potential(&self) -> Result<Potential64> {
        Ok(match self.potential.kind.as_str() {
            "zero" => Potential64::Zero,
            "harmonic" => Potential64::Harmonic,
            "finite-well" => Potential64::finite_well(
                self.potential.depth.unwrap(),
                self.potential.half_width.unwrap(),
            )?,
            _ => Potential64::tabulated(
                self.spatial_grid()?,
                self.potential.values.clone().unwrap(),
            )?,
        })
    }

    pub fn evolution_params(&self) -> Result<EvolutionParams64> {
        let nsteps = (self.evolution.t / self.evolution.dt).round() as usize;
        Ok(match self.evolution.preset.as_deref() {
            Some("paper-literal") => EvolutionParams64::paper_literal(self.evolution.dt, nsteps)?,
            Some("imaginary-time") => EvolutionParams64::imaginary_time(self.evolution.dt, nsteps)?,
            Some("real-time") => EvolutionParams64::real_time(self.evolution.dt, nsteps)?,
            _ => {
                let a = self.evolution.alpha.unwrap();
                let b = self.evolution.beta.unwrap();
                EvolutionParams64::new(
                    C64::new(a[0], a[1]),
                    C64::new(b[0], b[1]),
                    self.evolution.dt,
                    nsteps,
                )?
            }
        })
    }

    /// Canonical digest over the config contents (field order is fixed by
    /// the struct definitions, so this is stable across runs).
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let bytes = hasher.finalize();
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn verify_spec(&self) -> Result<VerifySpec64> {
        Ok(VerifySpec64 {
            family: self.family()?,
            potential: self.potential()?,
            sg: self.spatial_grid()?,
            fg: self.frequency_grid()?,
            epsilon: self.kernel.epsilon,
            growth_cap: self.kernel.growth_cap,
            params: self.evolution_params()?,
            trials: self.seeds.trials,
            seed: self.seeds.rng,
            fd_step: self.kernel.fd_step,
            config_digest: self.digest(),
            config_echo: self.echo(),
        })
    }
}

/// Apply one `dotted.key=value` override to a JSON tree. Values parse as
/// JSON scalars when possible and fall back to strings.
pub fn apply_override(root: &mut serde_json::Value, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| anyhow!("override '{item}' is not of the form key=value"))?;
    let parsed: serde_json::Value = match serde_json::from_str(raw) {
        Ok(v) => v,
        Err(_) => serde_json::Value::String(raw.to_string()),
    };
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        if !node.is_object() {
            bail!("override '{key}': '{}' is not an object", parts[..depth].join("."));
        }
        let map = node.as_object_mut().unwrap();
        if depth == parts.len() - 1 {
            map.insert((*part).to_string(), parsed);
            return Ok(());
        }
        node = map
            .entry((*part).to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("override paths have at least one component")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "basis": {"kind": "hermite", "n_modes": 4},
            "potential": {"kind": "harmonic"},
            "grids": {"x_min": -12.0, "x_max": 12.0, "n": 256, "gamma_max": 12.0, "m": 256},
            "evolution": {"preset": "imaginary-time", "t": 0.1, "dt": 0.001},
            "output_dir": "out"
        })
    }

    #[test]
    fn minimal_config_parses_and_validates() {
        let config: RunConfig = serde_json::from_value(minimal_json()).unwrap();
        config.validate().unwrap();
        assert_eq!(config.kernel.epsilon, 1e-6);
        assert_eq!(config.seeds.trials, 8);
        assert_eq!(config.evolution_params().unwrap().nsteps, 100);
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let mut v = minimal_json();
        apply_override(&mut v, "grids.n=512").unwrap();
        apply_override(&mut v, "basis.kind=gaussian-frame").unwrap();
        apply_override(&mut v, "kernel.epsilon=1e-8").unwrap();
        let config: RunConfig = serde_json::from_value(v).unwrap();
        config.validate().unwrap();
        assert_eq!(config.grids.n, 512);
        assert_eq!(config.basis.kind, "gaussian-frame");
        assert_eq!(config.kernel.epsilon, 1e-8);
    }

    #[test]
    fn bad_values_are_rejected_with_field_names() {
        let mut v = minimal_json();
        apply_override(&mut v, "evolution.dt=-1.0").unwrap();
        let config: RunConfig = serde_json::from_value(v).unwrap();
        let err = config.validate().unwrap_err().to_string();
        assert!(err.contains("evolution.dt"), "got: {err}");
    }

    #[test]
    fn non_divisible_time_is_rejected() {
        let mut v = minimal_json();
        apply_override(&mut v, "evolution.t=0.1005").unwrap();
        let config: RunConfig = serde_json::from_value(v).unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a: RunConfig = serde_json::from_value(minimal_json()).unwrap();
        let b: RunConfig = serde_json::from_value(minimal_json()).unwrap();
        assert_eq!(a.digest(), b.digest());
        let mut v = minimal_json();
        apply_override(&mut v, "seeds.rng=7").unwrap();
        let c: RunConfig = serde_json::from_value(v).unwrap();
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v = minimal_json();
        apply_override(&mut v, "grids.bogus=1").unwrap();
        assert!(serde_json::from_value::<RunConfig>(v).is_err());
    }
}
