//! Run configuration: which torus to build, at what resolution, and where to
//! write the artifacts. Configs load from JSON (`"schema": 1`) and individual
//! command-line flags override single fields.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use bonnet_core::{Error, Result};

/// What kind of sweep profile drives the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Profile on the spherical curve solved from (δ, s₁, s₂) so the torus
    /// closes with the requested symmetry.
    Spherical,
    /// Fixed three-coefficient harmonic profile (no solving).
    Fourier,
    /// Discrete net pipeline: sample a spherical-mode torus and optimize it.
    Discrete,
}

/// Coefficients of the three-term harmonic profile: constant, first and
/// second harmonic weights.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProfileCoeffs {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed closure residual relative to diameter.
    #[serde(default = "default_closure_tol")]
    pub closure: f64,
    /// Allowed quad-closure defect for discrete edge fields.
    #[serde(default = "default_quad_tol")]
    pub quad: f64,
}

fn default_closure_tol() -> f64 {
    1e-5
}

fn default_quad_tol() -> f64 {
    1e-10
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { closure: default_closure_tol(), quad: default_quad_tol() }
    }
}

fn default_schema() -> u32 {
    1
}

fn default_epsilon() -> f64 {
    1.0
}

fn default_nu() -> usize {
    64
}

fn default_nv() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    /// Imaginary part of the lattice modulus τ = ½ + iλ.
    pub lambda: f64,
    pub mode: Mode,
    /// k-fold symmetry target: monodromy angle 2π/k.
    #[serde(default)]
    pub symmetry: Option<u32>,
    /// Rotation-angle target as a rational multiple [p, q] of π, an
    /// alternative to `symmetry` (k-fold symmetry is [2, k]).
    #[serde(default)]
    pub theta_target: Option<[u32; 2]>,
    /// First pole parameter of the spherical profile.
    #[serde(default)]
    pub s1: Option<f64>,
    /// Harmonic profile coefficients (fourier mode).
    #[serde(default)]
    pub profile: Option<ProfileCoeffs>,
    /// Offset parameter ε of the pair.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Grid points around the planar curves.
    #[serde(default = "default_nu")]
    pub nu: usize,
    /// Grid points along the sweep (over all symmetry periods).
    #[serde(default = "default_nv")]
    pub nv: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Baseline used when no config file is given; `lambda` is a placeholder
    /// that [`RunConfig::validate`] rejects unless overridden.
    pub fn template() -> Self {
        RunConfig {
            schema: 1,
            lambda: f64::NAN,
            mode: Mode::Spherical,
            symmetry: None,
            theta_target: None,
            s1: None,
            profile: None,
            epsilon: default_epsilon(),
            nu: default_nu(),
            nv: default_nv(),
            out_dir: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(Error::Domain(format!("unsupported config schema {}", self.schema)));
        }
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(Error::Domain(format!(
                "lattice parameter λ must be positive (set --imtau), got {}",
                self.lambda
            )));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::Domain(format!("epsilon must be finite, got {}", self.epsilon)));
        }
        if self.nu < 8 || self.nv < 8 {
            return Err(Error::Domain(format!(
                "grid must be at least 8×8, got {}×{}",
                self.nu, self.nv
            )));
        }
        match self.mode {
            Mode::Spherical | Mode::Discrete => {
                if self.s1.is_none() {
                    return Err(Error::Domain("spherical profile needs --s1".into()));
                }
                self.theta_target_angle()?;
            }
            Mode::Fourier => {
                if self.profile.is_none() {
                    return Err(Error::Domain(
                        "fourier mode needs --profile c,a,b coefficients".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Target monodromy angle: 2π/k for k-fold symmetry, or pπ/q when given
    /// as a rational multiple of π.
    pub fn theta_target_angle(&self) -> Result<f64> {
        match (self.symmetry, self.theta_target) {
            (Some(k), None) => {
                if k < 2 {
                    return Err(Error::Domain(format!("symmetry must be at least 2, got {k}")));
                }
                Ok(2.0 * std::f64::consts::PI / k as f64)
            }
            (None, Some([p, q])) => {
                if p == 0 || q == 0 {
                    return Err(Error::Domain(format!(
                        "theta target must have positive numerator and denominator, got {p}/{q}"
                    )));
                }
                Ok(p as f64 * std::f64::consts::PI / q as f64)
            }
            (None, None) => {
                Err(Error::Domain("need --symmetry k (or a theta_target in the config)".into()))
            }
            (Some(_), Some(_)) => {
                Err(Error::Domain("give either symmetry or theta_target, not both".into()))
            }
        }
    }
}
