//! TOML configuration for `seqrac simulate`.
//!
//! ```toml
//! omega = 0.3          # or "auto" together with epsilon and n
//! r = 1.0
//! lambdas = [0.5, 0.8] # explicit unsharpness per receiver, or
//! # epsilon = 1e-4     # derive the schedule from epsilon and n
//! # n = 4
//! shots = 4000000
//! seed = 1
//! ```

use serde::{Deserialize, Serialize};

use seqrac::schedule::{find_omega, float, lambda_sequence, DEFAULT_EPSILON};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub omega: Angle,
    #[serde(default = "default_r")]
    pub r: f64,
    pub lambdas: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub n: Option<usize>,
    pub shots: u64,
    pub seed: u64,
}

fn default_r() -> f64 {
    1.0
}

/// A config with the schedule worked out.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub omega: f64,
    pub r: f64,
    pub lambdas: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Malformed or contradictory settings.
    Invalid(String),
    /// The requested schedule does not give every receiver λ ∈ (0, 1) with an advantage.
    Infeasible(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
            ConfigError::Infeasible(m) => write!(f, "infeasible schedule: {m}"),
        }
    }
}

pub fn parse(text: &str) -> Result<SimulateFile, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
}

impl SimulateFile {
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let invalid = |m: String| ConfigError::Invalid(m);
        let schedule_params = match (self.epsilon, self.n) {
            (None, None) => None,
            (eps, Some(n)) => Some((eps.unwrap_or(DEFAULT_EPSILON), n)),
            (Some(_), None) => return Err(invalid("epsilon needs n".into())),
        };
        let omega = match (&self.omega, schedule_params) {
            (Angle::Value(w), _) => float(*w),
            (Angle::Keyword(k), Some((eps, n))) if k == "auto" => {
                find_omega(n, self.r, eps).map_err(|e| ConfigError::Infeasible(e.to_string()))?
            }
            (Angle::Keyword(k), _) => return Err(invalid(format!("omega must be a number, or \"auto\" with n set (got {k:?})"))),
        };
        let lambdas = match (&self.lambdas, schedule_params) {
            (Some(_), Some(_)) => return Err(invalid("give either lambdas or epsilon/n, not both".into())),
            (None, None) => return Err(invalid("give lambdas or n".into())),
            (Some(l), None) => l.clone(),
            (None, Some((eps, n))) => {
                let s = lambda_sequence(&omega, self.r, eps, n).map_err(|e| invalid(e.to_string()))?;
                if !s.is_feasible() || !s.all_advantaged() {
                    return Err(ConfigError::Infeasible(format!("receiver {} has no valid unsharpness", s.first_failure().unwrap_or(n))));
                }
                s.lambdas()
            }
        };
        let omega = omega.to_f64();
        if !(omega > 0.0) {
            return Err(ConfigError::Infeasible("the angle underflows double precision; use fewer receivers".into()));
        }
        if lambdas.is_empty() {
            return Err(invalid("at least one receiver is required".into()));
        }
        if self.shots == 0 {
            return Err(invalid("shots must be at least 1".into()));
        }
        Ok(Resolved { omega, r: self.r, lambdas, shots: self.shots, seed: self.seed })
    }
}
