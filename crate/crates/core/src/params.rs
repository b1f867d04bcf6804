use crate::error::{Error, Result};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Scatterer strength. The hard-wall case is a symbolic value, never a large
/// float: on-grid spikes destroy conditioning while Dirichlet decomposition of
/// the domain is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    Finite(f64),
    Infinite,
}

impl Sigma {
    pub fn finite(self) -> Option<f64> {
        match self {
            Sigma::Finite(s) => Some(s),
            Sigma::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Sigma::Infinite)
    }

    /// As a float, mapping the hard wall to `f64::INFINITY` (for reporting only).
    pub fn as_f64(self) -> f64 {
        match self {
            Sigma::Finite(s) => s,
            Sigma::Infinite => f64::INFINITY,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if let Sigma::Finite(s) = self {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::domain(format!(
                    "sigma must be >= 0 and finite or the symbolic hard wall, got {s}"
                )));
            }
        }
        Ok(self)
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Finite(s) => write!(f, "{s}"),
            Sigma::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "INF" | "infinite" | "infinity" => Ok(Sigma::Infinite),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::domain(format!("cannot parse sigma from {other:?}")))?;
                Sigma::Finite(v).validate()
            }
        }
    }
}

impl Serialize for Sigma {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sigma::Finite(s) => ser.serialize_f64(*s),
            Sigma::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Sigma {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Sigma;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a nonnegative number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Sigma, E> {
                Sigma::Finite(v).validate().map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Sigma, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Sigma, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Sigma, E> {
                v.parse().map_err(E::custom)
            }
        }
        de.deserialize_any(V)
    }
}

/// The physical parameter triple plus particle number.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModelParams {
    /// Interaction strength (>= 0).
    pub gamma: f64,
    /// Scatterer strength.
    pub sigma: Sigma,
    /// Mean obstacle density.
    pub nu: f64,
    /// Particle number, used only by the depletion-bound formula.
    pub n_particles: u64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::domain(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        self.sigma.validate()?;
        if !self.nu.is_finite() || self.nu < 0.0 {
            return Err(Error::domain(format!("nu must be >= 0, got {}", self.nu)));
        }
        if self.n_particles == 0 {
            return Err(Error::domain("particle number must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Iterative-solver tolerances.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveOpts {
    /// Stop when the successive-iterate energy change (relative to max(1,|E|))
    /// falls below this.
    pub energy_tol: f64,
    /// Required GP-equation residual in the discrete L2 norm.
    pub residual_tol: f64,
    /// Hard cap on total iterations across both solver phases.
    pub max_iter: usize,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts { energy_tol: 1e-10, residual_tol: 1e-6, max_iter: 200_000 }
    }
}

impl SolveOpts {
    pub fn validate(&self) -> Result<()> {
        if !self.energy_tol.is_finite() || self.energy_tol <= 0.0 {
            return Err(Error::domain(format!("energy_tol must be > 0, got {}", self.energy_tol)));
        }
        if !self.residual_tol.is_finite() || self.residual_tol <= 0.0 {
            return Err(Error::domain(format!(
                "residual_tol must be > 0, got {}",
                self.residual_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter must be >= 1".to_string()));
        }
        Ok(())
    }
}
