use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alpha::Alpha;
use crate::error::{Error, Result};

/// Redirection rule applied after the initial target is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Uniform over the target's closed neighbourhood: redirect w.p. `d/(d+1)`.
    Qpa,
    /// Redirect to a uniform neighbour with a fixed probability `r`.
    Cr,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Qpa => "qpa",
            Family::Cr => "cr",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qpa" => Ok(Family::Qpa),
            "cr" => Ok(Family::Cr),
            _ => Err(Error::Config(format!("unknown model family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub family: Family,
    pub alpha: Alpha,
    /// Redirection probability; ignored by QPA.
    #[serde(default)]
    pub r: f64,
}

impl ModelParams {
    pub fn qpa(alpha: impl Into<Alpha>) -> Self {
        ModelParams {
            family: Family::Qpa,
            alpha: alpha.into(),
            r: 0.0,
        }
    }

    pub fn cr(alpha: impl Into<Alpha>, r: f64) -> Result<Self> {
        let params = ModelParams {
            family: Family::Cr,
            alpha: alpha.into(),
            r,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if let Alpha::Finite(a) = self.alpha {
            if a.is_nan() {
                return Err(Error::Config("alpha must not be NaN".into()));
            }
        }
        if self.family == Family::Cr && !(0.0..=1.0).contains(&self.r) {
            return Err(Error::Config(format!(
                "redirection probability r = {} is outside [0, 1]",
                self.r
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Qpa => write!(f, "QPA(alpha={})", self.alpha),
            Family::Cr => write!(f, "CR(alpha={}, r={})", self.alpha, self.r),
        }
    }
}
