//! Model parameters of the kicked XY chain.
//!
//! Units: `Omega = hbar = 1` unless overridden; the kick period defaults to `T = 1/16`.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Default kick period.
pub const DEFAULT_PERIOD: f64 = 1.0 / 16.0;

/// Largest chain handled by the dense (full-matrix) path unless capped by
/// [`DENSE_MAX_L_ENV`].
pub const DEFAULT_DENSE_MAX_L: usize = 14;

/// Environment variable that lowers the dense-path limit (useful for CI).
pub const DENSE_MAX_L_ENV: &str = "KICKCHAIN_DENSE_MAX_L";

/// Hard limit for matrix-free propagation (state vector memory).
pub const MATRIX_FREE_MAX_L: usize = 26;

/// Dense-path site limit, honoring [`DENSE_MAX_L_ENV`] when it parses.
pub fn dense_max_l() -> usize {
    std::env::var(DENSE_MAX_L_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .map(|cap| cap.min(DEFAULT_DENSE_MAX_L))
        .unwrap_or(DEFAULT_DENSE_MAX_L)
}

/// One simulation instance: open chain of `l` spins-1/2 with XY coupling `j`,
/// longitudinal field `omega` and quadratic kicks of strength `k` every `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Omega", default = "default_omega")]
    pub omega: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "T", default = "default_period")]
    pub t: f64,
    #[serde(default)]
    pub j0_offset: f64,
}

fn default_omega() -> f64 {
    1.0
}

fn default_period() -> f64 {
    DEFAULT_PERIOD
}

impl ChainConfig {
    /// Chain with `omega = 1`, `t = 1/16` and a centred kick.
    pub fn new(l: usize, j: f64, k: f64) -> Self {
        ChainConfig { l, j, omega: 1.0, k, t: DEFAULT_PERIOD, j0_offset: 0.0 }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_period(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_offset(mut self, j0_offset: f64) -> Self {
        self.j0_offset = j0_offset;
        self
    }

    pub fn with_kick(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::config(format!("L must be >= 2, got {}", self.l)));
        }
        if self.l > MATRIX_FREE_MAX_L {
            return Err(Error::TooLarge { l: self.l, max: MATRIX_FREE_MAX_L, what: "state-vector" });
        }
        let finite = [self.j, self.omega, self.k, self.t, self.j0_offset];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("parameters must be finite"));
        }
        if self.t <= 0.0 {
            return Err(Error::config(format!("T must be > 0, got {}", self.t)));
        }
        if self.k < 0.0 {
            return Err(Error::config(format!("K must be >= 0, got {}", self.k)));
        }
        if self.j < 0.0 {
            return Err(Error::config(format!("J must be >= 0, got {}", self.j)));
        }
        Ok(())
    }

    /// Hilbert-space dimension `2^L`.
    pub fn dim(&self) -> usize {
        1usize << self.l
    }

    /// Kick centre `j0 = (L+1)/2 + j0_offset` (sites are numbered from 1).
    pub fn center(&self) -> f64 {
        (self.l as f64 + 1.0) / 2.0 + self.j0_offset
    }

    /// Per-site kick phases `K T (j - j0)^2` for `j = 1..=L`.
    pub fn kick_coefficients(&self) -> Vec<f64> {
        let j0 = self.center();
        (1..=self.l)
            .map(|site| {
                let d = site as f64 - j0;
                self.k * self.t * d * d
            })
            .collect()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ChainConfig =
            serde_json::from_str(s).map_err(|e| Error::config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_chain_center_site_has_zero_kick() {
        let cfg = ChainConfig::new(11, 1.0, 2.0);
        assert_eq!(cfg.center(), 6.0);
        let kc = cfg.kick_coefficients();
        assert_eq!(kc[5], 0.0);
        assert!((kc[0] - kc[10]).abs() < 1e-15);
        assert!((kc[0] - 2.0 / 16.0 * 25.0).abs() < 1e-14);
    }

    #[test]
    fn offset_shifts_center() {
        let cfg = ChainConfig::new(11, 1.0, 2.0).with_offset(0.01);
        assert!((cfg.center() - 6.01).abs() < 1e-15);
        assert!(cfg.kick_coefficients()[5] > 0.0);
    }

    #[test]
    fn validation_rejects_bad_values() {
        assert!(ChainConfig::new(1, 1.0, 1.0).validate().is_err());
        assert!(ChainConfig::new(4, -1.0, 1.0).validate().is_err());
        assert!(ChainConfig::new(4, 1.0, -0.1).validate().is_err());
        assert!(ChainConfig::new(4, 1.0, 1.0).with_period(0.0).validate().is_err());
        assert!(ChainConfig::new(4, 1.0, 1.0).validate().is_ok());
    }

    #[test]
    fn flat_json_keys() {
        let cfg = ChainConfig::new(8, 0.5, 1.5).with_offset(-0.01);
        let text = cfg.to_json_string();
        for key in ["\"L\"", "\"J\"", "\"Omega\"", "\"K\"", "\"T\"", "\"j0_offset\""] {
            assert!(text.contains(key), "{key} missing in {text}");
        }
        assert_eq!(ChainConfig::from_json_str(&text).unwrap(), cfg);
        let minimal = ChainConfig::from_json_str(r#"{"L": 6, "J": 1.0, "K": 0.5}"#).unwrap();
        assert_eq!(minimal.t, DEFAULT_PERIOD);
        assert_eq!(minimal.omega, 1.0);
        assert!(ChainConfig::from_json_str(r#"{"L": 1, "J": 1.0, "K": 0.5}"#).is_err());
    }
}
