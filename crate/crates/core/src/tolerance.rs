use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every module.
///
/// Thresholds tied to a spectrum (`tol_psd`, `tol_rank`, `tol_recon`) are
/// relative to the largest eigenvalue of the operator being examined, so
/// verdicts do not depend on the trace of the input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Largest accepted asymmetry `max|ρ - ρ†|`, relative to `max|ρ_ij|`.
    pub tol_herm: f64,
    /// Eigenvalues below `-tol_psd * λ_max` count as negative.
    pub tol_psd: f64,
    /// Eigenvalues above `tol_rank * λ_max` count towards the rank.
    pub tol_rank: f64,
    pub tol_orth: f64,
    pub tol_recon: f64,
    /// Largest accepted `σ₂/σ₁` of a flattening for a vector to be a product.
    pub tol_product: f64,
    /// `|F|` at or below this vanishes; Plücker coordinates are scaled to
    /// unit mean-square modulus first.
    pub tol_chow: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_herm: 1e-10,
            tol_psd: 1e-9,
            tol_rank: 1e-9,
            tol_orth: 1e-10,
            tol_recon: 1e-10,
            tol_product: 1e-8,
            tol_chow: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tol_herm", self.tol_herm),
            ("tol_psd", self.tol_psd),
            ("tol_rank", self.tol_rank),
            ("tol_orth", self.tol_orth),
            ("tol_recon", self.tol_recon),
            ("tol_product", self.tol_product),
            ("tol_chow", self.tol_chow),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidTolerance(name, v));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_negative_and_nan() {
        let cfg = ToleranceConfig { tol_chow: -1.0, ..Default::default() };
        assert_eq!(cfg.validate(), Err(Error::InvalidTolerance("tol_chow", -1.0)));
        let cfg = ToleranceConfig { tol_rank: f64::NAN, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
