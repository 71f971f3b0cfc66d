use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub eps_mach: f64,
    /// Constant in the eigenvector residual test `‖(H − z̃I)x‖ ≤ c·ε·‖H − z̃I‖`.
    pub deflation_factor: f64,
    pub properness_tol: f64,
    pub orth_tol: f64,
    /// Multiple of `ε‖H‖_F` accepted as a deflatable coupling.
    pub deflation_threshold_factor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_mach: EPS,
            deflation_factor: 3.0,
            properness_tol: 1e-14,
            orth_tol: 1e-12,
            deflation_threshold_factor: 100.0,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = [
            self.eps_mach,
            self.deflation_factor,
            self.properness_tol,
            self.orth_tol,
            self.deflation_threshold_factor,
        ]
        .iter()
        .all(|&x| x.is_finite() && x > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(
                "tolerances must be finite and positive".into(),
            ))
        }
    }

    pub fn deflation_threshold(&self, fro: f64) -> f64 {
        self.deflation_threshold_factor * self.eps_mach * fro
    }
}
