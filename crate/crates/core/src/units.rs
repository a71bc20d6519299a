//! Natural-unit conversions and the laboratory feasibility estimate for the
//! spin protocol.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `ħc` in GeV·cm.
pub const HBAR_C_GEV_CM: f64 = 1.973_269_804e-14;

/// `hc = 2πħc` in GeV·cm.
pub const H_C_GEV_CM: f64 = 2.0 * PI * HBAR_C_GEV_CM;

/// Dipole coupling used for the estimate, in GeV⁻².
pub const REFERENCE_COUPLING_GEV2: f64 = 0.557;

/// Previously published value of `b√v` for that coupling, in cm.
pub const PUBLISHED_B_SQRT_V_CM: f64 = 7.38e-14;

/// GeV⁻¹ (length in natural units) to cm.
pub fn gev_inv_to_cm(x: f64) -> f64 {
    x * HBAR_C_GEV_CM
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub g_gev2: f64,
    pub theta_inf: f64,
    /// `b√v = √(2g/θ_∞)` in GeV⁻¹.
    pub b_sqrt_v_gev_inv: f64,
    /// Same, converted with `ħc`.
    pub b_sqrt_v_cm: f64,
    /// Same, converted with `hc`.
    pub b_sqrt_v_cm_hc: f64,
    pub published_cm: f64,
    /// `published / b_sqrt_v_cm`.
    pub discrepancy: f64,
}

/// `b√v` required for `θ_∞ = 2g/(b²v)` to take the given value.
pub fn feasibility(g_gev2: f64, theta_inf: f64) -> Result<FeasibilityReport> {
    if !(g_gev2 > 0.0 && theta_inf > 0.0 && g_gev2.is_finite() && theta_inf.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "feasibility needs positive g and θ_∞, got {g_gev2}, {theta_inf}"
        )));
    }
    let b_sqrt_v_gev_inv = (2.0 * g_gev2 / theta_inf).sqrt();
    let b_sqrt_v_cm = gev_inv_to_cm(b_sqrt_v_gev_inv);
    Ok(FeasibilityReport {
        g_gev2,
        theta_inf,
        b_sqrt_v_gev_inv,
        b_sqrt_v_cm,
        b_sqrt_v_cm_hc: b_sqrt_v_gev_inv * H_C_GEV_CM,
        published_cm: PUBLISHED_B_SQRT_V_CM,
        discrepancy: PUBLISHED_B_SQRT_V_CM / b_sqrt_v_cm,
    })
}

/// The estimate at the reference coupling and `θ_∞ = π`.
pub fn reference_feasibility() -> FeasibilityReport {
    feasibility(REFERENCE_COUPLING_GEV2, PI).expect("positive reference inputs")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_numbers() {
        let r = reference_feasibility();
        assert!((r.b_sqrt_v_gev_inv - 0.595_471).abs() < 1e-5);
        assert!((r.b_sqrt_v_cm - 1.175e-14).abs() < 1e-17);
        // the published figure is close to the hc conversion, not the ħc one
        assert!((r.discrepancy - 2.0 * PI).abs() < 0.05 * 2.0 * PI);
        assert!((r.b_sqrt_v_cm_hc - r.published_cm).abs() < 0.01 * r.published_cm);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(feasibility(0.0, PI).is_err());
        assert!(feasibility(1.0, f64::NAN).is_err());
    }
}
