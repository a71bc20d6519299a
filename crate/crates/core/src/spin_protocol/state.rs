use std::f64::consts::PI;

use super::integrals::coupling_integrals_closed;
use super::{spin_basis, ProtocolParams};
use crate::error::{Error, Result};
use crate::quantum_core::StateVector;
use crate::C64;

const SINC_SERIES_BELOW: f64 = 1e-8;

fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_BELOW {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `½(|↑⟩ + e^{iφ₀}|↓⟩)₁ ⊗ (|↑⟩ + |↓⟩)₂`.
pub fn initial_state(p: &ProtocolParams) -> StateVector {
    let e = C64::from_polar(0.5, p.phi0);
    let h = C64::new(0.5, 0.0);
    StateVector::new(spin_basis(), vec![h, h, e, e]).expect("unit norm by construction")
}

/// Closed-form components of `exp(−i∫H)|ψ₀⟩` at time `t`.
///
/// The integrated matrix splits into the `{↑↑, ↓↓}` block, rotating with
/// `Δ_ξ = ¼√(|ξ|² + 4Ω²)` about the common phase `e^{−iθ/4}`, and the
/// `{↑↓, ↓↑}` block, rotating with `Δ_θ = ¼√(θ² + 4Ω²)` about `e^{iθ/4}`.
pub fn analytic_state(p: &ProtocolParams, t: f64) -> Result<StateVector> {
    let c = coupling_integrals_closed(p, t);
    let (th, om, xi) = (c.theta, c.omega_t, c.xi);
    let i = C64::i();
    let ph = C64::from_polar(1.0, p.phi0);
    let d_xi = 0.25 * (xi.norm_sqr() + 4.0 * om * om).sqrt();
    let d_th = 0.25 * (th * th + 4.0 * om * om).sqrt();
    let (cx, sx) = (d_xi.cos(), 0.25 * sinc(d_xi));
    let (ct, st) = (d_th.cos(), 0.25 * sinc(d_th));
    let outer = C64::from_polar(0.5, -th / 4.0);
    let inner = C64::from_polar(0.5, th / 4.0);

    let uu = outer * (cx - i * sx * (2.0 * om + xi.conj() * ph));
    let dd = outer * (ph * cx - i * sx * (xi - 2.0 * om * ph));
    let ud = inner * (ct - i * st * (2.0 * om - th * ph));
    let du = inner * (ph * ct - i * st * (-th - 2.0 * om * ph));

    let amps = vec![uu, ud, du, dd];
    if amps.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (n2 - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n2));
    }
    let amps = amps.into_iter().map(|a| a / n2.sqrt()).collect();
    StateVector::new(spin_basis(), amps)
}

/// Late-time coupling and reduced-state spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEntanglement {
    pub theta_inf: f64,
    pub k_minus: f64,
    pub k_plus: f64,
}

/// `θ_∞ = 2g/(b²v)` and `k = ½(1 ± |cos(θ_∞/2)|)`, ascending.
pub fn asymptotic_entanglement(p: &ProtocolParams) -> AsymptoticEntanglement {
    let theta_inf = p.theta_inf();
    let c = (0.5 * theta_inf).cos().abs();
    AsymptoticEntanglement {
        theta_inf,
        k_minus: 0.5 * (1.0 - c),
        k_plus: 0.5 * (1.0 + c),
    }
}

/// Which geometric parameter is held fixed when tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TuneFor {
    /// Fix the impact parameter, solve for `v`.
    B(f64),
    /// Fix the velocity, solve for `b`.
    V(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub b: f64,
    pub v: f64,
}

/// Solves `2g/(b²v) = (2n+1)π` for the free parameter.
pub fn tune_max_entanglement(g: f64, n: u32, fix: TuneFor) -> Result<Geometry> {
    let target = (2.0 * f64::from(n) + 1.0) * PI;
    let value = match fix {
        TuneFor::B(x) | TuneFor::V(x) => x,
    };
    if !(g.is_finite() && value.is_finite()) {
        return Err(Error::NonFinite);
    }
    if g <= 0.0 || value <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tuning needs g > 0 and a positive fixed value, got g = {g}, value = {value}"
        )));
    }
    Ok(match fix {
        TuneFor::B(b) => Geometry {
            b,
            v: 2.0 * g / (b * b * target),
        },
        TuneFor::V(v) => Geometry {
            b: (2.0 * g / (v * target)).sqrt(),
            v,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::entanglement_eigenvalues;
    use crate::spin_protocol::PARTICLE1;

    fn tuned(phi0: f64) -> ProtocolParams {
        ProtocolParams::new(1.0, 1.0, 2.0 / PI, 2.0, phi0).unwrap()
    }

    #[test]
    fn early_time_is_the_product_state() {
        let p = ProtocolParams::new(0.7, 1.1, 0.3, 0.0, 0.9).unwrap();
        let psi = analytic_state(&p, -1e9).unwrap();
        assert!(psi.max_abs_diff(&initial_state(&p)).unwrap() < 1e-9);
    }

    #[test]
    fn late_time_magnitudes_at_half_turn() {
        for phi0 in [0.0, PI / 3.0, PI] {
            let p = tuned(phi0);
            let psi = analytic_state(&p, 1e9 * p.transit_time()).unwrap();
            for k in 0..4 {
                assert!((psi.amp(k).norm() - 0.5).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn sinc_guard_is_continuous() {
        let x = 1e-9;
        assert!((sinc(x) - 1.0).abs() < 1e-16);
        assert!((sinc(2e-8) - (2e-8f64).sin() / 2e-8).abs() < 1e-16);
        assert_eq!(sinc(0.0), 1.0);
        let p = ProtocolParams {
            g: 0.0,
            omega: 0.0,
            ..tuned(0.4)
        };
        let psi = analytic_state(&p, 3.0).unwrap();
        assert!(psi.max_abs_diff(&initial_state(&p)).unwrap() < 1e-15);
    }

    #[test]
    fn asymptotic_examples() {
        let a = asymptotic_entanglement(&tuned(0.0));
        assert!((a.k_minus - 0.5).abs() < 1e-15 && (a.k_plus - 0.5).abs() < 1e-15);
        let p = ProtocolParams::new(1.0, 1.0, 1.0 / PI, 0.0, 0.0).unwrap();
        let a = asymptotic_entanglement(&p);
        assert!((a.theta_inf - 2.0 * PI).abs() < 1e-14);
        assert!(a.k_minus.abs() < 1e-15 && (a.k_plus - 1.0).abs() < 1e-15);
        let p = ProtocolParams { v: 1.0, ..p };
        let a = asymptotic_entanglement(&p);
        assert_eq!(a.theta_inf, 2.0);
        assert!((a.k_plus - 0.5 * (1.0 + 1f64.cos())).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_matches_evolved_spectrum() {
        // off the maximum the late-time spectrum approaches the closed form
        // as Ω grows; at θ_∞ = π the first-order term vanishes
        for phi0 in [0.0, PI / 3.0, PI, 7.0] {
            let p = tuned(phi0);
            let psi = analytic_state(&p, 1e3 * p.transit_time()).unwrap();
            let (km, kp) = entanglement_eigenvalues(&psi, PARTICLE1).unwrap();
            assert!((km - 0.5).abs() < 1e-6 && (kp - 0.5).abs() < 1e-6);
        }
        for (g, b, v, omega) in [
            (1.0, 1.0, 0.5, 2.0),
            (0.3, 0.8, 0.2, 1.5),
            (2.0, 1.4, 0.9, -3.0),
        ] {
            let p = ProtocolParams::new(g, b, v, omega, 0.2).unwrap();
            let a = asymptotic_entanglement(&p);
            let dev = |t: f64| {
                let psi = analytic_state(&p, t * p.transit_time()).unwrap();
                (entanglement_eigenvalues(&psi, PARTICLE1).unwrap().0 - a.k_minus).abs()
            };
            let (near, far) = (dev(1e3), dev(1e5));
            assert!(near < 1e-3, "{near:e}");
            assert!(far < 0.1 * near + 1e-9, "{near:e} -> {far:e}");
        }
    }

    #[test]
    fn closed_spectrum_needs_the_field_phase() {
        // with ω = 0 the late-time spectrum keeps an O(1) dependence on θ_∞
        // that the field-dominated closed form averages away
        let p = ProtocolParams::new(1.0, 1.0, 0.5, 0.0, 0.0).unwrap();
        let psi = analytic_state(&p, 1e3 * p.transit_time()).unwrap();
        let (km, _) = entanglement_eigenvalues(&psi, PARTICLE1).unwrap();
        assert!((km - asymptotic_entanglement(&p).k_minus).abs() > 0.1);
    }

    #[test]
    fn tuning_examples() {
        let g = tune_max_entanglement(1.0, 0, TuneFor::B(1.0)).unwrap();
        assert!((g.v - 2.0 / PI).abs() < 1e-15);
        let g = tune_max_entanglement(1.0, 0, TuneFor::V(1.0)).unwrap();
        assert!((g.b - (2.0 / PI).sqrt()).abs() < 1e-15);
        let v0 = tune_max_entanglement(1.0, 0, TuneFor::B(1.3)).unwrap().v;
        let v1 = tune_max_entanglement(1.0, 1, TuneFor::B(1.3)).unwrap().v;
        assert!((v0 / v1 - 3.0).abs() < 1e-14);
        assert!(tune_max_entanglement(0.0, 0, TuneFor::B(1.0)).is_err());
        assert!(tune_max_entanglement(1.0, 0, TuneFor::V(-1.0)).is_err());
    }
}
