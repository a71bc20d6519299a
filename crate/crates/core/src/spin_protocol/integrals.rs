use super::quadrature::integrate;
use super::ProtocolParams;
use crate::error::Result;
use crate::C64;

/// Relative accuracy requested from the quadrature route.
pub const QUADRATURE_REL_TOL: f64 = 1e-9;

/// Accumulated couplings up to time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingIntegrals {
    /// `∫ g/r³ dt′`.
    pub theta: f64,
    /// `−3 ∫ (g/r³)(vt′ + ib)²/r² dt′`.
    pub xi: C64,
    /// `Ω = ω(t − t₀)`.
    pub omega_t: f64,
}

fn theta_from_minus_infinity(p: &ProtocolParams, t: f64) -> f64 {
    let (g, b, v) = (p.g, p.b, p.v);
    g * t / (b * b * (b * b + v * v * t * t).sqrt()) + g / (b * b * v)
}

fn xi_from_minus_infinity(p: &ProtocolParams, t: f64) -> C64 {
    let (g, b, v) = (p.g, p.b, p.v);
    let i = C64::i();
    let num = (C64::from(b) - i * (t * v)) * (i * (2.0 * b) - t * v) * g;
    let den = (C64::from(b) + i * (t * v)) * (b * b * v * (b * b + t * t * v * v).sqrt());
    num / den + g / (b * b * v)
}

/// Closed forms for `θ(t)`, `ξ(t)` accumulated from `t → −∞`, with
/// `Ω = ω(t − t₀)` on the configured window start.
pub fn coupling_integrals_closed(p: &ProtocolParams, t: f64) -> CouplingIntegrals {
    CouplingIntegrals {
        theta: theta_from_minus_infinity(p, t),
        xi: xi_from_minus_infinity(p, t),
        omega_t: p.omega * (t - p.t0),
    }
}

/// Closed forms accumulated over the finite interval `[t_start, t]`, i.e.
/// with the lower boundary term kept.
pub fn coupling_integrals_between(p: &ProtocolParams, t_start: f64, t: f64) -> CouplingIntegrals {
    CouplingIntegrals {
        theta: theta_from_minus_infinity(p, t) - theta_from_minus_infinity(p, t_start),
        xi: xi_from_minus_infinity(p, t) - xi_from_minus_infinity(p, t_start),
        omega_t: p.omega * (t - t_start),
    }
}

/// Quadrature of the coupling integrands over `[p.t0, t]`.
pub fn coupling_integrals_numeric(p: &ProtocolParams, t: f64) -> Result<CouplingIntegrals> {
    let (g, b, v) = (p.g, p.b, p.v);
    let coupling = move |s: f64| g / (b * b + v * v * s * s).powf(1.5);
    let theta = integrate(
        |s| C64::new(coupling(s), 0.0),
        p.t0,
        t,
        QUADRATURE_REL_TOL,
        1e-300,
    )?;
    let xi = integrate(
        |s| {
            let w = C64::new(v * s, b);
            -3.0 * coupling(s) * w * w / (v * v * s * s + b * b)
        },
        p.t0,
        t,
        QUADRATURE_REL_TOL,
        1e-300,
    )?;
    Ok(CouplingIntegrals {
        theta: theta.re,
        xi,
        omega_t: p.omega * (t - p.t0),
    })
}
