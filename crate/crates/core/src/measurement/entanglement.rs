use crate::error::{Error, Result};
use crate::quantum_core::{DensityMatrix, PartialTrace, StateVector};

/// Ascending eigenvalues `(k₋, k₊)` of the reduced density matrix of one
/// spin in a two-spin pure state.
///
/// Also checks them against `k± = ½(1 ± √(1 − 4|ψ↑↑ψ↓↓ − ψ↑↓ψ↓↑|²))`. The
/// comparison is made on the squared gap `(k₊ − k₋)² = 1 − 4|c|²`, which
/// stays well conditioned near maximal entanglement where the square root
/// would amplify round-off.
pub fn entanglement_eigenvalues(psi: &StateVector, subsystem: &str) -> Result<(f64, f64)> {
    let factors = psi.basis().factors();
    if factors.len() != 2 || factors.iter().any(|f| f.dim() != 2) {
        return Err(Error::Dimension {
            expected: 4,
            got: psi.dim(),
        });
    }
    let rho = psi.partial_trace(subsystem)?;
    let k = rho.eigenvalues();
    let (k_minus, k_plus) = (k[0], k[1]);

    let c = psi.amp(0) * psi.amp(3) - psi.amp(1) * psi.amp(2);
    let closed_gap2 = 1.0 - 4.0 * c.norm_sqr();
    let gap2 = (k_plus - k_minus).powi(2);
    if (gap2 - closed_gap2).abs() > 1e-10 || (k_plus + k_minus - 1.0).abs() > 1e-10 {
        return Err(Error::Consistency(format!(
            "reduced spectrum ({k_minus}, {k_plus}) disagrees with the determinant form (gap² {closed_gap2})"
        )));
    }
    Ok((k_minus, k_plus))
}

/// `−Σ λ ln λ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(&rho.eigenvalues())
}

/// Entropy of a probability spectrum, with `0·ln 0 = 0`.
pub fn entropy_of(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    // −0.0 for pure states reads badly in reports
    s.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::{BasisLabel, Subsystem};
    use crate::C64;

    fn two_spins() -> BasisLabel {
        BasisLabel::new(vec![Subsystem::spin_half("1"), Subsystem::spin_half("2")]).unwrap()
    }

    #[test]
    fn product_and_bell() {
        let up_up = StateVector::basis_state(two_spins(), 0).unwrap();
        assert_eq!(entanglement_eigenvalues(&up_up, "1").unwrap(), (0.0, 1.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let bell =
            StateVector::new(two_spins(), vec![C64::new(s, 0.), z, z, C64::new(s, 0.)]).unwrap();
        let (km, kp) = entanglement_eigenvalues(&bell, "2").unwrap();
        assert!((km - 0.5).abs() < 1e-15 && (kp - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wrong_dimension() {
        let b = BasisLabel::new(vec![
            Subsystem::spin_half("1"),
            Subsystem::new("2", &["a", "b", "c"]),
        ])
        .unwrap();
        let psi = StateVector::basis_state(b, 0).unwrap();
        assert!(matches!(
            entanglement_eigenvalues(&psi, "1"),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn entropy_values() {
        let up_up = StateVector::basis_state(two_spins(), 0).unwrap();
        assert_eq!(von_neumann_entropy(&DensityMatrix::from_pure(&up_up)), 0.0);
        assert!((entropy_of(&[0.5, 0.5]) - std::f64::consts::LN_2).abs() < 1e-15);
        // round-off negatives are ignored
        assert_eq!(entropy_of(&[0.0, 1.0]), 0.0);
    }

    #[test]
    fn entropy_for_quarter_pi_asymptote() {
        // k = ½(1 ± cos(π/4)), evaluated independently
        let c = (std::f64::consts::PI / 4.0).cos();
        let (a, b) = (0.5 * (1.0 - c), 0.5 * (1.0 + c));
        let expected = -(a * a.ln() + b * b.ln());
        assert!((entropy_of(&[a, b]) - expected).abs() < 1e-15);
        assert!((expected - 0.416_495_530_699_687_5).abs() < 1e-12);
    }
}
