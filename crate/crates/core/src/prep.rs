//! Thermal deviation density matrix and |00⟩ pseudopure preparation.

use crate::error::{Error, Result};
use crate::pulse::{gradient_crush, nutation_scale, selective_pulse, Axis};
use crate::qudit::{conjugate, ComplexMatrix, DEFAULT_TOL};
use crate::spin_system::{SpinSystem, Transition};

/// Traceless Hermitian deviation from the uniform high-temperature state.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationDensityMatrix {
    matrix: ComplexMatrix,
}

impl DeviationDensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let scale = 1.0 + matrix.max_abs();
        let herm = matrix.hermitian_deviation();
        if herm > DEFAULT_TOL * scale {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = matrix.trace().norm();
        if tr > DEFAULT_TOL * scale * matrix.dim() as f64 {
            return Err(Error::InvalidState(format!("trace {tr:.3e} is not zero")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(factor),
        }
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            matrix: conjugate(&self.matrix, u)?,
        })
    }
}

/// Equilibrium deviation ∝ Iz, with unit scale: diag(3, 1, -1, -3)/2 for I = 3/2.
pub fn equilibrium_state(sys: &SpinSystem) -> DeviationDensityMatrix {
    equilibrium_state_scaled(sys, 1.0)
}

pub fn equilibrium_state_scaled(sys: &SpinSystem, scale: f64) -> DeviationDensityMatrix {
    DeviationDensityMatrix::from_matrix_unchecked(sys.operators().iz.scale_real(scale))
}

/// Flip angle that inverts the populations of `t`.
pub fn inversion_angle(sys: &SpinSystem, t: &Transition) -> f64 {
    std::f64::consts::PI / (2.0 * t.ix_element * nutation_scale(sys, t))
}

/// The two selective pulses of the |00⟩ preparation, in time order:
/// inversion of 10↔11, then equilibration of 01↔11 (both about y).
pub fn pseudopure_pulses(sys: &SpinSystem) -> Result<Vec<(Transition, Axis, f64)>> {
    let invert = sys.observable_transition("10", "11")?;
    let equalize = sys.observable_transition("01", "11")?;
    let a = inversion_angle(sys, &invert);
    let b = inversion_angle(sys, &equalize) / 2.0;
    Ok(vec![(invert, Axis::Y, a), (equalize, Axis::Y, b)])
}

/// Selective inversion on 10↔11, equilibration on 01↔11, gradient crush.
/// From diag(3,1,-1,-3)/2 this yields diag(3,-1,-1,-1)/2.
pub fn pseudopure_00(
    sys: &SpinSystem,
    rho_eq: &DeviationDensityMatrix,
) -> Result<DeviationDensityMatrix> {
    if !rho_eq.matrix().is_diagonal(DEFAULT_TOL) {
        return Err(Error::InvalidState(
            "pseudopure preparation expects a diagonal (thermal) starting state".into(),
        ));
    }
    let mut rho = rho_eq.clone();
    for (t, axis, angle) in pseudopure_pulses(sys)? {
        rho = rho.evolve(&selective_pulse(sys, &t, axis, angle)?)?;
    }
    Ok(gradient_crush(&rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::hard_pulse;
    use crate::readout::observable_amplitudes;

    #[test]
    fn equilibrium_ladder() {
        let sys = SpinSystem::default();
        let rho = equilibrium_state(&sys);
        assert_eq!(rho.populations(), vec![1.5, 0.5, -0.5, -1.5]);
        assert_eq!(rho.matrix().trace().norm(), 0.0);
    }

    #[test]
    fn equilibrium_excitation_gives_3_4_3() {
        let sys = SpinSystem::default();
        let rho = equilibrium_state(&sys)
            .evolve(&hard_pulse(&sys, Axis::Y, std::f64::consts::FRAC_PI_2).unwrap())
            .unwrap();
        let amps = observable_amplitudes(&rho, &sys);
        let mags: Vec<f64> = amps.iter().map(|a| a.amplitude.norm()).collect();
        assert!((mags[0] / mags[1] - 0.75).abs() < 1e-12);
        assert!((mags[2] / mags[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn pseudopure_from_equilibrium() {
        let sys = SpinSystem::default();
        let out = pseudopure_00(&sys, &equilibrium_state(&sys)).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.5, -0.5, -0.5, -0.5]);
        assert!(
            out.matrix().approx_eq(&expected, 1e-12),
            "{:?}",
            out.matrix()
        );
        assert!(out.matrix().trace().norm() < 1e-12);
        assert!(out.matrix().is_diagonal(0.0));
        let p = out.populations();
        assert!((p[1] - p[2]).abs() < 1e-12 && (p[2] - p[3]).abs() < 1e-12);
    }

    #[test]
    fn pseudopure_rejects_coherent_input() {
        let sys = SpinSystem::default();
        let rho = equilibrium_state(&sys)
            .evolve(&hard_pulse(&sys, Axis::Y, 0.3).unwrap())
            .unwrap();
        assert!(matches!(
            pseudopure_00(&sys, &rho),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn deviation_matrix_validation() {
        assert!(DeviationDensityMatrix::new(ComplexMatrix::identity(4)).is_err());
        let non_herm = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(DeviationDensityMatrix::new(non_herm).is_err());
        assert!(
            DeviationDensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.5, -0.5])).is_ok()
        );
    }
}
