//! Deutsch-Jozsa oracles on the two-qubit spin-3/2 register and the full
//! prepare, encode, query, read-out pipeline.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::prep::{equilibrium_state, inversion_angle, pseudopure_00, DeviationDensityMatrix};
use crate::pulse::{hard_pulse, phase_matched_duration, Axis};
use crate::qudit::{c, ComplexMatrix};
use crate::readout::{acquire, spectrum, AcquisitionParams, Peak, Spectrum, WINDOW_LINEWIDTHS};
use crate::relaxation::RelaxationParams;
use crate::sequence::{run_trajectory, Coupling, Event, SequenceIr, SystemDecl, TransitionRef};
use crate::spin_system::SpinSystem;

/// Nominal length of the Gaussian selective pulses.
pub const SHAPED_PULSE_TARGET_S: f64 = 123e-6;
/// Peaks weaker than this fraction of the strongest make the readout ambiguous.
pub const AMBIGUITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionClass {
    Constant,
    Balanced,
}

impl FunctionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FunctionClass::Constant => "constant",
            FunctionClass::Balanced => "balanced",
        }
    }
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The four one-bit functions: f1 = 0, f2 = 1, f3 = x, f4 = NOT x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleId {
    F1,
    F2,
    F3,
    F4,
}

impl OracleId {
    pub const ALL: [OracleId; 4] = [OracleId::F1, OracleId::F2, OracleId::F3, OracleId::F4];

    pub fn class(self) -> FunctionClass {
        match self {
            OracleId::F1 | OracleId::F2 => FunctionClass::Constant,
            OracleId::F3 | OracleId::F4 => FunctionClass::Balanced,
        }
    }

    /// f(x) for x in {0, 1}.
    pub fn eval(self, x: u8) -> u8 {
        match self {
            OracleId::F1 => 0,
            OracleId::F2 => 1,
            OracleId::F3 => x & 1,
            OracleId::F4 => 1 - (x & 1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OracleId::F1 => "f1",
            OracleId::F2 => "f2",
            OracleId::F3 => "f3",
            OracleId::F4 => "f4",
        }
    }
}

impl fmt::Display for OracleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OracleId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(OracleId::F1),
            "f2" => Ok(OracleId::F2),
            "f3" => Ok(OracleId::F3),
            "f4" => Ok(OracleId::F4),
            other => Err(Error::InvalidArgument(format!(
                "unknown oracle `{other}` (expected f1..f4)"
            ))),
        }
    }
}

/// How the oracle is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// The exact permutation matrix.
    IdealMatrix,
    /// Selective z-pulse cascade for the controlled phase.
    SelectiveZ,
    /// Free quadrupolar evolution for the controlled phase.
    QuadEvolution,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::IdealMatrix,
        Method::SelectiveZ,
        Method::QuadEvolution,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::IdealMatrix => "ideal-matrix",
            Method::SelectiveZ => "selective-z",
            Method::QuadEvolution => "quad-evolution",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal-matrix" => Ok(Method::IdealMatrix),
            "selective-z" => Ok(Method::SelectiveZ),
            "quad-evolution" => Ok(Method::QuadEvolution),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected ideal-matrix, selective-z or quad-evolution)"
            ))),
        }
    }
}

/// U_f |x, y⟩ = |x, y ⊕ f(x)⟩ in the basis (|00⟩, |01⟩, |11⟩, |10⟩).
pub fn oracle_matrix(id: OracleId) -> ComplexMatrix {
    let labels = [(0u8, 0u8), (0, 1), (1, 1), (1, 0)];
    let index = |x: u8, y: u8| {
        labels
            .iter()
            .position(|&l| l == (x, y))
            .expect("two-bit label")
    };
    ComplexMatrix::from_fn(4, |row, col| {
        let (x, y) = labels[col];
        if row == index(x, y ^ id.eval(x)) {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

fn tr(a: &str, b: &str) -> TransitionRef {
    TransitionRef::new(a, b)
}

fn decl_for(sys: &SpinSystem) -> SystemDecl {
    SystemDecl {
        spin: sys.spin(),
        coupling: Some(Coupling::Splitting(sys.splitting_hz())),
        offset_hz: sys.offset_hz(),
    }
}

/// Pulse sequence realizing `id`, listed in time order, with ideal selective pulses.
pub fn oracle_sequence(id: OracleId, method: Method) -> Result<SequenceIr> {
    oracle_sequence_for(id, method, &SpinSystem::default(), false)
}

/// Pulse sequence realizing `id` on `sys`. With `shaped`, the selective x/y
/// pulses become Gaussian pulses of phase-matched length.
pub fn oracle_sequence_for(
    id: OracleId,
    method: Method,
    sys: &SpinSystem,
    shaped: bool,
) -> Result<SequenceIr> {
    if method == Method::IdealMatrix {
        return Err(Error::InvalidArgument(
            "the ideal-matrix method has no pulse sequence".into(),
        ));
    }
    let shape = shaped.then(|| phase_matched_duration(sys, SHAPED_PULSE_TARGET_S));
    let flip = |a: &str, b: &str, axis: Axis| -> Result<Event> {
        let t = sys.observable_transition(a, b)?;
        Ok(Event::SelPulse {
            transition: tr(a, b),
            axis,
            angle: inversion_angle(sys, &t),
            shape,
        })
    };
    let z = |a: &str, b: &str, angle: f64| Event::ZPulse {
        transition: tr(a, b),
        angle,
    };
    let delay = Event::QuadDelay {
        tau_s: sys.controlled_phase_delay(),
        symbolic: true,
    };
    let events = match (id, method) {
        (OracleId::F1, _) => vec![],
        (OracleId::F2, _) => vec![flip("00", "01", Axis::X)?, flip("10", "11", Axis::X)?],
        (OracleId::F3, Method::QuadEvolution) => {
            vec![
                z("01", "11", FRAC_PI_2),
                delay,
                flip("10", "11", Axis::MinusY)?,
            ]
        }
        (OracleId::F3, _) => vec![
            z("00", "01", FRAC_PI_4),
            z("10", "11", FRAC_PI_4),
            z("01", "11", FRAC_PI_2),
            flip("10", "11", Axis::MinusY)?,
        ],
        (OracleId::F4, Method::QuadEvolution) => {
            vec![z("01", "11", -FRAC_PI_2), delay, flip("00", "01", Axis::Y)?]
        }
        (OracleId::F4, _) => vec![
            z("00", "01", FRAC_PI_4),
            z("10", "11", FRAC_PI_4),
            z("01", "11", -FRAC_PI_2),
            flip("00", "01", Axis::Y)?,
        ],
    };
    Ok(SequenceIr::new(decl_for(sys), events))
}

/// |ψ'⟩ = (1, -√3, √3, -1)/(2√2): |00⟩ after the hard (π/2)_{-y} pulse.
pub fn encoded_state() -> Vec<Complex64> {
    let s3 = 3f64.sqrt();
    let n = 1.0 / (2.0 * 2f64.sqrt());
    [1.0, -s3, s3, -1.0]
        .iter()
        .map(|&v| c(v * n, 0.0))
        .collect()
}

/// U_f |ψ'⟩.
pub fn ideal_state_after_oracle(id: OracleId) -> Vec<Complex64> {
    oracle_matrix(id).apply(&encoded_state())
}

/// 8 |ψ⟩⟨ψ| for a state vector.
pub fn scaled_projector(psi: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj() * 8.0)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DjOptions {
    pub relaxation: Option<RelaxationParams>,
    pub shaped_pulses: bool,
    pub acquisition: AcquisitionParams,
}

#[derive(Debug, Clone)]
pub struct DjOutcome {
    pub oracle: OracleId,
    pub method: Method,
    /// Deviation matrix right after the oracle.
    pub post_oracle: DeviationDensityMatrix,
    pub spectrum: Spectrum,
    /// Signs of the 00-01, 01-11 and 11-10 peaks.
    pub peak_signs: Vec<f64>,
    pub classification: FunctionClass,
}

impl DjOutcome {
    pub fn peaks(&self) -> &[Peak] {
        &self.spectrum.peaks
    }
}

/// Constant iff the central peak has the same sign as every outer peak.
pub fn classify_peaks(peaks: &[Peak], sys: &SpinSystem) -> Result<FunctionClass> {
    let largest = peaks
        .iter()
        .map(|p| p.real_integral.abs())
        .fold(0.0, f64::max);
    for p in peaks {
        if !(p.real_integral.abs() >= AMBIGUITY_FLOOR * largest) || largest == 0.0 {
            return Err(Error::AmbiguousReadout {
                label: p.label.clone(),
                value: p.real_integral,
            });
        }
    }
    let transitions = sys.observable_transitions();
    let central = transitions
        .iter()
        .position(|t| t.is_central(sys.spin()))
        .ok_or_else(|| Error::InvalidState("system has no central transition".into()))?;
    let c_sign = peaks[central].sign;
    let same = peaks
        .iter()
        .enumerate()
        .all(|(k, p)| k == central || p.sign == c_sign);
    Ok(if same {
        FunctionClass::Constant
    } else {
        FunctionClass::Balanced
    })
}

/// Adjacent lines must be further apart than their integration windows.
fn check_resolved(sys: &SpinSystem, options: &DjOptions) -> Result<()> {
    let t2_min = options
        .relaxation
        .map(|r| r.t2_central_s.min(r.t2_outer_s))
        .unwrap_or(f64::INFINITY);
    let linewidth_hz = options.acquisition.lb_hz + 1.0 / (std::f64::consts::PI * t2_min);
    let splitting_hz = sys.splitting_hz().abs();
    if !(splitting_hz > 2.0 * WINDOW_LINEWIDTHS * linewidth_hz) {
        return Err(Error::UnresolvedLines {
            splitting_hz,
            linewidth_hz,
        });
    }
    Ok(())
}

/// Prepares |00⟩ from equilibrium and runs the algorithm.
pub fn run_dj(
    id: OracleId,
    sys: &SpinSystem,
    method: Method,
    options: &DjOptions,
) -> Result<DjOutcome> {
    let rho0 = pseudopure_00(sys, &equilibrium_state(sys))?;
    run_dj_from(&rho0, id, sys, method, options)
}

/// Hard (π/2)_{-y}, oracle, acquisition and sign readout starting from `rho0`.
pub fn run_dj_from(
    rho0: &DeviationDensityMatrix,
    id: OracleId,
    sys: &SpinSystem,
    method: Method,
    options: &DjOptions,
) -> Result<DjOutcome> {
    let relax = options.relaxation.as_ref();
    check_resolved(sys, options)?;
    let encoded = rho0.evolve(&hard_pulse(sys, Axis::MinusY, FRAC_PI_2)?)?;
    let post_oracle = match method {
        Method::IdealMatrix => encoded.evolve(&oracle_matrix(id))?,
        _ => {
            let ir = oracle_sequence_for(id, method, sys, options.shaped_pulses)?;
            run_trajectory(&ir, sys, &encoded, relax)?
                .final_state()
                .clone()
        }
    };
    let fid = acquire(&post_oracle, sys, &options.acquisition, relax)?;
    let spectrum = spectrum(&fid)?;
    let classification = classify_peaks(&spectrum.peaks, sys)?;
    Ok(DjOutcome {
        oracle: id,
        method,
        post_oracle,
        peak_signs: spectrum.peaks.iter().map(|p| p.sign).collect(),
        spectrum,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{gate_fidelity_global_phase, relative_global_phase};
    use crate::sequence::compile_unitary;

    #[test]
    fn oracle_matrices() {
        assert!(oracle_matrix(OracleId::F1).approx_eq(&ComplexMatrix::identity(4), 0.0));
        let u3 = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        assert!(oracle_matrix(OracleId::F3).approx_eq(&u3, 0.0));
        for id in OracleId::ALL {
            let u = oracle_matrix(id);
            assert!(u.is_unitary(0.0));
            for i in 0..4 {
                let ones = (0..4).filter(|&j| u.get(i, j) == c(1.0, 0.0)).count();
                let zeros = (0..4).filter(|&j| u.get(i, j) == c(0.0, 0.0)).count();
                assert_eq!((ones, zeros), (1, 3));
            }
        }
    }

    #[test]
    fn sequences_compile_to_oracles() {
        let sys = SpinSystem::default();
        for id in OracleId::ALL {
            for method in [Method::SelectiveZ, Method::QuadEvolution] {
                let u = compile_unitary(&oracle_sequence(id, method).unwrap(), &sys).unwrap();
                let f = gate_fidelity_global_phase(&u, &oracle_matrix(id)).unwrap();
                assert!(f > 1.0 - 1e-9, "{id} {method}: {f}");
            }
        }
        let u = compile_unitary(
            &oracle_sequence(OracleId::F3, Method::QuadEvolution).unwrap(),
            &sys,
        )
        .unwrap();
        let phase = relative_global_phase(&oracle_matrix(OracleId::F3), &u).unwrap();
        assert!((phase - c(0.0, -FRAC_PI_4).exp()).norm() < 1e-12);
    }

    #[test]
    fn ideal_method_has_no_sequence() {
        assert!(oracle_sequence(OracleId::F1, Method::IdealMatrix).is_err());
        assert!(oracle_sequence(OracleId::F1, Method::QuadEvolution)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn ideal_states_are_unit_norm() {
        for id in OracleId::ALL {
            let n: f64 = ideal_state_after_oracle(id)
                .iter()
                .map(|z| z.norm_sqr())
                .sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn classification_matches_function_class() {
        let sys = SpinSystem::default();
        for id in OracleId::ALL {
            for method in Method::ALL {
                let out = run_dj(id, &sys, method, &DjOptions::default()).unwrap();
                assert_eq!(
                    out.classification,
                    id.class(),
                    "{id} {method} {:?}",
                    out.peak_signs
                );
            }
        }
    }

    #[test]
    fn parse_ids() {
        assert_eq!("f3".parse::<OracleId>().unwrap(), OracleId::F3);
        assert!("f9".parse::<OracleId>().is_err());
        assert_eq!(
            "quad-evolution".parse::<Method>().unwrap(),
            Method::QuadEvolution
        );
    }
}
