//! Simulation of a spin-3/2 quadrupolar nucleus used as a two-qubit register:
//! spin operators, transition-selective pulses, pseudopure preparation, a
//! pulse-sequence language, relaxation, spectral readout and the
//! Deutsch-Jozsa algorithm.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dj;
pub mod error;
pub mod prep;
pub mod pulse;
pub mod qudit;
pub mod readout;
pub mod relaxation;
pub mod sequence;
pub mod spin_system;

pub use dj::{
    classify_peaks, ideal_state_after_oracle, oracle_matrix, oracle_sequence, oracle_sequence_for,
    run_dj, run_dj_from, DjOptions, DjOutcome, FunctionClass, Method, OracleId,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use prep::{equilibrium_state, pseudopure_00, DeviationDensityMatrix};
pub use pulse::{hard_pulse, selective_pulse, selective_z_pulse, shaped_pulse, Axis};
pub use qudit::{
    expm_hermitian, gate_fidelity_global_phase, spin_operators, ComplexMatrix, Spin, SpinOperators,
};
pub use readout::{
    observable_amplitudes, spectrum, synthesize_fid, AcquisitionParams, Fid, Peak, Spectrum,
};
pub use relaxation::{apply_relaxation, RelaxationParams};
pub use sequence::{
    compile_unitary, parse_sequence, print_sequence, run_trajectory, ParseError, SequenceIr,
};
pub use spin_system::{SpinSystem, Transition};
