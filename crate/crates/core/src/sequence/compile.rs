//! Propagator chains and density-matrix trajectories from a sequence IR.

use super::ast::{Event, SequenceIr};
use crate::error::{Error, Result};
use crate::prep::DeviationDensityMatrix;
use crate::pulse::{
    gradient_crush, hard_pulse, refocus_block, selective_pulse, selective_z_pulse, shaped_pulse,
    Axis, GaussianPulse, DEFAULT_SLICES,
};
use crate::qudit::ComplexMatrix;
use crate::readout::{acquire, AcquisitionParams, Fid, DEFAULT_LB_HZ};
use crate::relaxation::{apply_relaxation, RelaxationParams};
use crate::spin_system::SpinSystem;

/// Propagator of a single unitary event.
pub fn event_propagator(event: &Event, sys: &SpinSystem) -> Result<ComplexMatrix> {
    match event {
        Event::HardPulse { axis, angle } => hard_pulse(sys, *axis, *angle),
        Event::SelPulse {
            transition,
            axis,
            angle,
            shape,
        } => {
            let t = transition.resolve(sys)?;
            match shape {
                None => selective_pulse(sys, &t, *axis, *angle),
                Some(d) => shaped_pulse(sys, &t, *axis, *angle, *d, DEFAULT_SLICES),
            }
        }
        Event::ZPulse { transition, angle } => {
            selective_z_pulse(sys, &transition.resolve(sys)?, *angle)
        }
        Event::QuadDelay { tau_s, .. } => Ok(sys.free_evolution(*tau_s)),
        Event::Refocus { tau_s } => refocus_block(sys, *tau_s),
        Event::Gradient => Err(Error::NonUnitary("gradient")),
        Event::Acquire { .. } => Err(Error::NonUnitary("acquire")),
    }
}

/// U = P_n ··· P_1, with the first event acting on the state first.
pub fn compile_unitary(ir: &SequenceIr, sys: &SpinSystem) -> Result<ComplexMatrix> {
    ir.events()
        .try_fold(ComplexMatrix::identity(sys.dim()), |acc, e| {
            Ok(&event_propagator(e, sys)? * &acc)
        })
}

/// States after each event (the first entry is the input) and the FID, if acquired.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<DeviationDensityMatrix>,
    pub fid: Option<Fid>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DeviationDensityMatrix {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }
}

fn relax(
    rho: DeviationDensityMatrix,
    dt: f64,
    params: Option<&RelaxationParams>,
    sys: &SpinSystem,
) -> Result<DeviationDensityMatrix> {
    match params {
        Some(p) => apply_relaxation(&rho, dt, p, sys),
        None => Ok(rho),
    }
}

pub fn run_trajectory(
    ir: &SequenceIr,
    sys: &SpinSystem,
    rho0: &DeviationDensityMatrix,
    relaxation: Option<&RelaxationParams>,
) -> Result<Trajectory> {
    run_trajectory_with(ir, sys, rho0, relaxation, DEFAULT_LB_HZ)
}

/// Applies each event in order. Relaxation, when given, acts during delays,
/// refocusing periods, shaped pulses and acquisition.
pub fn run_trajectory_with(
    ir: &SequenceIr,
    sys: &SpinSystem,
    rho0: &DeviationDensityMatrix,
    relaxation: Option<&RelaxationParams>,
    lb_hz: f64,
) -> Result<Trajectory> {
    if rho0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: sys.dim(),
        });
    }
    let mut states = vec![rho0.clone()];
    let mut fid = None;
    let mut rho = rho0.clone();
    for event in ir.events() {
        rho = match event {
            Event::Gradient => gradient_crush(&rho),
            Event::Acquire { points, dwell_s } => {
                let params = AcquisitionParams {
                    points: *points,
                    dwell_s: *dwell_s,
                    lb_hz,
                };
                fid = Some(acquire(&rho, sys, &params, relaxation)?);
                rho
            }
            Event::QuadDelay { tau_s, .. } => {
                let evolved = rho.evolve(&sys.free_evolution(*tau_s))?;
                relax(evolved, *tau_s, relaxation, sys)?
            }
            Event::Refocus { tau_s } if relaxation.is_some() => {
                let half = sys.free_evolution(tau_s / 2.0);
                let pi = hard_pulse(sys, Axis::X, std::f64::consts::PI)?;
                let r = relax(rho.evolve(&half)?, tau_s / 2.0, relaxation, sys)?;
                relax(r.evolve(&pi)?.evolve(&half)?, tau_s / 2.0, relaxation, sys)?
            }
            Event::SelPulse {
                transition,
                axis,
                angle,
                shape: Some(duration),
            } if relaxation.is_some() => {
                let t = transition.resolve(sys)?;
                let pulse = GaussianPulse::new(t, *axis, *angle, *duration);
                let slices = pulse.slices(sys, pulse.calibrate(sys)?)?;
                let mut r = rho;
                for step in &slices.steps {
                    r = relax(r.evolve(step)?, slices.dt, relaxation, sys)?;
                }
                r.evolve(&slices.frame_correction)?
            }
            unitary => rho.evolve(&event_propagator(unitary, sys)?)?,
        };
        states.push(rho.clone());
    }
    Ok(Trajectory { states, fid })
}
