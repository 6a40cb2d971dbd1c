//! Pulse propagators: hard pulses, transition-selective pulses, composite
//! selective z-rotations, Gaussian soft pulses, refocusing and gradients.
//!
//! Rotation sign table. A pulse of angle θ about `axis` is
//! `exp(i · s · θ · I_axis)` with s = +1 for `x` and `-y`, s = -1 for `-x`
//! and `y`. With it the hard `(π/2)_{-y}` pulse takes |00⟩ to
//! (1, -√3, √3, -1)/(2√2), two outer `(π/√3)_x` pulses give i·U2, and an
//! outer `(π/√3)_{-y}` pulse is the Pound-Overhauser CNOT.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::prep::DeviationDensityMatrix;
use crate::qudit::{c, expm_hermitian, ComplexMatrix};
use crate::spin_system::{SpinSystem, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    MinusX,
    Y,
    MinusY,
    Z,
    MinusZ,
}

impl Axis {
    pub fn is_transverse(self) -> bool {
        !matches!(self, Axis::Z | Axis::MinusZ)
    }

    /// s in `exp(i · s · θ · I_axis)`.
    pub fn generator_sign(self) -> f64 {
        match self {
            Axis::X | Axis::MinusY | Axis::Z => 1.0,
            Axis::MinusX | Axis::Y | Axis::MinusZ => -1.0,
        }
    }

    fn is_x(self) -> bool {
        matches!(self, Axis::X | Axis::MinusX)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::MinusX => "-x",
            Axis::Y => "y",
            Axis::MinusY => "-y",
            Axis::Z => "z",
            Axis::MinusZ => "-z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "x" | "+x" => Axis::X,
            "-x" => Axis::MinusX,
            "y" | "+y" => Axis::Y,
            "-y" => Axis::MinusY,
            "z" | "+z" => Axis::Z,
            "-z" => Axis::MinusZ,
            other => return Err(Error::InvalidPulse(format!("unknown axis `{other}`"))),
        })
    }
}

/// Restriction of Ix and Iy to one transition's 2x2 block, embedded in the
/// full space.
#[derive(Debug, Clone)]
pub struct SubspaceOperator {
    pub transition: Transition,
    pub ix_sub: ComplexMatrix,
    pub iy_sub: ComplexMatrix,
}

pub fn subspace_operator(sys: &SpinSystem, transition: &Transition) -> SubspaceOperator {
    let ops = sys.operators();
    let (u, l) = (transition.upper(), transition.lower());
    let restrict = |m: &ComplexMatrix| {
        let mut out = ComplexMatrix::zeros(sys.dim());
        out.set(u, l, m.get(u, l));
        out.set(l, u, m.get(l, u));
        out
    };
    SubspaceOperator {
        transition: transition.clone(),
        ix_sub: restrict(&ops.ix),
        iy_sub: restrict(&ops.iy),
    }
}

fn require_observable(t: &Transition) -> Result<()> {
    if !t.is_observable() {
        return Err(Error::ForbiddenTransition(t.name(), t.delta_m));
    }
    Ok(())
}

fn require_transverse(axis: Axis) -> Result<()> {
    if !axis.is_transverse() {
        return Err(Error::InvalidPulse(
            "z rotations are not r.f. pulses; use a selective z-pulse or a delay".into(),
        ));
    }
    Ok(())
}

fn check_angle(angle: f64) -> Result<()> {
    if !angle.is_finite() {
        return Err(Error::InvalidPulse(format!("non-finite angle {angle}")));
    }
    Ok(())
}

/// Non-selective pulse `exp(i · s · θ · I_axis)`.
pub fn hard_pulse(sys: &SpinSystem, axis: Axis, angle: f64) -> Result<ComplexMatrix> {
    require_transverse(axis)?;
    check_angle(angle)?;
    let ops = sys.operators();
    let gen = if axis.is_x() { &ops.ix } else { &ops.iy };
    expm_hermitian(gen, axis.generator_sign() * angle)
}

/// Multiplier applied to the restricted spin operator of a transition.
///
/// The central (m = ±1/2) transition is normalized to a unit two-level
/// system, so θ is its ordinary flip angle. Other transitions keep the raw
/// matrix element, so for I = 3/2 an outer pulse of θ = π/√3 inverts.
pub fn nutation_scale(sys: &SpinSystem, transition: &Transition) -> f64 {
    if transition.is_central(sys.spin()) {
        0.5 / transition.ix_element
    } else {
        1.0
    }
}

/// Ideal, instantaneous transition-selective pulse.
pub fn selective_pulse(
    sys: &SpinSystem,
    transition: &Transition,
    axis: Axis,
    angle: f64,
) -> Result<ComplexMatrix> {
    require_observable(transition)?;
    require_transverse(axis)?;
    check_angle(angle)?;
    let sub = subspace_operator(sys, transition);
    let gen = if axis.is_x() {
        &sub.ix_sub
    } else {
        &sub.iy_sub
    };
    let scale = nutation_scale(sys, transition);
    expm_hermitian(gen, axis.generator_sign() * scale * angle)
}

/// Unit Pauli operators on the pair (first, second) in the named order.
fn named_paulis(dim: usize, t: &Transition) -> (ComplexMatrix, ComplexMatrix) {
    let (a, b) = t.levels;
    let mut sx = ComplexMatrix::zeros(dim);
    sx.set(a, b, c(1.0, 0.0));
    sx.set(b, a, c(1.0, 0.0));
    let mut sy = ComplexMatrix::zeros(dim);
    sy.set(a, b, c(0.0, -1.0));
    sy.set(b, a, c(0.0, 1.0));
    (sx, sy)
}

/// Selective z-rotation realized as the composite `(π/4)_y (φ)_x (π/4)_{-y}`
/// on the named transition, applied in that time order.
///
/// Uses unit two-level operators and right-handed rotations. The first named
/// level picks up e^{-iφ}, the second e^{+iφ}; everything else is untouched.
pub fn selective_z_pulse(
    sys: &SpinSystem,
    transition: &Transition,
    phi: f64,
) -> Result<ComplexMatrix> {
    require_observable(transition)?;
    check_angle(phi)?;
    let (sx, sy) = named_paulis(sys.dim(), transition);
    let first = expm_hermitian(&sy, -FRAC_PI_4)?;
    let middle = expm_hermitian(&sx, -phi)?;
    let last = expm_hermitian(&sy, FRAC_PI_4)?;
    Ok(&(&last * &middle) * &first)
}

/// Closed form of [`selective_z_pulse`].
pub fn selective_z_diagonal(sys: &SpinSystem, transition: &Transition, phi: f64) -> ComplexMatrix {
    let mut d = vec![c(1.0, 0.0); sys.dim()];
    d[transition.levels.0] = c(0.0, -phi).exp();
    d[transition.levels.1] = c(0.0, phi).exp();
    ComplexMatrix::from_diagonal(&d)
}

/// τ/2 free evolution, hard π about x, τ/2 free evolution.
pub fn refocus_block(sys: &SpinSystem, tau: f64) -> Result<ComplexMatrix> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidPulse(format!("negative refocus time {tau}")));
    }
    let half = sys.free_evolution(tau / 2.0);
    let pi = hard_pulse(sys, Axis::X, std::f64::consts::PI)?;
    Ok(&(&half * &pi) * &half)
}

/// Ideal crusher: drops every coherence, keeps populations.
pub fn gradient_crush(rho: &DeviationDensityMatrix) -> DeviationDensityMatrix {
    let m = rho.matrix();
    let d = m.dim();
    let out = ComplexMatrix::from_fn(d, |i, j| if i == j { m.get(i, i) } else { c(0.0, 0.0) });
    DeviationDensityMatrix::from_matrix_unchecked(out)
}

/// Slice count used when none is specified.
pub const DEFAULT_SLICES: usize = 1024;
pub const MIN_SLICES: usize = 64;
pub const CALIBRATION_TOL_RAD: f64 = 1e-6;

/// Gaussian soft pulse on one transition, integrated slice by slice under the
/// full rotating-frame Hamiltonian.
///
/// The envelope is truncated at ±`truncation`·σ with σ = duration / (2·truncation).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPulse {
    pub transition: Transition,
    pub axis: Axis,
    pub nominal_angle: f64,
    pub duration_s: f64,
    pub n_slices: usize,
    pub truncation: f64,
}

/// Piecewise-constant slice propagators of a shaped pulse, in the frame
/// rotating at the target transition frequency. The lab-frame (carrier
/// frame) propagator is `frame_correction · steps[n-1] ··· steps[0]`.
#[derive(Debug, Clone)]
pub struct ShapedSlices {
    pub dt: f64,
    pub steps: Vec<ComplexMatrix>,
    pub frame_correction: ComplexMatrix,
}

impl ShapedSlices {
    pub fn product(&self) -> ComplexMatrix {
        let dim = self.frame_correction.dim();
        let inner = self
            .steps
            .iter()
            .fold(ComplexMatrix::identity(dim), |acc, s| s * &acc);
        &self.frame_correction * &inner
    }
}

impl GaussianPulse {
    pub fn new(transition: Transition, axis: Axis, nominal_angle: f64, duration_s: f64) -> Self {
        Self {
            transition,
            axis,
            nominal_angle,
            duration_s,
            n_slices: DEFAULT_SLICES,
            truncation: 3.0,
        }
    }

    pub fn with_slices(mut self, n_slices: usize) -> Self {
        self.n_slices = n_slices;
        self
    }

    fn validate(&self) -> Result<()> {
        require_observable(&self.transition)?;
        require_transverse(self.axis)?;
        check_angle(self.nominal_angle)?;
        if !(self.duration_s > 0.0) || !self.duration_s.is_finite() {
            return Err(Error::InvalidPulse(format!(
                "shaped pulse duration must be positive, got {}",
                self.duration_s
            )));
        }
        if self.n_slices < MIN_SLICES {
            return Err(Error::InvalidPulse(format!(
                "shaped pulse needs at least {MIN_SLICES} slices, got {}",
                self.n_slices
            )));
        }
        if !(self.truncation > 0.0) {
            return Err(Error::Uncalibratable(
                "envelope truncation must be positive".into(),
            ));
        }
        Ok(())
    }

    fn dt(&self) -> f64 {
        self.duration_s / self.n_slices as f64
    }

    /// Unnormalized envelope sampled at slice midpoints.
    fn envelope(&self) -> Vec<f64> {
        let sigma = self.duration_s / (2.0 * self.truncation);
        let center = self.duration_s / 2.0;
        let dt = self.dt();
        (0..self.n_slices)
            .map(|k| {
                let t = (k as f64 + 0.5) * dt;
                (-0.5 * ((t - center) / sigma).powi(2)).exp()
            })
            .collect()
    }

    /// Pulse area ∫ω1 dt that would give the nominal angle on an isolated
    /// two-level transition.
    pub fn nominal_area(&self, sys: &SpinSystem) -> f64 {
        self.nominal_angle * nutation_scale(sys, &self.transition)
    }

    /// Slice propagators for a given pulse area (rad).
    pub fn slices(&self, sys: &SpinSystem, area: f64) -> Result<ShapedSlices> {
        self.validate()?;
        let env = self.envelope();
        let dt = self.dt();
        let norm: f64 = env.iter().sum::<f64>() * dt;
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Uncalibratable("degenerate envelope".into()));
        }
        let ops = sys.operators();
        let gen = if self.axis.is_x() { &ops.ix } else { &ops.iy };
        let sign = self.axis.generator_sign();
        let w_t = 2.0 * std::f64::consts::PI * self.transition.frequency_hz;
        // H - ω_t Iz: static part in the frame co-rotating with the r.f.
        let static_part = &sys.hamiltonian() - &ops.iz.scale_real(w_t);
        let steps = env
            .iter()
            .map(|e| {
                let w1 = area * e / norm;
                let h = &static_part - &gen.scale_real(sign * w1);
                expm_hermitian(&h, -dt)
            })
            .collect::<Result<Vec<_>>>()?;
        let frame_correction = expm_hermitian(&ops.iz, -w_t * self.duration_s)?;
        Ok(ShapedSlices {
            dt,
            steps,
            frame_correction,
        })
    }

    pub fn propagator_with_area(&self, sys: &SpinSystem, area: f64) -> Result<ComplexMatrix> {
        Ok(self.slices(sys, area)?.product())
    }

    /// Achieved flip angle on the target transition, in the same units as
    /// `nominal_angle`. Saturates at single inversion.
    pub fn achieved_angle(&self, sys: &SpinSystem, u: &ComplexMatrix) -> f64 {
        let (up, lo) = (self.transition.upper(), self.transition.lower());
        let eff = self.transition.ix_element * nutation_scale(sys, &self.transition);
        u.get(lo, up).norm().atan2(u.get(up, up).norm()) / eff
    }

    fn achieved_for_area(&self, sys: &SpinSystem, area: f64) -> Result<f64> {
        let u = self.propagator_with_area(sys, area)?;
        Ok(self.achieved_angle(sys, &u))
    }

    /// Finds the pulse area that delivers the nominal flip angle on the
    /// target transition, by bisection to `CALIBRATION_TOL_RAD`. When
    /// off-resonance leakage keeps the target from ever reaching the nominal
    /// angle (inversion pulses), returns the area of maximum achieved angle.
    pub fn calibrate(&self, sys: &SpinSystem) -> Result<f64> {
        self.validate()?;
        let target = self.nominal_angle.abs();
        if target == 0.0 {
            return Ok(0.0);
        }
        let eff = self.transition.ix_element * nutation_scale(sys, &self.transition);
        if target * eff > std::f64::consts::FRAC_PI_2 + 1e-9 {
            return Err(Error::Uncalibratable(format!(
                "flip angle {target} exceeds a single inversion of the target transition"
            )));
        }
        let sign = self.nominal_angle.signum();
        let nominal = self.nominal_area(sys).abs();

        // Coarse scan for the first crossing.
        let grid: Vec<f64> = (0..=24)
            .map(|k| nominal * (0.4 + 0.05 * k as f64))
            .collect();
        let mut values = Vec::with_capacity(grid.len());
        for (k, &a) in grid.iter().enumerate() {
            let v = self.achieved_for_area(sys, a)? - target;
            if v >= 0.0 {
                if k == 0 {
                    return Err(Error::Uncalibratable(
                        "calibration bracket below scan range".into(),
                    ));
                }
                let (mut lo, mut hi) = (grid[k - 1], a);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let f = self.achieved_for_area(sys, mid)? - target;
                    if f.abs() <= CALIBRATION_TOL_RAD * 1e-3 || hi - lo <= 1e-14 * nominal {
                        return Ok(sign * mid);
                    }
                    if f < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(sign * 0.5 * (lo + hi));
            }
            values.push(v);
        }

        // No crossing: golden-section search for the maximum achieved angle.
        let best = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let mut lo = grid[best.saturating_sub(1)];
        let mut hi = grid[(best + 1).min(grid.len() - 1)];
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = self.achieved_for_area(sys, x1)?;
        let mut f2 = self.achieved_for_area(sys, x2)?;
        while hi - lo > 1e-10 * nominal {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = self.achieved_for_area(sys, x2)?;
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = self.achieved_for_area(sys, x1)?;
            }
        }
        Ok(sign * 0.5 * (lo + hi))
    }
}

/// Calibrated Gaussian soft pulse propagator.
pub fn shaped_pulse(
    sys: &SpinSystem,
    transition: &Transition,
    axis: Axis,
    nominal_angle: f64,
    duration_s: f64,
    n_slices: usize,
) -> Result<ComplexMatrix> {
    let pulse = GaussianPulse::new(transition.clone(), axis, nominal_angle, duration_s)
        .with_slices(n_slices);
    let area = pulse.calibrate(sys)?;
    pulse.propagator_with_area(sys, area)
}

/// Shortest whole number of quadrupolar periods 1/(6Λ) closest to `target_s`,
/// so that the background phase on the unexcited levels wraps by 2π.
pub fn phase_matched_duration(sys: &SpinSystem, target_s: f64) -> f64 {
    let period = 1.0 / sys.splitting_hz().abs();
    if !period.is_finite() {
        return target_s;
    }
    (target_s / period).round().max(1.0) * period
}

/// Shape of a selective pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    Ideal,
    Gaussian { duration_s: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PulseScope {
    Hard,
    Selective(Transition),
}

/// Complete description of one pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    pub scope: PulseScope,
    pub axis: Axis,
    pub angle_rad: f64,
    pub shape: PulseShape,
}

impl PulseSpec {
    pub fn propagator(&self, sys: &SpinSystem) -> Result<ComplexMatrix> {
        match (&self.scope, self.axis.is_transverse(), self.shape) {
            (PulseScope::Hard, _, PulseShape::Ideal) => hard_pulse(sys, self.axis, self.angle_rad),
            (PulseScope::Hard, _, PulseShape::Gaussian { .. }) => {
                Err(Error::InvalidPulse("hard pulses cannot be shaped".into()))
            }
            (PulseScope::Selective(t), false, PulseShape::Ideal) => {
                selective_z_pulse(sys, t, self.axis.generator_sign() * self.angle_rad)
            }
            (PulseScope::Selective(_), false, PulseShape::Gaussian { .. }) => Err(
                Error::InvalidPulse("selective z-pulses are composite and cannot be shaped".into()),
            ),
            (PulseScope::Selective(t), true, PulseShape::Ideal) => {
                selective_pulse(sys, t, self.axis, self.angle_rad)
            }
            (PulseScope::Selective(t), true, PulseShape::Gaussian { duration_s }) => shaped_pulse(
                sys,
                t,
                self.axis,
                self.angle_rad,
                duration_s,
                DEFAULT_SLICES,
            ),
        }
    }
}

#[cfg(test)]
fn phase(theta: f64) -> num_complex::Complex64 {
    c(0.0, theta).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::gate_fidelity_global_phase;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn sys() -> SpinSystem {
        SpinSystem::default()
    }

    fn s3() -> f64 {
        3f64.sqrt()
    }

    #[test]
    fn hard_minus_y_creates_superposition_of_all_levels() {
        let u = hard_pulse(&sys(), Axis::MinusY, FRAC_PI_2).unwrap();
        let psi = u.apply(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let k = 1.0 / (2.0 * SQRT_2);
        let expected = [k, -s3() * k, s3() * k, -k];
        for (a, e) in psi.iter().zip(expected) {
            assert!((a - c(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn hard_pulse_zero_angle_and_square() {
        let s = sys();
        assert!(hard_pulse(&s, Axis::X, 0.0)
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(4), 1e-14));
        let p = hard_pulse(&s, Axis::MinusY, FRAC_PI_2).unwrap();
        let pp = hard_pulse(&s, Axis::MinusY, PI).unwrap();
        assert!(pp.approx_eq(&(&p * &p), 1e-12));
    }

    #[test]
    fn hard_z_rejected() {
        assert!(matches!(
            hard_pulse(&sys(), Axis::Z, 1.0),
            Err(Error::InvalidPulse(_))
        ));
    }

    #[test]
    fn selective_x_pair_gives_i_times_u2() {
        let s = sys();
        let a = s.observable_transition("00", "01").unwrap();
        let b = s.observable_transition("10", "11").unwrap();
        let th = PI / s3();
        let p = &selective_pulse(&s, &a, Axis::X, th).unwrap()
            * &selective_pulse(&s, &b, Axis::X, th).unwrap();
        let u2 = ComplexMatrix::from_real_rows(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        assert!(p.approx_eq(&u2.scale(c(0.0, 1.0)), 1e-12), "{p:?}");
    }

    #[test]
    fn outer_selective_nutates_at_root_three() {
        let s = sys();
        let t = s.observable_transition("00", "01").unwrap();
        let th = 0.41;
        let u = selective_pulse(&s, &t, Axis::X, th).unwrap();
        let w = s3() * th / 2.0;
        assert!((u.get(0, 0) - c(w.cos(), 0.0)).norm() < 1e-12);
        assert!((u.get(0, 1) - c(0.0, w.sin())).norm() < 1e-12);
        assert!((u.get(3, 3) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn central_selective_uses_half_angle() {
        let s = sys();
        let t = s.observable_transition("01", "11").unwrap();
        let th = 0.8;
        let u = selective_pulse(&s, &t, Axis::Y, th).unwrap();
        assert!((u.get(1, 1).re - (th / 2.0).cos()).abs() < 1e-12);
        assert!((u.get(2, 1).norm() - (th / 2.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn pound_overhauser_block() {
        let s = sys();
        let t = s.observable_transition("10", "11").unwrap();
        let u = selective_pulse(&s, &t, Axis::MinusY, PI / s3()).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0, 0.0],
        ]);
        assert!(u.approx_eq(&expected, 1e-12), "{u:?}");
    }

    #[test]
    fn forbidden_transition_rejected() {
        let s = sys();
        let t = s.transition("00", "10").unwrap();
        assert!(matches!(
            selective_pulse(&s, &t, Axis::X, 1.0),
            Err(Error::ForbiddenTransition(..))
        ));
        assert!(selective_z_pulse(&s, &t, 1.0).is_err());
    }

    #[test]
    fn selective_identity_at_zero() {
        let s = sys();
        for t in s.observable_transitions() {
            let u = selective_pulse(&s, &t, Axis::X, 0.0).unwrap();
            assert!(u.approx_eq(&ComplexMatrix::identity(4), 1e-14));
            let z = selective_z_pulse(&s, &t, 0.0).unwrap();
            assert!(z.approx_eq(&ComplexMatrix::identity(4), 1e-14));
        }
    }

    #[test]
    fn subspace_operator_central_block() {
        let s = sys();
        let t = s.observable_transition("01", "11").unwrap();
        let sub = subspace_operator(&s, &t);
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let ix = ComplexMatrix::from_rows(&[
            vec![z, z, z, z],
            vec![z, z, o, z],
            vec![z, o, z, z],
            vec![z, z, z, z],
        ]);
        let iy = ComplexMatrix::from_rows(&[
            vec![z, z, z, z],
            vec![z, z, c(0.0, -1.0), z],
            vec![z, c(0.0, 1.0), z, z],
            vec![z, z, z, z],
        ]);
        assert!(sub.ix_sub.approx_eq(&ix, 1e-15));
        assert!(sub.iy_sub.approx_eq(&iy, 1e-15));
    }

    #[test]
    fn z_pulse_central_half_pi() {
        let s = sys();
        let t = s.observable_transition("01", "11").unwrap();
        let u = selective_z_pulse(&s, &t, FRAC_PI_2).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[
            c(1.0, 0.0),
            phase(-FRAC_PI_2),
            phase(FRAC_PI_2),
            c(1.0, 0.0),
        ]);
        assert!(u.approx_eq(&expected, 1e-12), "{u:?}");
    }

    #[test]
    fn z_cascade_is_controlled_phase() {
        let s = sys();
        let a = s.observable_transition("00", "01").unwrap();
        let b = s.observable_transition("10", "11").unwrap();
        let m = s.observable_transition("01", "11").unwrap();
        let u = &(&selective_z_pulse(&s, &a, FRAC_PI_4).unwrap()
            * &selective_z_pulse(&s, &b, FRAC_PI_4).unwrap())
            * &selective_z_pulse(&s, &m, FRAC_PI_2).unwrap();
        let expected =
            ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, 1.0]).scale(phase(-FRAC_PI_4));
        assert!(u.approx_eq(&expected, 1e-12), "{u:?}");
    }

    #[test]
    fn refocus_zero_delay_is_pi_pulse() {
        let s = sys();
        let r = refocus_block(&s, 0.0).unwrap();
        assert!(r.approx_eq(&hard_pulse(&s, Axis::X, PI).unwrap(), 1e-14));
    }

    #[test]
    fn refocus_at_gate_delay() {
        let s = sys();
        let tau = s.controlled_phase_delay();
        let r = refocus_block(&s, tau).unwrap();
        let diag = ComplexMatrix::from_diagonal(&[
            phase(-FRAC_PI_4),
            phase(FRAC_PI_4),
            phase(FRAC_PI_4),
            phase(-FRAC_PI_4),
        ]);
        let expected = &hard_pulse(&s, Axis::X, PI).unwrap() * &diag;
        assert!(r.approx_eq(&expected, 1e-9));
    }

    #[test]
    fn refocus_is_offset_independent() {
        let base = sys();
        let tau = 37e-6;
        let r0 = refocus_block(&base, tau).unwrap();
        for off in [100.0, 5_000.0] {
            let r = refocus_block(&base.with_offset(off), tau).unwrap();
            assert!(r.approx_eq(&r0, 1e-9));
        }
        let expected = &hard_pulse(&base, Axis::X, PI).unwrap() * &base.quad_evolution(tau);
        assert!(r0.approx_eq(&expected, 1e-9));
    }

    #[test]
    fn gradient_crush_behaviour() {
        let rho =
            ComplexMatrix::from_real_rows(&[vec![0.25, -0.45], vec![-0.45, 0.25]]).scale_real(1.0);
        let rho = &rho - &ComplexMatrix::identity(2).scale_real(0.25);
        let d = DeviationDensityMatrix::new(rho).unwrap();
        let out = gradient_crush(&d);
        assert!(out.matrix().is_diagonal(0.0));
        assert_eq!(out.matrix().trace(), d.matrix().trace());
        assert_eq!(gradient_crush(&out), out);
    }

    #[test]
    fn zero_amplitude_shaped_pulse_is_free_evolution() {
        let s = sys();
        let t = s.observable_transition("00", "01").unwrap();
        let p = GaussianPulse::new(t, Axis::X, PI / s3(), 123e-6);
        let u = p.propagator_with_area(&s, 0.0).unwrap();
        assert!(u.approx_eq(&s.quad_evolution(123e-6), 1e-10));
    }

    #[test]
    fn short_shaped_pulse_tends_to_hard_pulse() {
        let s = sys();
        let t = s.observable_transition("00", "01").unwrap();
        let p = GaussianPulse::new(t, Axis::X, 0.5, 5e-9).with_slices(128);
        let u = p.propagator_with_area(&s, 0.5).unwrap();
        let hard = hard_pulse(&s, Axis::X, 0.5).unwrap();
        assert!(gate_fidelity_global_phase(&hard, &u).unwrap() > 0.999);
    }

    #[test]
    fn long_phase_matched_pulse_approaches_ideal() {
        let s = sys();
        let t = s.observable_transition("01", "11").unwrap();
        let dur = phase_matched_duration(&s, 1e-3);
        let shaped = shaped_pulse(&s, &t, Axis::X, FRAC_PI_2, dur, 1024).unwrap();
        let ideal = selective_pulse(&s, &t, Axis::X, FRAC_PI_2).unwrap();
        assert!(gate_fidelity_global_phase(&ideal, &shaped).unwrap() >= 0.999);
    }

    #[test]
    fn shaped_pulse_argument_errors() {
        let s = sys();
        let t = s.observable_transition("00", "01").unwrap();
        assert!(shaped_pulse(&s, &t, Axis::X, 1.0, 0.0, 1024).is_err());
        assert!(shaped_pulse(&s, &t, Axis::X, 1.0, 1e-4, 16).is_err());
        assert!(matches!(
            shaped_pulse(&s, &t, Axis::X, 3.0, 1e-4, 128),
            Err(Error::Uncalibratable(_))
        ));
        let f = s.transition("00", "10").unwrap();
        assert!(shaped_pulse(&s, &f, Axis::X, 1.0, 1e-4, 128).is_err());
    }

    #[test]
    fn phase_matched_duration_rounds_to_period() {
        let s = sys();
        let d = phase_matched_duration(&s, 123e-6);
        assert!((d - 125e-6).abs() < 1e-12);
    }
}
