//! Spin system definition, rotating-frame Hamiltonian, transition table and
//! quadrupolar free evolution.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qudit::{c, spin_operators, ComplexMatrix, Spin, SpinOperators};

/// Observed adjacent-line splitting used by [`SpinSystem::default`].
pub const DEFAULT_SPLITTING_HZ: f64 = 16_000.0;

/// A single quadrupolar nucleus in the rotating frame.
///
/// `lambda_hz` is the effective first-order quadrupolar coupling; adjacent
/// single-quantum lines are separated by `6 * lambda_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    spin: Spin,
    offset_hz: f64,
    lambda_hz: f64,
    labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionKind {
    SingleQuantum,
    Forbidden,
}

/// A pair of levels, kept in the order the caller named them.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    /// Basis indices as named (first, second).
    pub levels: (usize, usize),
    pub labels: (String, String),
    pub kind: TransitionKind,
    /// (E_upper - E_lower) / 2π, where "upper" is the level with larger m.
    pub frequency_hz: f64,
    /// |<upper| Ix |lower>|.
    pub ix_element: f64,
    pub delta_m: f64,
}

impl Transition {
    pub fn is_observable(&self) -> bool {
        self.kind == TransitionKind::SingleQuantum
    }

    /// Index of the level with the larger m.
    pub fn upper(&self) -> usize {
        self.levels.0.min(self.levels.1)
    }

    pub fn lower(&self) -> usize {
        self.levels.0.max(self.levels.1)
    }

    /// Whether this is the m = +1/2 <-> -1/2 transition.
    pub fn is_central(&self, spin: Spin) -> bool {
        spin.twice() % 2 == 1 && self.is_observable() && self.upper() == spin.twice() as usize / 2
    }

    pub fn name(&self) -> String {
        format!("{}-{}", self.labels.0, self.labels.1)
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn gray_labels(dim: usize) -> Vec<String> {
    let bits = (usize::BITS - (dim - 1).leading_zeros()).max(1) as usize;
    (0..dim)
        .map(|k| {
            let g = k ^ (k >> 1);
            format!("{:0width$b}", g, width = bits)
        })
        .collect()
}

impl Default for SpinSystem {
    fn default() -> Self {
        Self::from_splitting(Spin::THREE_HALVES, DEFAULT_SPLITTING_HZ, 0.0)
    }
}

impl SpinSystem {
    /// Builds a system from Λ directly. Levels are labeled with a Gray code
    /// in descending-m order, which for I = 3/2 gives 00, 01, 11, 10.
    pub fn new(spin: Spin, lambda_hz: f64, offset_hz: f64) -> Self {
        Self {
            spin,
            offset_hz,
            lambda_hz,
            labels: gray_labels(spin.dim()),
        }
    }

    /// Builds a system from the observed adjacent-line splitting; Λ = splitting / 6.
    pub fn from_splitting(spin: Spin, splitting_hz: f64, offset_hz: f64) -> Self {
        Self::new(spin, splitting_hz / 6.0, offset_hz)
    }

    /// Replaces the level labeling. Labels must be distinct and one per level.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: labels.len(),
                right: self.dim(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::UnknownLabel(format!("duplicate label {l}")));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn offset_hz(&self) -> f64 {
        self.offset_hz
    }

    pub fn lambda_hz(&self) -> f64 {
        self.lambda_hz
    }

    pub fn splitting_hz(&self) -> f64 {
        6.0 * self.lambda_hz
    }

    /// Λ in rad/s.
    pub fn lambda_angular(&self) -> f64 {
        2.0 * PI * self.lambda_hz
    }

    pub fn with_offset(&self, offset_hz: f64) -> Self {
        Self {
            offset_hz,
            ..self.clone()
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn m_of(&self, index: usize) -> f64 {
        self.spin.value() - index as f64
    }

    pub fn operators(&self) -> SpinOperators {
        spin_operators(self.spin)
    }

    fn quad_diagonal(&self) -> Vec<f64> {
        let j = self.spin.value();
        self.spin
            .m_values()
            .iter()
            .map(|m| 3.0 * m * m - j * (j + 1.0))
            .collect()
    }

    /// Energies (rad/s) of the basis levels.
    pub fn energies(&self) -> Vec<f64> {
        let w_off = 2.0 * PI * self.offset_hz;
        let w_q = self.lambda_angular();
        self.spin
            .m_values()
            .iter()
            .zip(self.quad_diagonal())
            .map(|(m, q)| -w_off * m + w_q * q)
            .collect()
    }

    /// H = -2π·offset·Iz + 2π·Λ·(3Iz² - I(I+1)), in rad/s. Diagonal.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.energies())
    }

    /// Quadrupolar part 2π·Λ·(3Iz² - I(I+1)) only.
    pub fn quadrupolar_hamiltonian(&self) -> ComplexMatrix {
        let w_q = self.lambda_angular();
        let d: Vec<f64> = self.quad_diagonal().iter().map(|q| w_q * q).collect();
        ComplexMatrix::from_real_diagonal(&d)
    }

    fn diagonal_propagator(energies: &[f64], tau: f64) -> ComplexMatrix {
        let phases: Vec<Complex64> = energies.iter().map(|e| c(0.0, -e * tau).exp()).collect();
        ComplexMatrix::from_diagonal(&phases)
    }

    /// exp(-i H_Q τ): evolution under the quadrupolar term alone (on-resonance
    /// rotating frame). For I = 3/2 this is diag(e^{-3iΛτ}, e^{3iΛτ}, e^{3iΛτ}, e^{-3iΛτ}).
    pub fn quad_evolution(&self, tau: f64) -> ComplexMatrix {
        let w_q = self.lambda_angular();
        let e: Vec<f64> = self.quad_diagonal().iter().map(|q| w_q * q).collect();
        Self::diagonal_propagator(&e, tau)
    }

    /// exp(-i H τ) under the full rotating-frame Hamiltonian, offset included.
    pub fn free_evolution(&self, tau: f64) -> ComplexMatrix {
        Self::diagonal_propagator(&self.energies(), tau)
    }

    /// τ = π / (12 Λ) with Λ in rad/s: the delay giving ±π/4 quadrupolar phases.
    pub fn controlled_phase_delay(&self) -> f64 {
        PI / (12.0 * self.lambda_angular())
    }

    fn make_transition(&self, a: usize, b: usize) -> Transition {
        let e = self.energies();
        let ops = self.operators();
        let (upper, lower) = (a.min(b), a.max(b));
        let delta_m = self.m_of(upper) - self.m_of(lower);
        let kind = if (delta_m - 1.0).abs() < 1e-12 {
            TransitionKind::SingleQuantum
        } else {
            TransitionKind::Forbidden
        };
        Transition {
            levels: (a, b),
            labels: (self.labels[a].clone(), self.labels[b].clone()),
            kind,
            frequency_hz: (e[upper] - e[lower]) / (2.0 * PI),
            ix_element: ops.ix.get(upper, lower).norm(),
            delta_m,
        }
    }

    /// All level pairs, single-quantum first in descending-m order, then the
    /// forbidden ones.
    pub fn transition_table(&self) -> Vec<Transition> {
        let d = self.dim();
        let mut out: Vec<Transition> = (1..d).map(|k| self.make_transition(k - 1, k)).collect();
        for a in 0..d {
            for b in (a + 2)..d {
                out.push(self.make_transition(a, b));
            }
        }
        out
    }

    pub fn observable_transitions(&self) -> Vec<Transition> {
        (1..self.dim())
            .map(|k| self.make_transition(k - 1, k))
            .collect()
    }

    /// Looks up a transition by its two labels, preserving the named order.
    pub fn transition(&self, first: &str, second: &str) -> Result<Transition> {
        let a = self.index_of(first)?;
        let b = self.index_of(second)?;
        if a == b {
            return Err(Error::UnknownLabel(format!("{first}-{second}")));
        }
        Ok(self.make_transition(a, b))
    }

    /// Like [`SpinSystem::transition`] but rejects forbidden transitions.
    pub fn observable_transition(&self, first: &str, second: &str) -> Result<Transition> {
        let t = self.transition(first, second)?;
        if !t.is_observable() {
            return Err(Error::ForbiddenTransition(t.name(), t.delta_m));
        }
        Ok(t)
    }
}
