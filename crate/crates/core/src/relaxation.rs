//! Phenomenological T1/T2 relaxation of the deviation density matrix.

use crate::error::{Error, Result};
use crate::prep::{equilibrium_state, DeviationDensityMatrix};
use crate::qudit::c;
use crate::spin_system::{SpinSystem, Transition};

/// Relaxation times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationParams {
    pub t1_s: f64,
    pub t2_central_s: f64,
    pub t2_outer_s: f64,
    /// Decay time of double and triple quantum coherences.
    pub t2_multi_s: f64,
}

impl Default for RelaxationParams {
    /// T1 = 16 ms, T2 = 14 ms (central) and 4 ms (outer, multi-quantum).
    fn default() -> Self {
        Self::new(16e-3, 14e-3, 4e-3).expect("default relaxation times are valid")
    }
}

impl RelaxationParams {
    /// Multi-quantum decay defaults to the outer-transition T2.
    pub fn new(t1_s: f64, t2_central_s: f64, t2_outer_s: f64) -> Result<Self> {
        Self::with_multi(t1_s, t2_central_s, t2_outer_s, t2_outer_s)
    }

    pub fn with_multi(
        t1_s: f64,
        t2_central_s: f64,
        t2_outer_s: f64,
        t2_multi_s: f64,
    ) -> Result<Self> {
        let p = Self {
            t1_s,
            t2_central_s,
            t2_outer_s,
            t2_multi_s,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t1", self.t1_s),
            ("t2_central", self.t2_central_s),
            ("t2_outer", self.t2_outer_s),
            ("t2_multi", self.t2_multi_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidRelaxation(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Transverse decay time of the coherence between levels `i` and `j`.
    pub fn t2_between(&self, sys: &SpinSystem, i: usize, j: usize) -> f64 {
        let dm = (sys.m_of(i) - sys.m_of(j)).abs();
        if (dm - 1.0).abs() > 1e-12 {
            return self.t2_multi_s;
        }
        let upper = i.min(j);
        if sys.spin().twice() % 2 == 1 && upper == sys.spin().twice() as usize / 2 {
            self.t2_central_s
        } else {
            self.t2_outer_s
        }
    }

    pub fn t2_of(&self, sys: &SpinSystem, t: &Transition) -> f64 {
        self.t2_between(sys, t.upper(), t.lower())
    }
}

/// Relaxes `rho` for `dt` seconds: populations return toward the equilibrium
/// deviation with e^{-dt/T1}, coherences decay with their T2.
pub fn apply_relaxation(
    rho: &DeviationDensityMatrix,
    dt: f64,
    params: &RelaxationParams,
    sys: &SpinSystem,
) -> Result<DeviationDensityMatrix> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(Error::InvalidRelaxation(format!(
            "interval must be non-negative, got {dt}"
        )));
    }
    let d = rho.dim();
    if d != sys.dim() {
        return Err(Error::DimensionMismatch {
            left: d,
            right: sys.dim(),
        });
    }
    if dt == 0.0 {
        return Ok(rho.clone());
    }
    let eq = equilibrium_state(sys);
    let mut m = rho.matrix().clone();
    let longitudinal = (-dt / params.t1_s).exp();
    for i in 0..d {
        let target = eq.matrix().get(i, i).re;
        let p = m.get(i, i).re;
        m.set(i, i, c(target + (p - target) * longitudinal, 0.0));
        for j in (i + 1)..d {
            let f = (-dt / params.t2_between(sys, i, j)).exp();
            m.set(i, j, m.get(i, j) * f);
            m.set(j, i, m.get(j, i) * f);
        }
    }
    Ok(DeviationDensityMatrix::from_matrix_unchecked(m))
}
