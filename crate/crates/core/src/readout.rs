//! Single-quantum observables, FID synthesis, Fourier transform and peak table.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::prep::DeviationDensityMatrix;
use crate::qudit::c;
use crate::relaxation::RelaxationParams;
use crate::spin_system::{SpinSystem, Transition};

pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_DWELL_S: f64 = 5e-6;
pub const DEFAULT_LB_HZ: f64 = 200.0;
/// Peaks are integrated over this many linewidths either side of the line.
pub const WINDOW_LINEWIDTHS: f64 = 3.0;

/// Complex amplitude carried by one observable transition.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableAmplitude {
    pub transition: Transition,
    pub amplitude: Complex64,
}

/// amplitude(t) = <upper|Ix|lower> · ρ[upper, lower] for each single-quantum transition.
pub fn observable_amplitudes(
    rho: &DeviationDensityMatrix,
    sys: &SpinSystem,
) -> Vec<ObservableAmplitude> {
    sys.observable_transitions()
        .into_iter()
        .map(|t| {
            let amplitude = rho.matrix().get(t.upper(), t.lower()) * t.ix_element;
            ObservableAmplitude {
                transition: t,
                amplitude,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionParams {
    pub points: usize,
    pub dwell_s: f64,
    pub lb_hz: f64,
}

impl Default for AcquisitionParams {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS,
            dwell_s: DEFAULT_DWELL_S,
            lb_hz: DEFAULT_LB_HZ,
        }
    }
}

impl AcquisitionParams {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidAcquisition(format!(
                "need at least 2 points, got {}",
                self.points
            )));
        }
        if !(self.dwell_s.is_finite() && self.dwell_s > 0.0) {
            return Err(Error::InvalidAcquisition(format!(
                "dwell must be positive, got {}",
                self.dwell_s
            )));
        }
        if !(self.lb_hz.is_finite() && self.lb_hz >= 0.0) {
            return Err(Error::InvalidAcquisition(format!(
                "line broadening must be >= 0, got {}",
                self.lb_hz
            )));
        }
        Ok(())
    }

    pub fn nyquist_hz(&self) -> f64 {
        0.5 / self.dwell_s
    }
}

/// One spectral line contributing to a FID.
#[derive(Debug, Clone, PartialEq)]
pub struct FidLine {
    pub label: String,
    pub frequency_hz: f64,
    pub amplitude: Complex64,
    /// Transverse relaxation during acquisition, if any.
    pub t2_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fid {
    pub points: usize,
    pub dwell_s: f64,
    pub lb_hz: f64,
    pub samples: Vec<Complex64>,
    pub lines: Vec<FidLine>,
}

impl Fid {
    /// FWHM in Hz of a line with the given T2.
    pub fn linewidth_hz(&self, t2_s: Option<f64>) -> f64 {
        self.lb_hz + t2_s.map_or(0.0, |t2| 1.0 / (std::f64::consts::PI * t2))
    }

    /// Element-wise sum of two FIDs on the same grid.
    pub fn sum(&self, other: &Fid) -> Result<Fid> {
        if self.points != other.points || self.dwell_s != other.dwell_s || self.lb_hz != other.lb_hz
        {
            return Err(Error::InvalidAcquisition(
                "FIDs are on different grids".into(),
            ));
        }
        let mut lines = self.lines.clone();
        for l in &other.lines {
            match lines.iter_mut().find(|x| {
                x.label == l.label && x.frequency_hz == l.frequency_hz && x.t2_s == l.t2_s
            }) {
                Some(x) => x.amplitude += l.amplitude,
                None => lines.push(l.clone()),
            }
        }
        Ok(Fid {
            points: self.points,
            dwell_s: self.dwell_s,
            lb_hz: self.lb_hz,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            lines,
        })
    }
}

/// s(t_k) = Σ a_t e^{i2πf_t t_k} e^{-t_k/T2(t)} e^{-π lb t_k}, t_k = k·dwell.
pub fn synthesize_fid(
    amplitudes: &[ObservableAmplitude],
    sys: &SpinSystem,
    params: &AcquisitionParams,
    relax: Option<&RelaxationParams>,
) -> Result<Fid> {
    params.validate()?;
    let limit = params.nyquist_hz();
    let mut lines = Vec::with_capacity(amplitudes.len());
    for a in amplitudes {
        let f = a.transition.frequency_hz;
        if f.abs() >= limit {
            return Err(Error::Nyquist {
                freq_hz: f,
                limit_hz: limit,
            });
        }
        lines.push(FidLine {
            label: a.transition.name(),
            frequency_hz: f,
            amplitude: a.amplitude,
            t2_s: relax.map(|r| r.t2_of(sys, &a.transition)),
        });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let samples = (0..params.points)
        .map(|k| {
            let t = k as f64 * params.dwell_s;
            let broad = (-std::f64::consts::PI * params.lb_hz * t).exp();
            lines
                .iter()
                .map(|l| {
                    let decay = l.t2_s.map_or(1.0, |t2| (-t / t2).exp());
                    l.amplitude * c(0.0, two_pi * l.frequency_hz * t).exp() * (decay * broad)
                })
                .sum::<Complex64>()
        })
        .collect();
    Ok(Fid {
        points: params.points,
        dwell_s: params.dwell_s,
        lb_hz: params.lb_hz,
        samples,
        lines,
    })
}

/// Acquires the FID of a deviation matrix.
pub fn acquire(
    rho: &DeviationDensityMatrix,
    sys: &SpinSystem,
    params: &AcquisitionParams,
    relax: Option<&RelaxationParams>,
) -> Result<Fid> {
    synthesize_fid(&observable_amplitudes(rho, sys), sys, params, relax)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phasing {
    /// Zero-order phase maximizing Σ|Re integral|, largest peak made positive.
    Auto,
    /// Fixed zero-order phase in radians.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Weight applied to the first FID point before the transform.
    pub first_point_scale: f64,
    pub phasing: Phasing,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            first_point_scale: 0.5,
            phasing: Phasing::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub label: String,
    /// Expected line position.
    pub frequency_hz: f64,
    /// Bin of largest |Re| inside the integration window.
    pub estimated_frequency_hz: f64,
    /// Σ Re(amplitude) over the window.
    pub real_integral: f64,
    /// Re(amplitude) at the bin nearest the expected position.
    pub height: f64,
    /// +1, -1 or 0.
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freq_axis_hz: Vec<f64>,
    /// Phased spectrum, X_k / N.
    pub amplitude: Vec<Complex64>,
    pub peaks: Vec<Peak>,
    pub phase_rad: f64,
}

impl Spectrum {
    pub fn resolution_hz(&self) -> f64 {
        if self.freq_axis_hz.len() < 2 {
            return 0.0;
        }
        self.freq_axis_hz[1] - self.freq_axis_hz[0]
    }

    pub fn peak(&self, label: &str) -> Option<&Peak> {
        self.peaks.iter().find(|p| p.label == label)
    }
}

pub fn spectrum(fid: &Fid) -> Result<Spectrum> {
    spectrum_with(fid, &SpectrumOptions::default())
}

/// Unphased DFT, X_k / N, on a centered frequency axis.
pub fn transform(fid: &Fid, first_point_scale: f64) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let n = fid.samples.len();
    if n < 2 || n != fid.points {
        return Err(Error::InvalidAcquisition(format!(
            "FID has {n} samples, expected {}",
            fid.points
        )));
    }
    let mut buf = fid.samples.clone();
    buf[0] *= first_point_scale;
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / n as f64;
    for x in buf.iter_mut() {
        *x *= norm;
    }
    let df = 1.0 / (n as f64 * fid.dwell_s);
    let mut freqs: Vec<f64> = (0..n)
        .map(|j| {
            let j = j as i64;
            let j = if j < (n as i64 + 1) / 2 {
                j
            } else {
                j - n as i64
            };
            j as f64 * df
        })
        .collect();
    buf.rotate_right(n / 2);
    freqs.rotate_right(n / 2);
    Ok((freqs, buf))
}

struct Window {
    lo: usize,
    hi: usize,
    nearest: usize,
}

fn window_for(freqs: &[f64], center: f64, half_width: f64) -> Window {
    let df = freqs[1] - freqs[0];
    let half = half_width.max(2.0 * df);
    let lo = freqs.partition_point(|&f| f < center - half);
    let hi = freqs.partition_point(|&f| f <= center + half);
    let nearest = (((center - freqs[0]) / df).round().max(0.0) as usize).min(freqs.len() - 1);
    Window {
        lo,
        hi: hi.max(lo),
        nearest,
    }
}

fn auto_phase(integrals: &[Complex64]) -> f64 {
    let n = integrals.len();
    if n == 0 {
        return 0.0;
    }
    let score = |phi: f64| -> f64 {
        let rot = c(0.0, phi).exp();
        integrals.iter().map(|z| (rot * z).re.abs()).sum()
    };
    let mut best = (f64::NEG_INFINITY, 0.0);
    for pattern in 0u32..(1 << n) {
        let total: Complex64 = integrals
            .iter()
            .enumerate()
            .map(|(k, z)| if pattern >> k & 1 == 1 { -z } else { *z })
            .sum();
        if total.norm() == 0.0 {
            continue;
        }
        let phi = -total.arg();
        let s = score(phi);
        if s > best.0 + 1e-15 * s.abs().max(1.0) {
            best = (s, phi);
        }
    }
    let mut phi = best.1;
    let largest = integrals
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();
    if (c(0.0, phi).exp() * largest).re < 0.0 {
        phi += std::f64::consts::PI;
    }
    phi.rem_euclid(2.0 * std::f64::consts::PI)
}

pub fn spectrum_with(fid: &Fid, options: &SpectrumOptions) -> Result<Spectrum> {
    let (freqs, raw) = transform(fid, options.first_point_scale)?;
    let windows: Vec<Window> = fid
        .lines
        .iter()
        .map(|l| {
            window_for(
                &freqs,
                l.frequency_hz,
                WINDOW_LINEWIDTHS * fid.linewidth_hz(l.t2_s),
            )
        })
        .collect();
    let integrals: Vec<Complex64> = windows
        .iter()
        .map(|w| raw[w.lo..w.hi].iter().sum())
        .collect();
    let phase_rad = match options.phasing {
        Phasing::Auto => auto_phase(&integrals),
        Phasing::Fixed(phi) => phi,
    };
    let rot = c(0.0, phase_rad).exp();
    let amplitude: Vec<Complex64> = raw.iter().map(|z| z * rot).collect();
    let peaks = fid
        .lines
        .iter()
        .zip(&windows)
        .zip(&integrals)
        .map(|((line, w), integral)| {
            let real_integral = (integral * rot).re;
            let peak_bin = (w.lo..w.hi)
                .max_by(|&a, &b| amplitude[a].re.abs().total_cmp(&amplitude[b].re.abs()))
                .unwrap_or(w.nearest);
            let sign = if real_integral > 0.0 {
                1.0
            } else if real_integral < 0.0 {
                -1.0
            } else {
                0.0
            };
            Peak {
                label: line.label.clone(),
                frequency_hz: line.frequency_hz,
                estimated_frequency_hz: freqs[peak_bin],
                real_integral,
                height: amplitude[w.nearest].re,
                sign,
            }
        })
        .collect();
    Ok(Spectrum {
        freq_axis_hz: freqs,
        amplitude,
        peaks,
        phase_rad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prep::equilibrium_state;
    use crate::pulse::{hard_pulse, Axis};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn line_amp(sys: &SpinSystem, a: &str, b: &str, amp: Complex64) -> ObservableAmplitude {
        ObservableAmplitude {
            transition: sys.observable_transition(a, b).unwrap(),
            amplitude: amp,
        }
    }

    #[test]
    fn diagonal_state_has_no_signal() {
        let sys = SpinSystem::default();
        let amps = observable_amplitudes(&equilibrium_state(&sys), &sys);
        assert!(amps.iter().all(|a| a.amplitude == Complex64::default()));
    }

    #[test]
    fn zero_amplitudes_give_zero_fid() {
        let sys = SpinSystem::default();
        let amps = observable_amplitudes(&equilibrium_state(&sys), &sys);
        let fid = synthesize_fid(&amps, &sys, &AcquisitionParams::default(), None).unwrap();
        assert!(fid.samples.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn on_resonance_line_without_decay_is_constant() {
        let sys = SpinSystem::default();
        let amps = [line_amp(&sys, "01", "11", c(1.0, 0.0))];
        let params = AcquisitionParams {
            points: 64,
            lb_hz: 0.0,
            ..Default::default()
        };
        let fid = synthesize_fid(&amps, &sys, &params, None).unwrap();
        assert!(fid.samples.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));
        let spec = spectrum(&fid).unwrap();
        let max_bin = (0..spec.amplitude.len())
            .max_by(|&a, &b| {
                spec.amplitude[a]
                    .norm()
                    .total_cmp(&spec.amplitude[b].norm())
            })
            .unwrap();
        assert_eq!(spec.freq_axis_hz[max_bin], 0.0);
    }

    #[test]
    fn nyquist_violation_rejected() {
        let sys = SpinSystem::default();
        let amps = [line_amp(&sys, "00", "01", c(1.0, 0.0))];
        let params = AcquisitionParams {
            dwell_s: 1.0 / 32_000.0,
            ..Default::default()
        };
        assert!(matches!(
            synthesize_fid(&amps, &sys, &params, None),
            Err(Error::Nyquist { .. })
        ));
    }

    #[test]
    fn frequency_axis_is_centered() {
        let sys = SpinSystem::default();
        let params = AcquisitionParams {
            points: 8,
            dwell_s: 1e-3,
            lb_hz: 0.0,
        };
        let fid = synthesize_fid(&[], &sys, &params, None).unwrap();
        let (f, _) = transform(&fid, 1.0).unwrap();
        assert_eq!(
            f,
            vec![-500.0, -375.0, -250.0, -125.0, 0.0, 125.0, 250.0, 375.0]
        );
    }

    #[test]
    fn parseval() {
        let sys = SpinSystem::default();
        let amps = [
            line_amp(&sys, "00", "01", c(0.3, -0.2)),
            line_amp(&sys, "01", "11", c(-1.0, 0.4)),
            line_amp(&sys, "11", "10", c(0.7, 0.1)),
        ];
        let fid = synthesize_fid(&amps, &sys, &AcquisitionParams::default(), None).unwrap();
        let (_, x) = transform(&fid, 1.0).unwrap();
        let time: f64 = fid.samples.iter().map(|z| z.norm_sqr()).sum();
        let freq: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>() * fid.points as f64;
        assert!(((time - freq) / time).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_spectrum_is_3_4_3() {
        let sys = SpinSystem::default();
        let rho = equilibrium_state(&sys)
            .evolve(&hard_pulse(&sys, Axis::Y, FRAC_PI_2).unwrap())
            .unwrap();
        let spec =
            spectrum(&acquire(&rho, &sys, &AcquisitionParams::default(), None).unwrap()).unwrap();
        let i: Vec<f64> = spec.peaks.iter().map(|p| p.real_integral).collect();
        assert!((i[0] / i[1] - 0.75).abs() < 0.0075, "{i:?}");
        assert!((i[2] / i[1] - 0.75).abs() < 0.0075, "{i:?}");
        for p in &spec.peaks {
            assert!((p.estimated_frequency_hz - p.frequency_hz).abs() <= spec.resolution_hz());
            assert_eq!(p.sign, 1.0);
        }
    }

    #[test]
    fn auto_phase_recovers_rotation() {
        let sys = SpinSystem::default();
        let rot = c(0.0, 1.1).exp();
        let amps = [
            line_amp(&sys, "00", "01", rot * 0.75),
            line_amp(&sys, "01", "11", rot * -1.0),
            line_amp(&sys, "11", "10", rot * 0.75),
        ];
        let spec =
            spectrum(&synthesize_fid(&amps, &sys, &AcquisitionParams::default(), None).unwrap())
                .unwrap();
        let signs: Vec<f64> = spec.peaks.iter().map(|p| p.sign).collect();
        assert_eq!(signs, vec![-1.0, 1.0, -1.0]);
        assert!((spec.phase_rad - (PI - 1.1)).abs() < 1e-9);
    }
}
