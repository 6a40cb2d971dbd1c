//! CSV artifacts. Floats are written with 17 significant digits.

use std::fs::File;
use std::path::{Path, PathBuf};

use quadgate::{DeviationDensityMatrix, Spectrum, SpinSystem};

use crate::CliError;

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))
}

fn finish(mut w: csv::Writer<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// freq_hz, real, imag.
pub fn write_spectrum(dir: &Path, stem: &str, spec: &Spectrum) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{stem}-spectrum.csv"));
    let mut w = writer(&path)?;
    let io = |e| CliError::io(&path, e);
    w.write_record(["freq_hz", "real", "imag"]).map_err(io)?;
    for (f, a) in spec.freq_axis_hz.iter().zip(&spec.amplitude) {
        w.write_record([float(*f), float(a.re), float(a.im)])
            .map_err(io)?;
    }
    finish(w, &path)?;
    Ok(path)
}

/// transition, frequency_hz, integral, height, sign.
pub fn write_peaks(dir: &Path, stem: &str, spec: &Spectrum) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{stem}-peaks.csv"));
    let mut w = writer(&path)?;
    let io = |e| CliError::io(&path, e);
    w.write_record(["transition", "frequency_hz", "integral", "height", "sign"])
        .map_err(io)?;
    for p in &spec.peaks {
        w.write_record([
            p.label.clone(),
            float(p.frequency_hz),
            float(p.real_integral),
            float(p.height),
            format!("{}", p.sign as i32),
        ])
        .map_err(io)?;
    }
    finish(w, &path)?;
    Ok(path)
}

/// level, m, population.
pub fn write_populations(
    dir: &Path,
    stem: &str,
    rho: &DeviationDensityMatrix,
    sys: &SpinSystem,
) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{stem}-populations.csv"));
    let mut w = writer(&path)?;
    let io = |e| CliError::io(&path, e);
    w.write_record(["level", "m", "population"]).map_err(io)?;
    for (k, p) in rho.populations().iter().enumerate() {
        w.write_record([sys.label(k).to_string(), float(sys.m_of(k)), float(*p)])
            .map_err(io)?;
    }
    finish(w, &path)?;
    Ok(path)
}
