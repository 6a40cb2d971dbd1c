//! `quadgate`: run simulated experiments and verify pulse-sequence files.
//!
//! Exit status: 0 on success, 1 on configuration, input or parse errors,
//! 2 when a readout is ambiguous or a `--strict` check fails. Errors are
//! printed to standard error as `quadgate: error[<code>]: <message>`.

mod matrix_file;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quadgate::dj::{oracle_matrix, run_dj, DjOptions, Method, OracleId};
use quadgate::prep::{equilibrium_state, pseudopure_00};
use quadgate::pulse::{hard_pulse, Axis};
use quadgate::qudit::{gate_fidelity_global_phase, relative_global_phase};
use quadgate::readout::{acquire, spectrum, AcquisitionParams};
use quadgate::relaxation::RelaxationParams;
use quadgate::sequence::{compile_unitary, parse_sequence};
use quadgate::spin_system::{SpinSystem, DEFAULT_SPLITTING_HZ};
use quadgate::{ComplexMatrix, Spin};

/// Fidelity at or above which a compiled sequence matches its target.
const FIDELITY_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "quadgate",
    version,
    about = "Spin-3/2 NMR quantum-gate simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hard π/2 spectrum of the thermal state.
    Equilibrium {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        acquisition: AcquisitionArgs,
        #[command(flatten)]
        relaxation: RelaxationArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Population table of the |00⟩ pseudopure state.
    Pseudopure {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Deutsch-Jozsa run(s) with spectrum and peak-table output.
    Dj {
        /// f1, f2, f3, f4 or all.
        #[arg(long, value_parser = ["f1", "f2", "f3", "f4", "all"])]
        oracle: String,
        /// ideal-matrix, selective-z, quad-evolution or all.
        #[arg(long, value_parser = ["ideal-matrix", "selective-z", "quad-evolution", "all"])]
        method: String,
        /// Gaussian selective pulses instead of ideal ones.
        #[arg(long)]
        shaped: bool,
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        acquisition: AcquisitionArgs,
        #[command(flatten)]
        relaxation: RelaxationArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compile a .qseq file and compare it with a target gate.
    CompileCheck {
        file: PathBuf,
        /// u1, u2, u3, u4 or the path of a matrix file.
        #[arg(long)]
        against: String,
        /// Exit with status 2 when the fidelity is below threshold.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Debug, Args)]
struct SystemArgs {
    /// Adjacent-line splitting in Hz.
    #[arg(long, default_value_t = DEFAULT_SPLITTING_HZ, allow_negative_numbers = true)]
    splitting: f64,
    /// Carrier offset in Hz.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    offset: f64,
}

impl SystemArgs {
    fn build(&self) -> Result<SpinSystem, CliError> {
        if !self.splitting.is_finite() || !self.offset.is_finite() {
            return Err(CliError::config("splitting and offset must be finite"));
        }
        if self.splitting == 0.0 {
            eprintln!("quadgate: warning[degenerate-spectrum]: splitting is 0 Hz; all lines coincide at the carrier");
        }
        Ok(SpinSystem::from_splitting(
            Spin::THREE_HALVES,
            self.splitting,
            self.offset,
        ))
    }
}

#[derive(Debug, Args)]
struct AcquisitionArgs {
    /// FID points.
    #[arg(long, default_value_t = 4096)]
    points: usize,
    /// Dwell time in seconds.
    #[arg(long, default_value_t = 5e-6)]
    dwell: f64,
    /// Exponential line broadening in Hz.
    #[arg(long, default_value_t = 200.0)]
    lb: f64,
}

impl AcquisitionArgs {
    fn build(&self) -> Result<AcquisitionParams, CliError> {
        let p = AcquisitionParams {
            points: self.points,
            dwell_s: self.dwell,
            lb_hz: self.lb,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
struct RelaxationArgs {
    /// Enable relaxation (implied by any of the time flags).
    #[arg(long)]
    relax: bool,
    /// T1 in seconds.
    #[arg(long)]
    t1: Option<f64>,
    /// Central-transition T2 in seconds.
    #[arg(long)]
    t2_central: Option<f64>,
    /// Outer-transition T2 in seconds.
    #[arg(long)]
    t2_outer: Option<f64>,
    /// Multi-quantum coherence T2 in seconds (defaults to the outer T2).
    #[arg(long)]
    t2_multi: Option<f64>,
}

impl RelaxationArgs {
    fn build(&self) -> Result<Option<RelaxationParams>, CliError> {
        let any = self.t1.is_some()
            || self.t2_central.is_some()
            || self.t2_outer.is_some()
            || self.t2_multi.is_some();
        if !(self.relax || any) {
            return Ok(None);
        }
        let d = RelaxationParams::default();
        let outer = self.t2_outer.unwrap_or(d.t2_outer_s);
        Ok(Some(RelaxationParams::with_multi(
            self.t1.unwrap_or(d.t1_s),
            self.t2_central.unwrap_or(d.t2_central_s),
            outer,
            self.t2_multi.unwrap_or(outer),
        )?))
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Directory for CSV artifacts.
    #[arg(long, env = "QUADGATE_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

/// A failure with its exit status and machine-readable code.
#[derive(Debug)]
pub struct CliError {
    code: String,
    message: String,
    status: u8,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: "invalid-argument".into(),
            message: message.into(),
            status: 1,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self {
            code: "io".into(),
            message: format!("{}: {err}", path.display()),
            status: 1,
        }
    }
}

impl From<quadgate::Error> for CliError {
    fn from(e: quadgate::Error) -> Self {
        Self {
            code: e.code().to_string(),
            message: e.to_string(),
            status: if e.is_ambiguous() { 2 } else { 1 },
        }
    }
}

fn expand<T: Copy>(
    choice: &str,
    all: &[T],
    parse: impl Fn(&str) -> quadgate::Result<T>,
) -> Result<Vec<T>, CliError> {
    if choice == "all" {
        Ok(all.to_vec())
    } else {
        Ok(vec![parse(choice)?])
    }
}

fn cmd_equilibrium(
    system: &SystemArgs,
    acquisition: &AcquisitionArgs,
    relaxation: &RelaxationArgs,
    out: &OutArgs,
) -> Result<u8, CliError> {
    let sys = system.build()?;
    let params = acquisition.build()?;
    let relax = relaxation.build()?;
    let rho =
        equilibrium_state(&sys).evolve(&hard_pulse(&sys, Axis::Y, std::f64::consts::FRAC_PI_2)?)?;
    let spec = spectrum(&acquire(&rho, &sys, &params, relax.as_ref())?)?;
    output::ensure_dir(&out.out_dir)?;
    output::write_spectrum(&out.out_dir, "equilibrium", &spec)?;
    output::write_peaks(&out.out_dir, "equilibrium", &spec)?;
    let reference = spec
        .peaks
        .iter()
        .map(|p| p.real_integral.abs())
        .fold(0.0, f64::max);
    for p in &spec.peaks {
        let rel = if reference > 0.0 {
            p.real_integral / reference
        } else {
            0.0
        };
        println!(
            "{} {:.3} Hz integral {:.6} relative {:.4}",
            p.label, p.frequency_hz, p.real_integral, rel
        );
    }
    Ok(0)
}

fn cmd_pseudopure(system: &SystemArgs, out: &OutArgs) -> Result<u8, CliError> {
    let sys = system.build()?;
    let rho = pseudopure_00(&sys, &equilibrium_state(&sys))?;
    output::ensure_dir(&out.out_dir)?;
    output::write_populations(&out.out_dir, "pseudopure", &rho, &sys)?;
    for (k, p) in rho.populations().iter().enumerate() {
        println!("{} {}", sys.label(k), p);
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_dj(
    oracle: &str,
    method: &str,
    shaped: bool,
    system: &SystemArgs,
    acquisition: &AcquisitionArgs,
    relaxation: &RelaxationArgs,
    out: &OutArgs,
) -> Result<u8, CliError> {
    let oracles = expand(oracle, &OracleId::ALL, str::parse)?;
    let methods = expand(method, &Method::ALL, str::parse)?;
    let sys = system.build()?;
    let options = DjOptions {
        relaxation: relaxation.build()?,
        shaped_pulses: shaped,
        acquisition: acquisition.build()?,
    };
    output::ensure_dir(&out.out_dir)?;
    let single = oracles.len() * methods.len() == 1;
    for &id in &oracles {
        for &m in &methods {
            let outcome = run_dj(id, &sys, m, &options)?;
            let stem = format!("dj-{id}-{m}");
            output::write_spectrum(&out.out_dir, &stem, &outcome.spectrum)?;
            output::write_peaks(&out.out_dir, &stem, &outcome.spectrum)?;
            if single {
                println!("{}", outcome.classification);
            } else {
                println!("{id} {m} {}", outcome.classification);
            }
        }
    }
    Ok(0)
}

fn cmd_compile_check(file: &Path, against: &str, strict: bool) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::io(file, e))?;
    let ir = parse_sequence(&text).map_err(|e| CliError {
        code: e.code.as_str().to_string(),
        message: format!("{}:{e}", file.display()),
        status: 1,
    })?;
    let sys = ir.system.spin_system();
    let target: ComplexMatrix = match against {
        "u1" | "u2" | "u3" | "u4" => {
            let id: OracleId = format!("f{}", &against[1..]).parse()?;
            oracle_matrix(id)
        }
        path => matrix_file::read(Path::new(path))?,
    };
    let u = compile_unitary(&ir, &sys)?;
    let fidelity = gate_fidelity_global_phase(&u, &target)?;
    let phase = relative_global_phase(&target, &u)?;
    println!("fidelity {fidelity:.12}");
    println!("global-phase {:.12}{:+.12}i", phase.re, phase.im);
    if fidelity >= FIDELITY_THRESHOLD {
        return Ok(0);
    }
    println!("below threshold {FIDELITY_THRESHOLD}");
    Ok(if strict { 2 } else { 0 })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Equilibrium {
            system,
            acquisition,
            relaxation,
            out,
        } => cmd_equilibrium(system, acquisition, relaxation, out),
        Command::Pseudopure { system, out } => cmd_pseudopure(system, out),
        Command::Dj {
            oracle,
            method,
            shaped,
            system,
            acquisition,
            relaxation,
            out,
        } => cmd_dj(
            oracle,
            method,
            *shaped,
            system,
            acquisition,
            relaxation,
            out,
        ),
        Command::CompileCheck {
            file,
            against,
            strict,
        } => cmd_compile_check(file, against, *strict),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("quadgate: error[usage]: {first}");
            eprint!(
                "{}",
                rendered
                    .lines()
                    .skip(1)
                    .map(|l| format!("{l}\n"))
                    .collect::<String>()
            );
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("quadgate: error[{}]: {}", e.code, e.message);
            ExitCode::from(e.status)
        }
    }
}
