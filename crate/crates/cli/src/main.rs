use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use parwalk_cli::commands::{write_spectrum_csv, write_spectrum_file};
use parwalk_cli::model::DEFAULT_CAP;
use parwalk_cli::{cmd_build, cmd_compare, cmd_spectrum, cmd_verify, AcceptanceKind, CliError, Construction, EnergySpec, ModelSpec, Options, Report, Source};

#[derive(Parser)]
#[command(name = "parwalk", version, about = "Block encodings and quantum walks for propose-accept/reject chains")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the requested constructions and print their parameters
    Build(Common),
    /// Check the decomposition, the encodings and the walk identities
    Verify(Common),
    /// Walk eigenphases against +-arccos of the discriminant eigenvalues (CSV)
    Spectrum(Common),
    /// Ancilla and scale comparison
    Compare {
        #[command(flatten)]
        common: Common,
        /// Use sizes only; nothing is built and no size cap applies
        #[arg(long)]
        counts_only: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Hypercube,
    Cnf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyKind {
    Hamming,
    Random,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "hypercube")]
    model: ModelKind,
    /// Number of bits of the hypercube
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// DIMACS CNF file for --model cnf
    #[arg(long)]
    cnf: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "hamming")]
    energy: EnergyKind,
    /// Number of energy levels for --energy random
    #[arg(long = "B")]
    levels: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, value_enum, default_value = "metropolis")]
    acceptance: AcceptanceKind,
    /// Use the lazy chain (I + P) / 2
    #[arg(long)]
    lazy: bool,
    #[arg(long, value_enum, default_value = "both")]
    construction: Construction,
    /// Tolerance on the extracted block
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Largest number of bits for commands that build matrices
    #[arg(long, default_value_t = DEFAULT_CAP)]
    max_n: u32,
    /// Output file: CSV for spectrum, JSON report otherwise
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the table
    #[arg(long)]
    json: bool,
    /// Record wall-clock timings in the report
    #[arg(long)]
    timings: bool,
    /// Perturb one acceptance probability (tests the failure path)
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl Common {
    fn spec(&self) -> Result<ModelSpec, CliError> {
        let source = match self.model {
            ModelKind::Hypercube => {
                let energy = match self.energy {
                    EnergyKind::Hamming => EnergySpec::Hamming,
                    EnergyKind::Random => {
                        let levels = self.levels.ok_or_else(|| CliError::Input("--energy random needs --B".into()))?;
                        EnergySpec::Random { levels, seed: self.seed }
                    }
                };
                Source::Hypercube { n: self.n, energy }
            }
            ModelKind::Cnf => {
                let path = self.cnf.clone().ok_or_else(|| CliError::Input("--model cnf needs --cnf <file>".into()))?;
                Source::Cnf { path }
            }
        };
        Ok(ModelSpec { source, beta: self.beta, acceptance: self.acceptance, lazy: self.lazy })
    }

    fn options(&self) -> Options {
        Options {
            construction: self.construction,
            tol: self.tol,
            cap: self.max_n,
            inject_fault: self.inject_fault,
            timings: self.timings,
        }
    }
}

fn warn_memory(spec: &ModelSpec, opts: &Options) {
    if opts.cap == DEFAULT_CAP {
        return;
    }
    if let Ok(sizes) = spec.sizes() {
        if sizes.bits > DEFAULT_CAP && sizes.bits <= opts.cap {
            // dense PAR isometry (2N^2 x N complex) dominates
            let n = 1f64 * (1u64 << sizes.bits) as f64;
            let bytes = 2.0 * n * n * n * 16.0;
            eprintln!("memory estimate: ~{:.1} MiB for the dense walk isometry", bytes / (1 << 20) as f64);
        }
    }
}

fn emit(report: &Report, common: &Common, write_file: bool) -> Result<(), CliError> {
    if write_file {
        if let Some(path) = &common.out {
            std::fs::write(path, report.to_json() + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
    }
    let text = if common.json { report.to_json() + "\n" } else { report.to_table() };
    stdout_write(&text)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Command::Build(c) => {
            let (spec, opts) = (c.spec()?, c.options());
            warn_memory(&spec, &opts);
            let r = cmd_build(&spec, &opts)?;
            emit(&r, &c, true)?;
            Ok(r.pass)
        }
        Command::Verify(c) => {
            let (spec, opts) = (c.spec()?, c.options());
            warn_memory(&spec, &opts);
            let r = cmd_verify(&spec, &opts)?;
            emit(&r, &c, true)?;
            if !r.pass {
                eprintln!("failed checks: {}", r.deviations.failures().join(", "));
            }
            Ok(r.pass)
        }
        Command::Spectrum(c) => {
            let (spec, opts) = (c.spec()?, c.options());
            warn_memory(&spec, &opts);
            let (r, rows) = cmd_spectrum(&spec, &opts)?;
            let summary = r.spectrum.expect("spectrum command fills the summary");
            match &c.out {
                Some(path) => {
                    write_spectrum_file(path, &rows, &summary)?;
                    emit(&r, &c, false)?;
                }
                None if c.json => emit(&r, &c, false)?,
                None => write_spectrum_csv(std::io::stdout().lock(), &rows, &summary)?,
            }
            Ok(r.pass)
        }
        Command::Compare { common: c, counts_only } => {
            let (spec, opts) = (c.spec()?, c.options());
            let r = cmd_compare(&spec, counts_only, &opts)?;
            emit(&r, &c, true)?;
            if !c.json {
                let a = &r.ancillas;
                let verdict = if a.paper < a.szegedy { "compressed encoding uses fewer ancillas" } else { "compression does not save ancillas at this size" };
                stdout_write(&format!("{verdict}\n"))?;
            }
            Ok(r.pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn stdout_write(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}
