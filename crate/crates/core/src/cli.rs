//! `furnace` command line: simulate, reduce, curve, operate, verify.
//!
//! Exit codes: 0 success, 1 lumped-model rejection (e.g. passivity),
//! 2 usage, 3 I/O, 4 parse, 5 mesh/assembly, 6 solver, 7 verification
//! failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::load_config;
use crate::error::Error;
use crate::fem::{solve_fields, AssemblyMode, Discretization, SolverKind, SolverOptions};
use crate::fields::{export_vtk, terminal_report, TerminalReport};
use crate::lumped::{characteristic_curve, predict_power, reduce, required_current, ReducedModel};
use crate::mesh::load_msh;
use crate::verify::{run_case, Case};

pub const EXIT_LUMPED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_PARSE: u8 = 4;
pub const EXIT_ASSEMBLY: u8 = 5;
pub const EXIT_SOLVE: u8 = 6;
pub const EXIT_VERIFY: u8 = 7;

/// File names written by `simulate` into its output directory.
pub const REPORT_FILE: &str = "report.json";
pub const FIELDS_FILE: &str = "fields.vtk";
pub const MANIFEST_FILE: &str = "manifest.json";
/// Default output of `reduce`, next to the report.
pub const REDUCED_FILE: &str = "reduced.json";

#[derive(Debug, Parser)]
#[command(
    name = "furnace",
    version,
    about = "Three-phase furnace eddy-current solver and reduced-impedance planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Direct,
    Iterative,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the field problem and write the terminal report, VTK fields and a run manifest.
    Simulate {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Default: direct up to 200 000 unknowns, iterative above.
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        gauge_seed: u64,
        /// Worker threads for assembly and post-processing.
        #[arg(long)]
        threads: Option<usize>,
        /// Reproducible accumulation order in assembly.
        #[arg(long)]
        deterministic: bool,
    },
    /// Reduce a three-terminal report to Z_R.
    Reduce {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        allow_nonpassive: bool,
        /// Default: reduced.json next to the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the power-versus-current curve of a reduced model as CSV.
    Curve {
        #[arg(long)]
        reduced: PathBuf,
        #[arg(long)]
        imin: f64,
        #[arg(long)]
        imax: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Current amplitude needed for a target power.
    Operate {
        #[arg(long)]
        reduced: PathBuf,
        #[arg(long)]
        power: f64,
    },
    /// Run a built-in verification case: rod-dc, rod-ac or lumped-tables.
    Verify {
        #[arg(long)]
        case: String,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Verification(_) => EXIT_VERIFY,
            Failure::Core(e) => exit_code(e),
        }
    }
}

/// Exit code reported for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Lumped(_) => EXIT_LUMPED,
        Error::InvalidArgument { .. } => EXIT_USAGE,
        Error::Io { .. } => EXIT_IO,
        Error::Config { .. } | Error::Msh { .. } | Error::Document { .. } => EXIT_PARSE,
        Error::Mesh(_) | Error::Partition(_) | Error::Assembly(_) => EXIT_ASSEMBLY,
        Error::Solve { .. } => EXIT_SOLVE,
    }
}

/// Resolved options and files of one `simulate` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub mesh: PathBuf,
    pub config: PathBuf,
    pub solver: String,
    pub tol: f64,
    pub gauge_seed: u64,
    pub threads: Option<usize>,
    pub deterministic: bool,
    pub n_dofs: usize,
    pub iterations: usize,
    pub relative_residual: f64,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub outputs: Vec<PathBuf>,
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    out: &mut dyn Write,
    mesh_path: &Path,
    config_path: &Path,
    out_dir: &Path,
    solver: Option<SolverArg>,
    tol: f64,
    gauge_seed: u64,
    threads: Option<usize>,
    deterministic: bool,
) -> Result<(), Failure> {
    let started = unix_now();
    if threads == Some(0) {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    let config = load_config(&read_text(config_path)?)?;
    let mesh = load_msh(open(mesh_path)?, &config.regions)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let options = SolverOptions {
        kind: match solver {
            None => SolverKind::Auto,
            Some(SolverArg::Direct) => SolverKind::Direct,
            Some(SolverArg::Iterative) => SolverKind::Iterative,
        },
        tol,
        assembly: if deterministic {
            AssemblyMode::Deterministic
        } else {
            AssemblyMode::Fast
        },
        ..SolverOptions::default()
    };
    let work = || -> Result<_, Error> {
        let disc = Arc::new(Discretization::new(
            mesh,
            &config.regions,
            config.materials,
            gauge_seed,
        )?);
        let sol = solve_fields(disc, &config.drive, &options)?;
        Ok((terminal_report(&sol), sol))
    };
    let (report, sol) = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Usage(format!("--threads {n}: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let report_path = out_dir.join(REPORT_FILE);
    let fields_path = out_dir.join(FIELDS_FILE);
    let manifest_path = out_dir.join(MANIFEST_FILE);
    report.save(&report_path)?;
    export_vtk(&sol, &fields_path)?;
    let stats = sol.stats();
    let manifest = RunManifest {
        command: "simulate".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        mesh: mesh_path.to_path_buf(),
        config: config_path.to_path_buf(),
        solver: format!("{:?}", stats.kind).to_lowercase(),
        tol,
        gauge_seed,
        threads,
        deterministic,
        n_dofs: stats.n_dofs,
        iterations: stats.iterations,
        relative_residual: stats.relative_residual,
        started_unix_s: started,
        finished_unix_s: unix_now(),
        outputs: vec![report_path.clone(), fields_path.clone(), manifest_path.clone()],
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    std::fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;
    print_report(out, &report);
    writeln!(out, "wrote {}", report_path.display()).ok();
    writeln!(out, "wrote {}", fields_path.display()).ok();
    writeln!(out, "wrote {}", manifest_path.display()).ok();
    Ok(())
}

fn print_report(out: &mut dyn Write, report: &TerminalReport) {
    for (k, t) in report.terminals.iter().enumerate() {
        writeln!(out, "terminal {}: V = {}  I = {}", k + 1, t.v, t.i).ok();
    }
    writeln!(out, "S = {:.6e} + {:.6e}i VA", report.s.re, report.s.im).ok();
    writeln!(out, "P_h = {:.6e} W", report.p_h).ok();
}

fn reduce_cmd(
    out: &mut dyn Write,
    report_path: &Path,
    allow_nonpassive: bool,
    target: Option<PathBuf>,
) -> Result<(), Failure> {
    let report = TerminalReport::load(report_path)?;
    if report.n_terminals() != 3 {
        return Err(Failure::Usage(format!(
            "reduce needs a three-terminal report, {} has {}",
            report_path.display(),
            report.n_terminals()
        )));
    }
    let model = reduce(&report, allow_nonpassive)?.with_provenance(format!("report {}", report_path.display()));
    let target = target.unwrap_or_else(|| report_path.with_file_name(REDUCED_FILE));
    model.save(&target)?;
    let z = model.impedance();
    writeln!(out, "Z_R = {:.6e} ohm at {:.6} rad", z.magnitude(), z.phase()).ok();
    writeln!(
        out,
        "Z_R = {:.6e} {} {:.6e}i ohm",
        z.re(),
        if z.im() < 0.0 { '-' } else { '+' },
        z.im().abs()
    )
    .ok();
    if !model.is_passive() {
        writeln!(out, "warning: Re(Z_R) <= 0, the model is not passive").ok();
    }
    writeln!(out, "wrote {}", target.display()).ok();
    Ok(())
}

fn curve_cmd(
    out: &mut dyn Write,
    reduced: &Path,
    imin: f64,
    imax: f64,
    n: usize,
    target: &Path,
) -> Result<(), Failure> {
    let model = ReducedModel::load(reduced)?;
    let curve = characteristic_curve(&model, imin, imax, n)?;
    curve.save(target)?;
    writeln!(out, "wrote {} samples to {}", curve.samples.len(), target.display()).ok();
    Ok(())
}

fn operate_cmd(out: &mut dyn Write, reduced: &Path, power: f64) -> Result<(), Failure> {
    let model = ReducedModel::load(reduced)?;
    let i = required_current(&model, power)?;
    let p = predict_power(&model, i)?;
    writeln!(out, "required current: {i:.6} A").ok();
    writeln!(out, "predicted power at {i:.6} A: {p:.6} W").ok();
    Ok(())
}

fn verify_cmd(out: &mut dyn Write, case: &str) -> Result<(), Failure> {
    let case: Case = case.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let report = run_case(case, &SolverOptions::default())?;
    writeln!(out, "{report}").ok();
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("case {case} failed")))
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            mesh,
            config,
            out: dir,
            solver,
            tol,
            gauge_seed,
            threads,
            deterministic,
        } => simulate(
            out,
            &mesh,
            &config,
            &dir,
            solver,
            tol,
            gauge_seed,
            threads,
            deterministic,
        ),
        Command::Reduce {
            report,
            allow_nonpassive,
            out: target,
        } => reduce_cmd(out, &report, allow_nonpassive, target),
        Command::Curve {
            reduced,
            imin,
            imax,
            n,
            out: target,
        } => curve_cmd(out, &reduced, imin, imax, n, &target),
        Command::Operate { reduced, power } => operate_cmd(out, &reduced, power),
        Command::Verify { case } => verify_cmd(out, &case),
    }
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                write!(err, "{e}").ok();
                return EXIT_USAGE;
            }
            write!(out, "{e}").ok();
            return 0;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Verification(m) => m.clone(),
                Failure::Core(e) => e.to_string(),
            };
            writeln!(err, "error: {msg}").ok();
            f.code()
        }
    }
}

/// Entry point of the `furnace` binary.
pub fn main() -> ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code)
}
