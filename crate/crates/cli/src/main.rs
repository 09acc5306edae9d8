//! `eigensum`: spectra, checks, searches and explorations from the command line.
//!
//! Exit codes: 0 when everything passes, 1 when a verification fails or a
//! search exceeds its reference value, 2 for usage and schema errors.

mod error;
mod spec;
mod spectrum;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eigensum::lab::{conjecture_explorer, Domain, ExplorerConfig, ExplorerRow, SearchObjective};
use eigensum::numfmt::sig17;
use eigensum::BoundaryCondition;

use error::CliError;
use spec::{boundary_condition, DomainSpec, Shape};

#[derive(Parser)]
#[command(name = "eigensum", version, about = "Laplace eigenvalue sums under linear maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First n eigenvalues of a domain as CSV.
    Spectrum(SpectrumArgs),
    /// Check a theorem on one domain or on a seeded random sweep.
    Verify(VerifyArgs),
    /// Search for the maximizer of a normalized functional.
    Search(SearchArgs),
    /// Evaluate the polar-dual Neumann functional on random polygons.
    Explore(ExploreArgs),
}

#[derive(Args)]
struct BcArgs {
    #[arg(long, value_parser = ["dirichlet", "neumann", "robin"])]
    bc: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Domain spec (JSON).
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    bc: BcArgs,
    /// Finest finite-element level.
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the finite-element mesh (OFF format).
    #[arg(long)]
    export_mesh: Option<PathBuf>,
    /// Write the symmetry group of the reference domain as JSON matrices.
    #[arg(long)]
    export_group: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    theorem: String,
    /// Check this domain only. Without it, a random sweep is run.
    #[arg(long, conflicts_with_all = ["trials", "dim"])]
    domain: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension of the sweep (3, or 2 for tori and moment ratios).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    bc: BcArgs,
    #[arg(long)]
    level: Option<usize>,
    /// Reports go here, one JSON object per line; the summary stays on stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveKind {
    /// First Dirichlet value over unit-determinant boxes.
    BoxFamily,
    /// Eigenvalue sum of boxes and rotated boxes.
    Cube,
    /// Normalized flat-torus sum.
    Torus,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "torus")]
    objective: ObjectiveKind,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[command(flatten)]
    bc: BcArgs,
    /// Number of random restarts.
    #[arg(long, default_value_t = 8)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    /// Number of random polygons.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Eigenvalue counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    level: usize,
    /// Skip the regular 64-gon control.
    #[arg(long)]
    no_control: bool,
    /// CSV rows; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON; defaults to stdout, or stderr when the CSV is on stdout.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, bytes),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: "stdout".into(), source }),
    }
}

fn load(path: &Path) -> Result<(DomainSpec, Shape), CliError> {
    let spec = DomainSpec::parse(&read(path)?)?;
    let shape = spec.shape()?;
    Ok((spec, shape))
}

fn spectrum_cmd(a: &SpectrumArgs) -> Result<bool, CliError> {
    let (spec, shape) = load(&a.domain)?;
    let n = a.n.or(spec.n).ok_or_else(|| CliError::Usage("n is required (--n or \"n\" in the domain file)".into()))?;
    let bc = boundary_condition(spec.bc.as_deref(), spec.sigma, a.bc.bc.as_deref(), a.bc.sigma, None)?;
    let level = a.level.or(spec.level).unwrap_or_else(|| spectrum::default_level(&shape));
    let s = spectrum::compute(&shape, bc, n, level)?;
    let csv = spectrum::to_csv(&s)?;
    let mesh = match &a.export_mesh {
        Some(_) => Some(spectrum::mesh(&shape, level)?.to_off()),
        None => None,
    };
    let group = match (&a.export_group, &shape) {
        (None, _) => None,
        (Some(_), Shape::Reference { domain, .. }) => Some(serde_json::to_string(&domain.symmetry_group()?.to_nested()).expect("numbers")),
        (Some(_), _) => return Err(eigensum::Error::UnregisteredSymmetry(shape.name()).into()),
    };
    emit(a.out.as_deref(), &csv)?;
    if let (Some(p), Some(m)) = (&a.export_mesh, mesh) {
        write(p, m.as_bytes())?;
    }
    if let (Some(p), Some(g)) = (&a.export_group, group) {
        write(p, g.as_bytes())?;
    }
    Ok(true)
}

fn verify_cmd(a: &VerifyArgs) -> Result<bool, CliError> {
    verify::check_theorem(&a.theorem)?;
    let reports = match &a.domain {
        Some(path) => {
            let (spec, shape) = load(path)?;
            let bc = boundary_condition(spec.bc.as_deref(), spec.sigma, a.bc.bc.as_deref(), a.bc.sigma, None)?;
            let params = verify::CaseParams { n: a.n.or(spec.n), bc, level: a.level.or(spec.level) };
            verify::single(&a.theorem, &shape, &params)?
        }
        None => {
            let bc = boundary_condition(None, None, a.bc.bc.as_deref(), a.bc.sigma, None)?;
            let params = verify::CaseParams { n: a.n, bc, level: a.level };
            verify::sweep(&a.theorem, a.trials.unwrap_or(100), a.seed, a.dim, &params)?
        }
    };
    let mut lines = String::new();
    for r in &reports {
        lines.push_str(&r.to_json());
        lines.push('\n');
    }
    let summary = verify::summary_line(&a.theorem, &reports) + "\n";
    match &a.out {
        Some(p) => {
            write(p, lines.as_bytes())?;
            emit(None, summary.as_bytes())?;
        }
        None => emit(None, (lines + &summary).as_bytes())?,
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn search_cmd(a: &SearchArgs) -> Result<bool, CliError> {
    let bc = boundary_condition(None, None, a.bc.bc.as_deref(), a.bc.sigma, None)?;
    let objective = match a.objective {
        ObjectiveKind::BoxFamily => SearchObjective::BoxFamily { d: a.dim },
        ObjectiveKind::Cube => SearchObjective::Cube { d: a.dim, n: a.n, bc: bc.unwrap_or(BoundaryCondition::Dirichlet) },
        ObjectiveKind::Torus => SearchObjective::Torus { d: a.dim, n: a.n },
    };
    if bc.is_some() && !matches!(a.objective, ObjectiveKind::Cube) {
        return Err(CliError::Usage("--bc applies to the cube objective only".into()));
    }
    if let SearchObjective::Cube { d, .. } = objective {
        Domain::Hypercube { d }.symmetry_group()?;
    }
    let report = eigensum::lab::maximizer_search(objective, a.trials, a.seed)?;
    if report.converged_restarts < report.restarts {
        eprintln!(
            "warning: {} of {} restarts stopped at the evaluation budget",
            report.restarts - report.converged_restarts,
            report.restarts
        );
    }
    emit(a.out.as_deref(), (report.to_json() + "\n").as_bytes())?;
    Ok(report.never_exceeds)
}

fn explorer_csv(rows: &[ExplorerRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sample_id", "polygon_vertices", "n", "functional_dual", "functional_direct", "disk_value", "ratio_to_disk"])?;
    for r in rows {
        w.write_record([
            r.sample_id.to_string(),
            r.polygon_vertices.clone(),
            r.n.to_string(),
            sig17(r.functional_dual),
            sig17(r.functional_direct),
            sig17(r.disk_value),
            sig17(r.ratio_to_disk),
        ])?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

fn explore_cmd(a: &ExploreArgs) -> Result<bool, CliError> {
    let config = ExplorerConfig { samples: a.trials, ns: a.n.clone(), seed: a.seed, level: a.level, control: !a.no_control };
    let (rows, summary) = conjecture_explorer(&config)?;
    if summary.budget_exceeded {
        eprintln!("warning: {} samples exceeded the mesh budget and were skipped", summary.skipped_samples.len());
    }
    let csv = explorer_csv(&rows)?;
    let json = serde_json::to_string(&summary).expect("summary serialises") + "\n";
    emit(a.out.as_deref(), &csv)?;
    match (&a.summary, &a.out) {
        (Some(p), _) => write(p, json.as_bytes())?,
        (None, Some(_)) => emit(None, json.as_bytes())?,
        (None, None) => eprint!("{json}"),
    }
    // rows near or above the disk value are data, not failures
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Spectrum(a) => spectrum_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Search(a) => search_cmd(a),
        Command::Explore(a) => explore_cmd(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
