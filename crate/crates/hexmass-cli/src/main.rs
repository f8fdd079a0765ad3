//! `hexmass` — consistent mass matrices of 8-node bricks from the command
//! line: weight-tensor export, mesh generation/import/checking, per-element
//! mass matrices, accuracy studies and assembly benchmarks.

mod density;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hexmass::analysis::{bench, bench_markdown, study, StudyOptions};
use hexmass::mesh::{generate, mesh_validity, parse_inp, GridSpec, Mesh, MeshSpec};
use hexmass::rules::RuleSet;
use hexmass::semianalytic::SemiAnalyticRule;

#[derive(Parser)]
#[command(name = "hexmass", version, about = "Mass matrices of 8-node hexahedral elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export a semi-analytical weight tensor (cmd, lmd or qmd20)
    Weights {
        /// Rule name: cmd | lmd | qmd20
        #[arg(long)]
        rule: String,
        #[arg(long, value_enum, default_value_t = WeightsFormat::Json)]
        format: WeightsFormat,
        /// Output file (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Mesh generation, import and validity checking
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Print the mass matrix of one element
    Mass {
        /// Mesh file (.json or .inp)
        #[arg(long)]
        mesh: PathBuf,
        /// Element index (0-based)
        #[arg(long)]
        element: usize,
        /// Rule token, e.g. g4, tensor3, lmd
        #[arg(long)]
        rule: String,
        /// Density expression over x, y, z (natural coordinates)
        #[arg(long, default_value = "1")]
        density: String,
        /// JSON file with an extra quadrature rule {"name","points","weights"}
        #[arg(long)]
        rule_file: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-element accuracy study against the exact mass matrices
    Study {
        #[arg(long)]
        mesh: PathBuf,
        /// Comma-separated rule tokens, e.g. g1,g4,g6,cmd,lmd
        #[arg(long)]
        rules: String,
        #[arg(long, default_value = "1")]
        density: String,
        #[arg(long, value_enum, default_value_t = StudyFormat::Md)]
        format: StudyFormat,
        /// Worker threads (defaults to available parallelism)
        #[arg(long)]
        threads: Option<usize>,
        /// Drop negative-metric elements instead of keeping them
        #[arg(long)]
        strict: bool,
        /// Validity-scan lattice resolution
        #[arg(long, default_value_t = hexmass::hex8::DEFAULT_SCAN_GRID)]
        grid_n: usize,
        #[arg(long)]
        rule_file: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time per-element assembly for a list of rules
    Bench {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        rules: String,
        /// Timing repeats (median is reported)
        #[arg(long, default_value_t = 20)]
        repeat: usize,
        #[arg(long, default_value = "1")]
        density: String,
        #[arg(long)]
        rule_file: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a mesh and write it as JSON
    Gen {
        #[command(subcommand)]
        kind: GenCommand,
    },
    /// Convert an ABAQUS .inp file to mesh JSON
    Import {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Scan every element for negative metric samples
    Check {
        input: PathBuf,
        #[arg(long, default_value_t = hexmass::hex8::DEFAULT_SCAN_GRID)]
        grid_n: usize,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Grid origin "x,y,z"
    #[arg(long, default_value = "0,0,0", value_parser = parse_triple)]
    origin: [f64; 3],
    /// First edge vector "x,y,z"
    #[arg(long, default_value = "1,0,0", value_parser = parse_triple)]
    edge_u: [f64; 3],
    /// Second edge vector "x,y,z"
    #[arg(long, default_value = "0,1,0", value_parser = parse_triple)]
    edge_v: [f64; 3],
    /// Third edge vector "x,y,z"
    #[arg(long, default_value = "0,0,1", value_parser = parse_triple)]
    edge_w: [f64; 3],
    /// Cell divisions "nx,ny,nz"
    #[arg(long, default_value = "1,1,1", value_parser = parse_divisions)]
    divisions: [usize; 3],
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            origin: self.origin,
            edge_u: self.edge_u,
            edge_v: self.edge_v,
            edge_w: self.edge_w,
            divisions: self.divisions,
        }
    }
}

#[derive(Subcommand)]
enum GenCommand {
    /// Parallelepiped cells (constant metric each)
    Grid {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Grid with interior nodes displaced by a seeded random vector
    Perturbed {
        #[command(flatten)]
        grid: GridArgs,
        /// Displacement scale as a fraction of the smallest cell edge, in [0,1)
        #[arg(long)]
        amplitude: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Annular sector of curved hexes with straight chordal edges
    Annulus {
        #[arg(long)]
        inner: f64,
        #[arg(long)]
        outer: f64,
        #[arg(long)]
        height: f64,
        /// Angular span in degrees, (0, 360]
        #[arg(long)]
        span: f64,
        /// Divisions "nr,ntheta,nz"
        #[arg(long, default_value = "1,1,1", value_parser = parse_divisions)]
        divisions: [usize; 3],
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum WeightsFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum StudyFormat {
    Md,
    Csv,
}

fn parse_triple(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got '{text}'"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| format!("invalid number '{part}'"))?;
    }
    Ok(out)
}

fn parse_divisions(text: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated counts, got '{text}'"));
    }
    let mut out = [0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| format!("invalid count '{part}'"))?;
    }
    Ok(out)
}

/// Runtime failures exit 1; token-level mistakes exit 2 like other usage
/// errors.
enum AppError {
    Runtime(String),
    Usage(String),
}

impl AppError {
    fn runtime(e: impl std::fmt::Display) -> Self {
        AppError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(AppError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Weights { rule, format, output } => {
            let rule = SemiAnalyticRule::builtin(&rule)
                .map_err(|e| AppError::Usage(e.to_string()))?;
            let text = match format {
                WeightsFormat::Json => rule.to_json(),
                WeightsFormat::Csv => rule.to_csv(),
            };
            emit(output.as_deref(), &text)
        }
        Command::Mesh { command } => run_mesh(command),
        Command::Mass {
            mesh,
            element,
            rule,
            density,
            rule_file,
            output,
        } => {
            let mesh = load_mesh(&mesh)?;
            let rules = rule_set(rule_file.as_deref())?;
            let rule = rules.resolve(&rule).map_err(|e| AppError::Usage(e.to_string()))?;
            let rho = density::parse_density(&density).map_err(AppError::Runtime)?;
            let hex = mesh.element_hex(element).map_err(AppError::runtime)?;
            let matrix = rule.assemble(&hex, &rho);
            emit(output.as_deref(), &matrix.to_string())
        }
        Command::Study {
            mesh,
            rules,
            density,
            format,
            threads,
            strict,
            grid_n,
            rule_file,
            output,
        } => {
            let mesh = load_mesh(&mesh)?;
            let rule_set = rule_set(rule_file.as_deref())?;
            let resolved = rule_set
                .resolve_list(&rules)
                .map_err(|e| AppError::Usage(e.to_string()))?;
            let rho = density::parse_density(&density).map_err(AppError::Runtime)?;
            let options = StudyOptions {
                scan_grid: grid_n,
                strict_validity: strict,
            };
            let report = with_thread_pool(threads, || study(&mesh, &rho, &resolved, &options))?
                .map_err(AppError::runtime)?;
            let text = match format {
                StudyFormat::Md => report.to_markdown(),
                StudyFormat::Csv => report.to_csv(),
            };
            emit(output.as_deref(), &text)
        }
        Command::Bench {
            mesh,
            rules,
            repeat,
            density,
            rule_file,
            output,
        } => {
            if repeat == 0 {
                return Err(AppError::Usage("--repeat must be at least 1".into()));
            }
            let mesh = load_mesh(&mesh)?;
            let rule_set = rule_set(rule_file.as_deref())?;
            let resolved = rule_set
                .resolve_list(&rules)
                .map_err(|e| AppError::Usage(e.to_string()))?;
            let rho = density::parse_density(&density).map_err(AppError::Runtime)?;
            let records = bench(&mesh, &rho, &resolved, repeat).map_err(AppError::runtime)?;
            emit(output.as_deref(), &bench_markdown(&records))
        }
    }
}

fn run_mesh(command: MeshCommand) -> Result<(), AppError> {
    match command {
        MeshCommand::Gen { kind } => {
            let (spec, output) = match kind {
                GenCommand::Grid { grid, output } => (MeshSpec::Grid(grid.spec()), output),
                GenCommand::Perturbed {
                    grid,
                    amplitude,
                    seed,
                    output,
                } => (
                    MeshSpec::Perturbed {
                        grid: grid.spec(),
                        amplitude,
                        seed,
                    },
                    output,
                ),
                GenCommand::Annulus {
                    inner,
                    outer,
                    height,
                    span,
                    divisions,
                    output,
                } => (
                    MeshSpec::Annulus {
                        inner_radius: inner,
                        outer_radius: outer,
                        height,
                        span_degrees: span,
                        divisions,
                    },
                    output,
                ),
            };
            let mesh = generate(&spec).map_err(AppError::runtime)?;
            emit(output.as_deref(), &mesh.to_json())
        }
        MeshCommand::Import { input, output } => {
            let mesh = load_mesh(&input)?;
            emit(output.as_deref(), &mesh.to_json())
        }
        MeshCommand::Check { input, grid_n } => {
            if grid_n < 2 {
                return Err(AppError::Usage("--grid-n must be at least 2".into()));
            }
            let mesh = load_mesh(&input)?;
            let validity = mesh_validity(&mesh, grid_n);
            let overall = validity
                .per_element_min
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let mut text = format!(
                "mesh: {}\nnodes: {}, elements: {}\nscan lattice: {grid_n}^3 per element\nmin metric: {overall}\n",
                mesh.label,
                mesh.n_nodes(),
                mesh.n_elements()
            );
            if validity.negative_elements.is_empty() {
                text.push_str("negative-metric elements: none\n");
            } else {
                text.push_str(&format!(
                    "negative-metric elements ({}): {:?}\n",
                    validity.negative_elements.len(),
                    validity.negative_elements
                ));
            }
            emit(None, &text)
        }
    }
}

/// Loads a mesh from either format, sniffing on the file extension
/// (".inp" parses the ABAQUS subset, anything else is mesh JSON).
fn load_mesh(path: &Path) -> Result<Mesh, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let is_inp = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("inp"));
    if is_inp {
        let import = parse_inp(&text, &path.display().to_string()).map_err(AppError::runtime)?;
        if import.skipped_blocks > 0 {
            eprintln!(
                "warning: skipped {} element block(s) with unsupported TYPE",
                import.skipped_blocks
            );
        }
        Ok(import.mesh)
    } else {
        Mesh::from_json(&text).map_err(AppError::runtime)
    }
}

fn rule_set(rule_file: Option<&Path>) -> Result<RuleSet, AppError> {
    let mut rules = RuleSet::new();
    if let Some(path) = rule_file {
        let text = fs::read_to_string(path)
            .map_err(|e| AppError::Runtime(format!("cannot read {}: {e}", path.display())))?;
        rules.add_quadrature_json(&text).map_err(AppError::runtime)?;
    }
    Ok(rules)
}

fn with_thread_pool<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, AppError>
where
    T: Send,
{
    match threads {
        None => Ok(f()),
        Some(n) => {
            if n == 0 {
                return Err(AppError::Usage("--threads must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(AppError::runtime)?;
            Ok(pool.install(f))
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), AppError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| AppError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
