//! Command-line front end. [`run`] parses arguments and returns the exit
//! status; the `mlce` binary only forwards to it.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::branch::{solve_mlce_with, BranchConfig};
use crate::error::{Error, Result};
use crate::generate::{
    generate_planted, generate_sat_reduction, sat_example_formula, Formula223, PlantedParams,
};
use crate::graph::{verify, Instance, Mode, Solution};
use crate::io::{
    idmap_comments, parse_instance, parse_solution, serialize_instance_with_comments,
    serialize_solution,
};
use crate::kernelize::{kernelize, KernelResult};
use crate::oracle::{oracle, structured_mlce};
use crate::tce_path::{solve_tce_xp_with, XpOptions};

pub const EXIT_YES: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO: i32 = 10;

#[derive(Parser, Debug)]
#[command(
    name = "mlce",
    version,
    about = "Exact solvers for multi-layer and temporal cluster editing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and write a solution file.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Reduce an instance to a kernel.
    Kernelize {
        instance: PathBuf,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate instances.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Solve with the brute-force oracle.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep over planted instances and print CSV.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Search-tree algorithm (MLCE).
    Branch,
    /// Layer-path search (TCE).
    Xp,
    /// Brute force.
    Oracle,
    /// Partition enumeration (MLCE, tiny n).
    Structured,
    /// Branch for MLCE, xp for TCE.
    Auto,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Branch => "branch",
            Algo::Xp => "xp",
            Algo::Oracle => "oracle",
            Algo::Structured => "structured",
            Algo::Auto => "auto",
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    /// Override the mode stored in the instance file.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, value_enum, default_value = "auto")]
    algo: Algo,
    /// Print search-tree trace lines to stderr (branch only).
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Wall-clock limit in seconds (branch and xp).
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum GenerateCommand {
    /// Drifting planted clustering with noise.
    Planted {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        ell: usize,
        #[arg(long, default_value_t = 2)]
        clusters: usize,
        #[arg(long, default_value_t = 1)]
        drift: usize,
        #[arg(long, default_value_t = 1)]
        noise: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "mlce")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hardness construction from a (2,2)-3-SAT formula.
    Sat {
        /// Formula file, one clause of signed literals per line.
        #[arg(long, conflicts_with = "example", required_unless_present = "example")]
        formula: Option<PathBuf>,
        /// Use the built-in three-variable example formula.
        #[arg(long)]
        example: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [6usize, 8])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [3usize])]
    ell: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = [Algo::Auto])]
    algo: Vec<Algo>,
    #[arg(long, default_value = "mlce")]
    mode: Mode,
    /// Number of seeds per parameter point, starting at --seed.
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-instance wall-clock limit in seconds.
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve(a) => solve(&a, stdout, stderr),
        Command::Oracle {
            instance,
            mode,
            out,
        } => {
            let a = SolveArgs {
                instance,
                mode,
                algo: Algo::Oracle,
                trace: false,
                out,
                timeout: None,
            };
            solve(&a, stdout, stderr)
        }
        Command::Verify { instance, solution } => {
            let inst = load_instance(&instance, None)?;
            let text = read(&solution)?;
            let sol = parse_solution(&text, &inst).map_err(|e| in_file(&solution, e))?;
            let Some(sol) = sol else {
                writeln!(stdout, "answer no: no certificate to check").map_err(io_err)?;
                return Ok(EXIT_NO);
            };
            let report = verify(&inst, &sol)?;
            writeln!(stdout, "{report}").map_err(io_err)?;
            Ok(if report.is_valid() {
                EXIT_YES
            } else {
                EXIT_INVALID
            })
        }
        Command::Kernelize {
            instance,
            mode,
            out,
        } => {
            let inst = load_instance(&instance, mode)?;
            match kernelize(&inst) {
                KernelResult::TrivialNo(rule) => {
                    let text = format!("# rejected by {rule}\n{}", serialize_solution(&inst, None));
                    emit(out.as_deref(), &text, stdout)?;
                    Ok(EXIT_NO)
                }
                KernelResult::Reduced {
                    instance: kernel,
                    id_map,
                    rule_log,
                } => {
                    let mut comments = vec![format!(
                        "kernel of {} vertices from {}",
                        kernel.n(),
                        inst.n()
                    )];
                    comments.extend(rule_log.iter().map(|r| format!("applied {r}")));
                    comments.extend(idmap_comments(&id_map));
                    let text = serialize_instance_with_comments(&kernel, &comments);
                    emit(out.as_deref(), &text, stdout)?;
                    Ok(EXIT_YES)
                }
            }
        }
        Command::Generate(g) => generate(g, stdout),
        Command::Bench(b) => bench(&b, stdout),
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Input(format!("write failed: {e}"))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Error {
    Error::Input(format!("{}: {e}", path.display()))
}

fn load_instance(path: &Path, mode: Option<Mode>) -> Result<Instance> {
    let inst = parse_instance(&read(path)?).map_err(|e| in_file(path, e))?;
    Ok(match mode {
        Some(m) => inst.with_mode(m),
        None => inst,
    })
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn deadline(seconds: Option<f64>) -> Result<Option<Instant>> {
    match seconds {
        None => Ok(None),
        Some(s) if s.is_finite() && s >= 0.0 => {
            Ok(Some(Instant::now() + Duration::from_secs_f64(s)))
        }
        Some(s) => Err(Error::Input(format!("invalid timeout {s}"))),
    }
}

/// Runs one algorithm; returns the solution and the number of search nodes
/// (zero for algorithms that do not count them).
pub fn run_algo(
    inst: &Instance,
    algo: Algo,
    trace: Option<&mut dyn Write>,
    deadline: Option<Instant>,
) -> Result<(Option<Solution>, u64)> {
    let algo = resolve(algo, inst.mode());
    match algo {
        Algo::Branch => {
            let mut config = BranchConfig {
                check_invariants: false,
                trace,
                deadline,
            };
            solve_mlce_with(inst, &mut config).map(|(s, st)| (s, st.nodes))
        }
        Algo::Xp => {
            let opts = XpOptions {
                budgets: None,
                deadline,
            };
            solve_tce_xp_with(inst, &opts).map(|(s, st)| (s, st.nodes))
        }
        Algo::Oracle => oracle(inst).map(|s| (s, 0)),
        Algo::Structured => structured_mlce(inst).map(|s| (s, 0)),
        Algo::Auto => unreachable!("resolved above"),
    }
}

fn resolve(algo: Algo, mode: Mode) -> Algo {
    match (algo, mode) {
        (Algo::Auto, Mode::Mlce) => Algo::Branch,
        (Algo::Auto, Mode::Tce) => Algo::Xp,
        (a, _) => a,
    }
}

fn solve(a: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(&a.instance, a.mode)?;
    let trace = if a.trace {
        Some(&mut *stderr as &mut dyn Write)
    } else {
        None
    };
    let (sol, _) = run_algo(&inst, a.algo, trace, deadline(a.timeout)?)?;
    if let Some(s) = &sol {
        let report = verify(&inst, s)?;
        if !report.is_valid() {
            writeln!(
                stderr,
                "internal error: solver output failed verification: {report}"
            )
            .map_err(io_err)?;
            return Ok(EXIT_INVALID);
        }
    }
    emit(
        a.out.as_deref(),
        &serialize_solution(&inst, sol.as_ref()),
        stdout,
    )?;
    Ok(if sol.is_some() { EXIT_YES } else { EXIT_NO })
}

fn generate(g: GenerateCommand, stdout: &mut dyn Write) -> Result<i32> {
    match g {
        GenerateCommand::Planted {
            n,
            ell,
            clusters,
            drift,
            noise,
            seed,
            mode,
            out,
        } => {
            if ell == 0 {
                return Err(Error::Input("--ell must be at least 1".into()));
            }
            let p = PlantedParams {
                n,
                ell,
                clusters,
                drift,
                noise,
                seed,
            };
            let planted = generate_planted(&p, mode);
            let text = serialize_instance_with_comments(&planted.instance, &planted.notes);
            emit(out.as_deref(), &text, stdout)?;
        }
        GenerateCommand::Sat {
            formula,
            example,
            out,
        } => {
            let f = match formula {
                Some(path) if !example => {
                    Formula223::parse(&read(&path)?).map_err(|e| in_file(&path, e))?
                }
                _ => sat_example_formula(),
            };
            let inst = generate_sat_reduction(&f)?;
            let mut comments = vec![format!(
                "sat reduction of a formula on {} variables",
                f.n_vars
            )];
            for c in &f.clauses {
                let lits: Vec<String> = c.iter().map(i32::to_string).collect();
                comments.push(format!("clause {}", lits.join(" ")));
            }
            let text = serialize_instance_with_comments(&inst, &comments);
            emit(out.as_deref(), &text, stdout)?;
        }
    }
    Ok(EXIT_YES)
}

pub const BENCH_HEADER: &str = "n,ell,k,d,algo,seed,answer,millis,nodes_expanded";

fn bench(b: &BenchArgs, stdout: &mut dyn Write) -> Result<i32> {
    if b.ell.contains(&0) {
        return Err(Error::Input("--ell values must be at least 1".into()));
    }
    let limit = Duration::try_from_secs_f64(b.timeout)
        .map_err(|_| Error::Input(format!("invalid timeout {}", b.timeout)))?;
    let mut csv = String::new();
    let _ = writeln!(csv, "{BENCH_HEADER}");
    for &n in &b.n {
        for &ell in &b.ell {
            for &k in &b.k {
                for &d in &b.d {
                    for seed in b.seed..b.seed + b.seeds {
                        let p = PlantedParams {
                            n,
                            ell,
                            clusters: (n / 3).max(1),
                            drift: d,
                            noise: k,
                            seed,
                        };
                        let inst = generate_planted(&p, b.mode).instance.with_budgets(k, d);
                        for &algo in &b.algo {
                            let start = Instant::now();
                            let outcome = run_algo(&inst, algo, None, Some(start + limit));
                            let elapsed = start.elapsed();
                            let (answer, nodes) = match outcome {
                                Ok(_) if elapsed > limit => ("timeout", String::new()),
                                Ok((Some(_), nodes)) => ("yes", nodes.to_string()),
                                Ok((None, nodes)) => ("no", nodes.to_string()),
                                Err(Error::Timeout) => ("timeout", String::new()),
                                Err(Error::Capability(_)) => ("unsupported", String::new()),
                                Err(Error::ModeMismatch { .. }) => ("unsupported", String::new()),
                                Err(e) => return Err(e),
                            };
                            let _ = writeln!(
                                csv,
                                "{n},{ell},{k},{d},{},{seed},{answer},{},{nodes}",
                                resolve(algo, b.mode).name(),
                                elapsed.as_millis()
                            );
                        }
                    }
                }
            }
        }
    }
    emit(b.out.as_deref(), &csv, stdout)?;
    Ok(EXIT_YES)
}
