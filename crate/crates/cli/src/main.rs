//! `git-height`: heights on GIT quotients from the command line.

mod error;
mod input;
mod suite;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use git_height::bounds::{
    convex_lemma_min, ell, ell_exact, epsilon_norm_check, explicit_lower_bound, perm_invariant_check, PermSpec,
    Permutation, Variant,
};
use git_height::conj_git::{
    instability_conj, is_minimal_arch, is_minimal_nonarch, is_semistable_conj, orbit_sampling_bound,
    quotient_height_conj, relevant_primes, Norm,
};
use git_height::heights::{naive_height, ProjectivePoint};
use git_height::torus_git::{
    destabilizing_1ps, instability, is_semistable, kempf_ness_profile, kempf_ness_profile_nonarch,
    quotient_height_terms, relevant_places, InstabilityReport, TorusAction,
};
use git_height::{LogValue, Place, DEFAULT_ARCH_TOL, DEFAULT_COMPARE_TOL};
use serde_json::{json, Value};

use error::CliError;
use input::Problem;

#[derive(Parser)]
#[command(name = "git-height", version, about = "Heights on GIT quotients over Q")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// `exact` prints finite parts as rational coefficients of log p.
    #[arg(long, global = true, value_enum, default_value_t = Format::Exact)]
    format: Format,
    /// Gradient tolerance of the archimedean solvers.
    #[arg(long, global = true, default_value_t = DEFAULT_ARCH_TOL)]
    arch_tol: f64,
    /// Tolerance for comparing float parts.
    #[arg(long, global = true, env = "GIT_HEIGHT_TOL", default_value_t = DEFAULT_COMPARE_TOL)]
    compare_tol: f64,
    /// Evaluate places on separate threads.
    #[arg(long, global = true)]
    parallel: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Frobenius,
    Sup,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::Frobenius => Norm::Frobenius,
            NormArg::Sup => Norm::Sup,
        }
    }
}

/// A torus action with a point, or a matrix; read from stdin as JSON when
/// none is given.
#[derive(Args)]
struct ProblemArgs {
    /// Action JSON `{"rank": 1, "weights": [[-2],[1],[4]]}`, `@file` or `-`.
    #[arg(long)]
    action: Option<String>,
    /// Weights shorthand: `-2,1,4` (rank one) or `1,0;0,1`.
    #[arg(long, allow_hyphen_values = true)]
    weights: Option<String>,
    /// Row-major JSON matrix, e.g. `[["1","1"],["0","1"]]`, `@file` or `-`.
    #[arg(long)]
    matrix: Option<String>,
    /// Point such as `2:2:1`, `@file` or `-`.
    #[arg(allow_hyphen_values = true)]
    point: Option<String>,
}

impl ProblemArgs {
    fn resolve(&self) -> Result<Problem, CliError> {
        input::problem(self.action.as_deref(), self.weights.as_deref(), self.matrix.as_deref(), self.point.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Naive height of a projective point.
    Height {
        #[arg(allow_hyphen_values = true)]
        point: String,
    },
    /// Semi-stability test.
    Semistable(ProblemArgs),
    /// A destabilizing one-parameter subgroup of an unstable torus point.
    Destabilize(ProblemArgs),
    /// Instability measure at one place (archimedean unless `--prime`), or at
    /// every relevant place with `--all`.
    Instability {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, conflicts_with = "prime")]
        all: bool,
        #[arg(long, value_enum, default_value = "frobenius")]
        norm: NormArg,
    },
    /// Height of the image in the quotient.
    QuotientHeight {
        #[command(flatten)]
        problem: ProblemArgs,
        /// For matrices: also report the least height over this many seeded
        /// random conjugates.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Minimality of a matrix at a place (archimedean unless `--prime`).
    Minimal {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Kempf–Ness profile of a torus point along a one-parameter subgroup.
    Profile {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Cocharacter, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// Explicit lower-bound constants.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Reproduce the worked examples and print a pass/fail table.
    PaperSuite {
        /// Perturb the expected value of the named check.
        #[arg(long)]
        corrupt: Vec<String>,
        /// Print the check names and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// `ℓ(n) = log(n!) / n`.
    Ell { n: u64 },
    /// Operator norm of ε_w against √(w!).
    Epsilon { w: usize },
    /// `−Σ b_i μ_i − Σ_{rk_i ≥ 3} (|b_i|/2) ℓ(rk_i)`.
    Lower {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Semicolon-separated slopes, each like `1/2*log2+-1/3*log3` or `0.25`.
        #[arg(long, allow_hyphen_values = true)]
        slopes: String,
        #[arg(long)]
        ranks: String,
    },
    /// Minimum of the one-variable convex function of the torus examples.
    Convex {
        #[arg(value_enum)]
        variant: VariantArg,
    },
    /// Invariance of a permutation of tensor factors under `∏ SL(d_i)`.
    Perm {
        /// One-based permutation per factor, e.g. `2,1,3`; repeatable.
        #[arg(long = "perm", required = true)]
        perms: Vec<String>,
        /// Dimension per factor; repeatable, same count as `--perm`.
        #[arg(long = "dim", required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Log3,
    LogSqrt3,
}

/// Resolved run-time settings.
pub struct Config {
    pub arch_tol: f64,
    pub compare_tol: f64,
    pub format: Format,
    pub parallel: bool,
    pub seed: u64,
}

impl Config {
    fn from_args(g: &GlobalArgs) -> Result<Self, CliError> {
        for (name, v) in [("--arch-tol", g.arch_tol), ("--compare-tol", g.compare_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Parse(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Config {
            arch_tol: g.arch_tol,
            compare_tol: g.compare_tol,
            format: g.format,
            parallel: g.parallel,
            seed: g.seed,
        })
    }

    fn log(&self, v: &LogValue) -> Value {
        let total = if v.is_neg_infinity() { json!("-inf") } else { json!(v.to_f64()) };
        match self.format {
            Format::Exact => {
                let mut obj = serde_json::to_value(v).expect("LogValue serializes");
                obj["total"] = total;
                obj
            }
            Format::Float => total,
        }
    }

    fn report(&self, r: &InstabilityReport) -> Value {
        let mut obj = serde_json::to_value(r).expect("report serializes");
        obj["value"] = self.log(&r.value);
        obj
    }
}

fn ensure_torus(problem: Problem, command: &str) -> Result<(TorusAction, ProjectivePoint), CliError> {
    match problem {
        Problem::Torus(a, x) => Ok((a, x)),
        Problem::Matrix(_) => Err(CliError::Parse(format!("`{command}` needs a torus action and a point"))),
    }
}

fn place(prime: Option<u64>) -> Result<Place, CliError> {
    Ok(prime.map(input::prime).transpose()?.map_or(Place::Archimedean, Place::Finite))
}

fn run(cli: Cli) -> Result<Value, CliError> {
    let cfg = Config::from_args(&cli.global)?;
    match cli.command {
        Command::Height { point } => {
            let x = input::point(&point)?;
            let h = naive_height(&x)?;
            Ok(match cfg.format {
                Format::Exact => json!({
                    "point": x,
                    "finite": serde_json::to_value(&h).expect("LogValue serializes")["finite"],
                    "arch": h.arch_part(),
                    "total": h.to_f64(),
                }),
                Format::Float => json!({
                    "point": x,
                    "finite": h.exact_part().to_f64(),
                    "arch": h.arch_part(),
                    "total": h.to_f64(),
                }),
            })
        }
        Command::Semistable(p) => Ok(match p.resolve()? {
            Problem::Torus(a, x) => json!({ "semistable": is_semistable(&a, &x)? }),
            Problem::Matrix(m) => json!({ "semistable": is_semistable_conj(&m)? }),
        }),
        Command::Destabilize(p) => {
            let (a, x) = ensure_torus(p.resolve()?, "destabilize")?;
            let lambda = destabilizing_1ps(&a, &x)?;
            Ok(json!({
                "semistable": lambda.is_none(),
                "one_parameter_subgroup": lambda.map(|l| l.iter().map(ToString::to_string).collect::<Vec<_>>()),
            }))
        }
        Command::Instability { problem, prime, all, norm } => match problem.resolve()? {
            Problem::Torus(a, x) => {
                if all {
                    let reports = relevant_places(&x)?
                        .into_iter()
                        .map(|v| instability(&a, &x, v, cfg.arch_tol).map(|r| cfg.report(&r)))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Value::Array(reports))
                } else {
                    Ok(cfg.report(&instability(&a, &x, place(prime)?, cfg.arch_tol)?))
                }
            }
            Problem::Matrix(m) => {
                let norm = Norm::from(norm);
                if all {
                    let mut places: Vec<Place> = relevant_primes(&m)?.into_iter().map(Place::Finite).collect();
                    places.push(Place::Archimedean);
                    let reports = places
                        .into_iter()
                        .map(|v| instability_conj(&m, v, norm, cfg.arch_tol).map(|r| cfg.report(&r)))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Value::Array(reports))
                } else {
                    Ok(cfg.report(&instability_conj(&m, place(prime)?, norm, cfg.arch_tol)?))
                }
            }
        },
        Command::QuotientHeight { problem, samples } => match problem.resolve()? {
            Problem::Torus(a, x) => {
                if samples.is_some() {
                    return Err(CliError::Parse("--samples applies to matrices".into()));
                }
                let terms = quotient_height_terms(&a, &x, cfg.arch_tol, cfg.parallel)?;
                let naive = naive_height(&x)?;
                let value = naive.clone() + terms.iter().map(|r| r.value.clone()).sum::<LogValue>();
                Ok(json!({
                    "value": cfg.log(&value),
                    "naive_height": cfg.log(&naive),
                    "terms": terms.iter().map(|r| cfg.report(r)).collect::<Vec<_>>(),
                }))
            }
            Problem::Matrix(m) => {
                let value = quotient_height_conj(&m, cfg.arch_tol)?;
                let mut out = json!({ "value": cfg.log(&value) });
                if let Some(n) = samples {
                    out["orbit_sampling_bound"] = json!(orbit_sampling_bound(&m, n, cfg.seed)?);
                }
                Ok(out)
            }
        },
        Command::Minimal { matrix, prime } => {
            let m = input::matrix(&matrix)?;
            let report = match place(prime)? {
                Place::Archimedean => is_minimal_arch(&m)?,
                Place::Finite(p) => is_minimal_nonarch(&m, p)?,
            };
            Ok(serde_json::to_value(report).expect("report serializes"))
        }
        Command::Profile { problem, lambda, prime, from, to, points } => {
            let (a, x) = ensure_torus(problem.resolve()?, "profile")?;
            let lambda = input::int_list(&lambda)?;
            if points < 2 || !(from < to) {
                return Err(CliError::Parse("need --points ≥ 2 and --from < --to".into()));
            }
            let grid: Vec<f64> = (0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect();
            let values = match place(prime)? {
                Place::Archimedean => kempf_ness_profile(&a, &x, &lambda, &grid)?,
                Place::Finite(p) => kempf_ness_profile_nonarch(&a, &x, &lambda, p, &grid)?,
            };
            let convex = values.windows(3).all(|w| 2.0 * w[1] <= w[0] + w[2] + cfg.compare_tol);
            Ok(json!({ "grid": grid, "values": values, "convex": convex }))
        }
        Command::Bounds(b) => bounds(&cfg, b),
        Command::PaperSuite { corrupt, list } => {
            if list {
                return Ok(json!(suite::names()));
            }
            paper_suite(&cfg, &corrupt)
        }
    }
}

fn bounds(cfg: &Config, cmd: BoundsCommand) -> Result<Value, CliError> {
    match cmd {
        BoundsCommand::Ell { n } => Ok(json!({ "n": n, "ell": cfg.log(&ell_exact(n)?), "ell_float": ell(n)? })),
        BoundsCommand::Epsilon { w } => Ok(serde_json::to_value(epsilon_norm_check(w)?).expect("check serializes")),
        BoundsCommand::Lower { b, slopes, ranks } => {
            let b = input::int_list(&b)?;
            let slopes = slopes.split(';').map(input::slope).collect::<Result<Vec<_>, _>>()?;
            let ranks = ranks
                .split(',')
                .map(|r| r.trim().parse::<u64>().map_err(|_| CliError::Parse(format!("`{r}` is not a rank"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(json!({ "bound": cfg.log(&explicit_lower_bound(&b, &slopes, &ranks)?) }))
        }
        BoundsCommand::Convex { variant } => {
            let variant = match variant {
                VariantArg::Log3 => Variant::Log3,
                VariantArg::LogSqrt3 => Variant::LogSqrt3,
            };
            let m = convex_lemma_min::<f64>(variant, cfg.arch_tol.max(1e-12));
            Ok(json!({ "argmin": m.argmin, "value": m.value }))
        }
        BoundsCommand::Perm { perms, dims, trials } => {
            if perms.len() != dims.len() {
                return Err(CliError::Parse("give one --dim per --perm".into()));
            }
            let permutations = perms
                .iter()
                .map(|p| {
                    let images = p
                        .split(',')
                        .map(|i| {
                            i.trim().parse::<usize>().map_err(|_| CliError::Parse(format!("`{i}` is not an index")))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Permutation::from_one_based(&images)?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let spec = PermSpec::new(permutations.iter().map(Permutation::len).collect(), permutations)?;
            let invariant = perm_invariant_check(&spec, &dims, trials, cfg.seed)?;
            Ok(json!({ "invariant": invariant }))
        }
    }
}

fn paper_suite(cfg: &Config, corrupt: &[String]) -> Result<Value, CliError> {
    let checks = suite::run(cfg, corrupt)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    emit(format_args!("{:<width$}  {:<6}  {:<40}  computed", "check", "status", "expected"));
    let mut failed = 0;
    for c in &checks {
        let ok = c.passed(cfg.compare_tol);
        failed += usize::from(!ok);
        let computed = match &c.computed {
            Ok(v) => v.to_string(),
            Err(e) => e.to_string(),
        };
        emit(format_args!(
            "{:<width$}  {:<6}  {:<40}  {computed}",
            c.name,
            if ok { "pass" } else { "FAIL" },
            c.expected.to_string()
        ));
    }
    emit(format_args!("{} passed, {failed} failed", checks.len() - failed));
    if failed > 0 {
        Err(CliError::SuiteFailed(failed))
    } else {
        Ok(Value::Null)
    }
}

/// Writes one line to stdout; a closed pipe ends the process quietly.
fn emit(line: std::fmt::Arguments<'_>) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{line}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Value::Null) => ExitCode::SUCCESS,
        Ok(v) => {
            emit(format_args!("{}", serde_json::to_string_pretty(&v).expect("JSON value serializes")));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
