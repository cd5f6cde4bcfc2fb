use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ehlcp::analysis::{analyze, AnalysisReport};
use ehlcp::exactmath::Mat;
use ehlcp::harness::{run_suite, Sizes, SuiteId, SuiteReport};
use ehlcp::matclass::{classify, MatrixClassReport};
use ehlcp::solver::{degree, solve_all, solve_newton, DegreeResult, NewtonOutcome, SolutionSet};
use ehlcp::wprops::{column_w, column_w0, default_eps_grid, identity_tuple, normalize_tuple, r0_w, ssm_w};
use ehlcp::{Certificate, MatrixTuple, QInstance, QSolution, QTuple, Rational, SolutionTuple, Verdict};
use serde::{Deserialize, Serialize};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "ehlcp", version, about = "Exact tools for extended horizontal linear complementarity problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Property verdicts with certificates for a tuple.
    Check(InputArgs),
    /// Full solution set of an instance.
    Solve(SolveArgs),
    /// Boundedness, uniqueness and connectedness of the solution set.
    Analyze(InputArgs),
    /// Degree of the residual map of a tuple.
    Degree(DegreeArgs),
    /// Seeded theorem-validation suites.
    Fuzz(FuzzArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// JSON file, `-` for stdin, or inline JSON.
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Also run semismooth Newton from the zero tuple.
    #[arg(long)]
    newton: bool,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

#[derive(Args, Debug)]
struct DegreeArgs {
    #[command(flatten)]
    io: InputArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct FuzzArgs {
    /// Suite code or name; all suites when omitted.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest dimension drawn.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Largest number of chained blocks drawn.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("cannot read input {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Input(#[from] ehlcp::Error),
    #[error("input has no right-hand side q")]
    MissingQ,
    #[error("invalid arguments: {0}")]
    Usage(String),
}

/// Input document: a tuple, or an instance when `q` is present.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    n: usize,
    k: usize,
    #[serde(rename = "C")]
    c: Vec<Vec<Vec<Rational>>>,
    #[serde(default)]
    d: Option<Vec<Vec<Rational>>>,
    #[serde(default)]
    q: Option<Vec<Rational>>,
}

struct Parsed {
    tuple: QTuple,
    d: Option<Vec<Vec<Rational>>>,
    q: Option<Vec<Rational>>,
}

impl Parsed {
    fn bounds(&self) -> Vec<Vec<Rational>> {
        self.d
            .clone()
            .unwrap_or_else(|| vec![vec![Rational::from(1); self.tuple.n()]; self.tuple.k() - 1])
    }

    fn instance(&self) -> Result<QInstance, CliError> {
        let q = self.q.clone().ok_or(CliError::MissingQ)?;
        Ok(QInstance::new(self.tuple.clone(), self.d.clone().unwrap_or_default(), q)?)
    }
}

fn read_source(input: &str) -> Result<String, CliError> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') {
        return Ok(input.to_string());
    }
    let io = |source| CliError::Io { path: input.to_string(), source };
    if input == "-" {
        return std::io::read_to_string(std::io::stdin()).map_err(io);
    }
    std::fs::read_to_string(Path::new(input)).map_err(io)
}

fn parse_input(text: &str) -> Result<Parsed, CliError> {
    let raw: RawInput = serde_json::from_str(text)?;
    let mats = raw.c.into_iter().map(Mat::from_rows).collect::<Result<Vec<_>, _>>().map_err(ehlcp::Error::from)?;
    let tuple = MatrixTuple::declared(raw.n, raw.k, mats)?;
    let parsed = Parsed { tuple, d: raw.d, q: raw.q };
    // Validates d and q whenever they are present.
    QInstance::new(
        parsed.tuple.clone(),
        parsed.bounds(),
        parsed.q.clone().unwrap_or_else(|| vec![Rational::from(0); parsed.tuple.n()]),
    )?;
    Ok(parsed)
}

#[derive(Serialize)]
struct CheckReport {
    tuple: QTuple,
    column_w: Verdict<Rational>,
    column_w0: Verdict<Rational>,
    r0_w: Verdict<Rational>,
    ssm_w: Verdict<Rational>,
    c0: MatrixClassReport<Rational>,
    /// Classes of `C0^-1 Cj`, absent when `C0` is singular.
    normalized_blocks: Option<Vec<MatrixClassReport<Rational>>>,
}

#[derive(Serialize)]
struct SolveReport {
    solutions: SolutionSet<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    newton: Option<NewtonOutcome<Rational>>,
}

#[derive(Serialize)]
struct DegreeReport {
    seed: u64,
    #[serde(flatten)]
    outcome: DegreeOutcome,
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum DegreeOutcome {
    Defined(DegreeResult<Rational>),
    Undefined { reason: String },
}

#[derive(Serialize)]
struct FuzzReport {
    seed: u64,
    trials: u64,
    sizes: Sizes,
    suites: Vec<SuiteReport>,
}

fn check(c: &QTuple) -> Result<CheckReport, CliError> {
    let candidates = [identity_tuple(c.n(), c.k()), MatrixTuple::new(vec![c.mat(0).clone(); c.k() + 1])?];
    Ok(CheckReport {
        tuple: c.clone(),
        column_w: column_w(c),
        column_w0: column_w0(c, &candidates, &default_eps_grid())?,
        r0_w: r0_w(c),
        ssm_w: ssm_w(c),
        c0: classify(c.mat(0)),
        normalized_blocks: normalize_tuple(c).ok().map(|nc| (1..=nc.k()).map(|j| classify(nc.mat(j))).collect()),
    })
}

fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn fmt_solution(x: &QSolution) -> String {
    let blocks: Vec<String> = x.blocks().iter().map(|b| fmt_vec(b)).collect();
    blocks.join(" ")
}

fn fmt_certificate(c: &Option<Certificate<Rational>>) -> String {
    match c {
        None => String::new(),
        Some(Certificate::CommonSign(s)) => format!("all representative determinants have sign {s}"),
        Some(Certificate::ZeroRepresentative(z)) => format!("representative {:?} has determinant 0", z.choice),
        Some(Certificate::OppositeSigns { first, second }) => format!(
            "representatives {:?} (det {}) and {:?} (det {})",
            first.choice, first.det, second.choice, second.det
        ),
        Some(Certificate::Witness(w)) => format!("witness {}", fmt_solution(w)),
        Some(other) => serde_json::to_string(other).unwrap_or_default(),
    }
}

fn verdict_line(out: &mut String, name: &str, v: &Verdict<Rational>) {
    let _ = writeln!(out, "{name:<10} {:<8} {}", format!("{:?}", v.status), fmt_certificate(&v.certificate));
}

fn check_text(r: &CheckReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n = {}, k = {}", r.tuple.n(), r.tuple.k());
    verdict_line(&mut out, "column_w", &r.column_w);
    verdict_line(&mut out, "column_w0", &r.column_w0);
    verdict_line(&mut out, "r0_w", &r.r0_w);
    verdict_line(&mut out, "ssm_w", &r.ssm_w);
    let classes = |m: &MatrixClassReport<Rational>| {
        format!("Z {:?}, P {:?}, M {:?}, SSM {:?}", m.is_z.status, m.is_p.status, m.is_m.status, m.is_ssm.status)
    };
    let _ = writeln!(out, "{:<10} {}", "C0", classes(&r.c0));
    match &r.normalized_blocks {
        Some(blocks) => {
            for (j, m) in blocks.iter().enumerate() {
                let _ = writeln!(out, "{:<10} {}", format!("C0^-1 C{}", j + 1), classes(m));
            }
        }
        None => out.push_str("C0 is singular\n"),
    }
    out
}

fn solve_text(r: &SolveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} piece(s)", r.solutions.len());
    for p in &r.solutions.pieces {
        let kind = if p.is_point { "point" } else { "polyhedron" };
        let _ = writeln!(out, "{:?} {kind:<10} {}", p.branch.levels(), fmt_solution(&p.sample));
    }
    if let Some(newton) = &r.newton {
        match newton {
            NewtonOutcome::Converged { solution, iterations, residual, verified } => {
                let _ = writeln!(
                    out,
                    "newton: {} after {iterations} iterations, residual {residual:e}, verified {verified}",
                    fmt_solution(solution)
                );
            }
            NewtonOutcome::Failure { reason, iterations } => {
                let _ = writeln!(out, "newton: failed after {iterations} iterations: {reason}");
            }
        }
    }
    out
}

fn analyze_text(r: &AnalysisReport) -> String {
    let mut out = format!(
        "bounded    {}\nunique     {}\nconnected  {}\npieces     {}\nadjacent   {:?}\n",
        r.bounded, r.unique, r.connected, r.pieces, r.graph
    );
    if let Some(note) = &r.note {
        let _ = writeln!(out, "note       {note}");
    }
    out
}

fn degree_text(r: &DegreeReport) -> String {
    match &r.outcome {
        DegreeOutcome::Defined(res) => format!(
            "degree {}\nseed   {}\ndraws  {}\ncounted solutions {}\n",
            res.value,
            r.seed,
            res.draws,
            res.solutions_counted.len()
        ),
        DegreeOutcome::Undefined { reason } => format!("degree Undefined\nseed   {}\nreason {reason}\n", r.seed),
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Text => text(value),
    })
}

/// Output text and exit code.
fn run(command: Command) -> Result<(String, u8), CliError> {
    match command {
        Command::Check(args) => {
            let parsed = parse_input(&read_source(&args.input)?)?;
            Ok((emit(args.format, &check(&parsed.tuple)?, check_text)?, 0))
        }
        Command::Solve(args) => {
            if args.tol.is_nan() || args.tol <= 0.0 {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            let inst = parse_input(&read_source(&args.io.input)?)?.instance()?;
            let newton = args
                .newton
                .then(|| solve_newton(&inst, &SolutionTuple::zero(inst.n(), inst.k()), args.tol, args.max_iter));
            let report = SolveReport { solutions: solve_all(&inst), newton };
            Ok((emit(args.io.format, &report, solve_text)?, 0))
        }
        Command::Analyze(args) => {
            let inst = parse_input(&read_source(&args.input)?)?.instance()?;
            Ok((emit(args.format, &analyze(&solve_all(&inst)), analyze_text)?, 0))
        }
        Command::Degree(args) => {
            let parsed = parse_input(&read_source(&args.io.input)?)?;
            let outcome = match degree(&parsed.tuple, &parsed.bounds(), args.seed) {
                Ok(res) => DegreeOutcome::Defined(res),
                Err(e @ (ehlcp::Error::NotR0W | ehlcp::Error::GenericityExhausted(_))) => {
                    DegreeOutcome::Undefined { reason: e.to_string() }
                }
                Err(e) => return Err(e.into()),
            };
            let report = DegreeReport { seed: args.seed, outcome };
            Ok((emit(args.io.format, &report, degree_text)?, 0))
        }
        Command::Fuzz(args) => {
            if args.n == 0 || args.k == 0 {
                return Err(CliError::Usage("--n and --k must be at least 1".into()));
            }
            let ids = match &args.suite {
                Some(s) => vec![s.parse::<SuiteId>()?],
                None => SuiteId::ALL.to_vec(),
            };
            let sizes = Sizes { max_n: args.n, max_k: args.k };
            let suites: Vec<SuiteReport> = ids.into_iter().map(|id| run_suite(id, args.trials, sizes, args.seed)).collect();
            let code = if suites.iter().all(SuiteReport::passed) { 0 } else { 1 };
            let report = FuzzReport { seed: args.seed, trials: args.trials, sizes, suites };
            let text = |r: &FuzzReport| {
                let mut out = format!("seed {}, trials {}, n <= {}, k <= {}\n", r.seed, r.trials, r.sizes.max_n, r.sizes.max_k);
                for s in &r.suites {
                    let _ = writeln!(out, "{s}");
                }
                out
            };
            Ok((emit(args.format, &report, text)?, code))
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("EHLCP_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("EHLCP_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
