//! Command-line front end: parse -> build -> solve -> certify -> verify,
//! plus MPS export, hull-oracle sweeps and a benchmark harness.
//!
//! Exit codes for `solve` follow SAT-solver conventions: 10 satisfiable,
//! 20 unsatisfiable, 1 errors, 2 oracle disagreement under `--check`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flowsat::certificate::{decide_from_solution, verify_certificate, Certificate, Verdict};
use flowsat::formula::Formula;
use flowsat::implication::apt_decide;
use flowsat::lp_model::{self, CapacityMode};
use flowsat::mps;
use flowsat::oracle::{
    brute_force_sat, decide_by_hull_lp, enumerate_hull_vertices, max_weight_by_hull_lp,
    WeightSpec,
};
use flowsat::simplex::{
    solve, solve_decomposed, verify_feasible, verify_integral, Scalar, SolveResult, SolveStatus,
    SolverOptions,
};

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_ERROR: u8 = 1;
const EXIT_DISAGREE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "flowsat",
    about = "2SAT satisfiability via a compact multicommodity-flow LP",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a DIMACS 2SAT instance and write a certificate.
    Solve(SolveArgs),
    /// Export the instance's LP as MPS text.
    Export(ExportArgs),
    /// Run the hull-enumeration oracle (desk scale, n <= 3).
    #[command(alias = "qn")]
    Hull(HullArgs),
    /// Random-instance benchmark across solve modes, CSV output.
    Bench(BenchArgs),
    /// Check a certificate file against a DIMACS instance.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Penalty-objective LP, monolithic.
    Lp,
    /// Penalty LP solved commodity by commodity.
    LpDecomposed,
    /// Face-fixing LP (missing-clause arcs pinned to zero).
    LpFixing,
    /// Linear-time implication-graph decision.
    Apt,
    /// Exhaustive assignment search (n <= 24).
    Brute,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Lp => "lp",
            Mode::LpDecomposed => "lp-decomposed",
            Mode::LpFixing => "lp-fixing",
            Mode::Apt => "apt",
            Mode::Brute => "brute",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Arith {
    Float,
    Rational,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Capacity {
    Unit,
    Paper,
}

impl From<Capacity> for CapacityMode {
    fn from(c: Capacity) -> Self {
        match c {
            Capacity::Unit => CapacityMode::UnitCapped,
            Capacity::Paper => CapacityMode::PaperFaithful,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// DIMACS CNF input file.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "lp")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "float")]
    arith: Arith,
    #[arg(long, value_enum, default_value = "unit")]
    capacity: Capacity,
    /// Certificate output path (default: input with .cert extension).
    #[arg(long)]
    cert: Option<PathBuf>,
    /// Cross-check the verdict against the implication-graph oracle.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct ExportArgs {
    /// DIMACS CNF input file.
    input: PathBuf,
    /// MPS output path (default: input with .mps extension).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Export the face-fixing LP instead of the penalty LP.
    #[arg(long)]
    fixing: bool,
    #[arg(long, value_enum, default_value = "unit")]
    capacity: Capacity,
    /// Also write the column <-> flow-variable map as JSON.
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Args)]
struct HullArgs {
    /// DIMACS CNF input file (alternative to --n).
    #[arg(long, conflicts_with = "n")]
    input: Option<PathBuf>,
    /// Variable count for universe sweeps.
    #[arg(long)]
    n: Option<u32>,
    /// Sweep every formula over the non-tautological universe.
    #[arg(long, requires = "n")]
    all_formulas: bool,
    /// Comma-separated integer weights for the weighted reduction.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    weights: Option<Vec<i64>>,
    /// CSV audit dump for sweeps: index,verdict,zstar,clauses.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance sizes.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
    sizes: Vec<u32>,
    /// Clause densities relative to the non-tautological universe.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5")]
    densities: Vec<f64>,
    #[arg(long, default_value = "10")]
    trials: u32,
    /// Modes to run and cross-check on every instance.
    #[arg(long, value_delimiter = ',', default_value = "lp,apt")]
    modes: Vec<Mode>,
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long, value_enum, default_value = "float")]
    arith: Arith,
    #[arg(long, value_enum, default_value = "unit")]
    capacity: Capacity,
    /// CSV output path (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// DIMACS CNF input file.
    input: PathBuf,
    /// Certificate file produced by `solve`.
    certificate: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Export(args) => cmd_export(&args).map(|()| 0),
        Command::Hull(args) => cmd_hull(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read_formula(path: &Path) -> anyhow::Result<Formula> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let (formula, stats) = Formula::parse_dimacs(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    if stats.tautologies_dropped > 0 {
        eprintln!(
            "c dropped {} tautological clause(s)",
            stats.tautologies_dropped
        );
    }
    if stats.kept_clauses != stats.header_clauses {
        eprintln!(
            "c header announced {} clauses, kept {}",
            stats.header_clauses, stats.kept_clauses
        );
    }
    Ok(formula)
}

/// Solve through the LP pipeline; returns the certificate, a printable
/// optimal value, and the pivot count.
fn run_lp<T: Scalar>(
    f: &Formula,
    mode: Mode,
    cap: CapacityMode,
) -> anyhow::Result<(Certificate, String, u64)> {
    let opts = SolverOptions::default();
    let lp = match mode {
        Mode::LpFixing => {
            let penalty = lp_model::build_for_formula(f, cap)?;
            lp_model::apply_face_fixing(&penalty, f)?
        }
        _ => lp_model::build_for_formula(f, cap)?,
    };
    let sol: SolveResult<T> = match mode {
        Mode::LpDecomposed => solve_decomposed(&lp, &opts)?,
        _ => solve(&lp, &opts)?,
    };
    if sol.status != SolveStatus::Optimal {
        bail!("solver finished with status {:?}", sol.status);
    }
    if !verify_feasible(&lp, &sol.primal, 1e-7) {
        bail!("internal: optimal point failed the feasibility check");
    }
    if !verify_integral(&sol.primal, 1e-6) {
        bail!("internal: optimal basic solution is not 0/1");
    }
    let cert = decide_from_solution(&sol, f)?;
    Ok((cert, format!("{}", sol.objective), sol.pivots))
}

fn decide(f: &Formula, mode: Mode, arith: Arith, cap: CapacityMode) -> anyhow::Result<(Certificate, String, u64)> {
    match mode {
        Mode::Lp | Mode::LpDecomposed | Mode::LpFixing => match arith {
            Arith::Float => run_lp::<f64>(f, mode, cap),
            Arith::Rational => run_lp::<BigRational>(f, mode, cap),
        },
        Mode::Apt => Ok((apt_decide(f), "-".into(), 0)),
        Mode::Brute => Ok((brute_force_sat(f)?, "-".into(), 0)),
    }
}

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<u8> {
    let started = Instant::now();
    let f = read_formula(&args.input)?;
    let (cert, zstar, pivots) = decide(&f, args.mode, args.arith, args.capacity.into())?;

    if !verify_certificate(&f, &cert) {
        bail!("internal: emitted certificate failed verification");
    }
    if args.check {
        let reference = apt_decide(&f);
        if reference.verdict() != cert.verdict() {
            eprintln!(
                "disagreement: {} says {}, implication oracle says {}",
                args.mode.name(),
                cert.verdict(),
                reference.verdict()
            );
            return Ok(EXIT_DISAGREE);
        }
    }

    let cert_path = args
        .cert
        .clone()
        .unwrap_or_else(|| args.input.with_extension("cert"));
    std::fs::write(&cert_path, cert.to_text(f.n()))
        .with_context(|| format!("writing {}", cert_path.display()))?;

    let micros = started.elapsed().as_micros();
    println!(
        "{} {} {} {} {} {} {}",
        cert.verdict(),
        zstar,
        f.n(),
        f.clause_count(),
        args.mode.name(),
        pivots,
        micros
    );
    Ok(match cert.verdict() {
        Verdict::Sat => EXIT_SAT,
        Verdict::Unsat => EXIT_UNSAT,
    })
}

fn cmd_export(args: &ExportArgs) -> anyhow::Result<()> {
    let f = read_formula(&args.input)?;
    let lp = if args.fixing {
        let penalty = lp_model::build_for_formula(&f, args.capacity.into())?;
        lp_model::apply_face_fixing(&penalty, &f)?
    } else {
        lp_model::build_for_formula(&f, args.capacity.into())?
    };
    let text = mps::to_mps(&lp)?;
    let out = args
        .output
        .clone()
        .unwrap_or_else(|| args.input.with_extension("mps"));
    std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
    if let Some(map_path) = &args.map {
        let mut json = String::from("[\n");
        for col in 0..lp.num_vars {
            let entry = match lp.var_of_column(col) {
                lp_model::FlowVar::Source { k } => {
                    format!("  {{\"col\": {col}, \"kind\": \"source\", \"k\": {k}}}")
                }
                lp_model::FlowVar::Sink { k } => {
                    format!("  {{\"col\": {col}, \"kind\": \"sink\", \"k\": {k}}}")
                }
                lp_model::FlowVar::Arc { k, tail, head } => format!(
                    "  {{\"col\": {col}, \"kind\": \"arc\", \"k\": {k}, \"tail\": {tail}, \"head\": {head}}}"
                ),
            };
            json.push_str(&entry);
            json.push_str(if col + 1 == lp.num_vars { "\n" } else { ",\n" });
        }
        json.push_str("]\n");
        std::fs::write(map_path, json)
            .with_context(|| format!("writing {}", map_path.display()))?;
    }
    println!("exported {} columns, {} rows", lp.num_vars, lp.rows.len());
    Ok(())
}

fn cmd_hull(args: &HullArgs) -> anyhow::Result<u8> {
    if args.all_formulas {
        let n = args.n.ok_or_else(|| anyhow!("--all-formulas needs --n"))?;
        return hull_sweep(n, args.output.as_deref());
    }
    let f = match (&args.input, args.n) {
        (Some(path), _) => read_formula(path)?,
        (None, Some(n)) => Formula::empty(n),
        (None, None) => bail!("provide --input or --n"),
    };
    let (z, _, verdict) = decide_by_hull_lp(&f)?;
    println!(
        "{verdict} zstar={z} clauses={} vertices={}",
        f.clause_count(),
        enumerate_hull_vertices(f.n())?.count()
    );
    if let Some(weights) = &args.weights {
        let spec = WeightSpec::new(weights.clone());
        let (zw, x, wv) = max_weight_by_hull_lp(&f, &spec)?;
        match (wv, x) {
            (Verdict::Sat, Some(x)) => {
                let weight: i64 = x
                    .iter()
                    .zip(spec.weights())
                    .map(|(&b, &w)| if b { w } else { 0 })
                    .sum();
                let bits: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
                println!("weighted {wv} zstar={zw} assignment={bits} weight={weight}");
            }
            (v, _) => println!("weighted {v} zstar={zw}"),
        }
    }
    Ok(match verdict {
        Verdict::Sat => EXIT_SAT,
        Verdict::Unsat => EXIT_UNSAT,
    })
}

fn hull_sweep(n: u32, csv_out: Option<&Path>) -> anyhow::Result<u8> {
    use flowsat::formula::clause_universe;
    let slots: Vec<_> = clause_universe(n)
        .into_iter()
        .filter(|s| !s.is_tautology(n))
        .collect();
    let total = 1u64 << slots.len();
    let mut agree = 0u64;
    let mut csv = String::from("index,verdict,zstar,clauses\n");
    for fmask in 0..total {
        let clauses: Vec<_> = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| fmask >> i & 1 == 1)
            .map(|(_, s)| s.to_clause(n).expect("non-tautological slot"))
            .collect();
        let f = Formula::new(n, clauses)?;
        let (z, _, hull) = decide_by_hull_lp(&f)?;
        let brute = brute_force_sat(&f)?.verdict();
        let _ = writeln!(csv, "{fmask},{hull},{z},{}", f.clause_count());
        if hull == brute {
            agree += 1;
        } else {
            eprintln!("disagreement at formula index {fmask}: hull {hull}, brute {brute}");
        }
    }
    if let Some(path) = csv_out {
        std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{agree}/{total} agree");
    Ok(if agree == total { 0 } else { EXIT_DISAGREE })
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<u8> {
    if args.modes.is_empty() {
        bail!("at least one mode required");
    }
    let mut csv = String::from("n,m,seed,mode,verdict,zstar,pivots,micros\n");
    for &n in &args.sizes {
        for (di, &density) in args.densities.iter().enumerate() {
            for trial in 0..args.trials {
                let usable = flowsat::formula::usable_universe_size(n);
                let m = (density * usable as f64).floor() as usize;
                let seed = args
                    .seed
                    .wrapping_add((n as u64) << 40)
                    .wrapping_add((di as u64) << 20)
                    .wrapping_add(trial as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = Formula::random(n, m, &mut rng)?;
                let mut verdicts: Vec<(Mode, Verdict)> = Vec::new();
                for &mode in &args.modes {
                    let started = Instant::now();
                    let (cert, zstar, pivots) =
                        decide(&f, mode, args.arith, args.capacity.into())?;
                    let micros = started.elapsed().as_micros();
                    if !verify_certificate(&f, &cert) {
                        bail!("internal: certificate failed verification in bench");
                    }
                    let _ = writeln!(
                        csv,
                        "{n},{m},{seed},{},{},{zstar},{pivots},{micros}",
                        mode.name(),
                        cert.verdict()
                    );
                    verdicts.push((mode, cert.verdict()));
                }
                if verdicts.windows(2).any(|w| w[0].1 != w[1].1) {
                    let dump = format!("bench_failure_n{n}_seed{seed}.cnf");
                    std::fs::write(&dump, f.to_dimacs())?;
                    eprintln!(
                        "modes disagree on n={n} seed={seed}: {:?}; instance dumped to {dump}",
                        verdicts
                            .iter()
                            .map(|(m, v)| format!("{}={v}", m.name()))
                            .collect::<Vec<_>>()
                    );
                    return Ok(EXIT_DISAGREE);
                }
            }
        }
    }
    match &args.output {
        Some(path) => {
            std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<u8> {
    let f = read_formula(&args.input)?;
    let text = std::fs::read_to_string(&args.certificate)
        .with_context(|| format!("reading {}", args.certificate.display()))?;
    let cert = Certificate::parse(&text)?;
    if verify_certificate(&f, &cert) {
        println!("VALID {}", cert.verdict());
        Ok(0)
    } else {
        println!("INVALID");
        Ok(EXIT_ERROR)
    }
}
