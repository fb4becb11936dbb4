//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input or flags, 3 a bundle exceeds the
//! verification enumeration bound, 4 an algorithm precondition is unmet.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{solve_density_greedy, solve_round_robin};
use crate::envy::{EnvyMode, EnvyOracle, DEFAULT_ENUMERATION_BOUND};
use crate::error::{Error, Result};
use crate::greedy::{GreedySolver, TieBreak};
use crate::instances::{fixture, gen_random, FixtureName, GenParams};
use crate::model::{ensure_valid, kappa, Allocation, Instance};
use crate::nsw::{solve_nsw_exact, DEFAULT_SEARCH_LIMIT};
use crate::rational::{parse_rational, Rational};
use crate::two_agent::{solve_two_agent, Selection};
use crate::uniform::solve_uniform;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BOUND: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// Environment variable overriding the default enumeration bound of `verify`.
pub const ENUM_BOUND_ENV: &str = "FAIRKNAP_ENUM_BOUND";

#[derive(Parser, Debug)]
#[command(name = "fairknap", version, about = "Fair allocation under budget constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Emit a named fixture instance.
    Fixture(FixtureArgs),
    /// Run an allocation algorithm on an instance.
    Solve(SolveArgs),
    /// Compute the exact EF or EF1 ratio of an allocation.
    Verify(VerifyArgs),
    /// Generate, solve and verify instances over a range of kappa floors; CSV out.
    Sweep(SweepArgs),
}

#[derive(clap::Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_rational_arg)]
    kappa_floor: Option<Rational>,
    /// Give every agent the same budget.
    #[arg(long)]
    uniform_budgets: bool,
    /// Value range `lo:hi`.
    #[arg(long, value_parser = parse_range_arg)]
    values: Option<(Rational, Rational)>,
    /// Size range `lo:hi`.
    #[arg(long, value_parser = parse_range_arg)]
    sizes: Option<(Rational, Rational)>,
    /// Budget range `lo:hi`.
    #[arg(long, value_parser = parse_range_arg)]
    budgets: Option<(Rational, Rational)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct FixtureArgs {
    #[arg(long, value_parser = parse_fixture_arg)]
    name: FixtureName,
    #[arg(long, value_parser = parse_rational_arg, default_value = "1/100")]
    epsilon: Rational,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Alg {
    Greedy,
    Uniform,
    Two,
    Rr,
    Dgreedy,
    Nsw,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SelectionArg {
    Proof,
    Argmin,
}

#[derive(clap::Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    alg: Alg,
    /// Instance JSON file, or `-` for stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the greedy solver's step trace as JSON lines (greedy only).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "proof")]
    selection: SelectionArg,
    /// Maximum number of raw assignments the exact NSW search may explore.
    #[arg(long, default_value_t = DEFAULT_SEARCH_LIMIT)]
    nsw_limit: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Notion {
    Ef,
    Ef1,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Allocation JSON file, or `-` for stdin.
    #[arg(long)]
    alloc: PathBuf,
    #[arg(long, value_enum, default_value = "ef1")]
    notion: Notion,
    /// Largest bundle (in items) to enumerate.
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(clap::Args, Debug)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_rational_arg, default_value = "2,4,10")]
    kappas: Vec<Rational>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', value_enum, default_value = "greedy")]
    algs: Vec<Alg>,
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, default_value_t = 4)]
    m_min: usize,
    #[arg(long, default_value_t = 12)]
    m_max: usize,
    /// Upper bound on items when `nsw` is among the algorithms.
    #[arg(long, default_value_t = 8)]
    nsw_max_m: usize,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_range_arg(s: &str) -> std::result::Result<(Rational, Rational), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    Ok((parse_rational_arg(lo)?, parse_rational_arg(hi)?))
}

fn parse_fixture_arg(s: &str) -> std::result::Result<FixtureName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::EnumerationBound { .. } => EXIT_BOUND,
        Error::Precondition(_) | Error::SearchTooLarge { .. } => EXIT_PRECONDITION,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Fixture(a) => cmd_fixture(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<()> {
    let defaults = GenParams::default();
    let params = GenParams {
        n: a.n,
        m: a.m,
        seed: a.seed,
        value_range: a.values.unwrap_or(defaults.value_range),
        size_range: a.sizes.unwrap_or(defaults.size_range),
        budget_range: a.budgets.unwrap_or(defaults.budget_range),
        kappa_floor: a.kappa_floor,
        uniform_budgets: a.uniform_budgets,
    };
    let instance = gen_random(&params)?;
    emit(&instance.to_json(), a.out.as_deref(), out)
}

fn cmd_fixture(a: FixtureArgs, out: &mut dyn Write) -> Result<()> {
    let instance = fixture(a.name, &a.epsilon)?;
    emit(&instance.to_json(), a.out.as_deref(), out)
}

fn solve_with(alg: Alg, instance: &Instance, selection: Selection, nsw_limit: u64) -> Result<Allocation> {
    match alg {
        Alg::Greedy => Ok(GreedySolver::new(instance, TieBreak::Canonical).run(&mut ()).allocation),
        Alg::Uniform => solve_uniform(instance),
        Alg::Two => solve_two_agent(instance, selection),
        Alg::Rr => Ok(solve_round_robin(instance)),
        Alg::Dgreedy => Ok(solve_density_greedy(instance)),
        Alg::Nsw => Ok(solve_nsw_exact(instance, nsw_limit)?.0),
    }
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Result<()> {
    let instance = Instance::from_json(&read_input(&a.input)?)?;
    let selection = match a.selection {
        SelectionArg::Proof => Selection::ProofConsistent,
        SelectionArg::Argmin => Selection::LiteralArgmin,
    };
    let allocation = match (&a.trace, a.alg) {
        (Some(trace_path), Alg::Greedy) => {
            let solver = GreedySolver::new(&instance, TieBreak::Canonical);
            let run = solver.run(&mut ());
            let mut lines = String::new();
            for (k, step) in run.trace.iter().enumerate() {
                lines.push_str(&solver.step_json(k, step).to_string());
                lines.push('\n');
            }
            fs::write(trace_path, lines)?;
            run.allocation
        }
        (Some(_), _) => {
            return Err(Error::InvalidInput(
                "--trace is only available with --alg greedy".into(),
            ))
        }
        (None, alg) => solve_with(alg, &instance, selection, a.nsw_limit)?,
    };
    ensure_valid(&instance, &allocation)?;
    emit(&allocation.to_json(), a.out.as_deref(), out)
}

fn enumeration_bound(flag: Option<usize>) -> Result<usize> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(ENUM_BOUND_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{ENUM_BOUND_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_ENUMERATION_BOUND),
    }
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let instance = Instance::from_json(&read_input(&a.instance)?)?;
    let allocation = Allocation::from_json(&read_input(&a.alloc)?)?;
    if allocation.agents() > instance.agents() {
        return Err(Error::InvalidInput(format!(
            "allocation names agent {} but the instance has {} agents",
            allocation.agents(),
            instance.agents()
        )));
    }
    let allocation = allocation.pad_agents(instance.agents());
    let mode = match a.notion {
        Notion::Ef => EnvyMode::Ef,
        Notion::Ef1 => EnvyMode::Ef1,
    };
    let oracle = EnvyOracle::with_bound(enumeration_bound(a.bound)?);
    let report = oracle.allocation_ratio(&instance, &allocation, mode)?;
    emit(&serde_json::to_string_pretty(&report.to_json())?, None, out)
}

/// Seed for one `(kappa, trial)` cell; independent of evaluation order.
fn cell_seed(base: u64, kappa_index: usize, trial: usize) -> u64 {
    let mut z = base ^ ((kappa_index as u64) << 32) ^ trial as u64;
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const SWEEP_HEADER: &str = "seed,n,m,kappa_num,kappa_den,alg,ratio_num,ratio_den,runtime_ms";

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    if a.n_min == 0 || a.n_min > a.n_max || a.m_min == 0 || a.m_min > a.m_max {
        return Err(Error::InvalidInput(
            "need 1 <= n-min <= n-max and 1 <= m-min <= m-max".into(),
        ));
    }
    let m_max = if a.algs.contains(&Alg::Nsw) {
        a.m_max.min(a.nsw_max_m)
    } else {
        a.m_max
    };
    let m_min = a.m_min.min(m_max);
    let oracle = EnvyOracle::with_bound(enumeration_bound(a.bound)?);

    let cells: Vec<(usize, usize)> = (0..a.kappas.len())
        .flat_map(|k| (0..a.trials).map(move |t| (k, t)))
        .collect();
    let rows: Vec<Result<Vec<String>>> = cells
        .par_iter()
        .map(|&(k, t)| {
            let seed = cell_seed(a.seed, k, t);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(a.n_min..=a.n_max);
            let m = rng.gen_range(m_min..=m_max);
            let params = GenParams {
                n,
                m,
                seed,
                kappa_floor: Some(a.kappas[k].clone()),
                ..GenParams::default()
            };
            let instance = gen_random(&params)?;
            let kap = kappa(&instance)?;
            let mut lines = Vec::new();
            for &alg in &a.algs {
                let start = Instant::now();
                let allocation = match solve_with(alg, &instance, Selection::ProofConsistent, DEFAULT_SEARCH_LIMIT) {
                    Ok(alloc) => alloc,
                    // Algorithms whose preconditions this instance misses get no row.
                    Err(Error::Precondition(_)) => continue,
                    Err(e) => return Err(e),
                };
                let elapsed = start.elapsed().as_secs_f64() * 1000.0;
                let ratio = oracle.allocation_ratio(&instance, &allocation, EnvyMode::Ef1)?.ratio;
                let alg_name = alg
                    .to_possible_value()
                    .expect("no skipped variants")
                    .get_name()
                    .to_string();
                lines.push(format!(
                    "{seed},{n},{m},{},{},{alg_name},{},{},{elapsed:.3}",
                    kap.numer(),
                    kap.denom(),
                    ratio.numer(),
                    ratio.denom(),
                ));
            }
            Ok(lines)
        })
        .collect();

    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for row in rows {
        for line in row? {
            csv.push_str(&line);
            csv.push('\n');
        }
    }
    match a.out {
        Some(p) => fs::write(p, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}
