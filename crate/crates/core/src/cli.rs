//! Command-line driver behind the `cayleyflows` binary.
//!
//! Exit codes: 0 success, 2 usage errors, 3 budget or memory guard trips,
//! 1 internal invariant violations (a reproduction file is written as well).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{Limits, Parallelism};
use crate::deadend::{
    chain_lengths, construct_dead_end, depth_two_example, depth_two_example_word, nonstrict_depth,
    strict_depth, verify_certificate, ConstructionOptions, DepthReport, Multipliers,
};
use crate::error::{Error, Result};
use crate::geodesic::{
    bfs_length_oracle, exact_length, length_connected_balanced, length_exact_metabelian_with, GeodesicResult,
    OracleOutcome,
};
use crate::growth::{ball_sizes, rate_estimates, saw_counts, saw_injects_into_group, BallCache, GrowthSeries};
use crate::relations::{recursion_lower_bound, shortest_relation};
use crate::tower::{GroupSpec, SolubleElement};
use crate::words::{enumerate_irreducible, parse_raw, reduce, FreeWord, Letter};

pub const CACHE_ENV: &str = "CAYLEYFLOWS_CACHE";

#[derive(Parser, Debug)]
#[command(name = "cayleyflows", version, about = "Flows on Cayley graphs of free soluble groups")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Ball cache directory (defaults to $CAYLEYFLOWS_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Memory guard in MiB.
    #[arg(long, global = true)]
    mem_limit: Option<usize>,
    /// Worker threads, 0 for all cores.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Group {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
}

impl Group {
    fn spec(self) -> Result<GroupSpec> {
        GroupSpec::new(self.m, self.d)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Freely reduce a word.
    Reduce {
        word: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Decide whether two words give the same element.
    Eq {
        w1: String,
        w2: String,
        #[command(flatten)]
        group: Group,
    },
    /// Exact word length with a geodesic witness.
    Length {
        word: String,
        #[command(flatten)]
        group: Group,
        /// Also run breadth-first search up to this radius.
        #[arg(long)]
        oracle_radius: Option<u64>,
    },
    /// Strict (default) or non-strict dead-end depth.
    Depth {
        word: String,
        #[command(flatten)]
        group: Group,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        #[arg(long, conflicts_with = "nonstrict")]
        strict: bool,
        #[arg(long)]
        nonstrict: bool,
    },
    /// The depth-two dead end of Sol(2,2) with its length chains.
    Example,
    /// Shortest nontrivial relation.
    Relation {
        #[command(flatten)]
        group: Group,
        #[arg(long, default_value_t = 14)]
        max_len: usize,
        /// Cap on visited search nodes.
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
    },
    /// Build a strict dead end of depth at least k with its certificate.
    Construct {
        #[command(flatten)]
        group: Group,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Lower bound on relation length one degree down (default: known value).
        #[arg(long)]
        rho: Option<u64>,
        /// Weight every loop by 1 instead of distinct powers of two.
        #[arg(long)]
        unit: bool,
    },
    /// Ball sizes b_0..b_n as CSV.
    Growth {
        #[command(flatten)]
        group: Group,
        #[arg(long, default_value_t = 6)]
        n: u64,
    },
    /// Self-avoiding walk counts c_1..c_n on the square lattice as CSV.
    Saw {
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Also check that the walks of length n give distinct elements of Sol(2,2).
        #[arg(long)]
        inject: bool,
    },
}

struct Ctx {
    json: bool,
    limits: Limits,
    par: Parallelism,
    cache: Option<BallCache>,
}

/// Runs the tool on `argv` (including the program name), printing to stdout
/// and stderr. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_budget() {
                3
            } else if e.is_invariant() || matches!(e, Error::Io(_) | Error::Json(_) | Error::Cache(_)) {
                if e.is_invariant() {
                    if let Some(path) = dump_repro(&args, &e) {
                        let _ = writeln!(err, "reproduction written to {}", path.display());
                    }
                }
                1
            } else {
                2
            }
        }
    }
}

fn dump_repro(args: &[std::ffi::OsString], e: &Error) -> Option<PathBuf> {
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let doc = serde_json::json!({ "argv": argv, "error": e.to_string() });
    let path = std::env::temp_dir().join(format!("cayleyflows-repro-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string_pretty(&doc).ok()?).ok()?;
    Some(path)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut limits = Limits::default();
    if let Some(mib) = cli.mem_limit {
        limits = limits.with_mem_limit_mib(mib);
    }
    let cache_dir = cli.cache_dir.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    let ctx = Ctx {
        json: cli.json,
        limits,
        par: Parallelism::with_threads(cli.threads),
        cache: cache_dir.map(BallCache::new).transpose()?,
    };
    match cli.command {
        Command::Reduce { word, m } => {
            let raw = parse_raw(&word)?;
            let rank = raw.iter().map(|l| l.generator() + 1).max().unwrap_or(0).max(m);
            let w = reduce(&raw, rank)?;
            emit(out, &ctx, &serde_json::json!({ "reduced": w }), &w.to_string())
        }
        Command::Eq { w1, w2, group } => {
            let spec = group.spec()?;
            let x = element(&w1, spec)?;
            let y = element(&w2, spec)?;
            let equal = x.equals(&y)?;
            let text = if equal { "equal" } else { "not equal" };
            emit(out, &ctx, &serde_json::json!({ "equal": equal }), text)
        }
        Command::Length {
            word,
            group,
            oracle_radius,
        } => length_cmd(out, &ctx, &word, group.spec()?, oracle_radius),
        Command::Depth {
            word,
            group,
            max_k,
            nonstrict,
            ..
        } => {
            let x = element(&word, group.spec()?)?;
            if nonstrict {
                let k = nonstrict_depth(&x, max_k, &exact_length, &ctx.par)?;
                emit(out, &ctx, &serde_json::json!({ "nonstrict_depth": k }), &format!("nonstrict depth {k}"))
            } else {
                let report = strict_depth(&x, max_k, &exact_length, &ctx.par)?;
                emit(out, &ctx, &report, &depth_text(&report, max_k))
            }
        }
        Command::Example => example_cmd(out, &ctx),
        Command::Relation {
            group,
            max_len,
            budget,
        } => {
            let r = shortest_relation(group.spec()?, max_len, budget, &ctx.par)?;
            let text = match r.rho {
                Some(rho) => format!(
                    "rho = {rho}\n{}",
                    r.witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("\n")
                ),
                None if r.budget_exhausted => format!("budget exhausted, rho >= {}", r.lower_bound),
                None => format!("no relation up to length {max_len}, rho >= {}", r.lower_bound),
            };
            emit(out, &ctx, &r, &text)
        }
        Command::Construct { group, k, rho, unit } => construct_cmd(out, &ctx, group.spec()?, k, rho, unit),
        Command::Growth { group, n } => {
            let series = ball_sizes(group.spec()?, n, &ctx.limits, &ctx.par, ctx.cache.as_ref())?;
            let mut text = series.to_csv();
            if series.truncated {
                text.push_str("# truncated by the memory guard\n");
            }
            emit(out, &ctx, &series, text.trim_end())
        }
        Command::Saw { n, inject } => {
            let series = GrowthSeries::saw(saw_counts(n, &ctx.par)?);
            let injects = if inject { Some(saw_injects_into_group(n)?.0) } else { None };
            if ctx.json {
                return emit(out, &ctx, &SawDoc { series: &series, injects }, "");
            }
            let mut text = series.to_csv();
            if let Some((_, r)) = rate_estimates(&series).last() {
                text.push_str(&format!(
                    "# c_n^(1/n) at n = {n}: {r:.6}; published connective constant {}\n",
                    crate::growth::SAW_RATE_REFERENCE
                ));
            }
            if let Some(b) = injects {
                text.push_str(&format!("# distinct in Sol(2,2): {b}\n"));
            }
            emit(out, &ctx, &(), text.trim_end())
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, ctx: &Ctx, value: &T, text: &str) -> Result<()> {
    if ctx.json {
        writeln!(out, "{}", serde_json::to_string(value)?)?;
    } else {
        writeln!(out, "{text}")?;
    }
    Ok(())
}

fn element(word: &str, spec: GroupSpec) -> Result<SolubleElement> {
    SolubleElement::from_word(&FreeWord::parse(word, spec.m)?, spec)
}

fn length_cmd(out: &mut dyn Write, ctx: &Ctx, word: &str, spec: GroupSpec, oracle_radius: Option<u64>) -> Result<()> {
    let x = element(word, spec)?;
    let result = match spec.d {
        1 => {
            let point = x.point().unwrap();
            let mut letters = Vec::new();
            for (i, &c) in point.iter().enumerate() {
                let l = if c >= 0 { Letter::positive(i) } else { Letter::negative(i) };
                letters.extend(std::iter::repeat_n(l, c.unsigned_abs() as usize));
            }
            let witness = FreeWord::from_letters(&letters, spec.m)?;
            Ok(GeodesicResult {
                length: witness.len() as u64,
                weight_n: witness.len() as u64,
                connection_cost: 0,
                witness,
            })
        }
        2 => length_exact_metabelian_with(&x, &ctx.limits),
        _ if x.is_identity() => Ok(GeodesicResult {
            length: 0,
            weight_n: 0,
            connection_cost: 0,
            witness: FreeWord::empty(spec.m),
        }),
        _ => length_connected_balanced(&x),
    };
    let oracle = match oracle_radius {
        Some(r) => Some(bfs_length_oracle(&x, r, &ctx.limits)?),
        None => None,
    };
    let result = match (result, &oracle) {
        (Ok(r), _) => Some(r),
        // the oracle alone can still answer
        (Err(_), Some(_)) => None,
        (Err(e), None) => return Err(e),
    };
    if ctx.json {
        if let Some(r) = &result {
            writeln!(out, "{}", serde_json::to_string(r)?)?;
        }
        if let Some(o) = &oracle {
            writeln!(out, "{}", serde_json::to_string(&serde_json::json!({ "oracle": o }))?)?;
        }
        return Ok(());
    }
    if let Some(r) = &result {
        writeln!(out, "length {} (N = {}, connection {})", r.length, r.weight_n, r.connection_cost)?;
        writeln!(out, "witness {}", r.witness)?;
    }
    match oracle {
        Some(OracleOutcome::Exact(n)) => writeln!(out, "oracle {n}")?,
        Some(OracleOutcome::ExceedsRadius) => writeln!(out, "oracle: longer than {}", oracle_radius.unwrap())?,
        None => {}
    }
    if let (Some(r), Some(OracleOutcome::Exact(n))) = (&result, oracle) {
        if r.length != n {
            return Err(Error::Invariant(format!("exact length {} but oracle {n}", r.length)));
        }
    }
    Ok(())
}

fn depth_text(r: &DepthReport, max_k: usize) -> String {
    let mut s = format!("|g| = {}\nstrict depth {}", r.length, r.strict_depth);
    if r.limiting_witness.is_none() {
        s.push_str(&format!(" (at least; search stopped at {max_k})"));
    }
    s.push_str(if r.is_dead_end { "\ndead end" } else { "\nnot a dead end" });
    if let Some(w) = &r.limiting_witness {
        let chain: Vec<String> = r.witness_chain.iter().map(u64::to_string).collect();
        s.push_str(&format!("\nwitness {w}: {}", chain.join(" ")));
    }
    s
}

#[derive(Serialize)]
struct SawDoc<'a> {
    #[serde(flatten)]
    series: &'a GrowthSeries,
    #[serde(skip_serializing_if = "Option::is_none")]
    injects: Option<bool>,
}

#[derive(Serialize)]
struct StepLength {
    word: FreeWord,
    length: u64,
}

#[derive(Serialize)]
struct ExampleReport {
    element: FreeWord,
    length: u64,
    first_step: Vec<StepLength>,
    second_step: Vec<StepLength>,
    probe: StepLength,
    depth: DepthReport,
}

fn example_cmd(out: &mut dyn Write, ctx: &Ctx) -> Result<()> {
    let g = depth_two_example();
    let steps = |k: usize| -> Result<Vec<StepLength>> {
        enumerate_irreducible(2, k)
            .map(|w| {
                let length = exact_length(&g.mul_word(&w))?;
                Ok(StepLength { word: w, length })
            })
            .collect()
    };
    let probe_word = FreeWord::parse("abA", 2)?;
    let probe_chain = chain_lengths(&g, &probe_word, &exact_length)?;
    let report = ExampleReport {
        element: depth_two_example_word(),
        length: exact_length(&g)?,
        first_step: steps(1)?,
        second_step: steps(2)?,
        probe: StepLength {
            word: probe_word,
            length: *probe_chain.last().unwrap(),
        },
        depth: strict_depth(&g, 3, &exact_length, &ctx.par)?,
    };
    let line = |v: &[StepLength]| v.iter().map(|s| format!("{}:{}", s.word, s.length)).collect::<Vec<_>>().join(" ");
    let text = format!(
        "g = {}\n|g| = {}\n|gx|  {}\n|gxy| {}\n|g{}| = {}\n{}",
        report.element,
        report.length,
        line(&report.first_step),
        line(&report.second_step),
        report.probe.word,
        report.probe.length,
        depth_text(&report.depth, 3)
    );
    emit(out, ctx, &report, &text)
}

/// Known shortest relation length in degree `d` (rank at least 2), or the
/// tripling lower bound beyond that.
pub fn known_rho(d: usize) -> u64 {
    match d {
        1 => 4,
        2 => 14,
        _ => recursion_lower_bound(d) as u64,
    }
}

fn construct_cmd(out: &mut dyn Write, ctx: &Ctx, spec: GroupSpec, k: usize, rho: Option<u64>, unit: bool) -> Result<()> {
    let rho = rho.unwrap_or_else(|| known_rho(spec.d.saturating_sub(1)));
    let options = ConstructionOptions {
        multipliers: if unit { Multipliers::Unit } else { Multipliers::PowersOfTwo },
        limits: ctx.limits.clone(),
        parallelism: ctx.par.clone(),
        ..Default::default()
    };
    let c = construct_dead_end(spec, k, rho, &options)?;
    let check = verify_certificate(&c.certificate, &c.element, &ctx.limits);
    if ctx.json {
        let doc = serde_json::json!({
            "element": c.element.canonical_form(),
            "certificate": c.certificate,
            "stats": c.stats,
            "verification": check,
        });
        writeln!(out, "{}", serde_json::to_string(&doc)?)?;
    } else {
        let s = &c.stats;
        writeln!(out, "Sol({},{}) k = {k}, rho_lower = {rho}", spec.m, spec.d)?;
        writeln!(
            out,
            "sphere {} vertices, {} connecting paths, {} hub routes, {} loops",
            s.sphere_size, s.connecting_paths, s.hub_routes, s.loops
        )?;
        writeln!(out, "support {} edges, {} vertices", s.sigma_edges, s.sigma_vertices)?;
        writeln!(out, "N = {}", abbreviate(&c.certificate.weight))?;
        writeln!(out, "element hash {}", c.element.canonical_hash())?;
        writeln!(out, "certificate valid: {}", check.valid)?;
        for f in &check.failures {
            writeln!(out, "  {f}")?;
        }
    }
    if !check.valid {
        return Err(Error::Invariant(format!("certificate rejected: {}", check.failures.join("; "))));
    }
    Ok(())
}

fn abbreviate(digits: &str) -> String {
    if digits.len() <= 40 {
        digits.to_string()
    } else {
        format!("{}…{} ({} digits)", &digits[..12], &digits[digits.len() - 12..], digits.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("cayleyflows").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn basic_commands() {
        assert_eq!(call(&["reduce", "abBA"]), (0, "1\n".into()));
        assert_eq!(call(&["reduce", "a b b^-1 c"]), (0, "ac\n".into()));
        assert_eq!(call(&["eq", "ABab", "1", "--m", "2", "--d", "1"]), (0, "equal\n".into()));
        assert_eq!(call(&["eq", "ABab", "1"]), (0, "not equal\n".into()));
        assert_eq!(
            call(&["--json", "length", "ab"]),
            (0, "{\"length\":2,\"N\":2,\"conn\":0,\"witness\":\"ab\"}\n".into())
        );
        let (code, text) = call(&["length", "abAB", "--oracle-radius", "6"]);
        assert_eq!(code, 0);
        assert!(text.contains("length 4") && text.contains("oracle 4"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["reduce", "a^x"]).0, 2);
        assert_eq!(call(&["--mem-limit", "0", "length", "abAB", "--oracle-radius", "8"]).0, 3);
        assert_eq!(call(&["construct", "--d", "2", "--k", "3"]).0, 2);
    }

    #[test]
    fn relation_and_saw_json() {
        let (code, text) = call(&["--json", "relation", "--d", "1", "--max-len", "6"]);
        assert_eq!(code, 0);
        assert_eq!(text, "{\"rho\":4,\"lower_bound\":4,\"witnesses\":[\"abAB\"]}\n");
        let (_, text) = call(&["--json", "saw", "--n", "3"]);
        assert_eq!(text, "{\"kind\":\"saw\",\"spec\":null,\"counts\":[4,12,36],\"truncated\":false}\n");
    }

    #[test]
    fn threads_do_not_change_output() {
        let one = call(&["--json", "--threads", "1", "depth", "bbaBaBBABAAbAbbabaBB", "--max-k", "3"]);
        let two = call(&["--json", "--threads", "2", "depth", "bbaBaBBABAAbAbbabaBB", "--max-k", "3"]);
        assert_eq!(one, two);
        assert!(one.1.contains("\"strict_depth\":2"));
    }
}
