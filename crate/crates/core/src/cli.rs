//! The `rectree` command line.
//!
//! ```text
//! rectree somos      --c1 1 --c2 1 -n 11 [--format text|json|csv|bfile]
//! rectree tree       --family first-order --A1 1 --A2 5 --B1 8 --B2 1 [--init 1] [--depth 12]
//! rectree tree       --family somos-ratio|somos-order3 --c1 1 --c2 1 [--format text|json|csv|dot]
//! rectree verify     --c1 1 --c2 1 -n 30
//! rectree search     --A1=-2:6 --A2=-2:6 --B1=-2:9 --enforce-symmetry --depth 8 [--resume FILE]
//! rectree conjecture --c1 1 --c2 1 --depth 6 --horizon 20
//! ```
//!
//! Results go to stdout and diagnostics to stderr. Exit status is 0 on
//! success, 1 when a computation fails or a verification check does not pass,
//! and 2 for usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{check_conjecture, verify_closed_form_branch};
use crate::exact::Rational;
use crate::recurrence::{
    make_first_order, make_order3_unfolding, make_somos_ratio_quadratic, ParamPoint, Recurrence,
};
use crate::search::{run_search_resumable, IntRange, SearchSpec};
use crate::somos::{check_claim1, check_claim2, check_t_identity, somos4};
use crate::tree::{
    build_tree_with, level_stats, level_stats_csv, BuildOptions, LeafStatus, LevelStats,
};

/// Order-1 trees deeper than this need `--unsafe`.
pub const MAX_SAFE_DEPTH_ORDER1: u32 = 24;
/// Order-3 trees deeper than this need `--unsafe`.
pub const MAX_SAFE_DEPTH_ORDER3: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
    Dot,
    Bfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    FirstOrder,
    SomosRatio,
    SomosOrder3,
}

#[derive(Debug, Parser)]
#[command(
    name = "rectree",
    version,
    about = "Exact recurrence trees for degree-2 nonlinear recurrences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generalized Somos-4 terms s(1..=n).
    Somos(SomosArgs),
    /// Build a recurrence tree.
    Tree(TreeArgs),
    /// Check the Somos-4 identities, the closed-form branch and the single-sequence tree.
    Verify(VerifyArgs),
    /// Scan first-order coefficient boxes for rational trees.
    Search(SearchArgs),
    /// Factor order-3 tree values over Somos-4 terms.
    Conjecture(ConjectureArgs),
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    c1: i64,
    #[arg(long, allow_negative_numbers = true)]
    c2: i64,
}

impl ParamArgs {
    fn point(&self) -> ParamPoint {
        ParamPoint::new(self.c1, self.c2)
    }
}

#[derive(Debug, Args)]
struct SomosArgs {
    #[command(flatten)]
    c: ParamArgs,
    #[arg(short = 'n', default_value_t = 20)]
    n: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
#[allow(non_snake_case)]
struct TreeArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long = "A1", allow_negative_numbers = true)]
    A1: Option<i64>,
    #[arg(long = "A2", allow_negative_numbers = true)]
    A2: Option<i64>,
    #[arg(long = "B1", allow_negative_numbers = true)]
    B1: Option<i64>,
    #[arg(long = "B2", allow_negative_numbers = true)]
    B2: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    c1: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    c2: Option<i64>,
    /// Comma-separated initial values, e.g. `1` or `1,1,1`.
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    /// Defaults to 12 for order-1 families and 8 for the order-3 family.
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Solve each distinct window once.
    #[arg(long)]
    memoize: bool,
    #[arg(long = "unsafe")]
    allow_unsafe: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    c: ParamArgs,
    #[arg(short = 'n', default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    closed_form_depth: usize,
    #[arg(long, default_value_t = 10)]
    tree_depth: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long = "unsafe")]
    allow_unsafe: bool,
}

#[derive(Debug, Args)]
#[allow(non_snake_case)]
struct SearchArgs {
    /// `lo:hi` or a single value.
    #[arg(long = "A1", allow_hyphen_values = true, default_value = "-2:6", value_parser = parse_range)]
    A1: IntRange,
    #[arg(long = "A2", allow_hyphen_values = true, default_value = "-2:6", value_parser = parse_range)]
    A2: IntRange,
    #[arg(long = "B1", allow_hyphen_values = true, default_value = "-2:9", value_parser = parse_range)]
    B1: IntRange,
    /// Ignored with `--enforce-symmetry`.
    #[arg(long = "B2", allow_hyphen_values = true, default_value = "-2:6", value_parser = parse_range)]
    B2: IntRange,
    /// Only scan tuples with B2 = A1.
    #[arg(long)]
    enforce_symmetry: bool,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    init: Rational,
    #[arg(long, default_value_t = 8)]
    depth: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Checkpoint file: resumed from if present, updated as the scan runs.
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long = "unsafe")]
    allow_unsafe: bool,
}

#[derive(Debug, Args)]
struct ConjectureArgs {
    #[command(flatten)]
    c: ParamArgs,
    #[arg(long, default_value_t = 6)]
    depth: u32,
    #[arg(long, default_value_t = 20)]
    horizon: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long = "unsafe")]
    allow_unsafe: bool,
}

fn parse_range(s: &str) -> Result<IntRange, String> {
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    match s.rsplit_once(':') {
        Some((lo, hi)) => Ok(IntRange::new(parse(lo)?, parse(hi)?)),
        None => parse(s).map(IntRange::single),
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
    /// Output was produced but a check did not pass.
    Checks(String),
}

type CmdResult = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code as u8;
        }
    };
    let result = match &cli.command {
        Command::Somos(a) => cmd_somos(a),
        Command::Tree(a) => cmd_tree(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Search(a) => cmd_search(a),
        Command::Conjecture(a) => cmd_conjecture(a),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure::Checks(text)) => {
            let _ = out.write_all(text.as_bytes());
            1
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "rectree: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "rectree: {msg}");
            2
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn join(values: &[Rational]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_somos(a: &SomosArgs) -> CmdResult {
    let run = somos4(a.c.point(), a.n).map_err(runtime)?;
    match a.format {
        OutputFormat::Text => Ok(format!("{}\n", join(&run.s))),
        OutputFormat::Json => Ok(pretty(&run)),
        OutputFormat::Csv => Ok(run.to_csv()),
        OutputFormat::Bfile => run
            .to_bfile()
            .ok_or_else(|| runtime("sequence has non-integer terms; b-file output needs integers")),
        OutputFormat::Dot => Err(usage("dot output is only available for tree")),
    }
}

fn need(v: Option<i64>, flag: &str, family: &str) -> Result<i64, Failure> {
    v.ok_or_else(|| usage(format!("--{flag} is required for --family {family}")))
}

fn tree_recurrence(a: &TreeArgs) -> Result<Recurrence, Failure> {
    Ok(match a.family {
        FamilyArg::FirstOrder => {
            let f = "first-order";
            make_first_order(
                need(a.A1, "A1", f)?,
                need(a.A2, "A2", f)?,
                need(a.B1, "B1", f)?,
                need(a.B2, "B2", f)?,
            )
        }
        FamilyArg::SomosRatio => {
            let f = "somos-ratio";
            make_somos_ratio_quadratic(ParamPoint::new(need(a.c1, "c1", f)?, need(a.c2, "c2", f)?))
        }
        FamilyArg::SomosOrder3 => {
            let f = "somos-order3";
            make_order3_unfolding(ParamPoint::new(need(a.c1, "c1", f)?, need(a.c2, "c2", f)?))
        }
    })
}

fn parse_window(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',')
        .map(|v| v.parse::<Rational>().map_err(|e| usage(e.to_string())))
        .collect()
}

fn depth_guard(order: usize, depth: u32, allow_unsafe: bool) -> Result<(), Failure> {
    let limit = if order >= 3 {
        MAX_SAFE_DEPTH_ORDER3
    } else {
        MAX_SAFE_DEPTH_ORDER1
    };
    if depth > limit && !allow_unsafe {
        return Err(usage(format!(
            "depth {depth} exceeds {limit} for an order-{order} tree; pass --unsafe to run anyway"
        )));
    }
    Ok(())
}

fn cmd_tree(a: &TreeArgs) -> CmdResult {
    if a.format == OutputFormat::Bfile {
        return Err(usage("bfile output is only available for somos"));
    }
    let r = tree_recurrence(a)?;
    let window = match &a.init {
        Some(s) => parse_window(s)?,
        None => vec![Rational::one(); r.order()],
    };
    let depth = a.depth.unwrap_or(if r.order() >= 3 { 8 } else { 12 });
    depth_guard(r.order(), depth, a.allow_unsafe)?;
    let t = build_tree_with(&r, &window, depth, BuildOptions { memoize: a.memoize })
        .map_err(runtime)?;
    Ok(match a.format {
        OutputFormat::Json => pretty(&t.to_json()),
        OutputFormat::Dot => t.to_dot(),
        OutputFormat::Csv => level_stats_csv(&level_stats(&t)),
        _ => render_tree_text(&t),
    })
}

fn render_tree_text(t: &crate::tree::RecurrenceTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "recurrence: {}", t.recurrence());
    let _ = writeln!(out, "initial: {}", join(t.initial_window()));
    let stats = level_stats(t);
    let levels = t.levels();
    let mut any_flagged = false;
    for (s, ids) in stats.iter().zip(&levels) {
        let mut distinct: Vec<(&Rational, u8)> = ids
            .iter()
            .map(|&id| (&t.node(id).value, t.node(id).multiplicity))
            .collect();
        distinct.sort();
        distinct.dedup_by(|a, b| a.0 == b.0);
        let shown: Vec<String> = distinct
            .iter()
            .map(|(v, m)| {
                let mut cell = v.to_string();
                if !v.is_integer() {
                    cell.push('*');
                    any_flagged = true;
                }
                if *m > 1 {
                    let _ = write!(cell, "(x{m})");
                }
                cell
            })
            .collect();
        let _ = writeln!(
            out,
            "level {} [{} nodes, {} distinct, {} new]: {}",
            s.depth,
            s.total_nodes,
            s.distinct_values,
            s.new_values.len(),
            shown.join(" ")
        );
    }
    let count = |pred: fn(LeafStatus) -> bool| t.nodes().iter().filter(|n| pred(n.status)).count();
    let nonrational = count(|s| s.is_nonrational());
    let degenerate = count(|s| s == LeafStatus::DegenerateCutoff);
    let _ = writeln!(
        out,
        "nodes: {}, non-rational cutoffs: {nonrational}, degenerate cutoffs: {degenerate}",
        t.len()
    );
    if any_flagged {
        let _ = writeln!(out, "* non-integer rational");
    }
    out
}

struct Check {
    name: String,
    status: &'static str,
    detail: String,
}

fn check_from(name: String, r: Result<bool, String>) -> Check {
    match r {
        Ok(true) => Check {
            name,
            status: "PASS",
            detail: String::new(),
        },
        Ok(false) => Check {
            name,
            status: "FAIL",
            detail: String::new(),
        },
        Err(e) => Check {
            name,
            status: "ERROR",
            detail: e,
        },
    }
}

fn single_sequence_check(c: ParamPoint, depth: u32) -> Result<bool, String> {
    let t = build_tree_with(
        &make_somos_ratio_quadratic(c),
        &[Rational::one()],
        depth,
        BuildOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let stats: Vec<LevelStats> = level_stats(&t);
    Ok(!t.has_nonrational_cutoff() && stats[1..].iter().all(|s| s.new_values.len() == 1))
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    if !matches!(a.format, OutputFormat::Text | OutputFormat::Json) {
        return Err(usage("verify supports text and json output"));
    }
    depth_guard(1, a.tree_depth, a.allow_unsafe)?;
    let c = a.c.point();
    let n = a.n;
    let s = |e: crate::somos::SomosError| e.to_string();
    let checks = vec![
        check_from(
            format!("somos4 integrality (n <= {n})"),
            somos4(c, n).map(|r| r.is_integral()).map_err(s),
        ),
        check_from(
            format!("claim 1 ratio-of-ratios (n <= {n})"),
            check_claim1(c, n).map_err(s),
        ),
        check_from(
            format!("claim 2 identity (n <= {n})"),
            check_claim2(c, n).map_err(s),
        ),
        check_from(
            format!("T(n) = 0 (n <= {})", n.saturating_sub(1)),
            check_t_identity(c, n).map_err(s),
        ),
        check_from(
            format!("closed-form branch (depth {})", a.closed_form_depth),
            verify_closed_form_branch(c, a.closed_form_depth)
                .map(|r| r.matched)
                .map_err(|e| e.to_string()),
        ),
        check_from(
            format!("one new value per level (depth {})", a.tree_depth),
            single_sequence_check(c, a.tree_depth),
        ),
    ];
    let all_pass = checks.iter().all(|ch| ch.status == "PASS");
    let text = match a.format {
        OutputFormat::Json => {
            let rows: Vec<_> = checks
                .iter()
                .map(|ch| json!({"name": ch.name, "status": ch.status, "detail": ch.detail}))
                .collect();
            pretty(&json!({"c": c, "n": n, "checks": rows, "all_pass": all_pass}))
        }
        _ => {
            let mut out = format!("verify c = {c}\n");
            for ch in &checks {
                let _ = write!(out, "{:<40} {}", ch.name, ch.status);
                if !ch.detail.is_empty() {
                    let _ = write!(out, ": {}", ch.detail);
                }
                out.push('\n');
            }
            out
        }
    };
    if all_pass {
        Ok(text)
    } else {
        Err(Failure::Checks(text))
    }
}

fn cmd_search(a: &SearchArgs) -> CmdResult {
    if !matches!(
        a.format,
        OutputFormat::Text | OutputFormat::Json | OutputFormat::Csv
    ) {
        return Err(usage("search supports text, json and csv output"));
    }
    depth_guard(1, a.depth, a.allow_unsafe)?;
    let spec = SearchSpec {
        a1: a.A1,
        a2: a.A2,
        b1: a.B1,
        b2: a.B2,
        enforce_a1_eq_b2: a.enforce_symmetry,
        initial_value: a.init.clone(),
        test_depth: a.depth,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let report =
        run_search_resumable(&spec, a.resume.as_deref(), a.resume.is_some()).map_err(runtime)?;
    Ok(match a.format {
        OutputFormat::Json => pretty(&report),
        OutputFormat::Csv => report.to_csv(),
        _ => {
            let mut out = format!(
                "scanned {}, hits {}, pruned at level 2 {} ({} non-square, {} degenerate), failed deeper {}\n",
                report.scanned,
                report.hits.len(),
                report.pruned_at_level2,
                report.pruned_nonsquare,
                report.pruned_degenerate,
                report.failed_deeper
            );
            for h in &report.hits {
                let c = h.coeffs;
                let _ = writeln!(
                    out,
                    "A1={} A2={} B1={} B2={}  a(2) in {{{}}}  rational to depth {}",
                    c.a1,
                    c.a2,
                    c.b1,
                    c.b2,
                    h.first_level_roots
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", "),
                    h.verified_depth
                );
            }
            out
        }
    })
}

fn cmd_conjecture(a: &ConjectureArgs) -> CmdResult {
    if !matches!(a.format, OutputFormat::Text | OutputFormat::Json) {
        return Err(usage("conjecture supports text and json output"));
    }
    depth_guard(3, a.depth, a.allow_unsafe)?;
    let rep = check_conjecture(a.c.point(), a.depth, a.horizon).map_err(runtime)?;
    Ok(match a.format {
        OutputFormat::Json => pretty(&rep),
        _ => {
            let mut out = format!(
                "c = {}, depth {}, horizon {}: {} distinct values, all factorable: {}\n",
                rep.c, rep.depth, rep.horizon, rep.values_checked, rep.all_factorable
            );
            let _ = writeln!(out, "convention: {}", rep.convention);
            for (v, w) in &rep.witnesses {
                let fmt = |ix: &[usize]| {
                    if ix.is_empty() {
                        "1".to_string()
                    } else {
                        ix.iter()
                            .map(|i| format!("s({i})"))
                            .collect::<Vec<_>>()
                            .join("*")
                    }
                };
                let sign = if w.negative { "-" } else { "" };
                let _ = writeln!(
                    out,
                    "{v} = {sign}{} / {}",
                    fmt(&w.numerator),
                    fmt(&w.denominator)
                );
            }
            for v in &rep.failures {
                let _ = writeln!(out, "{v}: not factorable within horizon");
            }
            out
        }
    })
}
