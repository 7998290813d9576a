//! `cliquekr`: run verification suites, exact searches, constructions and
//! canonical forms from the command line.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cliquekr::claw::{canonical_claw_size, claw_canonical_form, enumerate_optimal_claw, max_intersecting_claw, ClawFamily};
use cliquekr::clique::Budget;
use cliquekr::constructions::{ekr_size, hm_cross_sum, hm_size, main_rn_size, NamedFamily, Tag};
use cliquekr::iso::{canonical_form, canonical_image, ground_canonical_form, unordered_pair_canonical_form};
use cliquekr::report::{Format, RSpan, Report, ReportRecord, RunConfig, Span};
use cliquekr::search::{self, SearchConfig, SearchResult};
use cliquekr::verify::{run_suite, SUITES};
use cliquekr::{Error, Family, GroundFamily, Params};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_OTHER: u8 = 4;

#[derive(Parser)]
#[command(name = "cliquekr", version, about = "Intersecting families of independent sets in disjoint cliques")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and report every claim checked.
    Verify {
        /// Suite name; `cliquekr suites` lists them.
        suite: String,
        /// Range of n, `A` or `A..B`.
        #[arg(long, env = "CLIQUEKR_N", value_parser = parse_span)]
        n: Option<Span>,
        #[arg(long, env = "CLIQUEKR_K", value_parser = parse_span)]
        k: Option<Span>,
        /// Range of r; bounds may be relative to n, as in `3..n` or `2..n-1`.
        #[arg(long, env = "CLIQUEKR_R", value_parser = parse_rspan)]
        r: Option<RSpan>,
        /// Random instances per cell, for suites that sample.
        #[arg(long, env = "CLIQUEKR_TRIALS")]
        trials: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact search on one instance. Claw searches take `n r` only.
    Search {
        kind: SearchKind,
        /// `n k r`, or `n r` for the claw kinds.
        #[arg(num_args = 2..=3, required = true)]
        params: Vec<usize>,
        /// Include every witness in the report.
        #[arg(long)]
        witnesses: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print a named family in text form.
    Construct {
        /// One of ekr, hm, hm-cross-h, hm-cross-m, triangle, main-rn.
        tag: String,
        n: usize,
        k: usize,
        r: usize,
        /// Prefix the family with its `named <tag>` line.
        #[arg(long)]
        named: bool,
        #[arg(long, env = "CLIQUEKR_OUT")]
        out: Option<PathBuf>,
    },
    /// Canonical form of a family file (`gamma`, `named`, `ground` or `claw`).
    Canon {
        file: PathBuf,
        /// Print the canonical representative instead of its form.
        #[arg(long)]
        emit_family: bool,
        #[arg(long, env = "CLIQUEKR_OUT")]
        out: Option<PathBuf>,
    },
    /// List suite names.
    Suites,
}

#[derive(Args)]
struct Common {
    /// Root seed of every random stream.
    #[arg(long, env = "CLIQUEKR_SEED", default_value_t = 0)]
    seed: u64,
    /// Search nodes before giving up.
    #[arg(long, env = "CLIQUEKR_NODE_CAP", default_value_t = Budget::default().node_cap)]
    node_cap: u64,
    /// Seconds per search before giving up.
    #[arg(long, env = "CLIQUEKR_TIME_CAP", default_value_t = Budget::default().time_cap.as_secs())]
    time_cap: u64,
    #[arg(long, env = "CLIQUEKR_WORKERS", default_value_t = 1)]
    workers: usize,
    #[arg(long, env = "CLIQUEKR_FORMAT", default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, env = "CLIQUEKR_OUT")]
    out: Option<PathBuf>,
    /// Add wall times (output is then no longer reproducible byte for byte).
    #[arg(long, env = "CLIQUEKR_TIMING")]
    timing: bool,
}

impl Common {
    fn search(&self) -> SearchConfig {
        SearchConfig {
            budget: Budget { node_cap: self.node_cap, time_cap: Duration::from_secs(self.time_cap) },
            workers: self.workers.max(1),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchKind {
    Max,
    MaxDirect,
    EmptyCap,
    EmptyCapAll,
    Cross,
    CrossAll,
    Claw,
    ClawAll,
}

impl SearchKind {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    fn is_claw(self) -> bool {
        matches!(self, SearchKind::Claw | SearchKind::ClawAll)
    }
}

fn parse_span(s: &str) -> Result<Span, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rspan(s: &str) -> Result<RSpan, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } | Error::GroupBudget { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Fail(code, e.to_string())
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail(EXIT_OTHER, e.to_string())
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail(EXIT_OTHER, format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Writes the report; mismatches also go to stderr when the report itself
/// is not plain text on stdout.
fn finish(report: &Report, common: &Common) -> Result<u8, Fail> {
    emit(common.out.as_deref(), &report.render(common.format))?;
    if report.has_mismatch() && (common.out.is_some() || !matches!(common.format, Format::Text)) {
        for r in report.mismatches() {
            eprintln!("mismatch: {} {}: expected {}, computed {}", r.claim, r.instance, r.expected, r.computed);
        }
    }
    Ok(if report.has_mismatch() { EXIT_MISMATCH } else { 0 })
}

fn run_config(common: &Common) -> RunConfig {
    RunConfig { seed: common.seed, search: common.search(), timing: common.timing, ..RunConfig::default() }
}

fn verify(
    suite: &str,
    n: Option<Span>,
    k: Option<Span>,
    r: Option<RSpan>,
    trials: Option<usize>,
    common: &Common,
) -> Result<u8, Fail> {
    if !SUITES.contains(&suite) {
        return Err(Fail(EXIT_USAGE, format!("unknown suite {suite:?}; known: {}", SUITES.join(", "))));
    }
    let cfg = RunConfig { n, k, r, trials, ..run_config(common) };
    let report = run_suite(suite, &cfg)?;
    finish(&report, common)
}

/// Expected optimum by formula, where one applies.
fn expected_optimum(kind: SearchKind, n: usize, k: usize, r: usize) -> Option<(u128, &'static str)> {
    let p = Params::new(n, k, r).ok()?;
    match kind {
        SearchKind::Max | SearchKind::MaxDirect => ekr_size(&p).ok().map(|v| (v, "formula ekr_size")),
        SearchKind::EmptyCap | SearchKind::EmptyCapAll if r == n => main_rn_size(n, k).ok().map(|v| (v, "formula main_rn_size")),
        SearchKind::EmptyCap | SearchKind::EmptyCapAll => hm_size(&p).ok().map(|v| (v, "formula hm_size")),
        SearchKind::Cross | SearchKind::CrossAll => hm_cross_sum(&p).ok().map(|v| (v, "formula hm_cross_sum")),
        SearchKind::Claw | SearchKind::ClawAll => None,
    }
}

/// Canonical forms of the witnesses, deduplicated, plus their serializations.
fn describe<W>(
    res: &SearchResult<W>,
    form: impl Fn(&W) -> cliquekr::Result<String>,
    text: impl Fn(&W) -> String,
) -> (Vec<String>, Vec<String>, String) {
    let mut forms = BTreeSet::new();
    let mut failed = None;
    for w in &res.witnesses {
        match form(w) {
            Ok(f) => {
                forms.insert(f);
            }
            Err(e) => {
                failed = Some(e.to_string());
                break;
            }
        }
    }
    let detail = match &failed {
        Some(e) => format!("{} witnesses; no canonical forms: {e}", res.witnesses.len()),
        None => format!("{} witnesses in {} classes", res.witnesses.len(), forms.len()),
    };
    let forms = if failed.is_some() { Vec::new() } else { forms.into_iter().collect() };
    (forms, res.witnesses.iter().map(text).collect(), detail)
}

/// Optimum, class forms, witness texts, detail, wall time.
type Found = (usize, Vec<String>, Vec<String>, String, Duration);

fn search_cmd(kind: SearchKind, nums: &[usize], want_witnesses: bool, common: &Common) -> Result<u8, Fail> {
    let (n, k, r) = match (kind.is_claw(), nums) {
        (true, &[n, r]) => (n, 0, r),
        (false, &[n, k, r]) => (n, k, r),
        (true, _) => return Err(Fail(EXIT_USAGE, "claw searches take `n r`".into())),
        (false, _) => return Err(Fail(EXIT_USAGE, "searches take `n k r`".into())),
    };
    let cfg = common.search();
    let claim = format!("search-{}", kind.name());
    let (inst, expected) = if kind.is_claw() {
        let e = (r >= 1 && r < n).then(|| (canonical_claw_size(n, r), "formula canonical_claw_size"));
        (format!("n={n} r={r}"), e)
    } else {
        (format!("n={n} k={k} r={r}"), expected_optimum(kind, n, k, r))
    };

    let outcome = (|| -> cliquekr::Result<Found> {
        let gamma_text = |f: &Family| f.to_text();
        let pair_text = |(a, b): &(Family, Family)| format!("{}--\n{}", a.to_text(), b.to_text());
        let pair_form = |(a, b): &(Family, Family)| unordered_pair_canonical_form(a, b);
        let claw_text = |f: &ClawFamily| f.to_text();
        macro_rules! done {
            ($res:expr, $form:expr, $text:expr) => {{
                let res = $res;
                let (forms, texts, detail) = describe(&res, $form, $text);
                Ok((res.optimum, forms, texts, detail, res.wall_time))
            }};
        }
        if kind.is_claw() {
            return match kind {
                SearchKind::Claw => done!(max_intersecting_claw(n, r, &cfg)?, claw_canonical_form, claw_text),
                _ => done!(enumerate_optimal_claw(n, r, &cfg)?, claw_canonical_form, claw_text),
            };
        }
        let p = Params::new(n, k, r)?;
        match kind {
            SearchKind::Max => done!(search::max_intersecting(&p, &cfg)?, canonical_form, gamma_text),
            SearchKind::MaxDirect => done!(search::max_intersecting_direct(&p, &cfg)?, canonical_form, gamma_text),
            SearchKind::EmptyCap => done!(search::max_intersecting_empty_cap(&p, &cfg)?, canonical_form, gamma_text),
            SearchKind::EmptyCapAll => done!(search::enumerate_optimal_empty_cap_all(&p, &cfg)?, canonical_form, gamma_text),
            SearchKind::Cross => done!(search::max_cross_sum(&p, &cfg)?, pair_form, pair_text),
            SearchKind::CrossAll => done!(search::enumerate_optimal_cross_pairs(&p, &cfg)?, pair_form, pair_text),
            SearchKind::Claw | SearchKind::ClawAll => unreachable!("handled above"),
        }
    })();

    let (exp_str, prov) = match expected {
        Some((v, prov)) => (v.to_string(), prov),
        None => ("-".to_string(), "search"),
    };
    let (record, code) = match outcome {
        Ok((optimum, forms, texts, detail, wall)) => {
            let rec = match expected {
                Some(_) => ReportRecord::compare(&inst, &claim, &exp_str, prov, optimum),
                None => ReportRecord::reported(&inst, &claim, prov, optimum),
            };
            let rec = rec.with_detail(detail).with_forms(forms);
            let rec = if want_witnesses { rec.with_witnesses(texts) } else { rec };
            let rec = if common.timing { rec.with_timing(Some(wall.as_millis() as u64)) } else { rec };
            (rec, None)
        }
        Err(Error::Budget { nodes, best, bound }) => {
            let rec = ReportRecord::skipped(&inst, &claim, &exp_str, prov, format!("between {best} and {bound}"))
                .with_detail(format!("budget exhausted after {nodes} nodes"));
            (rec, Some(EXIT_BUDGET))
        }
        Err(e) => return Err(e.into()),
    };
    let run = RunConfig { n: Some(Span { lo: n, hi: n }), r: Some(RSpan::fixed(r, r)), ..run_config(common) };
    let run = if kind.is_claw() { run } else { RunConfig { k: Some(Span { lo: k, hi: k }), ..run } };
    let report = Report::new(&format!("search {}", kind.name()), &run, vec![record]);
    let status = finish(&report, common)?;
    Ok(code.unwrap_or(status))
}

fn construct(tag: &str, n: usize, k: usize, r: usize, named: bool, out: Option<&Path>) -> Result<u8, Fail> {
    let tag: Tag = tag.parse()?;
    let fam = NamedFamily::build(tag, Params::new(n, k, r)?)?;
    let text = if named { fam.to_text() } else { fam.family.to_text() };
    emit(out, &text)?;
    Ok(0)
}

fn canon(file: &Path, emit_family: bool, out: Option<&Path>) -> Result<u8, Fail> {
    let text = fs::read_to_string(file).map_err(|e| Fail(EXIT_OTHER, format!("{}: {e}", file.display())))?;
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next())
        .unwrap_or("");
    let gamma = match header {
        "gamma" => Some(Family::from_text(&text)?),
        "named" => Some(NamedFamily::from_text(&text)?.family),
        _ => None,
    };
    let result = match (gamma, header) {
        (Some(f), _) if emit_family => canonical_image(&f)?.to_text(),
        (Some(f), _) => canonical_form(&f)? + "\n",
        (None, "ground" | "claw") if emit_family => {
            return Err(Fail(EXIT_USAGE, format!("--emit-family needs a gamma family, got {header:?}")))
        }
        (None, "ground") => ground_canonical_form(&GroundFamily::from_text(&text)?)? + "\n",
        (None, "claw") => claw_canonical_form(&ClawFamily::from_text(&text)?)? + "\n",
        _ => return Err(Fail(EXIT_USAGE, format!("unrecognised header {header:?}; expected gamma, named, ground or claw"))),
    };
    emit(out, &result)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Verify { suite, n, k, r, trials, common } => verify(suite, *n, *k, *r, *trials, common),
        Command::Search { kind, params, witnesses, common } => search_cmd(*kind, params, *witnesses, common),
        Command::Construct { tag, n, k, r, named, out } => construct(tag, *n, *k, *r, *named, out.as_deref()),
        Command::Canon { file, emit_family, out } => canon(file, *emit_family, out.as_deref()),
        Command::Suites => {
            println!("{}", SUITES.join("\n"));
            Ok(0)
        }
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
