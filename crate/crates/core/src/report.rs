//! Run configuration, report records, and their JSON / CSV / text forms.
//!
//! Reports carry no wall-clock data unless timing is requested, so two runs
//! with the same configuration render byte-identical output.

use std::fmt::{self, Display, Write as _};
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::search::SearchConfig;

/// Inclusive integer range, written `A` or `A..B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::Param(format!("empty range {lo}..{hi}")));
        }
        Ok(Span { lo, hi })
    }

    pub fn iter(&self) -> RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

fn parse_uint(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Param(format!("expected a non-negative integer, got {s:?}")))
}

impl FromStr for Span {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once("..") {
            Some((a, b)) => Span::new(parse_uint(a)?, parse_uint(b)?),
            None => {
                let v = parse_uint(s)?;
                Ok(Span { lo: v, hi: v })
            }
        }
    }
}

impl Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

/// One end of an `r` range: a number, or `n` minus an offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RBound {
    Fixed(usize),
    FromN(usize),
}

impl RBound {
    fn at(&self, n: usize) -> Option<usize> {
        match *self {
            RBound::Fixed(v) => Some(v),
            RBound::FromN(d) => n.checked_sub(d),
        }
    }
}

impl FromStr for RBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "n" {
            return Ok(RBound::FromN(0));
        }
        if let Some(d) = s.strip_prefix("n-") {
            return Ok(RBound::FromN(parse_uint(d)?));
        }
        Ok(RBound::Fixed(parse_uint(s)?))
    }
}

impl Display for RBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RBound::Fixed(v) => write!(f, "{v}"),
            RBound::FromN(0) => f.write_str("n"),
            RBound::FromN(d) => write!(f, "n-{d}"),
        }
    }
}

/// Range of `r`, possibly relative to `n`: `3..n`, `n`, `2..n-1`, `4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RSpan {
    pub lo: RBound,
    pub hi: RBound,
}

impl RSpan {
    pub fn fixed(lo: usize, hi: usize) -> Self {
        RSpan { lo: RBound::Fixed(lo), hi: RBound::Fixed(hi) }
    }

    /// Bounds at this `n`, or `None` when the range is empty there.
    pub fn resolve(&self, n: usize) -> Option<(usize, usize)> {
        let (lo, hi) = (self.lo.at(n)?, self.hi.at(n)?);
        (lo <= hi).then_some((lo, hi))
    }
}

impl FromStr for RSpan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let span = match s.split_once("..") {
            Some((a, b)) => RSpan { lo: a.parse()?, hi: b.parse()? },
            None => {
                let v: RBound = s.parse()?;
                RSpan { lo: v, hi: v }
            }
        };
        if let (RBound::Fixed(a), RBound::Fixed(b)) = (span.lo, span.hi) {
            Span::new(a, b)?;
        }
        Ok(span)
    }
}

impl Display for RSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

/// Everything a suite run depends on. Unset ranges and trial counts fall
/// back to each suite's own defaults.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RunConfig {
    pub n: Option<Span>,
    pub k: Option<Span>,
    pub r: Option<RSpan>,
    /// Root of every random stream.
    pub seed: u64,
    pub trials: Option<usize>,
    pub search: SearchConfig,
    /// Adds per-record wall time (which breaks byte-identical output).
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Match,
    Mismatch,
    SkippedBudget,
    /// Observed value with nothing to compare against.
    Reported,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Match => "match",
            Status::Mismatch => "mismatch",
            Status::SkippedBudget => "skipped-budget",
            Status::Reported => "reported",
        }
    }
}

impl Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One checked claim on one instance. `Match` means `expected == computed`
/// as strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRecord {
    pub instance: String,
    pub claim: String,
    pub expected: String,
    /// Where the expected value comes from: `formula <fn>` or `oracle <name>`.
    pub provenance: String,
    pub computed: String,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
    /// Canonical forms of witnesses or of the classes they fall into.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub forms: Vec<String>,
    /// Serialized witnesses, when asked for.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl ReportRecord {
    pub fn compare(instance: &str, claim: &str, expected: impl Display, provenance: &str, computed: impl Display) -> Self {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        let status = if expected == computed { Status::Match } else { Status::Mismatch };
        ReportRecord {
            instance: instance.to_string(),
            claim: claim.to_string(),
            expected,
            provenance: provenance.to_string(),
            computed,
            status,
            detail: String::new(),
            timing_ms: None,
            forms: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn skipped(instance: &str, claim: &str, expected: impl Display, provenance: &str, computed: impl Display) -> Self {
        ReportRecord { status: Status::SkippedBudget, ..Self::compare(instance, claim, expected, provenance, computed) }
    }

    pub fn reported(instance: &str, claim: &str, provenance: &str, computed: impl Display) -> Self {
        ReportRecord { status: Status::Reported, ..Self::compare(instance, claim, "-", provenance, computed) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_forms(mut self, forms: Vec<String>) -> Self {
        self.forms = forms;
        self
    }

    pub fn with_witnesses(mut self, witnesses: Vec<String>) -> Self {
        self.witnesses = witnesses;
        self
    }

    pub fn with_timing(mut self, ms: Option<u64>) -> Self {
        self.timing_ms = ms;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub matched: usize,
    pub mismatched: usize,
    pub skipped: usize,
    pub reported: usize,
}

/// The parts of a [`RunConfig`] that can change a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub n: Option<String>,
    pub k: Option<String>,
    pub r: Option<String>,
    pub trials: Option<usize>,
    pub node_cap: u64,
    pub time_cap_s: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub summary: Summary,
    pub records: Vec<ReportRecord>,
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::Param(format!("unknown format {other:?} (json, csv, text)"))),
        }
    }
}

impl Report {
    pub fn new(suite: &str, cfg: &RunConfig, records: Vec<ReportRecord>) -> Self {
        let mut summary = Summary::default();
        for r in &records {
            match r.status {
                Status::Match => summary.matched += 1,
                Status::Mismatch => summary.mismatched += 1,
                Status::SkippedBudget => summary.skipped += 1,
                Status::Reported => summary.reported += 1,
            }
        }
        let config = ConfigEcho {
            n: cfg.n.map(|s| s.to_string()),
            k: cfg.k.map(|s| s.to_string()),
            r: cfg.r.map(|s| s.to_string()),
            trials: cfg.trials,
            node_cap: cfg.search.budget.node_cap,
            time_cap_s: cfg.search.budget.time_cap.as_secs(),
        };
        Report { schema: SCHEMA_VERSION, suite: suite.to_string(), seed: cfg.seed, config, summary, records }
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ReportRecord> {
        self.records.iter().filter(|r| r.status == Status::Mismatch)
    }

    pub fn has_mismatch(&self) -> bool {
        self.summary.mismatched > 0
    }

    pub fn has_skipped(&self) -> bool {
        self.summary.skipped > 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per record; forms are joined with `;`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = [
            "suite",
            "seed",
            "instance",
            "claim",
            "expected",
            "provenance",
            "computed",
            "status",
            "detail",
            "timing_ms",
            "forms",
            "witnesses",
        ];
        w.write_record(header).expect("in-memory write");
        let seed = self.seed.to_string();
        for r in &self.records {
            let timing = r.timing_ms.map(|t| t.to_string()).unwrap_or_default();
            let forms = r.forms.join(";");
            let witnesses = r.witnesses.join(";");
            w.write_record([
                self.suite.as_str(),
                &seed,
                &r.instance,
                &r.claim,
                &r.expected,
                &r.provenance,
                &r.computed,
                r.status.name(),
                &r.detail,
                &timing,
                &forms,
                &witnesses,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Human-readable lines, with mismatches repeated at the end.
    pub fn to_text(&self) -> String {
        let mut out = format!("suite {} seed {} schema {}\n", self.suite, self.seed, self.schema);
        for r in &self.records {
            out.push_str(&text_line(r));
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "summary: {} match, {} mismatch, {} skipped-budget, {} reported",
            s.matched, s.mismatched, s.skipped, s.reported
        );
        if self.has_mismatch() {
            out.push_str("mismatches:\n");
            for r in self.mismatches() {
                out.push_str(&text_line(r));
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }
}

fn text_line(r: &ReportRecord) -> String {
    let mut line =
        format!("[{}] {} {}: expected {} ({}), computed {}", r.status, r.claim, r.instance, r.expected, r.provenance, r.computed);
    if !r.detail.is_empty() {
        let _ = write!(line, "; {}", r.detail);
    }
    if let Some(ms) = r.timing_ms {
        let _ = write!(line, " [{ms} ms]");
    }
    line.push('\n');
    line
}
