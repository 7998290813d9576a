//! Depth-two claws: a root `c` joined to `b_1..b_n`, each `b_i` joined to
//! one leaf `a_i`.
//!
//! Bits: `a_i` is `2(i-1)`, `b_i` is `2(i-1)+1`, `c` is `2n`. Without the
//! root this is exactly the layout of `Γ_{n,2}` with `a_i ↔ (i,1)` and
//! `b_i ↔ (i,2)`, so [`psi`] only checks and relabels.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use itertools::Itertools;

use crate::binom::{binom, pow};
use crate::clique::{solve, CliqueQuery, Goal, MeetGraph};
use crate::error::{Error, Result};
use crate::gamma::{bits_of, subsets_of_size, IndSet, Params};
use crate::iso::DEFAULT_GROUP_BUDGET;
use crate::search::{SearchConfig, SearchResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClawVertex {
    Root,
    Mid(usize),
    Leaf(usize),
}

impl ClawVertex {
    pub fn bit(&self, n: usize) -> u32 {
        match *self {
            ClawVertex::Leaf(i) => (2 * (i - 1)) as u32,
            ClawVertex::Mid(i) => (2 * (i - 1) + 1) as u32,
            ClawVertex::Root => (2 * n) as u32,
        }
    }

    pub fn from_bit(bit: u32, n: usize) -> Self {
        let b = bit as usize;
        if b == 2 * n {
            ClawVertex::Root
        } else if b.is_multiple_of(2) {
            ClawVertex::Leaf(b / 2 + 1)
        } else {
            ClawVertex::Mid(b / 2 + 1)
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match *self {
            ClawVertex::Leaf(i) | ClawVertex::Mid(i) if i == 0 || i > n => {
                Err(Error::InvalidVertex(format!("{self} is not a vertex of the claw with {n} leaves")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ClawVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClawVertex::Root => write!(f, "c"),
            ClawVertex::Mid(i) => write!(f, "b{i}"),
            ClawVertex::Leaf(i) => write!(f, "a{i}"),
        }
    }
}

impl FromStr for ClawVertex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "c" {
            return Ok(ClawVertex::Root);
        }
        let idx = |t: &str| t.parse::<usize>().map_err(|_| format!("bad claw vertex {s:?}"));
        match s.split_at_checked(1) {
            Some(("a", t)) => Ok(ClawVertex::Leaf(idx(t)?)),
            Some(("b", t)) => Ok(ClawVertex::Mid(idx(t)?)),
            _ => Err(format!("bad claw vertex {s:?}")),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || 2 * n + 1 > 128 {
        return Err(Error::Param(format!("claw needs 1 <= n <= 63, got {n}")));
    }
    Ok(())
}

fn check_nr(n: usize, r: usize) -> Result<()> {
    check_n(n)?;
    if r == 0 || r > n {
        return Err(Error::Range(format!("claw sets need 1 <= r <= n, got n = {n}, r = {r}")));
    }
    Ok(())
}

fn root_bit(n: usize) -> u128 {
    1u128 << (2 * n)
}

fn mids_mask(n: usize) -> u128 {
    (0..n).fold(0, |m, i| m | 1u128 << (2 * i + 1))
}

fn leaves_mask(n: usize) -> u128 {
    (0..n).fold(0, |m, i| m | 1u128 << (2 * i))
}

/// Bit set over the `2n + 1` claw vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClawSet(pub u128);

impl ClawSet {
    pub fn from_vertices(n: usize, vs: &[ClawVertex]) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u128;
        for v in vs {
            v.check(n)?;
            bits |= 1u128 << v.bit(n);
        }
        Ok(ClawSet(bits))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn has_root(&self, n: usize) -> bool {
        self.0 & root_bit(n) != 0
    }

    pub fn intersects(&self, other: &ClawSet) -> bool {
        self.0 & other.0 != 0
    }

    /// No leaf together with its mid vertex, and no mid vertex with the root.
    pub fn is_independent(&self, n: usize) -> bool {
        let x = self.0;
        x >> (2 * n + 1) == 0 && (x & (x >> 1) & leaves_mask(n)) == 0 && !(self.has_root(n) && x & mids_mask(n) != 0)
    }

    pub fn vertices(&self, n: usize) -> Vec<ClawVertex> {
        let mut v: Vec<ClawVertex> = bits_of(self.0).map(|b| ClawVertex::from_bit(b, n)).collect();
        v.sort_by_key(|v| match *v {
            ClawVertex::Root => (0, 0, 0),
            ClawVertex::Leaf(i) => (1, i, 0),
            ClawVertex::Mid(i) => (1, i, 1),
        });
        v
    }
}

/// A family of `r`-independent sets of the claw with `n` leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClawFamily {
    n: usize,
    r: usize,
    members: Vec<ClawSet>,
}

impl ClawFamily {
    pub fn new(n: usize, r: usize, sets: impl IntoIterator<Item = ClawSet>) -> Result<Self> {
        check_nr(n, r)?;
        let mut members: Vec<ClawSet> = sets.into_iter().collect();
        if let Some(bad) = members.iter().find(|s| s.len() != r || !s.is_independent(n)) {
            return Err(Error::InvalidSet(format!("{:#x} is not an independent {r}-set of the claw", bad.0)));
        }
        members.sort_unstable();
        members.dedup();
        Ok(ClawFamily { n, r, members })
    }

    fn from_valid(n: usize, r: usize, mut members: Vec<ClawSet>) -> Self {
        members.sort_unstable();
        members.dedup();
        ClawFamily { n, r, members }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn members(&self) -> &[ClawSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &ClawSet) -> bool {
        self.members.binary_search(s).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ClawSet> {
        self.members.iter()
    }

    pub fn is_intersecting(&self) -> bool {
        self.members.iter().all(|a| self.members.iter().all(|b| a.intersects(b)))
    }

    /// Members containing the root.
    pub fn root_part(&self) -> ClawFamily {
        let n = self.n;
        ClawFamily::from_valid(n, self.r, self.members.iter().copied().filter(|s| s.has_root(n)).collect())
    }

    /// Members avoiding the root.
    pub fn rootless_part(&self) -> ClawFamily {
        let n = self.n;
        ClawFamily::from_valid(n, self.r, self.members.iter().copied().filter(|s| !s.has_root(n)).collect())
    }

    /// Header `claw n r`, then one set per line as space-separated tokens.
    pub fn to_text(&self) -> String {
        let mut out = format!("claw {} {}\n", self.n, self.r);
        for s in &self.members {
            out.push_str(&s.vertices(self.n).iter().map(ToString::to_string).join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        let parse_num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse { line: hl + 1, msg: format!("bad number {s:?}") });
        if head.len() != 3 || head[0] != "claw" {
            return Err(Error::Parse { line: hl + 1, msg: "expected `claw n r`".into() });
        }
        let (n, r) = (parse_num(head[1])?, parse_num(head[2])?);
        check_nr(n, r)?;
        let mut sets = Vec::new();
        for (i, line) in lines {
            let vs = line
                .split_whitespace()
                .map(|t| t.parse::<ClawVertex>().map_err(|msg| Error::Parse { line: i + 1, msg }))
                .collect::<Result<Vec<_>>>()?;
            sets.push(ClawSet::from_vertices(n, &vs).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?);
        }
        ClawFamily::new(n, r, sets)
    }
}

/// `C(n,r) 2^r + C(n,r-1)`.
pub fn claw_independent_count(n: usize, r: usize) -> u128 {
    let (ni, ri) = (n as i64, r as i64);
    binom(ni, ri) * pow(2, r as u32) + binom(ni, ri - 1)
}

/// Every `r`-independent set: `r` legs with a leaf or mid vertex each, or
/// the root with `r - 1` leaves.
pub fn enumerate_claw_independent(n: usize, r: usize) -> Result<ClawFamily> {
    check_nr(n, r)?;
    let mut sets = Vec::new();
    for legs in subsets_of_size(n, r) {
        let chosen: Vec<usize> = (0..n).filter(|i| legs >> i & 1 == 1).collect();
        for pick in 0u32..1 << r {
            let bits = chosen.iter().enumerate().fold(0u128, |m, (j, &i)| m | 1u128 << (2 * i + (pick >> j & 1) as usize));
            sets.push(ClawSet(bits));
        }
    }
    for legs in subsets_of_size(n, r - 1) {
        let leaves = (0..n).filter(|i| legs >> i & 1 == 1).fold(0u128, |m, i| m | 1u128 << (2 * i));
        sets.push(ClawSet(leaves | root_bit(n)));
    }
    Ok(ClawFamily::from_valid(n, r, sets))
}

/// Number of `r`-independent sets through a fixed leaf:
/// `C(n-1,r-1) 2^(r-1) + C(n-1,r-2)`.
pub fn canonical_claw_size(n: usize, r: usize) -> u128 {
    let (ni, ri) = (n as i64, r as i64);
    binom(ni - 1, ri - 1) * crate::binom::pow_signed(2, ri - 1) + binom(ni - 1, ri - 2)
}

/// The star of `r`-independent sets through `v`.
pub fn claw_star(n: usize, r: usize, v: ClawVertex) -> Result<ClawFamily> {
    v.check(n)?;
    let bit = 1u128 << v.bit(n);
    let all = enumerate_claw_independent(n, r)?;
    Ok(ClawFamily::from_valid(n, r, all.iter().copied().filter(|s| s.0 & bit != 0).collect()))
}

fn check_tech(n: usize, r: usize, m: usize) -> Result<()> {
    if r < 4 || r + 1 > n {
        return Err(Error::Range(format!("needs 4 <= r <= n - 1, got n = {n}, r = {r}")));
    }
    if m + 2 < r || m > r {
        return Err(Error::Range(format!("m must be r, r - 1 or r - 2, got m = {m}, r = {r}")));
    }
    Ok(())
}

/// `Σ_{j<r} C(m,j) C(n-m-1,r-j-1) 2^(r-j-1)`.
pub fn tech_sum(n: usize, r: usize, m: usize) -> Result<u128> {
    check_tech(n, r, m)?;
    let (ni, ri, mi) = (n as i64, r as i64, m as i64);
    Ok((0..ri).map(|j| binom(mi, j) * binom(ni - mi - 1, ri - j - 1) * pow(2, (ri - j - 1) as u32)).sum())
}

/// The sum exceeds `1 + C(n-1,r-1)` when `m < n-1` and equals `C(n-1,r-1)`
/// when `m = n-1`.
pub fn tech_check(n: usize, r: usize, m: usize) -> Result<bool> {
    let s = tech_sum(n, r, m)?;
    let c = binom(n as i64 - 1, r as i64 - 1);
    Ok(if m + 1 < n { s > 1 + c } else { s == c })
}

/// For `r = n > 2`: rootless sets with a leaf majority (for even `n`, ties
/// broken by `a_1`), plus every set through the root.
pub fn prop_counterexample_family(n: usize) -> Result<ClawFamily> {
    if n <= 2 {
        return Err(Error::Range(format!("needs n > 2, got {n}")));
    }
    check_n(n)?;
    let need = (n + 2) / 2;
    let leaves = leaves_mask(n);
    let all = enumerate_claw_independent(n, n)?;
    let members = all
        .iter()
        .copied()
        .filter(|s| {
            if s.has_root(n) {
                return true;
            }
            let l = (s.0 & leaves).count_ones() as usize;
            l >= need || (n.is_multiple_of(2) && 2 * l == n && s.0 & 1 != 0)
        })
        .collect();
    Ok(ClawFamily::from_valid(n, n, members))
}

/// Root-free claw set as a member of `I^r_{n,2}`.
pub fn psi(n: usize, s: ClawSet) -> Result<IndSet> {
    if s.has_root(n) || !s.is_independent(n) {
        return Err(Error::InvalidSet("psi needs an independent set without the root".into()));
    }
    Ok(IndSet(s.0))
}

pub fn psi_inverse(params: &Params, x: IndSet) -> Result<ClawSet> {
    if params.k() != 2 || !x.is_valid(params) {
        return Err(Error::InvalidSet(format!("not a member of I^r over {params} with k = 2")));
    }
    Ok(ClawSet(x.0))
}

fn validate(f: &ClawFamily, size: usize) -> Result<()> {
    if f.len() != size || !f.is_intersecting() {
        return Err(Error::Precondition("claw witness failed re-validation".into()));
    }
    Ok(())
}

fn claw_search(n: usize, r: usize, cfg: &SearchConfig, goal: Goal) -> Result<SearchResult<ClawFamily>> {
    let start = Instant::now();
    let all = enumerate_claw_independent(n, r)?;
    let g = MeetGraph::new(all.iter().map(|s| s.0).collect());
    // The claw's automorphisms are not transitive on sets, so no anchor.
    let q = CliqueQuery { goal, empty_cap: false, forced: vec![], workers: cfg.workers.max(1), budget: cfg.budget };
    let out = solve(&g, &q)?;
    let mut witnesses: Vec<ClawFamily> =
        out.cliques.iter().map(|c| ClawFamily::from_valid(n, r, c.iter().map(|&i| all.members()[i]).collect())).collect();
    witnesses.sort();
    for w in &witnesses {
        validate(w, out.size)?;
    }
    Ok(SearchResult { optimum: out.size, witnesses, explored_nodes: out.nodes, wall_time: start.elapsed() })
}

/// Maximum intersecting family of `r`-independent sets of the claw.
pub fn max_intersecting_claw(n: usize, r: usize, cfg: &SearchConfig) -> Result<SearchResult<ClawFamily>> {
    claw_search(n, r, cfg, Goal::Maximum)
}

/// Every maximum intersecting family.
pub fn enumerate_optimal_claw(n: usize, r: usize, cfg: &SearchConfig) -> Result<SearchResult<ClawFamily>> {
    claw_search(n, r, cfg, Goal::AllMaximum)
}

/// `claw n r:` then the minimum image over all leg permutations, as
/// fixed-width hex.
pub fn claw_canonical_form(f: &ClawFamily) -> Result<String> {
    let n = f.n;
    let order: u128 = (1..=n as u128).product();
    if order > DEFAULT_GROUP_BUDGET {
        return Err(Error::GroupBudget { order, budget: DEFAULT_GROUP_BUDGET });
    }
    let mut best: Option<Vec<u128>> = None;
    for perm in (0..n).permutations(n) {
        let mut map: Vec<u32> = Vec::with_capacity(2 * n + 1);
        for &p in &perm {
            map.push((2 * p) as u32);
            map.push((2 * p + 1) as u32);
        }
        map.push((2 * n) as u32);
        let image: Vec<u128> = f.iter().map(|s| bits_of(s.0).fold(0u128, |a, b| a | 1u128 << map[b as usize])).sorted().collect();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    let width = (2 * n + 1).div_ceil(4);
    let body = best.unwrap_or_default().iter().map(|x| format!("{x:0width$x}")).join(",");
    Ok(format!("claw {n} {}:{body}", f.r))
}
