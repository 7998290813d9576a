//! Exact maximum-clique search over bit-vector adjacency rows.
//!
//! The graph is a "meet graph": its vertices are sets (stored as `u128` bit
//! vectors) and two vertices are adjacent when the sets intersect. Cliques
//! are therefore intersecting families. The search is a branch-and-bound in
//! the BBMC style: candidates are kept as bit rows, and at every node a greedy
//! sequential colouring of the candidates gives the upper bound. Colour
//! classes are families of pairwise disjoint sets.
//!
//! An optional side constraint asks for an empty common intersection. The
//! node state then carries the running intersection of the chosen sets. While
//! it is non-empty the node branches only on candidates that avoid one fixed
//! vertex `x` of it (the clique must contain such a set), picking the `x` with
//! the fewest such candidates. A node is dropped when some vertex of the
//! running intersection lies in every remaining candidate.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Node and wall-clock limits for one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub node_cap: u64,
    pub time_cap: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { node_cap: 100_000_000, time_cap: Duration::from_secs(600) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Goal {
    /// One maximum clique (the first in search order).
    Maximum,
    /// Every clique of maximum size.
    AllMaximum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Improve on the shared incumbent.
    Improve,
    /// Stop at the first feasible clique of at least this size.
    FirstAtLeast(usize),
    /// Collect every feasible clique at least as large as the incumbent.
    CollectTies,
}

#[derive(Clone, Debug)]
pub(crate) struct CliqueQuery {
    pub goal: Goal,
    pub empty_cap: bool,
    /// Vertices that every reported clique must contain.
    pub forced: Vec<usize>,
    pub workers: usize,
    pub budget: Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct CliqueOutcome {
    pub size: usize,
    /// Sorted vertex lists, sorted lexicographically.
    pub cliques: Vec<Vec<usize>>,
    pub nodes: u64,
}

pub(crate) struct MeetGraph {
    len: usize,
    words: usize,
    adj: Vec<u64>,
    sets: Vec<u128>,
    /// For each element bit, the vertices whose set avoids it.
    avoid: Vec<Vec<u64>>,
}

type Row = Vec<u64>;

fn row_is_empty(r: &[u64]) -> bool {
    r.iter().all(|&w| w == 0)
}

fn row_count(r: &[u64]) -> usize {
    r.iter().map(|w| w.count_ones() as usize).sum()
}

fn row_and(a: &[u64], b: &[u64]) -> Row {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn row_iter(r: &[u64]) -> impl Iterator<Item = usize> + '_ {
    r.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

fn first_bit(r: &[u64]) -> Option<usize> {
    r.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn row_remove(r: &mut [u64], v: usize) {
    r[v / 64] &= !(1u64 << (v % 64));
}

impl MeetGraph {
    pub fn new(sets: Vec<u128>) -> Self {
        let len = sets.len();
        let words = len.div_ceil(64).max(1);
        let mut adj = vec![0u64; len * words];
        for i in 0..len {
            for j in 0..len {
                if i != j && sets[i] & sets[j] != 0 {
                    adj[i * words + j / 64] |= 1u64 << (j % 64);
                }
            }
        }
        let universe = sets.iter().fold(0u128, |a, s| a | s);
        let top = 128 - universe.leading_zeros() as usize;
        let mut avoid = vec![vec![0u64; words]; top];
        for (x, row) in avoid.iter_mut().enumerate() {
            for (i, s) in sets.iter().enumerate() {
                if s >> x & 1 == 0 {
                    row[i / 64] |= 1u64 << (i % 64);
                }
            }
        }
        MeetGraph { len, words, adj, sets, avoid }
    }

    fn neighbours(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    fn full_row(&self) -> Row {
        let mut r = vec![0u64; self.words];
        for v in 0..self.len {
            r[v / 64] |= 1u64 << (v % 64);
        }
        r
    }

    /// Greedy sequential colouring of `cands`: returns vertices in
    /// non-decreasing colour order together with their colour numbers.
    fn colour(&self, cands: &[u64]) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(row_count(cands));
        let mut uncoloured = cands.to_vec();
        let mut colour = 0;
        while !row_is_empty(&uncoloured) {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = first_bit(&q) {
                row_remove(&mut q, v);
                row_remove(&mut uncoloured, v);
                for (qw, nw) in q.iter_mut().zip(self.neighbours(v)) {
                    *qw &= !nw;
                }
                out.push((v, colour));
            }
        }
        out
    }

    /// Element of `cap` avoided by the fewest candidates, with that
    /// candidate row. `None` when some element of `cap` is in every
    /// candidate, in which case the node cannot reach an empty intersection.
    fn tightest_cap_element(&self, cap: u128, cands: &[u64]) -> Option<Row> {
        let mut best: Option<(usize, Row)> = None;
        let mut rest = cap;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let s = match self.avoid.get(x) {
                Some(row) => row_and(row, cands),
                None => cands.to_vec(),
            };
            let c = row_count(&s);
            if c == 0 {
                return None;
            }
            if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                best = Some((c, s));
            }
        }
        best.map(|(_, s)| s)
    }
}

struct Shared {
    incumbent: AtomicUsize,
    nodes: AtomicU64,
    stop: AtomicBool,
    budget_hit: AtomicBool,
    start: Instant,
    budget: Budget,
}

struct Worker<'g> {
    g: &'g MeetGraph,
    shared: &'g Shared,
    mode: Mode,
    empty_cap: bool,
    chosen: Vec<usize>,
    local_best: usize,
    found: Vec<Vec<usize>>,
    local_nodes: u64,
    max_open_bound: usize,
}

impl Worker<'_> {
    /// A node whose bound is below this is pruned.
    fn threshold(&self) -> usize {
        let global = self.shared.incumbent.load(Ordering::Relaxed);
        match self.mode {
            Mode::Improve => global + 1,
            Mode::FirstAtLeast(t) => t,
            Mode::CollectTies => global.max(self.local_best),
        }
    }

    fn tick(&mut self) -> bool {
        self.local_nodes += 1;
        if self.local_nodes.is_multiple_of(64) {
            let total = self.shared.nodes.fetch_add(64, Ordering::Relaxed) + 64;
            if total > self.shared.budget.node_cap || self.shared.start.elapsed() > self.shared.budget.time_cap {
                self.shared.budget_hit.store(true, Ordering::Relaxed);
                self.shared.stop.store(true, Ordering::Relaxed);
            }
        }
        !self.shared.stop.load(Ordering::Relaxed)
    }

    fn record(&mut self, cap: u128) {
        if self.empty_cap && cap != 0 {
            return;
        }
        let size = self.chosen.len();
        if size < self.threshold() {
            return;
        }
        if size > self.local_best {
            self.local_best = size;
            self.found.clear();
            self.shared.incumbent.fetch_max(size, Ordering::Relaxed);
        }
        let mut c = self.chosen.clone();
        c.sort_unstable();
        match self.mode {
            Mode::Improve => self.found = vec![c],
            Mode::CollectTies => self.found.push(c),
            Mode::FirstAtLeast(_) => {
                self.found.push(c);
                self.shared.stop.store(true, Ordering::Relaxed);
            }
        }
    }

    fn note_open(&mut self, bound: usize) {
        self.max_open_bound = self.max_open_bound.max(bound);
    }

    /// `cands` is every vertex adjacent to all of `chosen` and not yet
    /// excluded at an ancestor.
    fn expand(&mut self, cands: Row, cap: u128) {
        if !self.tick() {
            self.note_open(self.chosen.len() + row_count(&cands));
            return;
        }
        if row_is_empty(&cands) {
            self.record(cap);
            return;
        }
        if self.empty_cap && cap != 0 {
            self.expand_cap(cands, cap);
        } else {
            self.expand_free(cands, cap);
        }
    }

    fn expand_free(&mut self, mut cands: Row, cap: u128) {
        let order = self.g.colour(&cands);
        for &(v, c) in order.iter().rev() {
            if self.chosen.len() + c < self.threshold() {
                return;
            }
            if self.shared.stop.load(Ordering::Relaxed) {
                self.note_open(self.chosen.len() + c);
                return;
            }
            let child = row_and(&cands, self.g.neighbours(v));
            self.chosen.push(v);
            self.expand(child, cap & self.g.sets[v]);
            self.chosen.pop();
            row_remove(&mut cands, v);
        }
    }

    fn expand_cap(&mut self, mut cands: Row, cap: u128) {
        let Some(branch) = self.g.tightest_cap_element(cap, &cands) else {
            return;
        };
        let bound = self.chosen.len() + self.g.colour(&cands).last().map_or(0, |&(_, c)| c);
        if bound < self.threshold() {
            return;
        }
        for v in row_iter(&branch).collect::<Vec<_>>() {
            if self.shared.stop.load(Ordering::Relaxed) {
                self.note_open(bound);
                return;
            }
            let child = row_and(&cands, self.g.neighbours(v));
            self.chosen.push(v);
            self.expand(child, cap & self.g.sets[v]);
            self.chosen.pop();
            row_remove(&mut cands, v);
            if self.chosen.len() + 1 + row_count(&cands) < self.threshold() {
                return;
            }
        }
    }
}

/// Runs the query. The top-level branches are split across `workers`
/// threads; the result does not depend on the worker count.
pub(crate) fn solve(g: &MeetGraph, q: &CliqueQuery) -> Result<CliqueOutcome> {
    let root = Root::new(g, q);
    match q.goal {
        Goal::AllMaximum => {
            let phase = run_phase(g, q, &root, Mode::CollectTies, q.workers)?;
            let mut cliques: Vec<Vec<usize>> = phase.found.into_iter().filter(|c| c.len() == phase.best).collect();
            cliques.sort();
            cliques.dedup();
            Ok(CliqueOutcome { size: phase.best, cliques, nodes: phase.nodes })
        }
        Goal::Maximum => {
            let value = run_phase(g, q, &root, Mode::Improve, q.workers)?;
            if value.best == 0 {
                return Ok(CliqueOutcome { size: 0, cliques: Vec::new(), nodes: value.nodes });
            }
            // The reported witness is the first one in sequential search order.
            let witness = run_phase(g, q, &root, Mode::FirstAtLeast(value.best), 1)?;
            let cliques = witness.found.into_iter().take(1).collect();
            Ok(CliqueOutcome { size: value.best, cliques, nodes: value.nodes + witness.nodes })
        }
    }
}

/// Maximum total weight of a clique, searched sequentially. The bound at a
/// node is the sum over colour classes of the heaviest candidate in each
/// class. Returns the weight, the first optimal clique found (sorted) and the
/// node count.
pub(crate) fn solve_weighted(g: &MeetGraph, weights: &[u128], budget: Budget) -> Result<(u128, Vec<usize>, u64)> {
    struct State<'a> {
        g: &'a MeetGraph,
        w: &'a [u128],
        chosen: Vec<usize>,
        best: u128,
        best_set: Vec<usize>,
        nodes: u64,
        start: Instant,
        budget: Budget,
        open: u128,
        hit: bool,
    }
    impl State<'_> {
        fn expand(&mut self, mut cands: Row, cur: u128) {
            self.nodes += 1;
            if self.nodes > self.budget.node_cap
                || (self.nodes.is_multiple_of(1024) && self.start.elapsed() > self.budget.time_cap)
            {
                self.hit = true;
            }
            if cur > self.best {
                self.best = cur;
                self.best_set = self.chosen.clone();
            }
            let order = self.g.colour(&cands);
            let mut ub = Vec::with_capacity(order.len());
            let (mut acc, mut class, mut class_max) = (0u128, 0usize, 0u128);
            for &(v, c) in &order {
                if c != class {
                    acc += class_max;
                    class = c;
                    class_max = 0;
                }
                class_max = class_max.max(self.w[v]);
                ub.push(acc + class_max);
            }
            for (i, &(v, _)) in order.iter().enumerate().rev() {
                if cur + ub[i] <= self.best {
                    return;
                }
                if self.hit {
                    self.open = self.open.max(cur + ub[i]);
                    return;
                }
                let child = row_and(&cands, self.g.neighbours(v));
                self.chosen.push(v);
                self.expand(child, cur + self.w[v]);
                self.chosen.pop();
                row_remove(&mut cands, v);
            }
        }
    }
    let mut st = State {
        g,
        w: weights,
        chosen: Vec::new(),
        best: 0,
        best_set: Vec::new(),
        nodes: 0,
        start: Instant::now(),
        budget,
        open: 0,
        hit: false,
    };
    st.expand(g.full_row(), 0);
    let sat = |x: u128| usize::try_from(x).unwrap_or(usize::MAX);
    if st.hit {
        return Err(Error::Budget { nodes: st.nodes, best: sat(st.best), bound: sat(st.open.max(st.best)) });
    }
    st.best_set.sort_unstable();
    Ok((st.best, st.best_set, st.nodes))
}

/// Candidates and running intersection after the forced vertices.
struct Root {
    cands: Row,
    cap: u128,
    forced: Vec<usize>,
    feasible: bool,
}

impl Root {
    fn new(g: &MeetGraph, q: &CliqueQuery) -> Self {
        let mut cands = g.full_row();
        let mut cap = u128::MAX;
        let mut feasible = true;
        for &f in &q.forced {
            if f >= g.len || cands[f / 64] >> (f % 64) & 1 == 0 {
                feasible = false;
                break;
            }
            cands = row_and(&cands, g.neighbours(f));
            cap &= g.sets[f];
        }
        Root { cands, cap, forced: q.forced.clone(), feasible }
    }
}

struct Phase {
    best: usize,
    found: Vec<Vec<usize>>,
    nodes: u64,
}

fn run_phase(g: &MeetGraph, q: &CliqueQuery, root: &Root, mode: Mode, workers: usize) -> Result<Phase> {
    if !root.feasible {
        return Ok(Phase { best: 0, found: Vec::new(), nodes: 0 });
    }
    let shared = Shared {
        incumbent: AtomicUsize::new(0),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        budget_hit: AtomicBool::new(false),
        start: Instant::now(),
        budget: q.budget,
    };
    let (cands, cap) = (&root.cands, root.cap);

    // Each top-level task is (branch vertex, its colour bound, candidates
    // left after excluding the earlier branch vertices).
    let mut tasks: Vec<(usize, usize, Row)> = Vec::new();
    if q.empty_cap && cap != u128::MAX && cap != 0 {
        if let Some(branch) = g.tightest_cap_element(cap, cands) {
            let bound = root.forced.len() + g.colour(cands).last().map_or(0, |&(_, c)| c);
            let mut rest = cands.clone();
            for v in row_iter(&branch).collect::<Vec<_>>() {
                tasks.push((v, bound, rest.clone()));
                row_remove(&mut rest, v);
            }
        }
    } else {
        let mut rest = cands.clone();
        for &(v, c) in g.colour(cands).iter().rev() {
            tasks.push((v, root.forced.len() + c, rest.clone()));
            row_remove(&mut rest, v);
        }
    }

    let run = |(v, bound, rest): &(usize, usize, Row)| -> (usize, Vec<Vec<usize>>, u64, usize) {
        let mut w = Worker {
            g,
            shared: &shared,
            mode,
            empty_cap: q.empty_cap,
            chosen: root.forced.clone(),
            local_best: 0,
            found: Vec::new(),
            local_nodes: 0,
            max_open_bound: 0,
        };
        if *bound < w.threshold() {
            return (0, Vec::new(), 0, 0);
        }
        if shared.stop.load(Ordering::Relaxed) {
            return (0, Vec::new(), 0, *bound);
        }
        let child = row_and(rest, g.neighbours(*v));
        w.chosen.push(*v);
        w.expand(child, cap & g.sets[*v]);
        (w.local_best, w.found, w.local_nodes, w.max_open_bound)
    };

    let results: Vec<_> = if workers <= 1 {
        tasks.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    };

    let nodes: u64 = results.iter().map(|r| r.2).sum::<u64>() + 1;
    let mut best = results.iter().map(|r| r.0).max().unwrap_or(0);
    if shared.budget_hit.load(Ordering::Relaxed) {
        let bound = results.iter().map(|r| r.3).max().unwrap_or(0).max(best);
        return Err(Error::Budget { nodes, best, bound });
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    // With no candidates left the forced vertices alone form the clique.
    if tasks.is_empty() && row_is_empty(cands) && !root.forced.is_empty() && (!q.empty_cap || cap == 0) {
        best = root.forced.len();
        let mut c = root.forced.clone();
        c.sort_unstable();
        found.push(c);
    }
    for (b, f, _, _) in results {
        if b == best && b > 0 {
            if mode == Mode::FirstAtLeast(best) && !found.is_empty() {
                continue;
            }
            found.extend(f);
        }
    }
    Ok(Phase { best, found, nodes })
}
