//! Exact extremal search over `I^r_{n,k}`.
//!
//! Intersecting families are cliques of the meet graph (sets adjacent when
//! they intersect). The automorphism group acts transitively on `I^r_{n,k}`,
//! so searches for one optimum, or for every optimum up to isomorphism, fix
//! the anchor set `[r] × {1}` into the family.
//!
//! [`max_intersecting`] does not search `I^r_{n,k}` directly: compressions
//! preserve size and the intersecting property, and a stable intersecting
//! family lies inside the lift of its projection, which is itself
//! intersecting. So the optimum is the heaviest intersecting family of
//! non-empty subsets of `[n]` of size at most `r`, an `l`-set weighing
//! `C(n-l, r-l)(k-1)^(r-l)`. That graph has under `2^n` vertices.
//! [`max_intersecting_direct`] keeps the plain search as a cross-check.
//!
//! Cross-intersecting optima are maximal pairs, and maximal pairs are the
//! Galois-closed pairs `(A, A')` of the "meets" relation, `A'` being every
//! set meeting all of `A`. They are walked in lectic order (NextClosure).

use std::time::{Duration, Instant};

use crate::clique::{solve, solve_weighted, Budget, CliqueQuery, Goal, MeetGraph};
use crate::error::{Error, Result};
use crate::gamma::{
    common_intersection_bits, enumerate_r_independent, is_cross_intersecting, is_intersecting, Family, IndSet, Params,
};
use crate::ground::{all_ground_sets, GroundFamily};
use crate::shift::{coef, lift};

/// Limits and parallelism for one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: Budget,
    /// Worker threads for the clique searches; results do not depend on it.
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: Budget::default(), workers: 1 }
    }
}

/// Optimum value with its witnesses, sorted and re-validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult<W> {
    pub optimum: usize,
    pub witnesses: Vec<W>,
    pub explored_nodes: u64,
    pub wall_time: Duration,
}

pub type FamilyPair = (Family, Family);

/// The set `[r] × {1}`.
pub fn anchor_set(params: &Params) -> IndSet {
    IndSet((0..params.r()).fold(0u128, |m, i| m | 1u128 << (i * params.k())))
}

fn check_r(params: &Params, min: usize) -> Result<()> {
    if params.r() < min {
        return Err(Error::Range(format!("search needs r >= {min}, got {params}")));
    }
    Ok(())
}

fn invalid(what: &str) -> Error {
    Error::Precondition(format!("witness failed re-validation: {what}"))
}

fn check_family(f: &Family, size: usize, empty_cap: bool) -> Result<()> {
    if f.len() != size {
        return Err(invalid("size"));
    }
    if !is_intersecting(f) {
        return Err(invalid("not intersecting"));
    }
    if empty_cap && common_intersection_bits(f)? != 0 {
        return Err(invalid("non-empty common intersection"));
    }
    Ok(())
}

/// Maximum intersecting family, via the weighted ground reduction.
pub fn max_intersecting(params: &Params, cfg: &SearchConfig) -> Result<SearchResult<Family>> {
    check_r(params, 1)?;
    let start = Instant::now();
    let (n, k, r) = (params.n(), params.k(), params.r());
    let ground: Vec<_> = all_ground_sets(n, r).into_iter().filter(|s| !s.is_empty()).collect();
    let weights: Vec<u128> = ground.iter().map(|s| coef(n, k, r, s.len()).value).collect();
    let g = MeetGraph::new(ground.iter().map(|s| s.0).collect());
    let (weight, chosen, nodes) = solve_weighted(&g, &weights, cfg.budget)?;
    let optimum = usize::try_from(weight).map_err(|_| Error::Range(format!("optimum {weight} does not fit")))?;
    let witness = lift(&GroundFamily::new(n, r, chosen.iter().map(|&i| ground[i]))?, params)?;
    check_family(&witness, optimum, false)?;
    Ok(SearchResult { optimum, witnesses: vec![witness], explored_nodes: nodes, wall_time: start.elapsed() })
}

fn clique_search(
    params: &Params,
    cfg: &SearchConfig,
    goal: Goal,
    empty_cap: bool,
    anchored: bool,
) -> Result<SearchResult<Family>> {
    let start = Instant::now();
    let sets = enumerate_r_independent(params);
    let anchor = anchor_set(params);
    let forced = if anchored { sets.members().iter().position(|s| *s == anchor).into_iter().collect() } else { vec![] };
    let g = MeetGraph::new(sets.iter().map(|s| s.0).collect());
    let q = CliqueQuery { goal, empty_cap, forced, workers: cfg.workers.max(1), budget: cfg.budget };
    let out = solve(&g, &q)?;
    let mut witnesses =
        out.cliques.iter().map(|c| Family::new(*params, c.iter().map(|&i| sets.members()[i]))).collect::<Result<Vec<_>>>()?;
    witnesses.sort();
    for w in &witnesses {
        check_family(w, out.size, empty_cap)?;
    }
    Ok(SearchResult { optimum: out.size, witnesses, explored_nodes: out.nodes, wall_time: start.elapsed() })
}

/// Maximum intersecting family by clique search on `I^r_{n,k}` itself.
pub fn max_intersecting_direct(params: &Params, cfg: &SearchConfig) -> Result<SearchResult<Family>> {
    check_r(params, 1)?;
    clique_search(params, cfg, Goal::Maximum, false, true)
}

/// Maximum intersecting family with empty common intersection. For
/// `k = 1, r = n` no such family exists and the optimum is 0.
pub fn max_intersecting_empty_cap(params: &Params, cfg: &SearchConfig) -> Result<SearchResult<Family>> {
    check_r(params, 2)?;
    clique_search(params, cfg, Goal::Maximum, true, true)
}

/// Every optimum of [`max_intersecting_empty_cap`] containing `[r] × {1}`.
/// Each isomorphism class of optima is represented.
pub fn enumerate_optimal_empty_cap(params: &Params, cfg: &SearchConfig) -> Result<SearchResult<Family>> {
    check_r(params, 2)?;
    clique_search(params, cfg, Goal::AllMaximum, true, true)
}

/// Every optimum of [`max_intersecting_empty_cap`], without anchoring.
pub fn enumerate_optimal_empty_cap_all(params: &Params, cfg: &SearchConfig) -> Result<SearchResult<Family>> {
    check_r(params, 2)?;
    clique_search(params, cfg, Goal::AllMaximum, true, false)
}

type Bits = Vec<u64>;

fn has(b: &[u64], i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn set(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn count(b: &[u64]) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

/// The meets relation on `I^r_{n,k}` with a derivation operator.
struct Context {
    sets: Vec<IndSet>,
    /// Row `i`: every set meeting set `i`, itself included.
    rows: Vec<Bits>,
    full: Bits,
}

impl Context {
    fn new(family: &Family) -> Self {
        let sets = family.members().to_vec();
        let m = sets.len();
        let words = m.div_ceil(64).max(1);
        let mut rows = vec![vec![0u64; words]; m];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..m {
                if sets[i].intersects(&sets[j]) {
                    set(row, j);
                }
            }
        }
        let mut full = vec![0u64; words];
        (0..m).for_each(|i| set(&mut full, i));
        Context { sets, rows, full }
    }

    /// Every set meeting all members of `a`.
    fn prime(&self, a: &[u64]) -> Bits {
        let mut out = self.full.clone();
        for i in 0..self.sets.len() {
            if has(a, i) {
                out.iter_mut().zip(&self.rows[i]).for_each(|(o, r)| *o &= r);
            }
        }
        out
    }

    fn family(&self, params: &Params, b: &[u64]) -> Family {
        Family::from_valid(*params, (0..self.sets.len()).filter(|&i| has(b, i)).map(|i| self.sets[i]).collect())
    }
}

/// Walks every closed `A` in lectic order, calling `visit(A, A')`.
fn next_closure(ctx: &Context, budget: Budget, mut visit: impl FnMut(&Bits, &Bits)) -> Result<u64> {
    let m = ctx.sets.len();
    let start = Instant::now();
    let mut nodes = 0u64;
    let mut a = ctx.prime(&ctx.prime(&vec![0; ctx.full.len()]));
    loop {
        let ap = ctx.prime(&a);
        visit(&a, &ap);
        let mut advanced = false;
        for i in (0..m).rev() {
            if has(&a, i) {
                continue;
            }
            nodes += 1;
            if nodes > budget.node_cap || (nodes.is_multiple_of(1024) && start.elapsed() > budget.time_cap) {
                return Err(Error::Budget { nodes, best: 0, bound: 2 * m });
            }
            // (A ∩ [0, i)) ∪ {i}, closed.
            let mut seed = a.clone();
            for j in i..m {
                seed[j / 64] &= !(1 << (j % 64));
            }
            set(&mut seed, i);
            let b = ctx.prime(&ctx.prime(&seed));
            if (0..i).all(|j| has(&b, j) == has(&a, j)) {
                a = b;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Ok(nodes);
        }
    }
}

fn cross_search(params: &Params, cfg: &SearchConfig, all: bool) -> Result<SearchResult<FamilyPair>> {
    check_r(params, 1)?;
    let start = Instant::now();
    let ctx = Context::new(&enumerate_r_independent(params));
    let mut best = 0usize;
    let mut found: Vec<(Bits, Bits)> = Vec::new();
    let nodes = next_closure(&ctx, cfg.budget, |a, ap| {
        let (ca, cb) = (count(a), count(ap));
        if ca == 0 || cb == 0 {
            return;
        }
        let score = ca + cb;
        if score > best {
            best = score;
            found.clear();
        }
        if score == best && (all || found.is_empty()) {
            found.push((a.clone(), ap.clone()));
        }
    })?;
    let mut witnesses: Vec<FamilyPair> = found.iter().map(|(a, b)| (ctx.family(params, a), ctx.family(params, b))).collect();
    witnesses.sort();
    for (a, b) in &witnesses {
        if a.len() + b.len() != best || !is_cross_intersecting(a, b)? {
            return Err(invalid("cross pair"));
        }
    }
    Ok(SearchResult { optimum: best, witnesses, explored_nodes: nodes, wall_time: start.elapsed() })
}

/// Maximum `|A| + |B|` over non-empty cross-intersecting pairs, with the
/// first optimal pair in lectic order.
pub fn max_cross_sum(params: &Params, cfg: &SearchConfig) -> Result<SearchResult<FamilyPair>> {
    cross_search(params, cfg, false)
}

/// Every optimal pair, as ordered pairs.
pub fn enumerate_optimal_cross_pairs(params: &Params, cfg: &SearchConfig) -> Result<SearchResult<FamilyPair>> {
    cross_search(params, cfg, true)
}

/// Every maximal cross-intersecting pair `(A, A')` with both sides
/// non-empty.
pub fn maximal_cross_pairs(params: &Params, cfg: &SearchConfig) -> Result<Vec<FamilyPair>> {
    check_r(params, 1)?;
    let ctx = Context::new(&enumerate_r_independent(params));
    let mut out = Vec::new();
    next_closure(&ctx, cfg.budget, |a, ap| {
        if count(a) > 0 && count(ap) > 0 {
            out.push((ctx.family(params, a), ctx.family(params, ap)));
        }
    })?;
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{ekr_size, hm_size, main_rn_size};

    fn p(n: usize, k: usize, r: usize) -> Params {
        Params::new(n, k, r).unwrap()
    }

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    /// Largest intersecting subfamily by include/exclude recursion over
    /// the sets in order; only pruned by the count of sets left.
    fn brute_max(params: &Params, empty_cap: bool) -> usize {
        fn go(sets: &[u128], i: usize, chosen: &mut Vec<u128>, empty_cap: bool, best: &mut usize) {
            if chosen.len() + sets.len() - i <= *best {
                return;
            }
            if i == sets.len() {
                if !empty_cap || chosen.iter().fold(u128::MAX, |x, s| x & s) == 0 {
                    *best = chosen.len();
                }
                return;
            }
            if chosen.iter().all(|c| c & sets[i] != 0) {
                chosen.push(sets[i]);
                go(sets, i + 1, chosen, empty_cap, best);
                chosen.pop();
            }
            go(sets, i + 1, chosen, empty_cap, best);
        }
        let sets: Vec<u128> = enumerate_r_independent(params).iter().map(|s| s.0).collect();
        let mut best = 0;
        go(&sets, 0, &mut Vec::new(), empty_cap, &mut best);
        best
    }

    #[test]
    fn max_intersecting_examples() {
        assert_eq!(max_intersecting(&p(3, 2, 2), &cfg()).unwrap().optimum, 4);
        assert_eq!(max_intersecting(&p(4, 2, 3), &cfg()).unwrap().optimum, 12);
        for n in 1..=5 {
            assert_eq!(max_intersecting(&p(n, 3, 1), &cfg()).unwrap().optimum, 1);
        }
        assert!(matches!(max_intersecting(&p(3, 2, 0), &cfg()), Err(Error::Range(_))));
    }

    #[test]
    fn reduction_matches_direct_and_brute_force() {
        for (n, k, r) in [(3, 2, 2), (3, 2, 3), (4, 2, 2), (3, 3, 2), (2, 3, 2), (4, 1, 2), (3, 1, 3)] {
            let params = p(n, k, r);
            let brute = brute_max(&params, false);
            assert_eq!(max_intersecting(&params, &cfg()).unwrap().optimum, brute, "{params}");
            assert_eq!(max_intersecting_direct(&params, &cfg()).unwrap().optimum, brute, "{params}");
        }
        for (n, k, r) in [(4, 2, 3), (4, 2, 4), (5, 2, 3), (4, 3, 3), (5, 3, 4), (6, 2, 4)] {
            let params = p(n, k, r);
            let red = max_intersecting(&params, &cfg()).unwrap();
            assert_eq!(red.optimum, max_intersecting_direct(&params, &cfg()).unwrap().optimum, "{params}");
            assert_eq!(red.optimum as u128, ekr_size(&params).unwrap());
        }
    }

    #[test]
    fn empty_cap_examples() {
        assert_eq!(max_intersecting_empty_cap(&p(4, 2, 3), &cfg()).unwrap().optimum, 10);
        assert_eq!(max_intersecting_empty_cap(&p(4, 2, 4), &cfg()).unwrap().optimum, 8);
        assert_eq!(max_intersecting_empty_cap(&p(3, 3, 3), &cfg()).unwrap().optimum, 7);
        assert_eq!(brute_max(&p(3, 2, 2), true), max_intersecting_empty_cap(&p(3, 2, 2), &cfg()).unwrap().optimum);
        assert_eq!(brute_max(&p(3, 2, 3), true), max_intersecting_empty_cap(&p(3, 2, 3), &cfg()).unwrap().optimum);
        assert_eq!(max_intersecting_empty_cap(&p(3, 2, 3), &cfg()).unwrap().optimum as u128, main_rn_size(3, 2).unwrap());
        assert_eq!(max_intersecting_empty_cap(&p(5, 2, 3), &cfg()).unwrap().optimum as u128, hm_size(&p(5, 2, 3)).unwrap());
    }

    #[test]
    fn empty_cap_edge_cases() {
        assert!(matches!(max_intersecting_empty_cap(&p(4, 2, 1), &cfg()), Err(Error::Range(_))));
        let none = max_intersecting_empty_cap(&p(4, 1, 4), &cfg()).unwrap();
        assert_eq!((none.optimum, none.witnesses.len()), (0, 0));
    }

    #[test]
    fn anchored_enumeration_sees_every_class() {
        let params = p(4, 2, 3);
        let anchored = enumerate_optimal_empty_cap(&params, &cfg()).unwrap();
        let all = enumerate_optimal_empty_cap_all(&params, &cfg()).unwrap();
        assert_eq!(anchored.optimum, all.optimum);
        let anchor = anchor_set(&params);
        let with_anchor: Vec<_> = all.witnesses.iter().filter(|f| f.contains(&anchor)).cloned().collect();
        assert_eq!(with_anchor, anchored.witnesses);
        assert_eq!(anchored.witnesses.len(), 30);
    }

    #[test]
    fn witness_lists_ignore_worker_count() {
        let params = p(5, 2, 4);
        let one = enumerate_optimal_empty_cap(&params, &cfg()).unwrap();
        let four = enumerate_optimal_empty_cap(&params, &SearchConfig { workers: 4, ..cfg() }).unwrap();
        assert_eq!(one.witnesses, four.witnesses);
        let a = max_intersecting_empty_cap(&params, &cfg()).unwrap();
        let b = max_intersecting_empty_cap(&params, &SearchConfig { workers: 3, ..cfg() }).unwrap();
        assert_eq!(a.witnesses, b.witnesses);
    }

    #[test]
    fn cross_sum_examples() {
        assert_eq!(max_cross_sum(&p(3, 2, 2), &cfg()).unwrap().optimum, 8);
        assert_eq!(max_cross_sum(&p(4, 2, 3), &cfg()).unwrap().optimum, 26);
        assert_eq!(max_cross_sum(&p(2, 2, 2), &cfg()).unwrap().optimum, 4);
    }

    #[test]
    fn closed_pairs_match_brute_force_fixed_points() {
        // Every pair (A, A') with A' = meets(A) and A = meets(A'), from all 2^12 seeds.
        let params = p(3, 2, 2);
        let sets = enumerate_r_independent(&params);
        let m = sets.len();
        let meets = |mask: u32| -> u32 {
            (0..m)
                .filter(|&j| (0..m).all(|i| mask >> i & 1 == 0 || sets.members()[i].intersects(&sets.members()[j])))
                .fold(0, |acc, j| acc | 1 << j)
        };
        let mut pairs = std::collections::BTreeSet::new();
        for seed in 0u32..1 << m {
            let b = meets(seed);
            let a = meets(b);
            if a != 0 && b != 0 {
                pairs.insert((a, meets(a)));
            }
        }
        let listed = maximal_cross_pairs(&params, &cfg()).unwrap();
        assert_eq!(listed.len(), pairs.len());
        let best = pairs.iter().map(|(a, b)| a.count_ones() + b.count_ones()).max().unwrap();
        assert_eq!(best, 8);
    }

    #[test]
    fn every_maximal_pair_is_maximal() {
        let params = p(3, 2, 2);
        let universe = enumerate_r_independent(&params);
        for (a, b) in maximal_cross_pairs(&params, &cfg()).unwrap() {
            assert!(is_cross_intersecting(&a, &b).unwrap());
            for x in universe.iter() {
                let meets = |f: &Family| f.iter().all(|y| y.intersects(x));
                assert_eq!(a.contains(x), meets(&b));
                assert_eq!(b.contains(x), meets(&a));
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports_bounds() {
        let tight = SearchConfig { budget: Budget { node_cap: 10, ..Budget::default() }, workers: 1 };
        match max_intersecting_empty_cap(&p(5, 3, 4), &tight) {
            Err(Error::Budget { best, bound, .. }) => assert!(bound >= best),
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(matches!(max_cross_sum(&p(4, 2, 3), &tight), Err(Error::Budget { .. })));
    }
}
