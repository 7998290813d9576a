//! Closed forms and searches against brute force written from scratch here:
//! sets are built by plain loops and optima found by exhaustive recursion.

use cliquekr::claw::canonical_claw_size;
use cliquekr::constructions::{ekr_size, hm_cross_sum, hm_size, main_rn_size, triangle_size};
use cliquekr::search::{max_cross_sum, max_intersecting, max_intersecting_direct, max_intersecting_empty_cap, SearchConfig};
use cliquekr::shift::coef;
use cliquekr::Params;

/// Independent r-sets of n disjoint k-cliques, vertex (i,s) at bit i*k+s (0-based).
fn sets(n: usize, k: usize, r: usize) -> Vec<u128> {
    let mut out = Vec::new();
    for cliques in 0u32..1 << n {
        if cliques.count_ones() as usize != r {
            continue;
        }
        let chosen: Vec<usize> = (0..n).filter(|i| cliques >> i & 1 == 1).collect();
        let mut pos = vec![0usize; r];
        loop {
            out.push(chosen.iter().zip(&pos).fold(0u128, |m, (&i, &s)| m | 1 << (i * k + s)));
            let mut j = 0;
            while j < r && pos[j] == k - 1 {
                pos[j] = 0;
                j += 1;
            }
            if j == r {
                break;
            }
            pos[j] += 1;
        }
    }
    out
}

/// Largest pairwise-meeting subfamily; with `empty_cap`, also no common vertex.
fn brute_max(all: &[u128], empty_cap: bool) -> usize {
    fn go(all: &[u128], i: usize, chosen: &mut Vec<u128>, common: u128, empty_cap: bool, best: &mut usize) {
        if chosen.len() + all.len() - i <= *best {
            return;
        }
        if i == all.len() {
            if !empty_cap || common == 0 {
                *best = chosen.len();
            }
            return;
        }
        let x = all[i];
        if chosen.iter().all(|&y| x & y != 0) {
            chosen.push(x);
            go(all, i + 1, chosen, common & x, empty_cap, best);
            chosen.pop();
        }
        go(all, i + 1, chosen, common, empty_cap, best);
    }
    let mut best = 0;
    go(all, 0, &mut Vec::new(), u128::MAX, empty_cap, &mut best);
    best
}

/// Best `|A| + |B|` over cross-intersecting pairs with both sides non-empty.
/// For a fixed `A` the best `B` is everything meeting all of `A`, so it
/// suffices to range over subsets `A`.
fn brute_cross(all: &[u128]) -> usize {
    let m = all.len();
    assert!(m <= 20);
    let mut best = 0;
    for mask in 1u32..1 << m {
        let a: Vec<u128> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let b = all.iter().filter(|&&y| a.iter().all(|&x| x & y != 0)).count();
        if b > 0 {
            best = best.max(a.len() + b);
        }
    }
    best
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

#[test]
fn set_counts_agree() {
    for (n, k, r) in [(3, 2, 2), (4, 3, 2), (5, 2, 3), (4, 1, 4)] {
        let expect = cliquekr::binom::binom(n as i64, r as i64) * (k as u128).pow(r as u32);
        assert_eq!(sets(n, k, r).len() as u128, expect);
    }
}

#[test]
fn max_intersecting_against_brute_force() {
    for (n, k, r) in [(2, 2, 2), (3, 2, 2), (3, 3, 2), (4, 2, 2), (3, 2, 3), (4, 2, 3), (5, 2, 2)] {
        let p = Params::new(n, k, r).unwrap();
        let brute = brute_max(&sets(n, k, r), false);
        assert_eq!(brute as u128, ekr_size(&p).unwrap(), "({n},{k},{r})");
        assert_eq!(max_intersecting(&p, &cfg()).unwrap().optimum, brute);
        assert_eq!(max_intersecting_direct(&p, &cfg()).unwrap().optimum, brute);
    }
}

#[test]
fn empty_cap_against_brute_force() {
    for (n, k, r) in [(3, 2, 2), (4, 2, 2), (4, 2, 3), (3, 3, 2), (5, 2, 3)] {
        let p = Params::new(n, k, r).unwrap();
        let brute = brute_max(&sets(n, k, r), true);
        assert_eq!(brute as u128, hm_size(&p).unwrap(), "({n},{k},{r})");
        assert_eq!(max_intersecting_empty_cap(&p, &cfg()).unwrap().optimum, brute);
    }
    for (n, k) in [(3, 2), (4, 2), (3, 3)] {
        let p = Params::new(n, k, n).unwrap();
        let brute = brute_max(&sets(n, k, n), true);
        assert_eq!(brute as u128, main_rn_size(n, k).unwrap(), "({n},{k},{n})");
        assert_eq!(max_intersecting_empty_cap(&p, &cfg()).unwrap().optimum, brute);
    }
}

#[test]
fn r3_tie_family_has_the_same_size() {
    // Sets holding two of three fixed position-1 vertices.
    for (n, k) in [(4, 2), (5, 2), (4, 3)] {
        let p = Params::new(n, k, 3).unwrap();
        let tri: u128 = (0..3).fold(0, |m, i| m | 1 << (i * k));
        let count = sets(n, k, 3).iter().filter(|&&x| (x & tri).count_ones() >= 2).count();
        assert_eq!(count as u128, triangle_size(&p).unwrap());
        assert_eq!(triangle_size(&p).unwrap(), hm_size(&p).unwrap());
    }
}

#[test]
fn cross_sum_against_brute_force() {
    for (n, k, r) in [(2, 2, 2), (3, 2, 2), (2, 3, 2), (2, 4, 2)] {
        let p = Params::new(n, k, r).unwrap();
        let brute = brute_cross(&sets(n, k, r));
        assert_eq!(brute as u128, hm_cross_sum(&p).unwrap(), "({n},{k},{r})");
        assert_eq!(max_cross_sum(&p, &cfg()).unwrap().optimum, brute);
    }
    // With k = 1 every pair of sets meets, so the whole family pairs with itself.
    let p = Params::new(3, 1, 2).unwrap();
    assert_eq!(brute_cross(&sets(3, 1, 2)), 6);
    assert_eq!(max_cross_sum(&p, &cfg()).unwrap().optimum, 6);
}

#[test]
fn lift_coefficient_counts_sets() {
    for (n, k, r) in [(4, 2, 3), (5, 3, 3), (6, 2, 4), (3, 4, 2)] {
        let all = sets(n, k, r);
        let firsts: u128 = (0..n).fold(0, |m, i| m | 1 << (i * k));
        for l in 0..=r {
            // Sets whose position-1 vertices are exactly cliques 0..l.
            let target: u128 = (0..l).fold(0, |m, i| m | 1 << (i * k));
            let count = all.iter().filter(|&&x| x & firsts == target).count();
            assert_eq!(count as u128, coef(n, k, r, l).value, "({n},{k},{r}) l={l}");
        }
    }
}

#[test]
fn claw_star_size_counts_sets() {
    // Claw on n legs: root c, middles b_i, leaves a_i; a_i ~ b_i ~ c.
    for n in 2..=6usize {
        for r in 1..n {
            let v = 2 * n + 1;
            let adj = |x: usize, y: usize| -> bool {
                let root = 2 * n;
                let (lo, hi) = (x.min(y), x.max(y));
                (hi == root && lo % 2 == 1) || (hi == lo + 1 && lo % 2 == 0 && hi < root)
            };
            let mut count = 0u128;
            for mask in 0u32..1 << v {
                if mask.count_ones() as usize != r || mask & 1 == 0 {
                    continue;
                }
                let vs: Vec<usize> = (0..v).filter(|i| mask >> i & 1 == 1).collect();
                if vs.iter().enumerate().all(|(i, &x)| vs[i + 1..].iter().all(|&y| !adj(x, y))) {
                    count += 1;
                }
            }
            assert_eq!(count, canonical_claw_size(n, r), "n={n} r={r}");
        }
    }
}
