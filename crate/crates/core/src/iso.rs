//! Isomorphism of families under the automorphisms of the clique union
//! (independent relabelings inside each clique, then a permutation of the
//! cliques), and of ground families under relabelings of `[n]`.
//!
//! A canonical form minimizes the image family over a set of group elements
//! chosen by vertex invariants: every vertex gets a key (its degree in each
//! family and its sorted codegree list), and only elements that lay out the
//! image with keys non-decreasing inside each clique, and cliques ordered by
//! their sorted key lists, are tried. Keys are carried along by automorphisms,
//! so this candidate set moves with the family and the minimum image is an
//! orbit invariant. It is a complete invariant, though not always the
//! minimum over the whole group.

use std::fmt::Write as _;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gamma::{bits_of, check_same_params, Family, IndSet, Params, Vertex};
use crate::ground::{GroundFamily, GroundSet};

/// Default cap on the number of group elements one canonical form may try.
pub const DEFAULT_GROUP_BUDGET: u128 = 10_000_000;

/// Maps vertex `(i, s)` to `(clique_perm[i-1] + 1, within[i-1][s-1] + 1)`;
/// the vectors hold 0-based images.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    clique_perm: Vec<usize>,
    within: Vec<Vec<usize>>,
}

fn is_perm(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

impl WreathElement {
    pub fn new(clique_perm: Vec<usize>, within: Vec<Vec<usize>>) -> Result<Self> {
        let k = within.first().map_or(0, Vec::len);
        if within.len() != clique_perm.len() || !is_perm(&clique_perm) {
            return Err(Error::Param("clique_perm must be a permutation with one within-permutation per clique".into()));
        }
        if within.iter().any(|w| w.len() != k || !is_perm(w)) {
            return Err(Error::Param("within-clique maps must be permutations of equal length".into()));
        }
        Ok(WreathElement { clique_perm, within })
    }

    pub fn identity(n: usize, k: usize) -> Self {
        WreathElement { clique_perm: (0..n).collect(), within: vec![(0..k).collect(); n] }
    }

    pub fn random<R: Rng>(n: usize, k: usize, rng: &mut R) -> Self {
        let mut clique_perm: Vec<usize> = (0..n).collect();
        clique_perm.shuffle(rng);
        let within = (0..n)
            .map(|_| {
                let mut w: Vec<usize> = (0..k).collect();
                w.shuffle(rng);
                w
            })
            .collect();
        WreathElement { clique_perm, within }
    }

    /// Swaps cliques `a` and `b` (1-based).
    pub fn swap_cliques(n: usize, k: usize, a: usize, b: usize) -> Self {
        let mut g = Self::identity(n, k);
        g.clique_perm.swap(a - 1, b - 1);
        g
    }

    pub fn clique_perm(&self) -> &[usize] {
        &self.clique_perm
    }

    pub fn within(&self) -> &[Vec<usize>] {
        &self.within
    }

    fn fits(&self, params: &Params) -> Result<()> {
        if self.clique_perm.len() != params.n() || self.within.first().map_or(0, Vec::len) != params.k() {
            return Err(Error::Param(format!(
                "group element acts on {} cliques of size {}, family is over {params}",
                self.clique_perm.len(),
                self.within.first().map_or(0, Vec::len)
            )));
        }
        Ok(())
    }

    pub fn apply_vertex(&self, v: Vertex) -> Vertex {
        Vertex::new(self.clique_perm[v.clique - 1] + 1, self.within[v.clique - 1][v.pos - 1] + 1)
    }

    /// New bit of every old bit.
    fn bit_map(&self, k: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.clique_perm.len() * k);
        for (i, &ci) in self.clique_perm.iter().enumerate() {
            for s in 0..k {
                out.push((ci * k + self.within[i][s]) as u32);
            }
        }
        out
    }
}

fn map_bits(map: &[u32], x: u128) -> u128 {
    bits_of(x).fold(0, |acc, b| acc | 1u128 << map[b as usize])
}

pub fn apply_set(g: &WreathElement, params: &Params, x: IndSet) -> Result<IndSet> {
    g.fits(params)?;
    Ok(IndSet(map_bits(&g.bit_map(params.k()), x.0)))
}

pub fn apply(g: &WreathElement, family: &Family) -> Result<Family> {
    let params = family.params();
    g.fits(params)?;
    let map = g.bit_map(params.k());
    Ok(Family::from_valid(*params, family.iter().map(|x| IndSet(map_bits(&map, x.0))).collect()))
}

/// `(k!)^n n!`, saturating.
pub fn group_order(n: usize, k: usize) -> u128 {
    let fact = |m: usize| (1..=m as u128).try_fold(1u128, |a, b| a.checked_mul(b));
    fact(k)
        .and_then(|kf| (0..n).try_fold(1u128, |a, _| a.checked_mul(kf)))
        .and_then(|w| fact(n).and_then(|nf| w.checked_mul(nf)))
        .unwrap_or(u128::MAX)
}

/// Sorted vertex degrees; an isomorphism invariant.
pub fn degree_profile(family: &Family) -> Vec<usize> {
    let mut d = family.vertex_degrees();
    d.sort_unstable();
    d
}

type Key = Vec<usize>;

fn vertex_keys(params: &Params, families: &[&Family]) -> Vec<Key> {
    let slots = params.slots();
    let mut keys = vec![Vec::new(); slots];
    for f in families {
        let mut co = vec![vec![0usize; slots]; slots];
        for x in f.iter() {
            let bits: Vec<u32> = bits_of(x.0).collect();
            for &a in &bits {
                for &b in &bits {
                    co[a as usize][b as usize] += 1;
                }
            }
        }
        for (v, row) in co.iter().enumerate() {
            keys[v].push(row[v]);
        }
        for (v, row) in co.into_iter().enumerate() {
            let mut others: Vec<usize> = row.into_iter().enumerate().filter(|&(u, _)| u != v).map(|(_, c)| c).collect();
            others.sort_unstable();
            keys[v].extend(others);
        }
    }
    keys
}

/// Splits sorted `items` into runs of equal `key`.
fn runs<T: Copy, K: PartialEq>(items: &[T], key: impl Fn(T) -> K) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    for &it in items {
        match out.last_mut() {
            Some(run) if key(run[0]) == key(it) => run.push(it),
            _ => out.push(vec![it]),
        }
    }
    out
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

/// Every candidate element as a bit map; errors when there are more than
/// `budget` of them.
fn candidate_maps(params: &Params, families: &[&Family], budget: u128) -> Result<Vec<Vec<u32>>> {
    let (n, k) = (params.n(), params.k());
    let keys = vertex_keys(params, families);
    let key = |c: usize, s: usize| &keys[c * k + s];
    // Position tie runs of each clique, in key order.
    let pos_runs: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|c| {
            let mut pos: Vec<usize> = (0..k).collect();
            pos.sort_by(|&a, &b| key(c, a).cmp(key(c, b)));
            runs(&pos, |s| key(c, s).clone())
        })
        .collect();
    let signature = |c: usize| -> Vec<&Key> { (0..k).map(|s| key(c, s)).sorted().collect() };
    let mut cliques: Vec<usize> = (0..n).collect();
    cliques.sort_by_key(|&c| signature(c));
    let clique_runs = runs(&cliques, signature);

    let mut count: u128 = 1;
    for r in clique_runs.iter().map(Vec::len).chain(pos_runs.iter().flatten().map(Vec::len)) {
        count = count.saturating_mul(factorial(r));
    }
    if count > budget {
        return Err(Error::GroupBudget { order: count, budget });
    }

    // One slot per tie run; a choice is a permutation of the run.
    let mut slots: Vec<Vec<Vec<usize>>> = Vec::new();
    for run in clique_runs.iter().chain(pos_runs.iter().flatten()) {
        slots.push(run.iter().copied().permutations(run.len()).collect());
    }
    let n_clique_slots = clique_runs.len();
    let mut maps = Vec::with_capacity(count as usize);
    for choice in slots.iter().map(|s| 0..s.len()).multi_cartesian_product() {
        let picked: Vec<&Vec<usize>> = choice.iter().zip(&slots).map(|(&i, s)| &s[i]).collect();
        let order: Vec<usize> = picked[..n_clique_slots].iter().flat_map(|p| p.iter().copied()).collect();
        let mut next = n_clique_slots;
        let mut pos_order = vec![Vec::new(); n];
        for (c, po) in pos_order.iter_mut().enumerate() {
            for _ in &pos_runs[c] {
                po.extend(picked[next].iter().copied());
                next += 1;
            }
        }
        let mut map = vec![0u32; n * k];
        for (j, &c) in order.iter().enumerate() {
            for (t, &s) in pos_order[c].iter().enumerate() {
                map[c * k + s] = (j * k + t) as u32;
            }
        }
        maps.push(map);
    }
    if maps.is_empty() {
        // n = 0 or k = 0 cannot occur for valid params; the identity keeps this total.
        maps.push((0..(n * k) as u32).collect());
    }
    Ok(maps)
}

fn min_image(params: &Params, families: &[&Family], budget: u128) -> Result<Vec<Vec<u128>>> {
    let mut best: Option<Vec<Vec<u128>>> = None;
    for map in candidate_maps(params, families, budget)? {
        let image: Vec<Vec<u128>> = families.iter().map(|f| f.iter().map(|x| map_bits(&map, x.0)).sorted().collect()).collect();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    Ok(best.unwrap_or_default())
}

fn hex_width(bits: usize) -> usize {
    bits.div_ceil(4).max(1)
}

fn render(prefix: String, parts: &[Vec<u128>], width: usize) -> String {
    let mut out = prefix;
    out.push(':');
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        for (j, x) in part.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{x:0width$x}").unwrap();
        }
    }
    out
}

/// `n,k,r:` followed by the members of the minimum image as fixed-width
/// lowercase hex, comma separated.
pub fn canonical_form(family: &Family) -> Result<String> {
    canonical_form_with_budget(family, DEFAULT_GROUP_BUDGET)
}

pub fn canonical_form_with_budget(family: &Family, budget: u128) -> Result<String> {
    let p = family.params();
    let image = min_image(p, &[family], budget)?;
    Ok(render(format!("{},{},{}", p.n(), p.k(), p.r()), &image, hex_width(p.slots())))
}

/// The minimum image itself; its canonical form equals the input's.
pub fn canonical_image(family: &Family) -> Result<Family> {
    let p = *family.params();
    let image = min_image(&p, &[family], DEFAULT_GROUP_BUDGET)?;
    let members = image.into_iter().next().unwrap_or_default();
    Ok(Family::from_valid(p, members.into_iter().map(IndSet).collect()))
}

/// Same families up to an automorphism. Sizes and degree profiles are
/// compared before any canonical form is computed.
pub fn are_isomorphic(a: &Family, b: &Family) -> Result<bool> {
    if a.params() != b.params() || a.len() != b.len() || degree_profile(a) != degree_profile(b) {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// Canonical form of the ordered pair `(A, B)`: one group element maps
/// both sides. Sides are separated by `|`.
pub fn pair_canonical_form(a: &Family, b: &Family) -> Result<String> {
    check_same_params(a.params(), b.params())?;
    let p = a.params();
    let image = min_image(p, &[a, b], DEFAULT_GROUP_BUDGET)?;
    Ok(render(format!("{},{},{}", p.n(), p.k(), p.r()), &image, hex_width(p.slots())))
}

/// The smaller of the forms of `(A, B)` and `(B, A)`.
pub fn unordered_pair_canonical_form(a: &Family, b: &Family) -> Result<String> {
    Ok(pair_canonical_form(a, b)?.min(pair_canonical_form(b, a)?))
}

/// Image of a ground family under `perm` (`i ↦ perm[i-1] + 1`).
pub fn apply_ground(perm: &[usize], g: &GroundFamily) -> Result<GroundFamily> {
    if perm.len() != g.n() || !is_perm(perm) {
        return Err(Error::Param(format!("need a permutation of [{}]", g.n())));
    }
    let map: Vec<u32> = perm.iter().map(|&x| x as u32).collect();
    GroundFamily::new(g.n(), g.r(), g.iter().map(|s| GroundSet(map_bits(&map, s.0))))
}

/// `n,r:` followed by the minimum image over all of `S_n`.
pub fn ground_canonical_form(g: &GroundFamily) -> Result<String> {
    ground_canonical_form_with_budget(g, DEFAULT_GROUP_BUDGET)
}

pub fn ground_canonical_form_with_budget(g: &GroundFamily, budget: u128) -> Result<String> {
    let n = g.n();
    let order = factorial(n);
    if order > budget {
        return Err(Error::GroupBudget { order, budget });
    }
    let mut best: Option<Vec<u128>> = None;
    for perm in (0..n as u32).permutations(n) {
        let image: Vec<u128> = g.iter().map(|s| map_bits(&perm, s.0)).sorted().collect();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    Ok(render(format!("{},{}", n, g.r()), &[best.unwrap_or_default()], hex_width(n)))
}

pub fn ground_isomorphic(a: &GroundFamily, b: &GroundFamily) -> Result<bool> {
    if a.n() != b.n() || a.r() != b.r() || a.len() != b.len() {
        return Ok(false);
    }
    Ok(ground_canonical_form(a)? == ground_canonical_form(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounded::{v_family, x_family, y_family};
    use crate::constructions::{ekr_family, hm_family, main_rn_family, triangle_family};
    use crate::gamma::{enumerate_r_independent, is_intersecting};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: usize, k: usize, r: usize) -> Params {
        Params::new(n, k, r).unwrap()
    }

    fn random_family(params: &Params, rng: &mut ChaCha8Rng, prob: f64) -> Family {
        let all = enumerate_r_independent(params);
        Family::new(*params, all.iter().copied().filter(|_| rng.gen_bool(prob))).unwrap()
    }

    #[test]
    fn apply_examples() {
        let params = p(4, 2, 3);
        let f = hm_family(&params).unwrap();
        assert_eq!(apply(&WreathElement::identity(4, 2), &f).unwrap(), f);
        let e1 = ekr_family(&params, Vertex::new(1, 1)).unwrap();
        let e2 = ekr_family(&params, Vertex::new(2, 1)).unwrap();
        assert_eq!(apply(&WreathElement::swap_cliques(4, 2, 1, 2), &e1).unwrap(), e2);
        assert!(apply(&WreathElement::identity(3, 2), &f).is_err());
        assert!(WreathElement::new(vec![0, 0], vec![vec![0, 1], vec![1, 0]]).is_err());
    }

    #[test]
    fn apply_preserves_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let params = p(4, 3, 3);
        for _ in 0..100 {
            let g = WreathElement::random(4, 3, &mut rng);
            let f = random_family(&params, &mut rng, 0.05);
            let img = apply(&g, &f).unwrap();
            assert_eq!(img.len(), f.len());
            assert_eq!(is_intersecting(&img), is_intersecting(&f));
            assert_eq!(degree_profile(&img), degree_profile(&f));
        }
    }

    #[test]
    fn canonical_form_is_constant_on_orbits() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (n, k, r) in [(3, 2, 2), (4, 2, 3), (3, 3, 3), (5, 2, 4)] {
            let params = p(n, k, r);
            for _ in 0..20 {
                let f = random_family(&params, &mut rng, 0.2);
                let g = WreathElement::random(n, k, &mut rng);
                let img = apply(&g, &f).unwrap();
                assert_eq!(canonical_form(&f).unwrap(), canonical_form(&img).unwrap());
                assert!(are_isomorphic(&f, &img).unwrap());
            }
        }
    }

    #[test]
    fn canonical_form_separates_exactly_the_orbits() {
        // Every family of 3 sets from I^2_{3,2}, classified two ways.
        let params = p(3, 2, 2);
        let all = enumerate_r_independent(&params);
        let group: Vec<WreathElement> = (0..3)
            .permutations(3)
            .flat_map(|cp| {
                (0..8u32).map(move |w| {
                    let within = (0..3).map(|i| if w >> i & 1 == 1 { vec![1, 0] } else { vec![0, 1] }).collect();
                    WreathElement::new(cp.clone(), within).unwrap()
                })
            })
            .collect();
        assert_eq!(group.len() as u128, group_order(3, 2));
        let fams: Vec<Family> = all.iter().copied().combinations(3).map(|c| Family::new(params, c).unwrap()).collect();
        for a in &fams {
            let orbit_min = group.iter().map(|g| apply(g, a).unwrap()).min().unwrap();
            for b in &fams {
                let same_orbit = group.iter().map(|g| apply(g, b).unwrap()).min().unwrap() == orbit_min;
                assert_eq!(canonical_form(a).unwrap() == canonical_form(b).unwrap(), same_orbit);
            }
        }
    }

    #[test]
    fn named_families() {
        let params = p(4, 2, 3);
        let forms: Vec<String> = (1..=4)
            .flat_map(|i| (1..=2).map(move |s| Vertex::new(i, s)))
            .map(|v| canonical_form(&ekr_family(&params, v).unwrap()).unwrap())
            .collect();
        assert!(forms.iter().all(|f| *f == forms[0]));
        assert!(!are_isomorphic(&triangle_family(&params).unwrap(), &hm_family(&params).unwrap()).unwrap());
        let rn = main_rn_family(4, 3).unwrap();
        let ekr = ekr_family(rn.params(), Vertex::new(1, 1)).unwrap();
        assert!(!are_isomorphic(&rn, &ekr).unwrap());
        assert!(canonical_form(&hm_family(&params).unwrap()).unwrap().starts_with("4,2,3:"));
    }

    #[test]
    fn pair_forms() {
        let params = p(3, 2, 2);
        let (h, m) = crate::constructions::hm_cross_pair(&params).unwrap();
        let g = WreathElement::swap_cliques(3, 2, 1, 3);
        let (gh, gm) = (apply(&g, &h).unwrap(), apply(&g, &m).unwrap());
        assert_eq!(pair_canonical_form(&h, &m).unwrap(), pair_canonical_form(&gh, &gm).unwrap());
        assert_ne!(pair_canonical_form(&h, &m).unwrap(), pair_canonical_form(&m, &h).unwrap());
        assert_eq!(unordered_pair_canonical_form(&h, &m).unwrap(), unordered_pair_canonical_form(&gm, &gh).unwrap());
    }

    #[test]
    fn group_budget() {
        let params = p(5, 3, 4);
        let f = Family::empty(params);
        assert!(matches!(canonical_form_with_budget(&f, 10), Err(Error::GroupBudget { .. })));
        assert_eq!(group_order(5, 2), 3840);
        assert_eq!(group_order(40, 40), u128::MAX);
    }

    #[test]
    fn ground_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let v = v_family(6, 3).unwrap();
        let base = ground_canonical_form(&v).unwrap();
        for _ in 0..10 {
            let mut perm: Vec<usize> = (0..6).collect();
            perm.shuffle(&mut rng);
            assert_eq!(ground_canonical_form(&apply_ground(&perm, &v).unwrap()).unwrap(), base);
        }
        let one = GroundFamily::new(3, 1, [GroundSet::from_elems(&[1])]).unwrap();
        let two = GroundFamily::new(3, 1, [GroundSet::from_elems(&[2])]).unwrap();
        assert!(ground_isomorphic(&one, &two).unwrap());
        assert!(!ground_isomorphic(&x_family(5, 3).unwrap(), &y_family(5, 3).unwrap()).unwrap());
        assert!(matches!(ground_canonical_form_with_budget(&v, 100), Err(Error::GroupBudget { .. })));
    }
}
