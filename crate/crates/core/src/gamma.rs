//! Vertices, independent sets and families of `Γ_{n,k}`, the disjoint union
//! of `n` cliques of order `k`.
//!
//! Vertex `(i, j)` (clique `i`, position `j`, both 1-based) lives at bit
//! `(i-1)*k + (j-1)` of an [`IndSet`]. Families keep their members sorted by
//! the numeric value of that bit vector, which is the canonical order every
//! operation in this crate returns.

use std::fmt;
use std::str::FromStr;

use crate::binom::{binom, mul, pow};
use crate::error::{Error, Result};

/// Storage width used when none is requested explicitly.
pub const DEFAULT_WIDTH: u32 = 64;
/// Widest supported bit vector.
pub const MAX_WIDTH: u32 = 128;

/// The triple `(n, k, r)`: `n` cliques of order `k`, sets of size `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Params {
    n: usize,
    k: usize,
    r: usize,
    width: u32,
}

impl Params {
    /// Validated parameters at the default 64-bit width.
    pub fn new(n: usize, k: usize, r: usize) -> Result<Self> {
        Self::with_width(n, k, r, DEFAULT_WIDTH)
    }

    /// Validated parameters at an explicit width (64 or 128).
    pub fn with_width(n: usize, k: usize, r: usize, width: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("n must be at least 1".into()));
        }
        if k == 0 {
            return Err(Error::Param("k must be at least 1".into()));
        }
        if r > n {
            return Err(Error::Param(format!("r = {r} exceeds n = {n}")));
        }
        if width != 64 && width != 128 {
            return Err(Error::Param(format!("unsupported bit width {width}")));
        }
        let needed = n.saturating_mul(k);
        if needed > width as usize {
            return Err(Error::Capacity { needed, width });
        }
        Ok(Params { n, k, r, width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Same `n`, `k` and width with a different set size.
    pub fn with_r(&self, r: usize) -> Result<Self> {
        Self::with_width(self.n, self.k, r, self.width)
    }

    /// Number of vertex slots, `n*k`.
    pub fn slots(&self) -> usize {
        self.n * self.k
    }

    /// Bit mask of clique `i` (1-based).
    pub fn clique_mask(&self, i: usize) -> u128 {
        debug_assert!(i >= 1 && i <= self.n);
        let block = if self.k == 128 { u128::MAX } else { (1u128 << self.k) - 1 };
        block << ((i - 1) * self.k)
    }

    /// Mask of the position-1 vertices `(i, 1)` of every clique.
    pub fn first_positions_mask(&self) -> u128 {
        (1..=self.n).fold(0, |m, i| m | (1u128 << ((i - 1) * self.k)))
    }

    /// Mask of every vertex slot.
    pub fn all_mask(&self) -> u128 {
        if self.slots() == 128 {
            u128::MAX
        } else {
            (1u128 << self.slots()) - 1
        }
    }

    pub(crate) fn same_graph(&self, other: &Params) -> bool {
        self.n == other.n && self.k == other.k && self.r == other.r
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.k, self.r)
    }
}

/// Vertex `(clique, pos)` of `Γ_{n,k}`, both coordinates 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub clique: usize,
    pub pos: usize,
}

impl Vertex {
    pub const fn new(clique: usize, pos: usize) -> Self {
        Vertex { clique, pos }
    }

    pub fn check(&self, params: &Params) -> Result<()> {
        if self.clique == 0 || self.clique > params.n || self.pos == 0 || self.pos > params.k {
            return Err(Error::InvalidVertex(format!("{self} for Γ with n={}, k={}", params.n, params.k)));
        }
        Ok(())
    }

    pub fn bit(&self, params: &Params) -> u32 {
        ((self.clique - 1) * params.k + (self.pos - 1)) as u32
    }

    pub fn from_bit(bit: u32, params: &Params) -> Self {
        let b = bit as usize;
        Vertex { clique: b / params.k + 1, pos: b % params.k + 1 }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.clique, self.pos)
    }
}

impl FromStr for Vertex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s.split_once('.').ok_or_else(|| format!("expected i.j, got {s:?}"))?;
        let clique = a.parse().map_err(|_| format!("bad clique index in {s:?}"))?;
        let pos = b.parse().map_err(|_| format!("bad position in {s:?}"))?;
        Ok(Vertex { clique, pos })
    }
}

/// Iterator over the set bits of a `u128`, lowest first.
pub(crate) fn bits_of(mut x: u128) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let b = x.trailing_zeros();
            x &= x - 1;
            Some(b)
        }
    })
}

/// An independent set of `Γ_{n,k}`: at most one vertex per clique.
///
/// The parameters are not stored; every method that needs them takes them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndSet(pub u128);

impl IndSet {
    pub const EMPTY: IndSet = IndSet(0);

    pub fn from_vertices(params: &Params, vertices: &[Vertex]) -> Result<Self> {
        let mut bits = 0u128;
        for v in vertices {
            v.check(params)?;
            bits |= 1u128 << v.bit(params);
        }
        let set = IndSet(bits);
        if !set.is_independent(params) {
            return Err(Error::InvalidSet(format!("two vertices share a clique in {}", set.display(params))));
        }
        Ok(set)
    }

    pub fn bits(&self) -> u128 {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, params: &Params, v: Vertex) -> bool {
        self.0 >> v.bit(params) & 1 == 1
    }

    pub fn intersects(&self, other: &IndSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Within the slot range and at most one vertex per clique.
    pub fn is_independent(&self, params: &Params) -> bool {
        if self.0 & !params.all_mask() != 0 {
            return false;
        }
        (1..=params.n).all(|i| (self.0 & params.clique_mask(i)).count_ones() <= 1)
    }

    /// A member of `I^r_{n,k}` for the governing `r`.
    pub fn is_valid(&self, params: &Params) -> bool {
        self.len() == params.r && self.is_independent(params)
    }

    pub fn vertices(&self, params: &Params) -> Vec<Vertex> {
        bits_of(self.0).map(|b| Vertex::from_bit(b, params)).collect()
    }

    /// Position occupied in clique `i`, if any.
    pub fn position_in(&self, params: &Params, i: usize) -> Option<usize> {
        let block = self.0 & params.clique_mask(i);
        if block == 0 {
            None
        } else {
            Some(block.trailing_zeros() as usize - (i - 1) * params.k + 1)
        }
    }

    pub fn display<'a>(&'a self, params: &'a Params) -> impl fmt::Display + 'a {
        DisplaySet(self, params)
    }
}

struct DisplaySet<'a>(&'a IndSet, &'a Params);

impl fmt::Display for DisplaySet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.0.vertices(self.1) {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A duplicate-free, sorted family of members of `I^r_{n,k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Family {
    params: Params,
    members: Vec<IndSet>,
}

impl Family {
    /// Validates, sorts and deduplicates the given sets.
    pub fn new(params: Params, sets: impl IntoIterator<Item = IndSet>) -> Result<Self> {
        let mut members: Vec<IndSet> = sets.into_iter().collect();
        if let Some(bad) = members.iter().find(|s| !s.is_valid(&params)) {
            return Err(Error::InvalidSet(format!(
                "{{{}}} is not an {}-independent set of Γ_{{{},{}}}",
                bad.display(&params),
                params.r,
                params.n,
                params.k
            )));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { params, members })
    }

    /// For internal callers that already produce valid sets.
    pub(crate) fn from_valid(params: Params, mut members: Vec<IndSet>) -> Self {
        debug_assert!(members.iter().all(|s| s.is_valid(&params)));
        members.sort_unstable();
        members.dedup();
        Family { params, members }
    }

    pub fn empty(params: Params) -> Self {
        Family { params, members: Vec::new() }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn members(&self) -> &[IndSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, set: &IndSet) -> bool {
        self.members.binary_search(set).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IndSet> {
        self.members.iter()
    }

    /// Number of members containing each vertex slot, indexed by bit.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.params.slots()];
        for s in &self.members {
            for b in bits_of(s.0) {
                deg[b as usize] += 1;
            }
        }
        deg
    }

    /// Line-oriented text form: header `gamma n k r`, then one set per line.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = format!("gamma {} {} {}\n", p.n, p.k, p.r);
        for s in &self.members {
            if s.is_empty() {
                out.push('-');
            } else {
                out.push_str(&s.display(p).to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Blank lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_text_with_width(text, DEFAULT_WIDTH)
    }

    pub fn from_text_with_width(text: &str, width: u32) -> Result<Self> {
        let mut lines =
            text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "gamma" {
            return Err(Error::Parse { line: hline, msg: format!("expected `gamma n k r`, got {header:?}") });
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse { line: hline, msg: format!("bad integer {s:?}") });
        let params = Params::with_width(num(fields[1])?, num(fields[2])?, num(fields[3])?, width)?;
        let mut sets = Vec::new();
        for (line, l) in lines {
            // The empty set has no tokens, so a `-` placeholder stands for it.
            let tokens: Vec<&str> = if l == "-" { Vec::new() } else { l.split_whitespace().collect() };
            let verts = tokens
                .iter()
                .map(|t| t.parse::<Vertex>().map_err(|msg| Error::Parse { line, msg }))
                .collect::<Result<Vec<_>>>()?;
            let set = IndSet::from_vertices(&params, &verts).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            if !set.is_valid(&params) {
                return Err(Error::Parse { line, msg: format!("set has {} vertices, expected {}", set.len(), params.r) });
            }
            sets.push(set);
        }
        Ok(Family::from_valid(params, sets))
    }

    /// Compact form: comma-separated lowercase hex bit vectors.
    pub fn to_hex(&self) -> String {
        self.members.iter().map(|s| format!("{:x}", s.0)).collect::<Vec<_>>().join(",")
    }

    pub fn from_hex(params: Params, hex: &str) -> Result<Self> {
        let mut sets = Vec::new();
        for (i, tok) in hex.split(',').map(str::trim).filter(|t| !t.is_empty()).enumerate() {
            let bits = u128::from_str_radix(tok, 16).map_err(|e| Error::Parse { line: i + 1, msg: format!("{tok:?}: {e}") })?;
            sets.push(IndSet(bits));
        }
        Family::new(params, sets)
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a IndSet;
    type IntoIter = std::slice::Iter<'a, IndSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// `|I^r_{n,k}| = C(n, r) k^r`.
pub fn count_r_independent(params: &Params) -> u128 {
    mul(binom(params.n as i64, params.r as i64), pow(params.k as u128, params.r as u32))
}

/// All `r`-subsets of `[0, n)` as bit masks, in increasing numeric order.
pub(crate) fn subsets_of_size(n: usize, r: usize) -> Vec<u128> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    if r == 0 {
        out.push(0);
        return out;
    }
    if r == n {
        out.push(if n == 128 { u128::MAX } else { (1u128 << n) - 1 });
        return out;
    }
    // Gosper's hack over n-bit words.
    let mut x: u128 = (1u128 << r) - 1;
    let limit: u128 = if n == 128 { u128::MAX } else { 1u128 << n };
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let (rr, carry) = x.overflowing_add(c);
        if rr == 0 || carry {
            break;
        }
        x = (((rr ^ x) >> 2) / c) | rr;
    }
    out
}

/// Every member of `I^r_{n,k}`, in canonical order.
pub fn enumerate_r_independent(params: &Params) -> Family {
    let (n, k, r) = (params.n, params.k, params.r);
    let mut sets = Vec::with_capacity(count_r_independent(params).min(1 << 24) as usize);
    for cliques in subsets_of_size(n, r) {
        let chosen: Vec<usize> = (0..n).filter(|i| cliques >> i & 1 == 1).collect();
        // Odometer over the k^r position choices.
        let mut pos = vec![0usize; r];
        loop {
            let bits = chosen.iter().zip(&pos).fold(0u128, |acc, (&i, &j)| acc | 1u128 << (i * k + j));
            sets.push(IndSet(bits));
            let mut d = 0;
            while d < r {
                pos[d] += 1;
                if pos[d] < k {
                    break;
                }
                pos[d] = 0;
                d += 1;
            }
            if d == r {
                break;
            }
        }
    }
    Family::from_valid(*params, sets)
}

/// Every pair of members (including a member with itself) intersects.
///
/// The empty family is vacuously intersecting.
pub fn is_intersecting(family: &Family) -> bool {
    let m = family.members();
    m.iter().enumerate().all(|(i, a)| a.0 != 0 && m[i + 1..].iter().all(|b| a.intersects(b)))
}

/// Every member of `a` meets every member of `b`; both must be non-empty.
pub fn is_cross_intersecting(a: &Family, b: &Family) -> Result<bool> {
    check_same_params(a.params(), b.params())?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(a.iter().all(|x| b.iter().all(|y| x.intersects(y))))
}

pub(crate) fn check_same_params(a: &Params, b: &Params) -> Result<()> {
    if a.same_graph(b) {
        Ok(())
    } else {
        Err(Error::ParamsMismatch { left: a.to_string(), right: b.to_string() })
    }
}

/// Vertices lying in every member.
pub fn common_intersection(family: &Family) -> Result<Vec<Vertex>> {
    Ok(IndSet(common_intersection_bits(family)?).vertices(family.params()))
}

pub(crate) fn common_intersection_bits(family: &Family) -> Result<u128> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(family.iter().fold(u128::MAX, |acc, s| acc & s.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, k: usize, r: usize) -> Params {
        Params::new(n, k, r).unwrap()
    }

    /// Independent oracle: filter every bit pattern on n*k slots.
    fn brute_force(params: &Params) -> Vec<IndSet> {
        let slots = params.slots();
        assert!(slots <= 20);
        (0u128..1 << slots).map(IndSet).filter(|s| s.is_valid(params)).collect()
    }

    #[test]
    fn make_params_examples() {
        assert!(Params::new(3, 2, 2).is_ok());
        assert!(matches!(Params::new(3, 2, 4), Err(Error::Param(_))));
        assert_eq!(Params::new(40, 2, 3), Err(Error::Capacity { needed: 80, width: 64 }));
        assert!(Params::with_width(40, 2, 3, 128).is_ok());
        assert!(matches!(Params::new(0, 2, 0), Err(Error::Param(_))));
        assert!(matches!(Params::new(2, 0, 0), Err(Error::Param(_))));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (n, k, r) in [(2, 2, 1), (3, 2, 2), (2, 3, 2), (3, 3, 3), (4, 2, 3), (5, 3, 0), (4, 4, 2), (6, 1, 3)] {
            let params = p(n, k, r);
            let fam = enumerate_r_independent(&params);
            let oracle = brute_force(&params);
            assert_eq!(fam.members(), &oracle[..], "({n},{k},{r})");
            assert_eq!(fam.len() as u128, count_r_independent(&params));
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_r_independent(&p(2, 2, 1)).len(), 4);
        assert_eq!(enumerate_r_independent(&p(3, 2, 2)).len(), 12);
        assert_eq!(enumerate_r_independent(&p(2, 3, 2)).len(), 9);
        assert_eq!(count_r_independent(&p(3, 2, 2)), 12);
        assert_eq!(count_r_independent(&p(5, 4, 0)), 1);
        assert_eq!(count_r_independent(&p(4, 2, 1)), 8);
    }

    #[test]
    fn every_set_has_one_vertex_per_used_clique() {
        let params = p(5, 3, 3);
        for s in enumerate_r_independent(&params).iter() {
            assert_eq!(s.len(), 3);
            for i in 1..=5 {
                assert!((s.0 & params.clique_mask(i)).count_ones() <= 1);
            }
        }
    }

    #[test]
    fn intersection_predicates() {
        let params = p(3, 2, 1);
        let a = Family::new(params, [IndSet::from_vertices(&params, &[Vertex::new(1, 1)]).unwrap()]).unwrap();
        let b = Family::new(params, [IndSet::from_vertices(&params, &[Vertex::new(2, 1)]).unwrap()]).unwrap();
        assert!(is_intersecting(&a));
        assert!(!is_cross_intersecting(&a, &b).unwrap());
        assert_eq!(is_cross_intersecting(&a, &Family::empty(params)), Err(Error::EmptyFamily));
        let other = Family::empty(p(3, 2, 2));
        assert!(matches!(is_cross_intersecting(&a, &other), Err(Error::ParamsMismatch { .. })));
        assert_eq!(common_intersection(&a).unwrap(), vec![Vertex::new(1, 1)]);
        assert_eq!(common_intersection(&Family::empty(params)), Err(Error::EmptyFamily));
    }

    #[test]
    fn rejects_dependent_sets() {
        let params = p(3, 3, 2);
        assert!(IndSet::from_vertices(&params, &[Vertex::new(1, 1), Vertex::new(1, 2)]).is_err());
        assert!(IndSet::from_vertices(&params, &[Vertex::new(4, 1)]).is_err());
        assert!(Family::new(params, [IndSet(0b1)]).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let params = p(3, 2, 2);
        let fam = enumerate_r_independent(&params);
        let text = fam.to_text();
        assert!(text.starts_with("gamma 3 2 2\n1.1 2.1\n"));
        assert_eq!(Family::from_text(&text).unwrap(), fam);
        assert!(matches!(Family::from_text("gamma 3 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Family::from_text("gamma 3 2 2\n1.1 1.2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Family::from_text("gamma 3 2 2\n1.1\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(Family::from_hex(params, &fam.to_hex()).unwrap(), fam);
    }

    #[test]
    fn empty_set_line_round_trips() {
        let params = p(3, 2, 0);
        let fam = enumerate_r_independent(&params);
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.to_text(), "gamma 3 2 0\n-\n");
        assert_eq!(Family::from_text("gamma 3 2 0\n-\n").unwrap(), fam);
    }
}
