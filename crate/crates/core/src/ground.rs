//! Subsets of `[n]` of size at most `r`: the universe that families in
//! `Γ_{n,k}` project onto.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::gamma::{bits_of, subsets_of_size};

/// A subset of `[n]`; element `i` is bit `i - 1`.
///
/// Ordered by cardinality, then lexicographically on the sorted element
/// lists (`{1,2} < {1,3} < {2,3}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct GroundSet(pub u128);

impl GroundSet {
    pub const EMPTY: GroundSet = GroundSet(0);

    /// From 1-based elements. Panics on `0` or elements above 128.
    pub fn from_elems(elems: &[usize]) -> Self {
        GroundSet(elems.iter().fold(0u128, |m, &e| {
            assert!((1..=128).contains(&e), "ground element {e} out of range");
            m | 1u128 << (e - 1)
        }))
    }

    /// `{lo, ..., hi}`; empty when `lo > hi`.
    pub fn interval(lo: usize, hi: usize) -> Self {
        GroundSet::from_elems(&(lo..=hi).collect::<Vec<_>>())
    }

    pub fn elems(&self) -> Vec<usize> {
        bits_of(self.0).map(|b| b as usize + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        (1..=128).contains(&e) && self.0 >> (e - 1) & 1 == 1
    }

    pub fn intersects(&self, other: &GroundSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(&self, other: &GroundSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within `[n]`.
    pub fn complement(&self, n: usize) -> GroundSet {
        GroundSet(!self.0 & full_mask(n))
    }
}

impl Ord for GroundSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let d = self.0 ^ other.0;
            if d == 0 {
                Ordering::Equal
            } else if self.0 & d & d.wrapping_neg() != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for GroundSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.elems().iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

pub(crate) fn full_mask(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Every subset of `[n]` with at most `r` elements, in [`GroundSet`] order.
pub fn all_ground_sets(n: usize, r: usize) -> Vec<GroundSet> {
    let mut out = Vec::new();
    for size in 0..=r.min(n) {
        let mut block: Vec<GroundSet> = subsets_of_size(n, size).into_iter().map(GroundSet).collect();
        block.sort_unstable();
        out.extend(block);
    }
    out
}

/// A sorted, duplicate-free family of subsets of `[n]` of size at most `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundFamily {
    n: usize,
    r: usize,
    members: Vec<GroundSet>,
}

impl GroundFamily {
    pub fn new(n: usize, r: usize, sets: impl IntoIterator<Item = GroundSet>) -> Result<Self> {
        check_ground_params(n, r)?;
        let mask = full_mask(n);
        let mut members: Vec<GroundSet> = sets.into_iter().collect();
        for s in &members {
            if s.0 & !mask != 0 {
                return Err(Error::InvalidSet(format!("{{{s}}} is not a subset of [{n}]")));
            }
            if s.len() > r {
                return Err(Error::InvalidSet(format!("{{{s}}} has more than {r} elements")));
            }
        }
        members.sort_unstable();
        members.dedup();
        Ok(GroundFamily { n, r, members })
    }

    pub(crate) fn from_valid(n: usize, r: usize, mut members: Vec<GroundSet>) -> Self {
        members.sort_unstable();
        members.dedup();
        GroundFamily { n, r, members }
    }

    pub fn empty(n: usize, r: usize) -> Result<Self> {
        GroundFamily::new(n, r, [])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn members(&self) -> &[GroundSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &GroundSet) -> bool {
        self.members.binary_search(s).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroundSet> {
        self.members.iter()
    }

    /// The members of size exactly `l`.
    pub fn uniform_part(&self, l: usize) -> GroundFamily {
        let members = self.members.iter().filter(|s| s.len() == l).copied().collect();
        GroundFamily { n: self.n, r: self.r, members }
    }

    /// `|B(l)|` without building the part.
    pub fn uniform_count(&self, l: usize) -> usize {
        self.members.iter().filter(|s| s.len() == l).count()
    }

    /// Every pair of members (a member with itself included) intersects.
    pub fn is_intersecting(&self) -> bool {
        self.members.iter().all(|a| self.members.iter().all(|b| a.intersects(b)))
    }

    pub fn common_intersection(&self) -> Result<GroundSet> {
        if self.members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(GroundSet(self.members.iter().fold(full_mask(self.n), |m, s| m & s.0)))
    }

    /// Number of members containing each element, indexed by `element - 1`.
    pub fn element_degrees(&self) -> Vec<usize> {
        (1..=self.n).map(|e| self.members.iter().filter(|s| s.contains(e)).count()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("ground {} {}\n", self.n, self.r);
        for s in &self.members {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines =
            text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing `ground n r` header".into() })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || Error::Parse { line: hl, msg: format!("expected `ground n r`, got {header:?}") };
        if parts.len() != 3 || parts[0] != "ground" {
            return Err(bad_header());
        }
        let n: usize = parts[1].parse().map_err(|_| bad_header())?;
        let r: usize = parts[2].parse().map_err(|_| bad_header())?;
        check_ground_params(n, r).map_err(|e| Error::Parse { line: hl, msg: e.to_string() })?;
        let mut sets = Vec::new();
        for (ln, line) in lines {
            if line == "-" {
                sets.push(GroundSet::EMPTY);
                continue;
            }
            let mut elems = Vec::new();
            for tok in line.split_whitespace() {
                let e: usize = tok.parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad element {tok:?}") })?;
                if e == 0 || e > n {
                    return Err(Error::Parse { line: ln, msg: format!("element {e} outside [1, {n}]") });
                }
                elems.push(e);
            }
            sets.push(GroundSet::from_elems(&elems));
        }
        GroundFamily::new(n, r, sets).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }

    /// Comma-joined lowercase hex of the member bit masks, in family order.
    pub fn to_hex(&self) -> String {
        self.members.iter().map(|s| format!("{:x}", s.0)).collect::<Vec<_>>().join(",")
    }
}

impl<'a> IntoIterator for &'a GroundFamily {
    type Item = &'a GroundSet;
    type IntoIter = std::slice::Iter<'a, GroundSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

fn check_ground_params(n: usize, r: usize) -> Result<()> {
    if n == 0 || n > 128 {
        return Err(Error::Param(format!("ground size n = {n} must be in [1, 128]")));
    }
    if r > n {
        return Err(Error::Param(format!("r = {r} exceeds n = {n}")));
    }
    Ok(())
}

pub(crate) fn check_same_ground(a: &GroundFamily, b: &GroundFamily) -> Result<()> {
    if (a.n, a.r) != (b.n, b.r) {
        return Err(Error::ParamsMismatch { left: format!("ground {} {}", a.n, a.r), right: format!("ground {} {}", b.n, b.r) });
    }
    Ok(())
}

/// Every member of `s` meets every member of `t`; both must be non-empty.
pub fn ground_cross_intersecting(s: &GroundFamily, t: &GroundFamily) -> Result<bool> {
    check_same_ground(s, t)?;
    if s.is_empty() || t.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(s.iter().all(|a| t.iter().all(|b| a.intersects(b))))
}
