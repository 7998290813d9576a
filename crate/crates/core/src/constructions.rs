//! The named extremal families and their closed-form sizes.
//!
//! Every construction uses the literal anchor labels: the star at `(1,1)`,
//! the extra set `H = [2, r+1] × {1}`, and the set `[r] × {1}` of the cross
//! pair. Isomorphic copies come from relabelling with [`crate::iso`].

use std::fmt;
use std::str::FromStr;

use crate::binom::{binom, mul, pow, pow_signed};
use crate::error::{Error, Result};
use crate::gamma::{enumerate_r_independent, Family, IndSet, Params, Vertex};

/// Which named family a [`NamedFamily`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    /// Star `E^r_{n,k}` at a vertex.
    Ekr,
    /// Hilton–Milner family `H^r_{n,k}`.
    Hm,
    /// Singleton side `{[r] × {1}}` of the cross pair.
    HmCrossH,
    /// Large side of the cross pair: everything meeting `[r] × {1}`.
    HmCrossM,
    /// `r = 3` family of sets holding two of `(1,1), (2,1), (3,1)`.
    Triangle,
    /// The `r = n` extremal family with empty common intersection.
    MainRn,
}

impl Tag {
    pub const ALL: [Tag; 6] = [Tag::Ekr, Tag::Hm, Tag::HmCrossH, Tag::HmCrossM, Tag::Triangle, Tag::MainRn];

    pub fn name(&self) -> &'static str {
        match self {
            Tag::Ekr => "ekr",
            Tag::Hm => "hm",
            Tag::HmCrossH => "hm-cross-h",
            Tag::HmCrossM => "hm-cross-m",
            Tag::Triangle => "triangle",
            Tag::MainRn => "main-rn",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tag::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| Error::Param(format!("unknown family tag {s:?}")))
    }
}

/// A family together with the construction that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedFamily {
    pub tag: Tag,
    pub family: Family,
}

impl NamedFamily {
    /// Builds the tagged family at its literal anchor.
    pub fn build(tag: Tag, params: Params) -> Result<Self> {
        let family = match tag {
            Tag::Ekr => ekr_family(&params, Vertex::new(1, 1))?,
            Tag::Hm => hm_family(&params)?,
            Tag::HmCrossH => hm_cross_pair(&params)?.0,
            Tag::HmCrossM => hm_cross_pair(&params)?.1,
            Tag::Triangle => triangle_family(&params)?,
            Tag::MainRn => {
                if params.r() != params.n() {
                    return Err(Error::Range(format!("main-rn needs r = n, got {params}")));
                }
                main_rn_family(params.n(), params.k())?
            }
        };
        Ok(NamedFamily { tag, family })
    }

    /// Closed-form size of the tagged family.
    pub fn expected_size(tag: Tag, params: &Params) -> Result<u128> {
        match tag {
            Tag::Ekr => ekr_size(params),
            Tag::Hm => hm_size(params),
            Tag::HmCrossH => Ok(1),
            Tag::HmCrossM => hm_cross_m_size(params),
            Tag::Triangle => triangle_size(params),
            Tag::MainRn => main_rn_size(params.n(), params.k()),
        }
    }

    /// `named <tag>` followed by the family's text form.
    pub fn to_text(&self) -> String {
        format!("named {}\n{}", self.tag, self.family.to_text())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let tag = first
            .trim()
            .strip_prefix("named ")
            .ok_or(Error::Parse { line: 1, msg: format!("expected `named <tag>`, got {first:?}") })?
            .trim()
            .parse()?;
        let family = Family::from_text(rest).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse { line: line + 1, msg },
            other => other,
        })?;
        Ok(NamedFamily { tag, family })
    }
}

fn first_positions(params: &Params, cliques: impl IntoIterator<Item = usize>) -> u128 {
    cliques.into_iter().fold(0u128, |m, i| m | 1u128 << Vertex::new(i, 1).bit(params))
}

fn check_r_range(params: &Params, lo: usize, hi: usize, what: &str) -> Result<()> {
    let r = params.r();
    if r < lo || r > hi {
        return Err(Error::Range(format!("{what} needs {lo} <= r <= {hi}, got {params}")));
    }
    Ok(())
}

/// All members of `I^r_{n,k}` through `anchor`.
pub fn ekr_family(params: &Params, anchor: Vertex) -> Result<Family> {
    check_r_range(params, 1, params.n(), "the star")?;
    anchor.check(params)?;
    let bit = 1u128 << anchor.bit(params);
    let members = enumerate_r_independent(params).iter().filter(|s| s.0 & bit != 0).copied().collect();
    Ok(Family::from_valid(*params, members))
}

/// `C(n-1, r-1) k^(r-1)`.
pub fn ekr_size(params: &Params) -> Result<u128> {
    check_r_range(params, 1, params.n(), "the star")?;
    let (n, k, r) = (params.n() as i64, params.k() as u128, params.r() as i64);
    Ok(mul(binom(n - 1, r - 1), pow(k, (r - 1) as u32)))
}

/// The extra set `H = [2, r+1] × {1}` of the Hilton–Milner family.
pub fn hm_extra_set(params: &Params) -> Result<IndSet> {
    check_r_range(params, 1, params.n() - 1, "H = [2, r+1] x {1}")?;
    Ok(IndSet(first_positions(params, 2..=params.r() + 1)))
}

/// `{F ∈ E^r_{n,k} : F ∩ H ≠ ∅} ∪ {H}` with `H = [2, r+1] × {1}`.
pub fn hm_family(params: &Params) -> Result<Family> {
    check_r_range(params, 2, params.n() - 1, "the Hilton-Milner family")?;
    let h = hm_extra_set(params)?;
    let star = ekr_family(params, Vertex::new(1, 1))?;
    let mut members: Vec<IndSet> = star.iter().filter(|s| s.intersects(&h)).copied().collect();
    members.push(h);
    Ok(Family::from_valid(*params, members))
}

/// `1 + Σ_{j=1}^{r-1} C(r,j) C(n-r-1, r-j-1) k^(r-j-1) (k^j - (k-1)^j)`.
pub fn hm_size(params: &Params) -> Result<u128> {
    check_r_range(params, 2, params.n() - 1, "the Hilton-Milner family")?;
    let (n, k, r) = (params.n() as i64, params.k() as u128, params.r() as i64);
    let mut total = 1u128;
    for j in 1..r {
        let diff = pow(k, j as u32) - pow(k - 1, j as u32);
        total += mul(mul(binom(r, j), binom(n - r - 1, r - j - 1)), mul(pow_signed(k, r - j - 1), diff));
    }
    Ok(total)
}

/// The same size counted as the star minus the sets missing `H`, plus `H`:
/// `C(n-1,r-1) k^(r-1) - Σ_{j=0}^{r-1} C(r,j) (k-1)^j C(n-r-1,r-j-1) k^(r-j-1) + 1`.
pub fn hm_size_by_removal(params: &Params) -> Result<u128> {
    check_r_range(params, 2, params.n() - 1, "the Hilton-Milner family")?;
    let (n, k, r) = (params.n() as i64, params.k() as u128, params.r() as i64);
    let removed: u128 = (0..r)
        .map(|j| mul(mul(binom(r, j), pow(k - 1, j as u32)), mul(binom(n - r - 1, r - j - 1), pow_signed(k, r - j - 1))))
        .sum();
    Ok(ekr_size(params)? - removed + 1)
}

/// `({[r] × {1}}, {X ∈ I^r_{n,k} : X ∩ ([r] × {1}) ≠ ∅})`.
pub fn hm_cross_pair(params: &Params) -> Result<(Family, Family)> {
    check_r_range(params, 1, params.n(), "the cross pair")?;
    let core = IndSet(first_positions(params, 1..=params.r()));
    let meets = enumerate_r_independent(params).iter().filter(|s| s.intersects(&core)).copied().collect();
    Ok((Family::from_valid(*params, vec![core]), Family::from_valid(*params, meets)))
}

/// Size of the large side: `C(n,r) k^r - Σ_j C(r,j) (k-1)^j C(n-r, r-j) k^(r-j)`.
pub fn hm_cross_m_size(params: &Params) -> Result<u128> {
    check_r_range(params, 1, params.n(), "the cross pair")?;
    let (n, k, r) = (params.n() as i64, params.k() as u128, params.r() as i64);
    let total = mul(binom(n, r), pow(k, r as u32));
    let missing: u128 =
        (0..=r).map(|j| mul(mul(binom(r, j), pow(k - 1, j as u32)), mul(binom(n - r, r - j), pow_signed(k, r - j)))).sum();
    Ok(total - missing)
}

/// `|𝕳| + |𝕸|` for the cross pair.
pub fn hm_cross_sum(params: &Params) -> Result<u128> {
    Ok(1 + hm_cross_m_size(params)?)
}

/// All `X ∈ I^3_{n,k}` holding at least two of `(1,1), (2,1), (3,1)`.
pub fn triangle_family(params: &Params) -> Result<Family> {
    if params.r() != 3 {
        return Err(Error::Range(format!("the triangle family needs r = 3, got {params}")));
    }
    let tri = first_positions(params, 1..=3);
    let members = enumerate_r_independent(params).iter().filter(|s| (s.0 & tri).count_ones() >= 2).copied().collect();
    Ok(Family::from_valid(*params, members))
}

/// `3kn - 6k - 2`.
pub fn triangle_size(params: &Params) -> Result<u128> {
    if params.r() != 3 {
        return Err(Error::Range(format!("the triangle family needs r = 3, got {params}")));
    }
    let (n, k) = (params.n() as u128, params.k() as u128);
    Ok(3 * k * n - 6 * k - 2)
}

/// The `r = n` family: sets through `(1,1)` meeting `[2,n] × {1}`, plus
/// `{(1,i)} ∪ ([2,n] × {1})` for every `i ≥ 2`.
pub fn main_rn_family(n: usize, k: usize) -> Result<Family> {
    if k < 2 {
        return Err(Error::Range(format!("the r = n family needs k >= 2, got k = {k}")));
    }
    if n < 2 {
        return Err(Error::Range(format!("the r = n family needs n >= 2, got n = {n}")));
    }
    let params = Params::new(n, k, n)?;
    let rest = first_positions(&params, 2..=n);
    let anchor = 1u128 << Vertex::new(1, 1).bit(&params);
    let mut members: Vec<IndSet> =
        enumerate_r_independent(&params).iter().filter(|s| s.0 & anchor != 0 && s.0 & rest != 0).copied().collect();
    for i in 2..=k {
        members.push(IndSet(rest | 1u128 << Vertex::new(1, i).bit(&params)));
    }
    Ok(Family::from_valid(params, members))
}

/// `k^(n-1) - (k-1)^(n-1) + k - 1`.
pub fn main_rn_size(n: usize, k: usize) -> Result<u128> {
    if k < 2 || n < 2 {
        return Err(Error::Range(format!("the r = n family needs n, k >= 2, got n = {n}, k = {k}")));
    }
    let k = k as u128;
    Ok(pow(k, n as u32 - 1) - pow(k - 1, n as u32 - 1) + k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{common_intersection, count_r_independent, is_cross_intersecting, is_intersecting};

    fn p(n: usize, k: usize, r: usize) -> Params {
        Params::new(n, k, r).unwrap()
    }

    /// Oracle: count members of I^r by a membership predicate.
    fn count_where(params: &Params, pred: impl Fn(&IndSet) -> bool) -> usize {
        enumerate_r_independent(params).iter().filter(|s| pred(s)).count()
    }

    fn set(params: &Params, vs: &[(usize, usize)]) -> IndSet {
        let verts: Vec<Vertex> = vs.iter().map(|&(i, j)| Vertex::new(i, j)).collect();
        IndSet::from_vertices(params, &verts).unwrap()
    }

    #[test]
    fn ekr_examples() {
        assert_eq!(ekr_size(&p(3, 2, 2)).unwrap(), 4);
        assert_eq!(ekr_family(&p(3, 2, 2), Vertex::new(1, 1)).unwrap().len(), 4);
        assert_eq!(ekr_size(&p(4, 2, 3)).unwrap(), 12);
        assert_eq!(ekr_family(&p(4, 2, 3), Vertex::new(1, 1)).unwrap().len(), 12);
        assert_eq!(ekr_size(&p(4, 3, 4)).unwrap(), 27);
        assert!(matches!(ekr_family(&p(3, 2, 2), Vertex::new(4, 1)), Err(Error::InvalidVertex(_))));
    }

    #[test]
    fn ekr_size_is_anchor_independent() {
        for (n, k, r) in [(3, 2, 2), (4, 3, 3), (5, 2, 4), (4, 4, 2)] {
            let params = p(n, k, r);
            for i in 1..=n {
                for j in 1..=k {
                    let fam = ekr_family(&params, Vertex::new(i, j)).unwrap();
                    assert_eq!(fam.len() as u128, ekr_size(&params).unwrap());
                    assert_eq!(common_intersection(&fam).unwrap(), vec![Vertex::new(i, j)]);
                }
            }
        }
    }

    #[test]
    fn hm_examples() {
        for n in 3..=7 {
            for k in 1..=4 {
                assert_eq!(hm_size(&p(n, k, 2)).unwrap(), 3, "r = 2 gives 3");
            }
        }
        assert_eq!(hm_size(&p(4, 2, 3)).unwrap(), 10);
        assert_eq!(hm_family(&p(4, 2, 3)).unwrap().len(), 10);
        assert_eq!(hm_size(&p(5, 2, 4)).unwrap(), 29);
        assert_eq!(hm_family(&p(5, 2, 4)).unwrap().len(), 29);
        assert!(matches!(hm_family(&p(4, 2, 4)), Err(Error::Range(_))));
        assert!(matches!(hm_size(&p(4, 2, 1)), Err(Error::Range(_))));
    }

    #[test]
    fn r3_hm_size_matches_triangle_formula() {
        for n in 4..=9 {
            for k in 1..=5 {
                let params = p(n, k, 3);
                assert_eq!(hm_size(&params).unwrap(), triangle_size(&params).unwrap());
            }
        }
    }

    #[test]
    fn hm_closed_forms_match_membership_count() {
        for n in 3..=7 {
            for k in 1..=4 {
                for r in 2..n {
                    let params = p(n, k, r);
                    let anchor = set(&params, &[(1, 1)]).0;
                    let h = first_positions(&params, 2..=r + 1);
                    let oracle = count_where(&params, |s| (s.0 & anchor != 0 && s.0 & h != 0) || s.0 == h);
                    assert_eq!(hm_size(&params).unwrap(), oracle as u128, "{params}");
                    assert_eq!(hm_size_by_removal(&params).unwrap(), oracle as u128, "{params}");
                }
            }
        }
    }

    #[test]
    fn hm_family_is_intersecting_with_empty_cap() {
        for (n, k, r) in [(4, 2, 3), (5, 3, 3), (5, 2, 4), (6, 2, 2)] {
            let fam = hm_family(&p(n, k, r)).unwrap();
            assert!(is_intersecting(&fam));
            assert!(common_intersection(&fam).unwrap().is_empty());
        }
    }

    #[test]
    fn cross_pair_examples() {
        let sizes = |n, k, r| {
            let (h, m) = hm_cross_pair(&p(n, k, r)).unwrap();
            (h.len(), m.len())
        };
        assert_eq!(sizes(3, 2, 2), (1, 7));
        assert_eq!(sizes(4, 2, 3), (1, 25));
        assert_eq!(sizes(3, 1, 3), (1, 1));
        assert_eq!(sizes(2, 2, 2), (1, 3));
        for (n, k, r) in [(3, 2, 2), (4, 2, 3), (5, 3, 4), (4, 3, 4), (6, 2, 1)] {
            let params = p(n, k, r);
            let (h, m) = hm_cross_pair(&params).unwrap();
            assert!(is_cross_intersecting(&h, &m).unwrap());
            assert_eq!(m.len() as u128, hm_cross_m_size(&params).unwrap());
            let core = h.members()[0];
            let oracle = count_where(&params, |s| s.intersects(&core));
            assert_eq!(m.len(), oracle);
        }
    }

    #[test]
    fn cross_sum_is_below_hm_one_level_up() {
        for n in 4..=10 {
            for k in 2..=4 {
                for r in 3..n {
                    let lower = p(n - 1, k, r - 1);
                    let upper = p(n, k, r);
                    assert!(hm_cross_sum(&lower).unwrap() < hm_size(&upper).unwrap(), "{upper}");
                }
            }
        }
        // With one vertex per clique the gap closes once n < 2r - 1.
        assert_eq!(hm_cross_sum(&p(3, 1, 2)).unwrap(), hm_size(&p(4, 1, 3)).unwrap());
    }

    #[test]
    fn triangle_examples() {
        let t = triangle_family(&p(4, 2, 3)).unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(t.len() as u128, hm_size(&p(4, 2, 3)).unwrap());
        assert_eq!(triangle_family(&p(3, 2, 3)).unwrap().len(), 4);
        assert_eq!(triangle_size(&p(3, 2, 3)).unwrap(), 4);
        assert_eq!(triangle_family(&p(5, 3, 3)).unwrap().len(), 25);
        assert_eq!(triangle_size(&p(5, 3, 3)).unwrap(), 25);
        assert!(is_intersecting(&t));
        assert!(common_intersection(&t).unwrap().is_empty());
        assert!(matches!(triangle_family(&p(4, 2, 2)), Err(Error::Range(_))));
    }

    #[test]
    fn triangle_and_hm_degree_profiles_differ() {
        for n in 4..=6 {
            for k in 2..=3 {
                let params = p(n, k, 3);
                let (k, n) = (k, n);
                let base = (k - 1) + (n - 3) * k;
                let tri = triangle_family(&params).unwrap().vertex_degrees();
                let hm = hm_family(&params).unwrap().vertex_degrees();
                let tri_max = *tri.iter().max().unwrap();
                let hm_max = *hm.iter().max().unwrap();
                assert_eq!(tri_max, 1 + 2 * base);
                assert_eq!(hm_max, 3 * base);
                assert_ne!(tri_max, hm_max);
                // Per-vertex counts from the separating argument.
                for i in 1..=n {
                    for j in 1..=k {
                        let d = tri[Vertex::new(i, j).bit(&params) as usize];
                        let want = if i <= 3 && j == 1 {
                            1 + 2 * base
                        } else if i <= 3 {
                            1
                        } else {
                            3
                        };
                        assert_eq!(d, want, "({i},{j}) in {params}");
                    }
                }
            }
        }
    }

    #[test]
    fn main_rn_examples() {
        assert_eq!(main_rn_family(4, 2).unwrap().len(), 8);
        assert_eq!(main_rn_size(4, 2).unwrap(), 8);
        assert_eq!(main_rn_family(3, 3).unwrap().len(), 7);
        assert_eq!(main_rn_size(3, 3).unwrap(), 7);
        assert_eq!(main_rn_family(5, 2).unwrap().len(), 16);
        assert_eq!(main_rn_size(5, 2).unwrap(), 16);
        assert!(matches!(main_rn_family(4, 1), Err(Error::Range(_))));
        for (n, k) in [(3, 2), (3, 3), (4, 3), (5, 2)] {
            let fam = main_rn_family(n, k).unwrap();
            assert_eq!(fam.len() as u128, main_rn_size(n, k).unwrap());
            assert!(is_intersecting(&fam));
            assert!(common_intersection(&fam).unwrap().is_empty());
        }
    }

    #[test]
    fn named_family_text_round_trip() {
        let nf = NamedFamily::build(Tag::Hm, p(4, 2, 3)).unwrap();
        let text = nf.to_text();
        assert!(text.starts_with("named hm\ngamma 4 2 3\n"));
        assert_eq!(NamedFamily::from_text(&text).unwrap(), nf);
        for tag in Tag::ALL {
            assert_eq!(tag.name().parse::<Tag>().unwrap(), tag);
        }
        assert!("nope".parse::<Tag>().is_err());
    }

    #[test]
    fn named_sizes_match_builds() {
        for tag in Tag::ALL {
            let params = match tag {
                Tag::MainRn => p(4, 3, 4),
                _ => p(5, 3, 3),
            };
            let nf = NamedFamily::build(tag, params).unwrap();
            assert_eq!(nf.family.len() as u128, NamedFamily::expected_size(tag, &params).unwrap(), "{tag}");
        }
        assert!(count_r_independent(&p(5, 3, 3)) > 0);
    }
}
