//! Families in the bounded universe `C([n], ≤ r)`: up-closure,
//! maximalization, the `V`, `X`, `Y` families and the numeric facts used to
//! compare uniform parts.
//!
//! Random families for property checks come from [`random_intersecting`] and
//! [`random_cross_pair`]: every candidate set is drawn independently with
//! probability `p`, the draw is repaired by greedy deletion in scan order,
//! and the result is maximalized.

use rand::Rng;

use crate::binom::binom;
use crate::error::{Error, Result};
use crate::ground::{all_ground_sets, check_same_ground, ground_cross_intersecting, GroundFamily, GroundSet};
use crate::shift::coef;

/// Smallest up-family in `C([n], ≤ r)` containing `g`.
pub fn up_closure(g: &GroundFamily) -> GroundFamily {
    let members = all_ground_sets(g.n(), g.r()).into_iter().filter(|s| g.iter().any(|m| m.is_subset(s))).collect();
    GroundFamily::from_valid(g.n(), g.r(), members)
}

pub fn is_up_family(g: &GroundFamily) -> bool {
    up_closure(g) == *g
}

/// Scans `C([n], ≤ r)` in order and adds every set meeting all current
/// members.
pub fn maximalize_intersecting(g: &GroundFamily) -> Result<GroundFamily> {
    if !g.is_intersecting() {
        return Err(Error::Precondition("family is not intersecting".into()));
    }
    let mut members = g.members().to_vec();
    for s in all_ground_sets(g.n(), g.r()) {
        if !s.is_empty() && !g.contains(&s) && members.iter().all(|m| m.intersects(&s)) {
            members.push(s);
        }
    }
    Ok(GroundFamily::from_valid(g.n(), g.r(), members))
}

/// One scan of `C([n], ≤ r)`; each candidate is offered to `S` first, then
/// to `T`.
pub fn maximalize_cross_pair(s: &GroundFamily, t: &GroundFamily) -> Result<(GroundFamily, GroundFamily)> {
    if !ground_cross_intersecting(s, t)? {
        return Err(Error::Precondition("pair is not cross-intersecting".into()));
    }
    let mut sm = s.members().to_vec();
    let mut tm = t.members().to_vec();
    for x in all_ground_sets(s.n(), s.r()) {
        if !s.contains(&x) && tm.iter().all(|m| m.intersects(&x)) {
            sm.push(x);
        }
        if !t.contains(&x) && sm.iter().all(|m| m.intersects(&x)) {
            tm.push(x);
        }
    }
    Ok((GroundFamily::from_valid(s.n(), s.r(), sm), GroundFamily::from_valid(t.n(), t.r(), tm)))
}

/// Intersecting, and no further set of `C([n], ≤ r)` can be added.
pub fn is_r_maximal_intersecting(g: &GroundFamily) -> bool {
    g.is_intersecting()
        && all_ground_sets(g.n(), g.r()).iter().all(|x| g.contains(x) || x.is_empty() || g.iter().any(|m| !m.intersects(x)))
}

pub fn is_r_maximal_cross_pair(s: &GroundFamily, t: &GroundFamily) -> Result<bool> {
    if !ground_cross_intersecting(s, t)? {
        return Ok(false);
    }
    Ok(all_ground_sets(s.n(), s.r())
        .iter()
        .all(|x| (s.contains(x) || t.iter().any(|m| !m.intersects(x))) && (t.contains(x) || s.iter().any(|m| !m.intersects(x)))))
}

fn check_v_range(n: usize, r: usize) -> Result<()> {
    if r == 0 || r + 1 > n {
        return Err(Error::Range(format!("V needs 1 <= r <= n - 1, got n = {n}, r = {r}")));
    }
    Ok(())
}

/// `{[2, r+1]} ∪ {X : 1 ∈ X, X ∩ [2, r+1] ≠ ∅}`.
pub fn v_family(n: usize, r: usize) -> Result<GroundFamily> {
    check_v_range(n, r)?;
    let h = GroundSet::interval(2, r + 1);
    let members = all_ground_sets(n, r).into_iter().filter(|x| *x == h || (x.contains(1) && x.intersects(&h))).collect();
    Ok(GroundFamily::from_valid(n, r, members))
}

/// `{[r]}`.
pub fn x_family(n: usize, r: usize) -> Result<GroundFamily> {
    if r == 0 || r > n {
        return Err(Error::Range(format!("X needs 1 <= r <= n, got n = {n}, r = {r}")));
    }
    GroundFamily::new(n, r, [GroundSet::interval(1, r)])
}

/// Every set meeting `[r]`.
pub fn y_family(n: usize, r: usize) -> Result<GroundFamily> {
    if r == 0 || r > n {
        return Err(Error::Range(format!("Y needs 1 <= r <= n, got n = {n}, r = {r}")));
    }
    let core = GroundSet::interval(1, r);
    let members = all_ground_sets(n, r).into_iter().filter(|x| x.intersects(&core)).collect();
    Ok(GroundFamily::from_valid(n, r, members))
}

/// `|V_{n,r}(l)|`: `C(n-1,l-1) - C(n-r-1,l-1)`, plus one at `l = r`.
pub fn v_uniform_size(n: usize, r: usize, l: usize) -> Result<u128> {
    check_v_range(n, r)?;
    if l == 0 || l > r {
        return Ok(0);
    }
    let (n, r, l) = (n as i64, r as i64, l as i64);
    let base = binom(n - 1, l - 1) - binom(n - r - 1, l - 1);
    Ok(if l == r { base + 1 } else { base })
}

/// `|X_{n,r}(l)| + |Y_{n,r}(l)|`.
pub fn xy_uniform_size(n: usize, r: usize, l: usize) -> u128 {
    if l == 0 || l > r {
        return 0;
    }
    let (ni, ri, li) = (n as i64, r as i64, l as i64);
    let y = binom(ni, li) - binom(ni - ri, li);
    if l == r {
        y + 1
    } else {
        y
    }
}

fn check_complement_range(n: usize, r: usize, l: usize) -> Result<()> {
    if 2 * r < n || r > n {
        return Err(Error::Precondition(format!("needs n/2 <= r <= n, got n = {n}, r = {r}")));
    }
    if l > r || n < l || n - l > r {
        return Err(Error::Precondition(format!("needs l <= r and n - l <= r, got l = {l}")));
    }
    Ok(())
}

/// `|S(n-l)| + |T(n-l)| + |S(l)| + |T(l)| = 2 C(n, l)` for an `r`-maximal
/// cross-intersecting pair.
pub fn check_complement_identity(s: &GroundFamily, t: &GroundFamily, l: usize) -> Result<bool> {
    check_same_ground(s, t)?;
    let (n, r) = (s.n(), s.r());
    check_complement_range(n, r, l)?;
    if !is_r_maximal_cross_pair(s, t)? {
        return Err(Error::Precondition("pair is not r-maximal cross-intersecting".into()));
    }
    let total = s.uniform_count(n - l) + t.uniform_count(n - l) + s.uniform_count(l) + t.uniform_count(l);
    Ok(total as u128 == 2 * binom(n as i64, l as i64))
}

/// The same four-term sum computed for `(X_{n,r}, Y_{n,r})`.
pub fn xy_complement_sum(n: usize, r: usize, l: usize) -> u128 {
    xy_uniform_size(n, r, n - l) + xy_uniform_size(n, r, l)
}

/// `|B(n-l)| + |B(l)| = |V(n-l)| + |V(l)|` for an `r`-maximal intersecting
/// family, `r ≤ n - 1`.
pub fn check_intersecting_complement_identity(b: &GroundFamily, l: usize) -> Result<bool> {
    let (n, r) = (b.n(), b.r());
    check_complement_range(n, r, l)?;
    check_v_range(n, r)?;
    if !is_r_maximal_intersecting(b) {
        return Err(Error::Precondition("family is not r-maximal intersecting".into()));
    }
    let lhs = (b.uniform_count(n - l) + b.uniform_count(l)) as u128;
    Ok(lhs == v_uniform_size(n, r, n - l)? + v_uniform_size(n, r, l)?)
}

/// Upper bound on `|S(l)| + |T(l)|`: `C(n,l) - C(n-r,l)` for `l < r`,
/// `1 + C(n,r) - C(n-r,r)` at `l = r`.
pub fn cint_uniform_bound(n: usize, r: usize, l: usize) -> Result<u128> {
    if n < 3 || r < 2 || r > n {
        return Err(Error::Precondition(format!("needs n >= 3 and 2 <= r <= n, got n = {n}, r = {r}")));
    }
    if l > r.min(n / 2) {
        return Err(Error::Precondition(format!("needs l <= min(r, n/2), got l = {l}")));
    }
    Ok(xy_uniform_size(n, r, l))
}

pub fn check_cint_bound(s: &GroundFamily, t: &GroundFamily, l: usize) -> Result<bool> {
    check_same_ground(s, t)?;
    let bound = cint_uniform_bound(s.n(), s.r(), l)?;
    if !is_r_maximal_cross_pair(s, t)? {
        return Err(Error::Precondition("pair is not r-maximal cross-intersecting".into()));
    }
    Ok((s.uniform_count(l) + t.uniform_count(l)) as u128 <= bound)
}

/// Which side of a "≥ with equality iff" statement a check landed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    Strict,
    Equality,
}

/// Outcome of a numeric check: whether the claimed statement held, and
/// which clause fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Check {
    pub holds: bool,
    pub clause: Clause,
}

/// `C(n-m,m) - C(n-r,m) ≥ 1`, with equality iff `r = m+1` and `n = 2m`.
pub fn binom_diff_check(n: usize, m: usize, r: usize) -> Result<Check> {
    if m == 0 || m >= r || r > n || 2 * m > n {
        return Err(Error::Precondition(format!("needs 1 <= m < r <= n and 2m <= n, got n = {n}, m = {m}, r = {r}")));
    }
    let (ni, mi, ri) = (n as i64, m as i64, r as i64);
    let d = binom(ni - mi, mi) as i128 - binom(ni - ri, mi) as i128;
    let eq = d == 1;
    Ok(Check { holds: d >= 1 && eq == (r == m + 1 && n == 2 * m), clause: if eq { Clause::Equality } else { Clause::Strict } })
}

/// `C^{n,k}_{r,l} > C^{n,k}_{r,n-l}` for `1 ≤ l ≤ r`, `l < n/2`, `k ≥ 2`.
pub fn ineq_check(n: usize, k: usize, r: usize, l: usize) -> Result<Check> {
    if k < 2 || l == 0 || l > r || r > n || 2 * l >= n {
        return Err(Error::Precondition(format!(
            "needs k >= 2, 1 <= l <= r <= n and l < n/2, got n = {n}, k = {k}, r = {r}, l = {l}"
        )));
    }
    Ok(Check { holds: coef(n, k, r, l).value > coef(n, k, r, n - l).value, clause: Clause::Strict })
}

/// For `x ≤ x0` and `x + y = x0 + y0`:
/// `x C_l + y C_{n-l} ≤ x0 C_l + y0 C_{n-l}`, with equality iff `x = x0`.
#[allow(clippy::too_many_arguments)]
pub fn pairwise_opt_check(n: usize, k: usize, r: usize, l: usize, x0: i128, y0: i128, x: i128, y: i128) -> Result<Check> {
    ineq_check(n, k, r, l)?;
    if x0 < 0 || y0 < 0 {
        return Err(Error::Precondition("x0 and y0 must be non-negative".into()));
    }
    if x > x0 || x + y != x0 + y0 {
        return Err(Error::Precondition("needs x <= x0 and x + y = x0 + y0".into()));
    }
    let (cl, cm) = (coef(n, k, r, l).value as i128, coef(n, k, r, n - l).value as i128);
    let (lhs, rhs) = (x * cl + y * cm, x0 * cl + y0 * cm);
    let eq = lhs == rhs;
    Ok(Check { holds: lhs <= rhs && eq == (x == x0), clause: if eq { Clause::Equality } else { Clause::Strict } })
}

/// A partition `M1 ∪ M2 ∪ M3` of `[r]` with a pairing `ψ : M2 → M3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub m1: Vec<usize>,
    /// `(l, ψ(l))` for each `l ∈ M2`.
    pub pairs: Vec<(usize, usize)>,
}

/// The partition used to compare `(S, T)` against `(X, Y)` (or `B`
/// against `V`) with `ψ(l) = n - l`.
pub fn proof_partition(n: usize, r: usize) -> Result<Partition> {
    if r == 0 || r > n {
        return Err(Error::Range(format!("needs 1 <= r <= n, got n = {n}, r = {r}")));
    }
    let even_half = if n.is_multiple_of(2) { vec![n / 2] } else { vec![] };
    let (mut m1, m2): (Vec<usize>, Vec<usize>) = if 2 * r <= n {
        ((1..=r).collect(), vec![])
    } else if r < n {
        ((1..n - r).collect(), (n - r..=(n - 1) / 2).collect())
    } else {
        (vec![n], (1..=(n - 1) / 2).collect())
    };
    if 2 * r > n {
        m1.extend(even_half);
    }
    m1.sort_unstable();
    let pairs = m2.into_iter().map(|l| (l, n - l)).collect();
    Ok(Partition { m1, pairs })
}

/// Result of [`summing_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SummingOutcome {
    /// `Σ c x ≤ Σ c y`.
    pub bound_holds: bool,
    pub equal: bool,
    /// The strict-coefficient, equal-pair-sum hypotheses held, so equality
    /// must coincide with `x = y`.
    pub characterized: bool,
    /// The characterization held (vacuously true when not applicable).
    pub characterization_holds: bool,
}

/// Checks the weighted-sum comparison for vectors indexed by `1..=r`
/// (`x[l-1]` is `x_l`).
pub fn summing_check(x: &[i128], y: &[i128], c: &[i128], part: &Partition) -> Result<SummingOutcome> {
    let r = x.len();
    if y.len() != r || c.len() != r {
        return Err(Error::Precondition("x, y and c must have equal length".into()));
    }
    if x.iter().chain(y).chain(c).any(|&v| v < 0) {
        return Err(Error::Precondition("x, y and c must be non-negative".into()));
    }
    let mut seen = vec![false; r + 1];
    let m2m3 = part.pairs.iter().flat_map(|&(a, b)| [a, b]);
    for l in part.m1.iter().copied().chain(m2m3) {
        if l == 0 || l > r || seen[l] {
            return Err(Error::Precondition(format!("M1, M2, M3 do not partition [{r}] (at {l})")));
        }
        seen[l] = true;
    }
    if !seen[1..].iter().all(|&b| b) {
        return Err(Error::Precondition(format!("M1, M2, M3 do not cover [{r}]")));
    }
    let at = |v: &[i128], l: usize| v[l - 1];
    if let Some(&l) = part.m1.iter().find(|&&l| at(x, l) > at(y, l)) {
        return Err(Error::Precondition(format!("x_{l} > y_{l} for l in M1")));
    }
    for &(a, b) in &part.pairs {
        if at(c, a) * at(x, a) + at(c, b) * at(x, b) > at(c, a) * at(y, a) + at(c, b) * at(y, b) {
            return Err(Error::Precondition(format!("paired inequality fails at ({a}, {b})")));
        }
    }
    let sx: i128 = (1..=r).map(|l| at(c, l) * at(x, l)).sum();
    let sy: i128 = (1..=r).map(|l| at(c, l) * at(y, l)).sum();
    let equal = sx == sy;
    let characterized = part.pairs.iter().all(|&(a, b)| at(c, a) > at(c, b) && at(x, a) + at(x, b) == at(y, a) + at(y, b));
    let characterization_holds = !characterized || equal == (x == y);
    Ok(SummingOutcome { bound_holds: sx <= sy, equal, characterized, characterization_holds })
}

/// `|V_{n,r}(l)| ≥ C(n-1,l-1) - C(n-l-1,l-1) + 1`; for `r ≥ 4`, equality
/// iff `l = r` or `n = 2r - 2 = 2l`.
pub fn vufmpart_check(n: usize, r: usize, l: usize) -> Result<Check> {
    if r < 2 || r + 1 > n || l < 2 || l > r.min(n / 2) {
        return Err(Error::Precondition(format!("needs 2 <= r <= n-1 and 2 <= l <= min(r, n/2), got n = {n}, r = {r}, l = {l}")));
    }
    let (ni, li) = (n as i64, l as i64);
    let v = v_uniform_size(n, r, l)?;
    let bound = binom(ni - 1, li - 1) - binom(ni - li - 1, li - 1) + 1;
    let eq = v == bound;
    let expected_eq = l == r || (n == 2 * r - 2 && n == 2 * l);
    let holds = v >= bound && (r < 4 || eq == expected_eq);
    Ok(Check { holds, clause: if eq { Clause::Equality } else { Clause::Strict } })
}

fn check_hm_premise(b: &GroundFamily) -> Result<()> {
    let (n, r) = (b.n(), b.r());
    if n < 3 || r < 2 || r + 1 > n {
        return Err(Error::Precondition(format!("needs n >= 3 and 2 <= r <= n-1, got n = {n}, r = {r}")));
    }
    if !is_r_maximal_intersecting(b) {
        return Err(Error::Precondition("family is not r-maximal intersecting".into()));
    }
    if !b.common_intersection()?.is_empty() {
        return Err(Error::Precondition("family has a non-empty common intersection".into()));
    }
    Ok(())
}

/// `|B(l)| ≤ |V_{n,r}(l)|` for an `r`-maximal intersecting `B` with empty
/// common intersection and `2 ≤ l ≤ min(r, n/2)`.
pub fn apply_hm_bound(b: &GroundFamily, l: usize) -> Result<bool> {
    let (n, r) = (b.n(), b.r());
    if l < 2 || l > r.min(n / 2) {
        return Err(Error::Precondition(format!("needs 2 <= l <= min(r, n/2), got l = {l}")));
    }
    check_hm_premise(b)?;
    Ok(b.uniform_count(l) as u128 <= v_uniform_size(n, r, l)?)
}

/// For every `a ∈ [n]` some `r`-set of `B` avoids `a`.
pub fn nonzerodiff_check(b: &GroundFamily) -> Result<bool> {
    check_hm_premise(b)?;
    Ok((1..=b.n()).all(|a| b.iter().any(|x| x.len() == b.r() && !x.contains(a))))
}

/// Independent draw of each set of `C([n], ≤ r)` with probability `p`.
pub fn random_ground_family<R: Rng>(n: usize, r: usize, p: f64, rng: &mut R) -> Result<GroundFamily> {
    let members = all_ground_sets(n, r).into_iter().filter(|_| rng.gen_bool(p)).collect::<Vec<_>>();
    GroundFamily::new(n, r, members)
}

/// Draw, keep each drawn set that meets every set kept so far, maximalize.
pub fn random_intersecting<R: Rng>(n: usize, r: usize, p: f64, rng: &mut R) -> Result<GroundFamily> {
    let draw = random_ground_family(n, r, p, rng)?;
    let mut kept: Vec<GroundSet> = Vec::new();
    for &x in &draw {
        if !x.is_empty() && kept.iter().all(|m| m.intersects(&x)) {
            kept.push(x);
        }
    }
    maximalize_intersecting(&GroundFamily::from_valid(n, r, kept))
}

/// Two independent draws, repaired jointly in scan order, then maximalized.
/// Draws that leave a side empty are redrawn; after 64 tries the pair
/// `({[r]}, {[r]})` seeds the maximalization.
pub fn random_cross_pair<R: Rng>(n: usize, r: usize, p: f64, rng: &mut R) -> Result<(GroundFamily, GroundFamily)> {
    if r == 0 {
        return Err(Error::Range("cross pairs need r >= 1".into()));
    }
    for _ in 0..64 {
        let s = random_ground_family(n, r, p, rng)?;
        let t = random_ground_family(n, r, p, rng)?;
        let (mut ks, mut kt): (Vec<GroundSet>, Vec<GroundSet>) = (Vec::new(), Vec::new());
        for x in all_ground_sets(n, r) {
            if x.is_empty() {
                continue;
            }
            if s.contains(&x) && kt.iter().all(|m| m.intersects(&x)) {
                ks.push(x);
            }
            if t.contains(&x) && ks.iter().all(|m| m.intersects(&x)) {
                kt.push(x);
            }
        }
        if !ks.is_empty() && !kt.is_empty() {
            return maximalize_cross_pair(&GroundFamily::from_valid(n, r, ks), &GroundFamily::from_valid(n, r, kt));
        }
    }
    let core = x_family(n, r)?;
    maximalize_cross_pair(&core, &core)
}
