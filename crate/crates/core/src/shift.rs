//! Push-up compressions, stabilization, and the projection onto `[n]`.

use std::fmt;

use crate::binom::{binom, mul, pow_signed};
use crate::error::{Error, Result};
use crate::gamma::{enumerate_r_independent, Family, IndSet, Params, Vertex};
use crate::ground::{GroundFamily, GroundSet};

/// The compression index `(i, s)` with `s ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftIndex {
    clique: usize,
    pos: usize,
}

impl ShiftIndex {
    pub fn new(params: &Params, clique: usize, pos: usize) -> Result<Self> {
        if clique == 0 || clique > params.n() {
            return Err(Error::InvalidVertex(format!("clique {clique} outside [1, {}]", params.n())));
        }
        if pos < 2 || pos > params.k() {
            return Err(Error::InvalidVertex(format!("shift position {pos} outside [2, {}]", params.k())));
        }
        Ok(ShiftIndex { clique, pos })
    }

    pub fn clique(&self) -> usize {
        self.clique
    }

    pub fn pos(&self) -> usize {
        self.pos
    }
}

impl fmt::Display for ShiftIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "π({},{})", self.clique, self.pos)
    }
}

/// Every index in scan order: clique ascending, then position ascending.
pub fn shift_indices(params: &Params) -> Vec<ShiftIndex> {
    (1..=params.n()).flat_map(|clique| (2..=params.k()).map(move |pos| ShiftIndex { clique, pos })).collect()
}

/// `P_{i,s}`: replace `(i,s)` by `(i,1)` when present.
pub fn push_up(params: &Params, x: IndSet, idx: ShiftIndex) -> IndSet {
    let from = 1u128 << Vertex::new(idx.clique, idx.pos).bit(params);
    if x.0 & from == 0 {
        return x;
    }
    let to = 1u128 << Vertex::new(idx.clique, 1).bit(params);
    IndSet(x.0 & !from | to)
}

/// `π_{i,s}(F) = {P(X) : X ∈ F} ∪ {X : X, P(X) ∈ F}`.
pub fn compress_family(family: &Family, idx: ShiftIndex) -> Family {
    let params = family.params();
    let mut out = Vec::with_capacity(family.len());
    for &x in family {
        let y = push_up(params, x, idx);
        out.push(y);
        if y != x && family.contains(&y) {
            out.push(x);
        }
    }
    Family::from_valid(*params, out)
}

/// Applies every compression in scan order until a full pass changes
/// nothing.
pub fn stabilize(family: &Family) -> Family {
    let indices = shift_indices(family.params());
    let limit = family.params().slots() * family.len().max(1);
    let mut current = family.clone();
    for _ in 0..=limit {
        let mut changed = false;
        for &idx in &indices {
            let next = compress_family(&current, idx);
            if next != current {
                changed = true;
                current = next;
            }
        }
        if !changed {
            return current;
        }
    }
    // Every effective compression lowers the total of the position
    // coordinates, so the pass limit cannot be reached.
    unreachable!("stabilization exceeded {limit} passes")
}

pub fn is_stable(family: &Family) -> bool {
    shift_indices(family.params()).into_iter().all(|idx| compress_family(family, idx) == *family)
}

/// `φ(X)`: the cliques whose position-1 vertex lies in `X`.
pub fn project(params: &Params, x: IndSet) -> GroundSet {
    let k = params.k();
    let mut g = 0u128;
    for i in 0..params.n() {
        if x.0 >> (i * k) & 1 == 1 {
            g |= 1 << i;
        }
    }
    GroundSet(g)
}

pub fn project_family(family: &Family) -> GroundFamily {
    let params = family.params();
    let members = family.iter().map(|&x| project(params, x)).collect();
    GroundFamily::from_valid(params.n(), params.r(), members)
}

fn check_liftable(ground: &GroundFamily, params: &Params) -> Result<()> {
    if ground.n() != params.n() {
        return Err(Error::ParamsMismatch { left: format!("ground n = {}", ground.n()), right: params.to_string() });
    }
    if let Some(s) = ground.iter().find(|s| s.len() > params.r()) {
        return Err(Error::InvalidSet(format!("{{{s}}} has more than r = {} elements", params.r())));
    }
    Ok(())
}

/// `φ⁻¹(X)`: every member of `I^r_{n,k}` whose projection lies in `X`.
pub fn lift(ground: &GroundFamily, params: &Params) -> Result<Family> {
    check_liftable(ground, params)?;
    let members = enumerate_r_independent(params).iter().filter(|&&x| ground.contains(&project(params, x))).copied().collect();
    Ok(Family::from_valid(*params, members))
}

/// `Σ_l C^{n,k}_{r,l} |X(l)|`.
pub fn lifted_size(ground: &GroundFamily, params: &Params) -> Result<u128> {
    check_liftable(ground, params)?;
    let (n, k, r) = (params.n(), params.k(), params.r());
    Ok((0..=r).map(|l| mul(coef(n, k, r, l).value, ground.uniform_count(l) as u128)).sum())
}

/// `C^{n,k}_{r,l} = C(n-l, r-l) (k-1)^(r-l)`: how many members of
/// `I^r_{n,k}` project onto a fixed `l`-set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LiftCoefficient {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub l: usize,
    pub value: u128,
}

pub fn coef(n: usize, k: usize, r: usize, l: usize) -> LiftCoefficient {
    let (ni, ri, li) = (n as i64, r as i64, l as i64);
    let value = if l > r || l > n { 0 } else { mul(binom(ni - li, ri - li), pow_signed(k as u128 - 1, ri - li)) };
    LiftCoefficient { n, k, r, l, value }
}
