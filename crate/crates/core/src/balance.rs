//! Balanced representatives in the genus of an order.
//!
//! An order is balanced in the maximal order when its top invariant factor
//! divides `t1`. Eichler orders of prime-power level are not; conjugating by
//! a global element of norm `p^k` moves the maximal order along the path in
//! the tree, and the search finds one that lands in the middle.

use rayon::prelude::*;

use crate::arith::{factorize, valuation};
use crate::counting::{enumerate_elts, NormSet};
use crate::error::{Error, Result};
use crate::lattice::{invariant_factors, InvariantFactors, Lattice4, OElt};
use crate::quat::{Quat, UpperHalfPoint};

#[derive(Clone, Debug)]
pub struct BalanceSearchSpec {
    pub ord: Lattice4,
    /// Must contain every prime dividing the level.
    pub primes: Vec<u64>,
    pub k_max: u32,
    /// Cap on the doubled coordinates of a conjugator in `1, I, J, IJ`.
    pub height_max: u64,
    /// Radius of the `u`-ball around `i` that supplies candidates.
    pub ball_delta: f64,
}

impl BalanceSearchSpec {
    pub fn new(ord: Lattice4) -> Result<Self> {
        let level = ord.level()?;
        let primes = factorize(level as u64).into_iter().map(|(p, _)| p).collect();
        Ok(BalanceSearchSpec { ord, primes, k_max: 2, height_max: 4096, ball_delta: 3.0 })
    }
}

#[derive(Clone, Debug)]
pub struct BalanceResult {
    pub conjugator: Quat,
    pub conjugator_coords: OElt,
    pub norm: u64,
    pub order: Lattice4,
    pub before: InvariantFactors,
    pub after: InvariantFactors,
    pub candidates_tried: usize,
}

/// `v_p(a4) <= ceil(sum v_p(a_i) / 2)` for the given local exponents, with
/// the last one playing the role of `a4`.
pub fn smith_condition_exponents(exps: &[u32]) -> bool {
    let Some(&last) = exps.last() else { return true };
    let sum: u32 = exps.iter().sum();
    last <= sum.div_ceil(2)
}

/// The ceiling condition at every prime of the index, from the global
/// invariant factors of `l` in the maximal order.
pub fn smith_condition(l: &Lattice4) -> Result<bool> {
    let f = invariant_factors(l, &Lattice4::maximal(l.parent()))?;
    let index: u128 = f.a.iter().product();
    Ok(factorize(index as u64).into_iter().all(|(p, _)| {
        let exps: Vec<u32> = f.a.iter().map(|&a| valuation(a, p as u128)).collect();
        smith_condition_exponents(&exps)
    }))
}

fn height(order: &crate::lattice::MaximalOrder, x: &OElt) -> u64 {
    order.doubled_paper_coords(x).iter().map(|v| v.unsigned_abs() as u64).max().unwrap_or(0)
}

fn norms_up_to(primes: &[u64], k_max: u32) -> Vec<(u64, u32)> {
    let mut out = vec![(1u64, 0u32)];
    for &p in primes {
        let prev = out.clone();
        for k in 1..=k_max {
            let pk = p.pow(k);
            out.extend(prev.iter().filter(|(_, j)| j + k <= k_max).map(|&(n, j)| (n * pk, j + k)));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Searches conjugators by increasing norm, then height, then coordinates.
/// `Ok(None)` means the bounded search was exhausted.
pub fn balanced_search(spec: &BalanceSearchSpec) -> Result<Option<BalanceResult>> {
    let ord = &spec.ord;
    if !ord.is_order() {
        return Err(Error::NotAnOrder("balance search needs an order".into()));
    }
    let level = ord.level()?;
    for (p, _) in factorize(level as u64) {
        if !spec.primes.contains(&p) {
            return Err(Error::Usage(format!("prime {p} of the level is missing from the bad set")));
        }
    }
    let parent = ord.parent();
    let max = Lattice4::maximal(parent);
    let before = invariant_factors(ord, &max)?;
    let z = UpperHalfPoint::i();
    let mut tried = 0;
    for (norm, _) in norms_up_to(&spec.primes, spec.k_max) {
        let mut cands: Vec<(u64, OElt)> = if norm == 1 {
            vec![(0, [1, 0, 0, 0])]
        } else {
            let found = enumerate_elts(&max, &z, spec.ball_delta, &NormSet::Exact(norm))?;
            found
                .into_values()
                .flatten()
                .map(|x| (height(parent, &x), x))
                .filter(|(h, _)| *h <= spec.height_max)
                .collect()
        };
        cands.sort_unstable();
        tried += cands.len();
        let hit = cands.par_iter().find_map_first(|(_, x)| {
            let g = parent.to_quat(x);
            let (l, inside) = ord.conjugate(&g).ok()?;
            if !inside || l.level().ok()? != level {
                return None;
            }
            let after = invariant_factors(&l, &max).ok()?;
            after.balanced().then_some((*x, g, l, after))
        });
        if let Some((x, g, l, after)) = hit {
            if !l.is_order() {
                return Err(Error::TheoremViolation("conjugate of an order is not an order".into()));
            }
            return Ok(Some(BalanceResult {
                conjugator: g,
                conjugator_coords: x,
                norm,
                order: l,
                before,
                after,
                candidates_tried: tried,
            }));
        }
    }
    Ok(None)
}
