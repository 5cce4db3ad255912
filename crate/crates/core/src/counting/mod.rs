//! Counting lattice elements of bounded norm near a point, certified against
//! the explicit injection bound, plus structure checks for small norms in
//! orders.

pub mod enumerate;
pub mod injection;
pub mod orders;

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use num::{BigInt, BigRational};

pub use enumerate::{enumerate_elts, enumerate_norm_ball, NormSet, U_SLACK};
pub use injection::{
    bound_shape, build_injection, explicit_bound, explicit_bound_parts, project_alpha, project_elt,
    verify_congruences, BoundParts, InjectionWitness, ProjectedTuple,
};
pub use orders::{order_small_norm_check, small_norm_threshold, SmallNormReport};

use crate::error::{Error, Result};
use crate::lattice::{Lattice4, OElt, Shape};
use crate::quat::{BoxConstant, Quat, UpperHalfPoint};

#[derive(Clone, Debug)]
pub struct CountQuery {
    pub lat: Lattice4,
    pub z: UpperHalfPoint,
    pub delta: f64,
    pub l_max: u64,
    pub squares_only: bool,
}

impl CountQuery {
    pub fn norms(&self) -> NormSet {
        if self.squares_only {
            NormSet::SquaresUpTo(self.l_max)
        } else {
            NormSet::UpTo(self.l_max)
        }
    }
}

#[derive(Clone, Debug)]
pub struct CountReport {
    pub z: UpperHalfPoint,
    pub delta: f64,
    pub l_max: u64,
    pub squares_only: bool,
    pub shape: Shape,
    pub level: u128,
    pub t: f64,
    pub per_m: BTreeMap<u64, usize>,
    pub total: u128,
    pub explicit_bound: u128,
    pub parts: BoundParts,
    pub ratio: f64,
    pub witness: String,
    pub wall_ms: u128,
}

/// Maps an element of the lattice into `Z + L_0`: identity when `e = 2`,
/// doubling when `e = 1`.
fn to_working(w: &InjectionWitness, x: &OElt) -> OElt {
    if w.shape.e == 2 {
        *x
    } else {
        x.map(|v| 2 * v)
    }
}

/// Enumerates the query, checks every element against the injection
/// certificate and asserts `total <= explicit_bound`.
pub fn sweep_counts(q: &CountQuery, w: &InjectionWitness, t: &BoxConstant) -> Result<CountReport> {
    let start = Instant::now();
    let level = q.lat.level()?;
    if level != w.level {
        return Err(Error::Usage("witness built for a different lattice".into()));
    }
    let found = enumerate_elts(&q.lat, &q.z, q.delta, &q.norms())?;
    let mut seen = HashSet::new();
    let mut per_m = BTreeMap::new();
    for (&m, xs) in &found {
        per_m.insert(m, xs.len());
        for x in xs {
            let tuple = project_elt(w, &to_working(w, x))?;
            if !verify_congruences(w, &tuple) {
                return Err(Error::TheoremViolation(format!("congruences fail for {x:?}")));
            }
            if !seen.insert(tuple) {
                return Err(Error::TheoremViolation(format!("projection not injective at {x:?}")));
            }
        }
    }
    let total: u128 = per_m.values().map(|&c| c as u128).sum();
    let parts = explicit_bound_parts(w, t, q.l_max, q.squares_only);
    if total > parts.total {
        return Err(Error::TheoremViolation(format!(
            "count {total} exceeds explicit bound {}",
            parts.total
        )));
    }
    Ok(CountReport {
        z: q.z,
        delta: q.delta,
        l_max: q.l_max,
        squares_only: q.squares_only,
        shape: w.shape,
        level,
        t: t.t,
        per_m,
        total,
        explicit_bound: parts.total,
        parts,
        ratio: total as f64 / parts.total as f64,
        witness: w.to_string(),
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Checks `(a0 - l)(a0 + l) = -nrd(alpha_0)` for `alpha` of norm `l^2`, and
/// that a vanishing `nrd(alpha_0)` forces `alpha` to be the scalar `a0`.
pub fn square_norm_factor_check(alpha: &Quat, ell: u64) -> Result<bool> {
    let l = BigRational::from_integer(BigInt::from(ell));
    if alpha.nrd() != &l * &l {
        return Err(Error::Precondition(format!("nrd({alpha}) is not {ell}^2")));
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let alpha0 = alpha.sub(&alpha.conj())?.scale(&half);
    let a0 = alpha.x(0).clone();
    let lhs = (&a0 - &l) * (&a0 + &l);
    let n0 = alpha0.nrd();
    if lhs != -n0.clone() {
        return Ok(false);
    }
    if n0 == BigRational::from_integer(BigInt::from(0)) && !alpha0.is_zero() {
        return Ok(false);
    }
    Ok(true)
}
