//! Standard order families inside a maximal order: `Z + f L`, Eichler
//! orders, ramified prime ideals, and random lattices containing 1.

use std::sync::Arc;

use rand::Rng;

use super::{Lattice4, MaximalOrder, OElt};
use crate::arith::Factored;
use crate::error::{Error, Result};
use crate::quat::Quat;

/// First element by increasing height, then lexicographically, with
/// `pred` true. Height is the largest absolute coordinate.
pub fn find_element(max_height: i128, mut pred: impl FnMut(&OElt) -> bool) -> Option<OElt> {
    for h in 0..=max_height {
        let range: Vec<i128> = (-h..=h).collect();
        for &a in &range {
            for &b in &range {
                for &c in &range {
                    for &d in &range {
                        let x = [a, b, c, d];
                        if x.iter().map(|v| v.abs()).max() == Some(h) && pred(&x) {
                            return Some(x);
                        }
                    }
                }
            }
        }
    }
    None
}

/// An element of norm `p` whose trace is prime to `p`; its powers are
/// primitive, so it moves the maximal order along a line at `p`.
pub fn split_element(order: &MaximalOrder, p: u64) -> Result<OElt> {
    let p = p as i128;
    find_element(24, |x| order.nrd(x) == p && order.trd(x).rem_euclid(p) != 0)
        .ok_or_else(|| Error::SearchExhausted(format!("no split element of norm {p} up to height 24")))
}

/// `O^m` intersected with `g^{-1} O^m g`.
pub fn intersect_with_conjugate(parent: &Arc<MaximalOrder>, g: &Quat) -> Result<Lattice4> {
    let max = Lattice4::maximal(parent);
    let (other, _) = max.conjugate(&g.inverse()?)?;
    max.intersect(&other)
}

pub fn eichler_prime_power(parent: &Arc<MaximalOrder>, p: u64, n: u32) -> Result<Lattice4> {
    if parent.alg().ramified().contains(&p) {
        return Err(Error::Usage(format!("Eichler level must avoid ramified prime {p}")));
    }
    let pi = parent.to_quat(&split_element(parent, p)?);
    let mut g = parent.alg().one();
    for _ in 0..n {
        g = g.mul(&pi)?;
    }
    intersect_with_conjugate(parent, &g)
}

/// Eichler order of the given level (coprime to the ramified primes).
pub fn eichler(parent: &Arc<MaximalOrder>, level: &Factored) -> Result<Lattice4> {
    let mut acc = Lattice4::maximal(parent);
    for (&p, &n) in &level.0 {
        acc = acc.intersect(&eichler_prime_power(parent, p, n)?)?;
    }
    Ok(acc)
}

/// `{x in O^m : p | nrd(x)}` for a ramified prime `p`.
pub fn ramified_prime_ideal(parent: &Arc<MaximalOrder>, p: u64) -> Result<Lattice4> {
    if !parent.alg().ramified().contains(&p) {
        return Err(Error::Usage(format!("{p} is not ramified")));
    }
    let pi = p as i128;
    let mut gens: Vec<OElt> = (0..4)
        .map(|k| {
            let mut e = [0i128; 4];
            e[k] = pi;
            e
        })
        .collect();
    for code in 1..pi.pow(4) {
        let x: OElt = std::array::from_fn(|k| (code / pi.pow(3 - k as u32)) % pi);
        if parent.nrd(&x) % pi == 0 {
            gens.push(x);
        }
    }
    Lattice4::from_int_rows(&gens, parent)
}

/// `Z + p P_p`, an order of level `p^4` for the ramified prime `p`.
pub fn ramified_level_order(parent: &Arc<MaximalOrder>, p: u64) -> Result<Lattice4> {
    ramified_prime_ideal(parent, p)?.scalar_plus(p as i128)
}

/// `Z + f O^m`.
pub fn scalar_order(parent: &Arc<MaximalOrder>, f: u64) -> Result<Lattice4> {
    Lattice4::maximal(parent).scalar_plus(f as i128)
}

/// Random lattice `Z 1 + L'` with `L'` a random full-rank sublattice of the
/// span of `w, i2, i3` of index at most `max_level`.
pub fn random_with_one<R: Rng>(parent: &Arc<MaximalOrder>, max_level: u64, rng: &mut R) -> Lattice4 {
    loop {
        let d: Vec<i128> = (0..3).map(|_| rng.gen_range(1..=120)).collect();
        if (d[0] * d[1] * d[2]) as u64 > max_level {
            continue;
        }
        let rows = [
            [1, 0, 0, 0],
            [0, d[0], rng.gen_range(0..d[1]), rng.gen_range(0..d[2])],
            [0, 0, d[1], rng.gen_range(0..d[2])],
            [0, 0, 0, d[2]],
        ];
        return Lattice4::from_int_rows(&rows, parent).expect("triangular with nonzero diagonal");
    }
}
