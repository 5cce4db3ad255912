#![allow(dead_code)]

use num::{BigInt, BigRational};
use quatlat::quat::{Quat, QuatAlg};
use rand::Rng;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_rat<R: Rng>(rng: &mut R) -> BigRational {
    rat(rng.gen_range(-40..=40), rng.gen_range(1..=12))
}

pub fn random_quat<R: Rng>(alg: &QuatAlg, rng: &mut R) -> Quat {
    alg.elem(std::array::from_fn(|_| random_rat(rng)))
}

/// Whether `a x^2 + b y^2 = z^2` has a primitive solution modulo `l^k`,
/// by exhaustive search. For squarefree `a, b` and `k = 3` (odd `l`) or
/// `k = 6` (`l = 2`) this decides local solubility by Hensel lifting.
pub fn conic_soluble_mod(a: i64, b: i64, l: i64) -> bool {
    let m = if l == 2 { 64 } else { l * l * l };
    let sq: Vec<i64> = (0..m).map(|x| x * x % m).collect();
    for x in 0..m {
        for y in 0..m {
            let s = (a * sq[x as usize] + b * sq[y as usize]).rem_euclid(m);
            for z in 0..m {
                if (x % l != 0 || y % l != 0 || z % l != 0) && sq[z as usize] == s {
                    return true;
                }
            }
        }
    }
    false
}
