//! Orders given by rational bases in the `1, I, J, IJ` coordinates:
//! closure tests, reduced discriminants and saturation to a maximal order.

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::linalg::{common_denominator, hnf, qmat_det, qmat_inverse, scale_to_integers, to_qmat, QMat};
use crate::quat::{Quat, QuatAlg};

pub(crate) fn quat_row(q: &Quat) -> Vec<BigRational> {
    q.coords().to_vec()
}

pub(crate) fn row_quat(alg: &QuatAlg, row: &[BigRational]) -> Quat {
    alg.elem([row[0].clone(), row[1].clone(), row[2].clone(), row[3].clone()])
}

/// Canonical basis of the Z-span of `gens` (rows): HNF of the scaled
/// integer matrix divided back by the denominator. Fails below rank 4.
pub fn std_span(gens: &QMat) -> Result<QMat> {
    let den = common_denominator(gens);
    let ints = scale_to_integers(gens, &den);
    let h = hnf(&ints);
    if h.len() < 4 {
        return Err(Error::DegenerateLattice { rank: h.len() });
    }
    let d = BigRational::from_integer(den);
    Ok(to_qmat(&h).into_iter().map(|r| r.into_iter().map(|x| x / &d).collect()).collect())
}

/// Coordinates of `x` in the basis `rows`; `inv` is the inverse basis matrix.
pub(crate) fn coords_in(x: &[BigRational], inv: &QMat) -> Vec<BigRational> {
    (0..inv[0].len())
        .map(|j| x.iter().zip(inv.iter()).fold(BigRational::zero(), |acc, (a, row)| acc + a * &row[j]))
        .collect()
}

pub fn std_contains(rows: &QMat, x: &[BigRational]) -> bool {
    let inv = qmat_inverse(rows).expect("full rank basis");
    coords_in(x, &inv).iter().all(|c| c.is_integer())
}

/// Whether the Z-span of `rows` (full rank) is a ring containing 1.
pub fn std_is_order(alg: &QuatAlg, rows: &QMat) -> bool {
    let Some(inv) = qmat_inverse(rows) else { return false };
    let inside = |q: &Quat| coords_in(&quat_row(q), &inv).iter().all(|c| c.is_integer());
    if !inside(&alg.one()) {
        return false;
    }
    let qs: Vec<Quat> = rows.iter().map(|r| row_quat(alg, r)).collect();
    qs.iter().all(|a| qs.iter().all(|b| inside(&a.mul(b).expect("same algebra"))))
}

/// `sqrt |det(trd(b_i conj(b_j)))|` for a basis of an order.
pub fn std_reduced_disc(alg: &QuatAlg, rows: &QMat) -> Result<u64> {
    let qs: Vec<Quat> = rows.iter().map(|r| row_quat(alg, r)).collect();
    let gram: QMat = qs
        .iter()
        .map(|a| qs.iter().map(|b| a.mul(&b.conj()).expect("same algebra").trd()).collect())
        .collect();
    let det = qmat_det(&gram).abs();
    if !det.is_integer() {
        return Err(Error::NotAnOrder("non-integral discriminant".into()));
    }
    let det = det.to_integer();
    let root = det.sqrt();
    if &root * &root != det {
        return Err(Error::NotAnOrder(format!("Gram determinant {det} is not a square")));
    }
    root.to_u64()
        .ok_or_else(|| Error::Precondition("discriminant exceeds u64".into()))
}

/// Ring generated by the Z-span of `gens`, or `None` if it stops being
/// integral or fails to stabilize quickly.
fn ring_closure(alg: &QuatAlg, gens: &QMat) -> Option<QMat> {
    let mut cur = std_span(gens).ok()?;
    for _ in 0..24 {
        for r in &cur {
            let q = row_quat(alg, r);
            if !q.trd().is_integer() || !q.nrd().is_integer() {
                return None;
            }
        }
        let qs: Vec<Quat> = cur.iter().map(|r| row_quat(alg, r)).collect();
        let mut all = cur.clone();
        for a in &qs {
            for b in &qs {
                all.push(quat_row(&a.mul(b).ok()?));
            }
        }
        let next = std_span(&all).ok()?;
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
    None
}

/// Enlarges an order to a maximal one by adjoining elements `(sum c_i b_i)/p`
/// for primes `p` dividing the discriminant excess. Deterministic: residues
/// are tried in lexicographic order and the first admissible one is taken.
pub fn std_saturate(alg: &QuatAlg, rows: &QMat) -> Result<QMat> {
    if !std_is_order(alg, rows) {
        return Err(Error::NotAnOrder("saturation needs an order".into()));
    }
    let mut cur = std_span(rows)?;
    loop {
        let disc = std_reduced_disc(alg, &cur)?;
        if disc % alg.d() != 0 {
            return Err(Error::TheoremViolation(format!(
                "order discriminant {disc} not divisible by {}",
                alg.d()
            )));
        }
        let excess = disc / alg.d();
        if excess == 1 {
            return Ok(cur);
        }
        let mut grown = None;
        'primes: for (p, _) in factorize(excess) {
            let pi = p as i64;
            let pr = BigRational::from_integer(BigInt::from(p));
            for code in 1..pi.pow(4) {
                let c: Vec<i64> = (0..4).map(|k| (code / pi.pow(3 - k)) % pi).collect();
                let x: Vec<BigRational> = (0..4)
                    .map(|j| {
                        (0..4).fold(BigRational::zero(), |acc, i| {
                            acc + &cur[i][j] * BigRational::from_integer(BigInt::from(c[i]))
                        }) / &pr
                    })
                    .collect();
                let xq = row_quat(alg, &x);
                if !xq.trd().is_integer() || !xq.nrd().is_integer() {
                    continue;
                }
                let mut gens = cur.clone();
                gens.push(x);
                if let Some(bigger) = ring_closure(alg, &gens) {
                    if bigger != cur {
                        grown = Some(bigger);
                        break 'primes;
                    }
                }
            }
        }
        match grown {
            Some(b) => cur = b,
            None => {
                return Err(Error::SearchExhausted(format!(
                    "no integral extension found for discriminant {disc}"
                )))
            }
        }
    }
}

/// Determinant sign-free index `[rows_big : rows_small]` for nested lattices.
pub fn std_index(big: &QMat, small: &QMat) -> BigRational {
    (qmat_det(small) / qmat_det(big)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lipschitz(alg: &QuatAlg) -> QMat {
        [alg.one(), alg.i(), alg.j(), alg.ij()].iter().map(quat_row).collect()
    }

    #[test]
    fn lipschitz_order_saturates_to_disc_six() {
        let alg = QuatAlg::disc6();
        let z = lipschitz(&alg);
        assert!(std_is_order(&alg, &z));
        assert_eq!(std_reduced_disc(&alg, &z).unwrap(), 12);
        let m = std_saturate(&alg, &z).unwrap();
        assert_eq!(std_reduced_disc(&alg, &m).unwrap(), 6);
        assert!(std_is_order(&alg, &m));
        assert_eq!(std_saturate(&alg, &m).unwrap(), m);
        // the expected extra generator (1 + I + J + IJ)/2 lies in the result
        let h = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert!(std_contains(&m, &[h.clone(), h.clone(), h.clone(), h]));
    }
}
