//! Enumeration of lattice elements of bounded norm near a point of the upper
//! half plane.
//!
//! For `det X = m > 0`, `u(z, X z) <= delta` is equivalent to
//! `|sigma_z^{-1} X sigma_z|_F^2 <= (4 delta + 2) m`, a positive definite
//! quadratic form in the coordinates. Points of the ellipsoid for the largest
//! norm are listed by Fincke-Pohst on an LLL-reduced basis, then filtered by
//! exact norm and by `u`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Lattice4, MaximalOrder, OElt};
use crate::quat::{frobenius_sq, iota_inf, mat2_mul, BoxConstant, Mat2, Quat, UpperHalfPoint};

/// Slack added to `u` comparisons; boundary elements are kept.
pub const U_SLACK: f64 = 1e-9;

/// Which reduced norms to keep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormSet {
    Exact(u64),
    UpTo(u64),
    /// `l^2` for `1 <= l <= bound`.
    SquaresUpTo(u64),
}

impl NormSet {
    pub fn max_norm(&self) -> u64 {
        match self {
            NormSet::Exact(m) | NormSet::UpTo(m) => *m,
            NormSet::SquaresUpTo(l) => l * l,
        }
    }

    pub fn contains(&self, m: u64) -> bool {
        match self {
            NormSet::Exact(k) => m == *k,
            NormSet::UpTo(k) => (1..=*k).contains(&m),
            NormSet::SquaresUpTo(l) => {
                let r = (m as f64).sqrt().round() as u64;
                m >= 1 && r * r == m && r <= *l
            }
        }
    }
}

/// Real matrices `sigma_z^{-1} iota(b) sigma_z` for the maximal-order basis.
pub fn conjugated_basis(order: &MaximalOrder, z: &UpperHalfPoint) -> [Mat2; 4] {
    let (s, si) = (z.sigma(), z.sigma_inv());
    std::array::from_fn(|k| mat2_mul(&mat2_mul(&si, &iota_inf(&order.basis()[k])), &s))
}

fn combine(mats: &[Mat2; 4], x: &OElt) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for k in 0..4 {
        let c = x[k] as f64;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += c * mats[k][i][j];
            }
        }
    }
    out
}

/// `u(z, x z)` for an element of positive norm `nrd`.
pub fn u_of(mats: &[Mat2; 4], x: &OElt, nrd: i128) -> f64 {
    let y = combine(mats, x);
    (frobenius_sq(&y) / nrd as f64 - 2.0) / 4.0
}

type Gram = [[f64; 4]; 4];

fn gram_of(mats: &[Mat2; 4], basis: &[OElt; 4]) -> Gram {
    let ys: Vec<Mat2> = basis.iter().map(|b| combine(mats, b)).collect();
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = (0..2).map(|r| (0..2).map(|c| ys[i][r][c] * ys[j][r][c]).sum::<f64>()).sum();
        }
    }
    g
}

fn add_row(b: &mut [OElt; 4], dst: usize, src: usize, f: i128) {
    for k in 0..4 {
        b[dst][k] += f * b[src][k];
    }
}

/// LLL reduction (parameter 0.99) of `basis` for the form `mats`.
fn lll(mats: &[Mat2; 4], mut basis: [OElt; 4]) -> [OElt; 4] {
    let mut k = 1;
    let mut guard = 0;
    while k < 4 && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gso(&gram_of(mats, &basis));
            let r = mu[k][j].round();
            if r != 0.0 {
                add_row(&mut basis, k, j, -(r as i128));
            }
        }
        let (mu, b) = gso(&gram_of(mats, &basis));
        if b[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    basis
}

/// Gram-Schmidt coefficients and squared lengths from a Gram matrix.
fn gso(g: &Gram) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut mu = [[0.0; 4]; 4];
    let mut b = [0.0; 4];
    for i in 0..4 {
        for j in 0..i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * b[k];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i];
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * b[k];
        }
        b[i] = s;
        mu[i][i] = 1.0;
    }
    (mu, b)
}

/// Coefficient vectors `x` with `x G x^T <= bound`, enumerated depth first
/// from the last coordinate; the outermost level runs in parallel.
fn fincke_pohst(g: &Gram, bound: f64) -> Vec<[i128; 4]> {
    // Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2
    let mut q = [[0.0f64; 4]; 4];
    for i in 0..4 {
        let mut d = g[i][i];
        for k in 0..i {
            d -= q[k][k] * q[k][i] * q[k][i];
        }
        q[i][i] = d;
        for j in i + 1..4 {
            let mut s = g[i][j];
            for k in 0..i {
                s -= q[k][k] * q[k][i] * q[k][j];
            }
            q[i][j] = s / d;
        }
    }
    let r3 = (bound / q[3][3]).sqrt().floor() as i128;
    (-r3..=r3)
        .into_par_iter()
        .flat_map_iter(|x3| {
            let mut out = Vec::new();
            let mut x = [0i128; 4];
            x[3] = x3;
            let used = q[3][3] * (x3 as f64).powi(2);
            descend(&q, bound, 2, bound - used, &mut x, &mut out);
            out
        })
        .collect()
}

fn descend(q: &[[f64; 4]; 4], bound: f64, i: usize, rem: f64, x: &mut [i128; 4], out: &mut Vec<[i128; 4]>) {
    if rem < -1e-9 * bound.max(1.0) {
        return;
    }
    let rem = rem.max(0.0);
    let c: f64 = -(i + 1..4).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let r = (rem / q[i][i]).sqrt();
    let lo = (c - r).ceil() as i128;
    let hi = (c + r).floor() as i128;
    for v in lo..=hi {
        x[i] = v;
        let d = v as f64 - c;
        let next = rem - q[i][i] * d * d;
        if i == 0 {
            if next >= -1e-9 * bound.max(1.0) {
                out.push(*x);
            }
        } else {
            descend(q, bound, i - 1, next, x, out);
        }
    }
}

/// Elements of `lat` (inside the maximal order) with norm in `norms` and
/// `u(z, x z) <= delta` (plus [`U_SLACK`]), grouped by norm and sorted.
pub fn enumerate_elts(
    lat: &Lattice4,
    z: &UpperHalfPoint,
    delta: f64,
    norms: &NormSet,
) -> Result<BTreeMap<u64, Vec<OElt>>> {
    if !(delta > 0.0) {
        return Err(Error::Usage(format!("delta must be positive, got {delta}")));
    }
    let order = lat.parent();
    let basis: [OElt; 4] = lat.basis_elts()?.try_into().expect("four rows");
    let mats = conjugated_basis(order, z);
    let red = lll(&mats, basis);
    let g = gram_of(&mats, &red);
    let mmax = norms.max_norm();
    let bound = (4.0 * (delta + U_SLACK) + 2.0) * mmax as f64 * (1.0 + 1e-9) + 1e-9;
    let points = fincke_pohst(&g, bound);
    let mut found: Vec<(u64, OElt)> = points
        .par_iter()
        .filter_map(|c| {
            let mut x = [0i128; 4];
            for i in 0..4 {
                for k in 0..4 {
                    x[k] += c[i] * red[i][k];
                }
            }
            let n = order.nrd(&x);
            if n < 1 || !norms.contains(n as u64) {
                return None;
            }
            (u_of(&mats, &x, n) <= delta + U_SLACK).then_some((n as u64, x))
        })
        .collect();
    found.sort_unstable();
    let mut out: BTreeMap<u64, Vec<OElt>> = BTreeMap::new();
    for (n, x) in found {
        out.entry(n).or_default().push(x);
    }
    Ok(out)
}

/// Elements of norm exactly `m` in the `delta`-ball about `z`, as algebra
/// elements. Every output is checked against the box constant `t` (which
/// must be valid for `z`): all coordinates in `1, i1, i2, i3` are at most
/// `t sqrt(m)` in absolute value.
pub fn enumerate_norm_ball(
    lat: &Lattice4,
    m: u64,
    z: &UpperHalfPoint,
    delta: f64,
    t: &BoxConstant,
) -> Result<Vec<Quat>> {
    let order = lat.parent();
    let elts = enumerate_elts(lat, z, delta, &NormSet::Exact(m))?;
    let cap = 2.0 * t.t * (m as f64).sqrt() * (1.0 + 1e-12);
    let mut out = Vec::new();
    for x in elts.into_values().flatten() {
        let a2 = order.doubled_paper_coords(&x);
        if a2.iter().any(|&v| v.abs() as f64 > cap) {
            return Err(Error::TheoremViolation(format!(
                "element {x:?} of norm {m} exceeds the box constant {}",
                t.t
            )));
        }
        out.push(order.to_quat(&x));
    }
    Ok(out)
}
