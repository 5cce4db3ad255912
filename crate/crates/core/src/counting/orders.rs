//! Elements of small norm in an order near a point all lie in one quadratic
//! subfield.
//!
//! For `alpha, beta` of norms at most `L` in the `delta`-ball, the doubled
//! trace-zero parts of `alpha`, `beta`, `alpha beta` lie in `L_0`, so their
//! determinant in `i1, i2, i3` coordinates is a multiple of `M1 M2 M3`.
//! Hadamard's inequality for the positive form at `z` bounds it by
//! `8 (4 delta + 2) sqrt(4 delta' + 2) L^2 / sqrt(det G_0)` with
//! `delta' = 4 delta (1 + delta)` (the ball radius for products). Below
//! the threshold the determinant vanishes, which forces commutation.

use std::collections::BTreeMap;

use crate::arith::divisor_count;
use crate::error::{Error, Result};
use crate::lattice::{Lattice4, OElt};
use crate::linalg::det;
use crate::quat::{frobenius_gram, UpperHalfPoint};

use super::enumerate::{enumerate_elts, NormSet};

/// Default constant in `count <= K d(m)`.
pub const UNIT_COUNT_K: u64 = 8;

#[derive(Clone, Debug)]
pub struct SmallNormReport {
    pub m_star: u64,
    pub m_checked: u64,
    pub per_m: BTreeMap<u64, usize>,
    pub pairs_checked: usize,
    pub triples_checked: usize,
    /// `m` with `count > K d(m)`; calibration warnings, not failures.
    pub warnings: Vec<(u64, usize)>,
    pub hadamard_constant: f64,
}

fn det3(g: &[Vec<f64>]) -> f64 {
    g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
}

/// `c` with `|det A| <= c L^2` for the determinant described above.
pub fn hadamard_constant(lat: &Lattice4, z: &UpperHalfPoint, delta: f64) -> f64 {
    let g0 = frobenius_gram(lat.parent().i_basis(), z);
    let dp = 4.0 * delta * (1.0 + delta);
    8.0 * (4.0 * delta + 2.0) * (4.0 * dp + 2.0).sqrt() / det3(&g0).sqrt()
}

/// Largest `L` with `c L^2 < M1 M2 M3`, with a small safety margin.
pub fn small_norm_threshold(lat: &Lattice4, z: &UpperHalfPoint, delta: f64) -> Result<u64> {
    let m = lat.shape()?.m() as f64;
    let c = hadamard_constant(lat, z, delta) * (1.0 + 1e-9);
    let mut l = (m / c).sqrt().floor() as u64;
    while l > 0 && c * (l * l) as f64 >= m {
        l -= 1;
    }
    Ok(l)
}

fn traceless2(lat: &Lattice4, x: &OElt) -> Vec<i128> {
    let o = lat.parent();
    let t = o.trd(x);
    let y = [2 * x[0] - t, 2 * x[1], 2 * x[2], 2 * x[3]];
    o.icoords(&y).to_vec()
}

/// Enumerates norms up to `min(m_cap, m*)` and asserts pairwise commutation
/// and vanishing of every triple determinant (a multiple of `M1 M2 M3`).
pub fn order_small_norm_check(
    ord: &Lattice4,
    z: &UpperHalfPoint,
    delta: f64,
    m_cap: u64,
    k_unit: u64,
) -> Result<SmallNormReport> {
    if !ord.is_order() {
        return Err(Error::NotAnOrder("small norm check needs an order".into()));
    }
    let shape = ord.shape()?;
    let m_star = small_norm_threshold(ord, z, delta)?;
    let m_checked = m_star.min(m_cap);
    let hadamard = hadamard_constant(ord, z, delta);
    let mut report = SmallNormReport {
        m_star,
        m_checked,
        per_m: BTreeMap::new(),
        pairs_checked: 0,
        triples_checked: 0,
        warnings: Vec::new(),
        hadamard_constant: hadamard,
    };
    if m_checked == 0 {
        return Ok(report);
    }
    let o = ord.parent();
    let found = enumerate_elts(ord, z, delta, &NormSet::UpTo(m_checked))?;
    let all: Vec<OElt> = found.values().flatten().copied().collect();
    for (&m, xs) in &found {
        report.per_m.insert(m, xs.len());
        if xs.len() as u64 > k_unit * divisor_count(m) {
            log::warn!("norm {m}: {} elements exceed {k_unit} d({m})", xs.len());
            report.warnings.push((m, xs.len()));
        }
    }
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if o.mul(a, b) != o.mul(b, a) {
                return Err(Error::TheoremViolation(format!(
                    "{a:?} and {b:?} do not commute below m* = {m_star}"
                )));
            }
            report.pairs_checked += 1;
        }
    }
    let rows: Vec<Vec<i128>> = all.iter().map(|x| traceless2(ord, x)).collect();
    let mm = shape.m() as i128;
    'outer: for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            for k in j + 1..rows.len() {
                let d = det(&vec![rows[i].clone(), rows[j].clone(), rows[k].clone()]);
                if d % mm != 0 || d != 0 {
                    return Err(Error::TheoremViolation(format!(
                        "triple determinant {d} (modulus {mm}) below m* = {m_star}"
                    )));
                }
                report.triples_checked += 1;
                if report.triples_checked >= 20_000 {
                    break 'outer;
                }
            }
        }
    }
    Ok(report)
}
