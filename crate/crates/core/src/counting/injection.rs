//! The injection `alpha -> (a0, A, B, a3)` of `Z + L_0` into integer tuples
//! with congruence conditions, and the explicit counting bound it yields.

use std::fmt;

use crate::arith::{gcd, max_divisor_count_upto, mod_inv};
use crate::coprime::{solve, CombinationProblem};
use crate::error::{Error, Result};
use crate::lattice::{Lattice4, OElt, Shape};
use crate::linalg::{det, mat_mul, qmat_inverse, scale_to_integers, smith, to_qmat, IMat};
use crate::quat::{BoxConstant, Quat};

pub type Mat3 = [[i128; 3]; 3];

fn to_mat3(m: &IMat) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j]))
}

fn to_imat(m: &Mat3) -> IMat {
    m.iter().map(|r| r.to_vec()).collect()
}

#[derive(Clone, Debug)]
pub struct InjectionWitness {
    /// Rows express the adapted basis `D_1, D_2, D_3` of the trace-zero part
    /// of the maximal order in `i1, i2, i3`; `L_0 = sum M_k Z D_k`.
    pub delta_mat: Mat3,
    pub r2: u64,
    pub r3: u64,
    pub s2: u64,
    pub s3: u64,
    pub big_r: i128,
    pub big_r_inv: i128,
    pub r_vec: [i128; 3],
    pub big_s: i128,
    pub big_s_inv: i128,
    pub s_prime: i128,
    pub s_row: [i128; 3],
    pub h: Mat3,
    pub g: Mat3,
    pub shape: Shape,
    pub level: u128,
    /// `Z + L_0`, the lattice on which the map is injective.
    pub working: Lattice4,
}

impl InjectionWitness {
    pub fn k_a(&self) -> u64 {
        1 + self.r2 + self.r3
    }

    pub fn k_b(&self) -> u64 {
        1 + self.s2 + self.s3
    }

    /// Re-checks every structural invariant.
    pub fn check(&self) -> Result<()> {
        let n = self.level as i128;
        let d = &self.delta_mat;
        let fail = |what: &str| Err(Error::TheoremViolation(format!("injection witness: {what}")));
        if det(&to_imat(d)).abs() != 1 {
            return fail("det(delta) != +-1");
        }
        if self.big_r != d[0][0] + self.r2 as i128 * d[0][1] + self.r3 as i128 * d[0][2] {
            return fail("R mismatch");
        }
        if gcd(self.big_r, n) != 1 || (self.big_r * self.big_r_inv - 1).rem_euclid(n) != 0 {
            return fail("R not invertible mod N");
        }
        if gcd(self.big_s, n) != 1 || (self.big_s * self.big_s_inv - 1).rem_euclid(n) != 0 {
            return fail("S not invertible mod N");
        }
        if self.s2 == self.r2 || det(&to_imat(&self.g)) == 0 {
            return fail("g singular");
        }
        let hdg = mat_mul(&mat_mul(&to_imat(&self.h), &to_imat(d)), &to_imat(&self.g));
        let want = [
            (0, 0, self.big_r),
            (0, 1, self.s_prime),
            (0, 2, d[0][2]),
            (1, 0, 0),
            (1, 1, self.big_s),
            (1, 2, d[1][2] - self.r_vec[1] * self.big_r_inv * d[0][2]),
        ];
        for (i, j, v) in want {
            if (hdg[i][j] - v).rem_euclid(n.max(1)) != 0 {
                return fail(&format!("h delta g entry ({i},{j}) off pattern"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for InjectionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "shape {} r=({},{}) s=({},{}) R={} S={} S'={}",
            self.shape, self.r2, self.r3, self.s2, self.s3, self.big_r, self.big_s, self.s_prime
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectedTuple {
    pub a0: i128,
    pub a_a: i128,
    pub a_b: i128,
    pub a3: i128,
}

/// Builds the witness. `budget` caps the coprime search (`None` = auto).
pub fn build_injection(lat: &Lattice4, budget: Option<u64>) -> Result<InjectionWitness> {
    let shape = lat.shape()?;
    let level = lat.level()?;
    let n = level as i128;
    let b0 = lat.trace_zero_basis()?;
    let snf = smith(&b0);
    let vinv = qmat_inverse(&to_qmat(&snf.v)).expect("unimodular");
    let delta = to_mat3(&scale_to_integers(&vinv, &num::BigInt::from(1)));
    let bound = |c: u64| budget.unwrap_or_else(|| CombinationProblem::auto_bound(level as u64, c));
    let ctx = |e: Error, what: &str| match e {
        Error::Infeasible { indices, bound, detail } => {
            Error::Infeasible { indices, bound, detail: format!("{what}: {detail}") }
        }
        other => other,
    };

    let p1 = CombinationProblem {
        a: delta[0].to_vec(),
        big_n: level as u64,
        c: 2,
        bound: bound(2),
    };
    let set1 = solve(&p1).map_err(|e| ctx(e, "choosing (r2, r3)"))?;
    let (r2, r3) = (set1[0][0], set1[0][1]);
    let v = [1, r2 as i128, r3 as i128];
    let r_vec: [i128; 3] = std::array::from_fn(|i| (0..3).map(|j| delta[i][j] * v[j]).sum());
    let big_r = r_vec[0];
    let big_r_inv = mod_inv(big_r, n).ok_or_else(|| Error::TheoremViolation("R not prime to N".into()))?;
    let c = (r_vec[1] * big_r_inv).rem_euclid(n.max(1));
    let s_row: [i128; 3] = std::array::from_fn(|j| (delta[1][j] - c * delta[0][j]).rem_euclid(n.max(1)));
    let sg = s_row.iter().fold(n, |g, &x| gcd(g, x));
    if sg != 1 {
        return Err(Error::TheoremViolation(format!("gcd(S1, S2, S3, N) = {sg}")));
    }
    let p2 = CombinationProblem { a: s_row.to_vec(), big_n: level as u64, c: 2, bound: bound(2) };
    let set2 = solve(&p2).map_err(|e| ctx(e, "choosing (s2, s3)"))?;
    let (s2, s3) = set2
        .iter()
        .find(|t| t[0] != r2)
        .map(|t| (t[0], t[1]))
        .ok_or_else(|| Error::Infeasible {
            indices: vec![1],
            bound: p2.bound,
            detail: "no (s2, s3) with s2 != r2".into(),
        })?;
    let big_s = s_row[0] + s2 as i128 * s_row[1] + s3 as i128 * s_row[2];
    let big_s_inv = mod_inv(big_s, n).ok_or_else(|| Error::TheoremViolation("S not prime to N".into()))?;
    let s_prime = delta[0][0] + s2 as i128 * delta[0][1] + s3 as i128 * delta[0][2];
    let h = [[1, 0, 0], [-c, 1, 0], [0, 0, 1]];
    let g = [[1, 1, 0], [r2 as i128, s2 as i128, 0], [r3 as i128, s3 as i128, 1]];

    let order = lat.parent();
    let mut rows: Vec<OElt> = vec![[1, 0, 0, 0]];
    for r in &b0 {
        rows.push(order.from_icoords(&[r[0], r[1], r[2]]));
    }
    let working = Lattice4::from_int_rows(&rows, order)?;
    let w = InjectionWitness {
        delta_mat: delta,
        r2,
        r3,
        s2,
        s3,
        big_r,
        big_r_inv,
        r_vec,
        big_s,
        big_s_inv,
        s_prime,
        s_row,
        h,
        g,
        shape,
        level,
        working,
    };
    w.check()?;
    Ok(w)
}

/// Tuple of an element of `Z + L_0` given in maximal-order coordinates.
pub fn project_elt(w: &InjectionWitness, x: &OElt) -> Result<ProjectedTuple> {
    if !w.working.contains(x) {
        return Err(Error::NotContained("Z + L_0"));
    }
    let order = w.working.parent();
    let a2 = order.doubled_paper_coords(x);
    // in Z + O_0 all doubled coordinates are even
    let a: [i128; 4] = a2.map(|v| v / 2);
    let g = &w.g;
    let col = |k: usize| a[1] * g[0][k] + a[2] * g[1][k] + a[3] * g[2][k];
    Ok(ProjectedTuple { a0: a[0], a_a: col(0), a_b: col(1), a3: col(2) })
}

pub fn project_alpha(w: &InjectionWitness, alpha: &Quat) -> Result<ProjectedTuple> {
    let order = w.working.parent();
    let x = order.int_coords(alpha).ok_or(Error::NotContained("the maximal order"))?;
    project_elt(w, &x)
}

/// The three congruences modulo `M1`, `M2`, `M3`.
pub fn verify_congruences(w: &InjectionWitness, t: &ProjectedTuple) -> bool {
    let (m1, m2, m3) = (w.shape.m1 as i128, w.shape.m2 as i128, w.shape.m3 as i128);
    let d = &w.delta_mat;
    if t.a_a.rem_euclid(m1) != 0 {
        return false;
    }
    let ar = (t.a_a.rem_euclid(m3) * w.big_r_inv.rem_euclid(m3)).rem_euclid(m3);
    let diff = (t.a_b - ar * w.s_prime.rem_euclid(m3)).rem_euclid(m3);
    if diff.rem_euclid(m2) != 0 {
        return false;
    }
    let coef = (d[1][2] - w.r_vec[1].rem_euclid(m3) * w.big_r_inv.rem_euclid(m3) % m3 * d[0][2]).rem_euclid(m3);
    let b2 = (w.big_s_inv.rem_euclid(m3) * diff).rem_euclid(m3);
    let want = (ar * d[0][2].rem_euclid(m3) + b2 * coef).rem_euclid(m3);
    (t.a3 - want).rem_euclid(m3) == 0
}

/// Number of integers in `[-k, k]` in one residue class modulo `m`, at most.
fn class_count(k: u128, m: u128) -> u128 {
    2 * k / m + 1
}

// `t` already carries a relative margin far above f64 rounding, so the
// product is not inflated again (exact inputs give exact endpoints).
fn ceil_scaled(k: u64, t: f64, root: f64) -> u128 {
    (k as f64 * t * root).ceil() as u128
}

/// Parts of the explicit bound, recorded for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParts {
    pub n0: u128,
    pub n_a: u128,
    pub n_b: u128,
    pub n3: u128,
    pub trivial_box: u128,
    pub divisor_max: u128,
    pub total: u128,
}

/// Explicit bound on the number of elements of norm at most `l_max`
/// (or norm `l^2`, `l <= l_max`) in the `delta`-ball, for any `z` at which
/// `t` is valid. When `e = 1` the count runs over `2 alpha` in `Z + L_0`.
pub fn explicit_bound_parts(w: &InjectionWitness, t: &BoxConstant, l_max: u64, squares_only: bool) -> BoundParts {
    let scale = if w.shape.e == 2 { 1 } else { 2 };
    let (m1, m2, m3) = (w.shape.m1 as u128, w.shape.m2 as u128, w.shape.m3 as u128);
    let root = if squares_only { (scale * l_max) as f64 } else { ((scale * scale * l_max) as f64).sqrt() };
    let k1 = ceil_scaled(1, t.t, root);
    let ka = ceil_scaled(w.k_a(), t.t, root);
    let kb = ceil_scaled(w.k_b(), t.t, root);
    let n0 = 2 * k1 + 1;
    let n_a = 2 * (ka / m1) + 1;
    let n_b = class_count(kb, m2);
    let n3 = class_count(k1, m3);
    let trivial_box = n0.pow(4);
    if !squares_only {
        let total = (n0 * n_a * n_b * n3).min(trivial_box);
        return BoundParts { n0, n_a, n_b, n3, trivial_box, divisor_max: 0, total };
    }
    let lm = scale * l_max;
    let kmax = (t.t * t.t).max(1.0) * (lm as f64) * (lm as f64);
    let dmax = max_divisor_count_upto(kmax.ceil() as u64) as u128;
    let total = (2 * l_max as u128 + n_a * n_b * n3 * 2 * dmax).min(trivial_box);
    BoundParts { n0, n_a, n_b, n3, trivial_box, divisor_max: dmax, total }
}

pub fn explicit_bound(w: &InjectionWitness, t: &BoxConstant, l_max: u64, squares_only: bool) -> u128 {
    explicit_bound_parts(w, t, l_max, squares_only).total
}

/// `L^{1/2} + L/M1 + L^{3/2}/(M1 M2) + L^2/N` (or the squares variant
/// `L + L^2/(M1 M2) + L^3/N`).
pub fn bound_shape(shape: &Shape, l_max: u64, squares_only: bool) -> f64 {
    let l = l_max as f64;
    let (m1, m2) = (shape.m1 as f64, shape.m2 as f64);
    let n = shape.level() as f64;
    if squares_only {
        l + l * l / (m1 * m2) + l * l * l / n
    } else {
        l.sqrt() + l / m1 + l.powf(1.5) / (m1 * m2) + l * l / n
    }
}
