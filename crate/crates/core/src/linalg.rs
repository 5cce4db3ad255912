//! Exact integer and rational matrix kernels: Hermite and Smith normal forms
//! with transformation matrices, Bareiss determinants, rational inverses.
//!
//! Matrices are row-major `Vec<Vec<_>>`; lattices are spanned by rows.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::arith::ext_gcd;

pub type IMat = Vec<Vec<i128>>;
pub type QMat = Vec<Vec<BigRational>>;

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Replaces rows `(i, j)` by a unimodular combination that puts
/// `gcd(a[i][c], a[j][c])` in row `i` and zero in row `j`.
fn combine_rows(a: &mut IMat, u: &mut IMat, i: usize, j: usize, c: usize) {
    let (x0, y0) = (a[i][c], a[j][c]);
    if x0 != 0 && y0 % x0 == 0 {
        let f = y0 / x0;
        for m in [&mut *a, &mut *u] {
            for k in 0..m[i].len() {
                m[j][k] -= f * m[i][k];
            }
        }
        return;
    }
    let (g, s, t) = ext_gcd(x0, y0);
    let (p, q) = (x0 / g, y0 / g);
    for m in [&mut *a, &mut *u] {
        let (ri, rj) = (m[i].clone(), m[j].clone());
        for k in 0..ri.len() {
            m[i][k] = s * ri[k] + t * rj[k];
            m[j][k] = -q * ri[k] + p * rj[k];
        }
    }
}

fn combine_cols(a: &mut IMat, v: &mut IMat, i: usize, j: usize, r: usize) {
    let (x0, y0) = (a[r][i], a[r][j]);
    if x0 != 0 && y0 % x0 == 0 {
        let f = y0 / x0;
        for m in [&mut *a, &mut *v] {
            for row in m.iter_mut() {
                row[j] -= f * row[i];
            }
        }
        return;
    }
    let (g, s, t) = ext_gcd(x0, y0);
    let (p, q) = (x0 / g, y0 / g);
    for m in [&mut *a, &mut *v] {
        for row in m.iter_mut() {
            let (ci, cj) = (row[i], row[j]);
            row[i] = s * ci + t * cj;
            row[j] = -q * ci + p * cj;
        }
    }
}

/// Row Hermite normal form. Returns `(h, u, rank)` with `u * a = h`, `u`
/// unimodular, the first `rank` rows of `h` in echelon form with positive
/// pivots and entries above each pivot reduced into `[0, pivot)`, remaining
/// rows zero.
pub fn hnf_with_transform(a: &IMat) -> (IMat, IMat, usize) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut u = identity(m);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if h[i][c] != 0 {
                combine_rows(&mut h, &mut u, r, i, c);
            }
        }
        if h[r][c] == 0 {
            continue;
        }
        if h[r][c] < 0 {
            for k in 0..n {
                h[r][k] = -h[r][k];
            }
            for k in 0..m {
                u[r][k] = -u[r][k];
            }
        }
        let piv = h[r][c];
        for i in 0..r {
            let f = h[i][c].div_euclid(piv);
            if f != 0 {
                for k in 0..n {
                    h[i][k] -= f * h[r][k];
                }
                for k in 0..m {
                    u[i][k] -= f * u[r][k];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (h, u, r)
}

/// Row HNF of the lattice spanned by the rows of `a`, zero rows dropped.
pub fn hnf(a: &IMat) -> IMat {
    let (h, _, rank) = hnf_with_transform(a);
    h.into_iter().take(rank).collect()
}

/// Smith normal form `u * a * v = d` with `d` diagonal, nonnegative,
/// `d[i][i] | d[i+1][i+1]`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub d: IMat,
    pub u: IMat,
    pub v: IMat,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<i128> {
        let k = self.d.len().min(self.d.first().map_or(0, Vec::len));
        (0..k).map(|i| self.d[i][i]).collect()
    }
}

pub fn smith(a: &IMat) -> Smith {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut d = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        for row in d.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            for i in t + 1..m {
                if d[i][t] != 0 {
                    combine_rows(&mut d, &mut u, t, i, t);
                }
            }
            for j in t + 1..n {
                if d[t][j] != 0 {
                    combine_cols(&mut d, &mut v, t, j, t);
                }
            }
            if (t + 1..m).all(|i| d[i][t] == 0) {
                break;
            }
        }
        let piv = d[t][t];
        let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[i][j] % piv != 0));
        if let Some(i) = bad {
            for k in 0..n {
                d[t][k] += d[i][k];
            }
            for k in 0..m {
                u[t][k] += u[i][k];
            }
            continue;
        }
        if piv < 0 {
            for k in 0..n {
                d[t][k] = -d[t][k];
            }
            for k in 0..m {
                u[t][k] = -u[t][k];
            }
        }
        t += 1;
    }
    Smith { d, u, v }
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(a: &IMat) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m = a.clone();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

pub fn to_qmat(a: &IMat) -> QMat {
    a.iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect()
}

pub fn qmat_mul(a: &QMat, b: &QMat) -> QMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(BigRational::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn qmat_inverse(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let mut m: QMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..2 * n {
                    let sub = &f * &m[c][k];
                    m[i][k] = &m[i][k] - sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn qmat_det(a: &QMat) -> BigRational {
    let n = a.len();
    let mut m = a.clone();
    let mut acc = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(c, p);
            acc = -acc;
        }
        acc = &acc * &m[c][c];
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for k in c..n {
                    let sub = &f * &m[c][k];
                    m[i][k] = &m[i][k] - sub;
                }
            }
        }
    }
    acc
}

/// Least common denominator of all entries.
pub fn common_denominator(a: &QMat) -> BigInt {
    a.iter().flatten().fold(BigInt::one(), |acc, x| {
        num::integer::lcm(acc, x.denom().clone())
    })
}

/// Scales by `den` and converts to `i128`. Panics if an entry is not
/// integral after scaling or overflows.
pub fn scale_to_integers(a: &QMat, den: &BigInt) -> IMat {
    a.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let y = x * BigRational::from_integer(den.clone());
                    assert!(y.is_integer(), "entry not integral after scaling");
                    i128::try_from(y.to_integer()).expect("entry overflows i128")
                })
                .collect()
        })
        .collect()
}

pub fn is_integral(a: &QMat) -> bool {
    a.iter().flatten().all(|x| x.is_integer())
}

pub fn abs_big(x: &BigRational) -> BigRational {
    x.abs()
}
