//! Full-rank lattices inside a fixed maximal order: canonical forms, level,
//! shape, invariant factors, order tests, conjugation and intersection.
//!
//! A maximal order is stored with a normalized Z-basis `1, w, i2, i3` where
//! `w = (1 + i1)/2` and `i1, i2, i3` span its trace-zero part. Lattices are
//! row-HNF integer matrices in these coordinates over one denominator.

pub mod families;
pub mod maximal;

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};
use crate::linalg::{
    common_denominator, hnf, hnf_with_transform, qmat_det, qmat_inverse, qmat_mul, scale_to_integers,
    smith, to_qmat, transpose, IMat, QMat,
};
use crate::quat::{Quat, QuatAlg};
use maximal::{coords_in, quat_row, row_quat, std_is_order, std_reduced_disc, std_saturate, std_span};

/// Integer coordinates in the maximal-order basis `1, w, i2, i3`.
pub type OElt = [i128; 4];

fn qi(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn to_i128(x: &BigRational) -> Option<i128> {
    if x.is_integer() {
        x.to_integer().to_i128()
    } else {
        None
    }
}

#[derive(Debug)]
pub struct MaximalOrder {
    alg: QuatAlg,
    basis: [Quat; 4],
    i_basis: [Quat; 3],
    rows: QMat,
    inv: QMat,
    mult: [[[i128; 4]; 4]; 4],
    conj: [[i128; 4]; 4],
    trd: [i128; 4],
    tgram: [[i128; 4]; 4],
}

impl MaximalOrder {
    /// Validates that `rows` (coordinates in `1, I, J, IJ`) span a maximal
    /// order and rewrites its basis in normalized form.
    pub fn new(alg: &QuatAlg, rows: &QMat) -> Result<Arc<Self>> {
        let rows = std_span(rows)?;
        if !std_is_order(alg, &rows) {
            return Err(Error::NotAnOrder("maximal order basis is not closed under multiplication".into()));
        }
        let disc = std_reduced_disc(alg, &rows)?;
        if disc != alg.d() {
            return Err(Error::NotAnOrder(format!(
                "reduced discriminant {disc} differs from {}, order is not maximal",
                alg.d()
            )));
        }
        let (omega, i_basis) = normalize_basis(alg, &rows)?;
        let basis = [alg.one(), omega, i_basis[1].clone(), i_basis[2].clone()];
        Self::from_normalized(alg, basis, i_basis)
    }

    /// Saturation of `Z + ZI + ZJ + ZIJ`.
    pub fn default_for(alg: &QuatAlg) -> Result<Arc<Self>> {
        let lip: QMat = [alg.one(), alg.i(), alg.j(), alg.ij()].iter().map(quat_row).collect();
        let rows = std_saturate(alg, &lip)?;
        Self::new(alg, &rows)
    }

    pub fn disc6() -> Arc<Self> {
        Self::default_for(&QuatAlg::disc6()).expect("disc 6 maximal order")
    }

    fn from_normalized(alg: &QuatAlg, basis: [Quat; 4], i_basis: [Quat; 3]) -> Result<Arc<Self>> {
        let rows: QMat = basis.iter().map(quat_row).collect();
        let inv = qmat_inverse(&rows).ok_or(Error::DegenerateLattice { rank: 3 })?;
        let coords = |q: &Quat| -> Result<[i128; 4]> {
            let c = coords_in(&quat_row(q), &inv);
            let mut out = [0i128; 4];
            for k in 0..4 {
                out[k] = to_i128(&c[k]).ok_or_else(|| Error::NotAnOrder("non-integral structure constant".into()))?;
            }
            Ok(out)
        };
        let mut mult = [[[0i128; 4]; 4]; 4];
        let mut tgram = [[0i128; 4]; 4];
        let mut conj = [[0i128; 4]; 4];
        let mut trd = [0i128; 4];
        for i in 0..4 {
            for j in 0..4 {
                let prod = basis[i].mul(&basis[j])?;
                mult[i][j] = coords(&prod)?;
                tgram[i][j] = to_i128(&basis[i].mul(&basis[j].conj())?.trd())
                    .ok_or_else(|| Error::NotAnOrder("non-integral trace".into()))?;
            }
            conj[i] = coords(&basis[i].conj())?;
            trd[i] = to_i128(&basis[i].trd()).ok_or_else(|| Error::NotAnOrder("non-integral trace".into()))?;
        }
        Ok(Arc::new(MaximalOrder {
            alg: alg.clone(),
            basis,
            i_basis,
            rows,
            inv,
            mult,
            conj,
            trd,
            tgram,
        }))
    }

    pub fn alg(&self) -> &QuatAlg {
        &self.alg
    }

    /// `1, w, i2, i3` in the `1, I, J, IJ` coordinates.
    pub fn basis(&self) -> &[Quat; 4] {
        &self.basis
    }

    pub fn i_basis(&self) -> &[Quat; 3] {
        &self.i_basis
    }

    pub fn basis_rows(&self) -> &QMat {
        &self.rows
    }

    pub fn mul(&self, x: &OElt, y: &OElt) -> OElt {
        let mut out = [0i128; 4];
        for i in 0..4 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if y[j] == 0 {
                    continue;
                }
                let s = x[i] * y[j];
                for k in 0..4 {
                    out[k] += s * self.mult[i][j][k];
                }
            }
        }
        out
    }

    pub fn conj(&self, x: &OElt) -> OElt {
        let mut out = [0i128; 4];
        for i in 0..4 {
            for k in 0..4 {
                out[k] += x[i] * self.conj[i][k];
            }
        }
        out
    }

    pub fn trd(&self, x: &OElt) -> i128 {
        (0..4).map(|i| x[i] * self.trd[i]).sum()
    }

    pub fn nrd(&self, x: &OElt) -> i128 {
        let mut s = 0i128;
        for i in 0..4 {
            for j in 0..4 {
                s += x[i] * x[j] * self.tgram[i][j];
            }
        }
        s / 2
    }

    /// Integer Gram matrix of `(x, y) -> trd(x conj(y))`.
    pub fn trace_gram(&self) -> [[i128; 4]; 4] {
        self.tgram
    }

    pub fn to_quat(&self, x: &OElt) -> Quat {
        self.rat_to_quat(&x.map(qi))
    }

    pub fn rat_to_quat(&self, x: &[BigRational]) -> Quat {
        let row: Vec<BigRational> = (0..4)
            .map(|j| (0..4).fold(BigRational::zero(), |acc, i| acc + &x[i] * &self.rows[i][j]))
            .collect();
        row_quat(&self.alg, &row)
    }

    pub fn rat_coords(&self, q: &Quat) -> Result<Vec<BigRational>> {
        if q.pq() != (self.alg.p(), self.alg.q()) {
            return Err(Error::Usage("element of a different algebra".into()));
        }
        Ok(coords_in(&quat_row(q), &self.inv))
    }

    /// Integer coordinates, or `None` when `q` is not in the order.
    pub fn int_coords(&self, q: &Quat) -> Option<OElt> {
        let c = self.rat_coords(q).ok()?;
        let mut out = [0i128; 4];
        for k in 0..4 {
            out[k] = to_i128(&c[k])?;
        }
        Some(out)
    }

    /// Twice the coordinates in `1, i1, i2, i3`.
    pub fn doubled_paper_coords(&self, x: &OElt) -> [i128; 4] {
        [2 * x[0] + x[1], x[1], 2 * x[2], 2 * x[3]]
    }

    /// Coordinates in `i1, i2, i3` of a trace-zero element.
    pub fn icoords(&self, x: &OElt) -> [i128; 3] {
        debug_assert_eq!(self.trd(x), 0);
        [-x[0], x[2], x[3]]
    }

    pub fn from_icoords(&self, v: &[i128; 3]) -> OElt {
        [-v[0], 2 * v[0], v[1], v[2]]
    }

    /// `a0 + a1 i1 + a2 i2 + a3 i3` for integers `a`.
    pub fn from_paper_coords(&self, a: &[i128; 4]) -> OElt {
        [a[0] - a[1], 2 * a[1], a[2], a[3]]
    }
}

/// Picks `w` with trace 1 and `i1 = 2w - 1` primitive in the trace-zero
/// part, then completes `i1` to a basis of that part.
fn normalize_basis(alg: &QuatAlg, rows: &QMat) -> Result<(Quat, [Quat; 3])> {
    let qs: Vec<Quat> = rows.iter().map(|r| row_quat(alg, r)).collect();
    let tr: Vec<i128> = qs.iter().map(|q| to_i128(&q.trd()).expect("integral trace")).collect();
    let col: IMat = tr.iter().map(|&t| vec![t]).collect();
    let (h, u, _) = hnf_with_transform(&col);
    if h[0][0] != 1 {
        return Err(Error::NotAnOrder("trace form is not surjective".into()));
    }
    let combo = |coef: &[i128]| -> Quat {
        let row: Vec<BigRational> = (0..4)
            .map(|j| (0..4).fold(BigRational::zero(), |acc, i| acc + qi(coef[i]) * &rows[i][j]))
            .collect();
        row_quat(alg, &row)
    };
    let omega0 = combo(&u[0]);
    let zero_rows: Vec<Vec<BigRational>> = (1..4).map(|k| quat_row(&combo(&u[k]))).collect();
    let zinv = {
        // trace-zero part has no scalar coordinate; invert on I, J, IJ
        let m: QMat = zero_rows.iter().map(|r| r[1..].to_vec()).collect();
        qmat_inverse(&m).ok_or(Error::DegenerateLattice { rank: 2 })?
    };
    let two = qi(2);
    let i1 = omega0.scale(&two).sub(&alg.one())?;
    let v: Vec<i128> = coords_in(&quat_row(&i1)[1..], &zinv)
        .iter()
        .map(|c| to_i128(c).expect("2w - 1 lies in the trace-zero part"))
        .collect();
    let k = v.iter().fold(0, |g, &x| gcd(g, x));
    let y: Vec<i128> = v.iter().map(|x| x / k).collect();
    let zq: Vec<Quat> = zero_rows.iter().map(|r| row_quat(alg, r)).collect();
    let comb0 = |c: &[i128]| -> Quat {
        let mut acc = alg.scalar(0);
        for (ci, q) in c.iter().zip(&zq) {
            acc = acc.add(&q.scale(&qi(*ci))).expect("same algebra");
        }
        acc
    };
    // unimodular completion of the primitive vector y
    let ycol: IMat = y.iter().map(|&t| vec![t]).collect();
    let (_, uy, _) = hnf_with_transform(&ycol);
    let uinv = qmat_inverse(&to_qmat(&uy)).expect("unimodular");
    let w = scale_to_integers(&transpose(&uinv), &BigInt::one());
    debug_assert_eq!(w[0], y);
    let ib = [comb0(&w[0]), comb0(&w[1]), comb0(&w[2])];
    let omega = alg.one().add(&ib[0])?.scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
    Ok((omega, ib))
}

/// Elementary divisors of `O_0 / L_0` with `e = N / (M1 M2 M3)`;
/// `trace_index` is `[L : Z + L_0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub m1: u64,
    pub m2: u64,
    pub m3: u64,
    pub e: u8,
    pub trace_index: u8,
}

impl Shape {
    pub fn m(&self) -> u64 {
        self.m1 * self.m2 * self.m3
    }

    pub fn level(&self) -> u64 {
        self.m() * self.e as u64
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}) e={}", self.m1, self.m2, self.m3, self.e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InvariantFactors {
    pub a: [u128; 4],
    pub t1: u128,
}

impl InvariantFactors {
    pub fn from_diagonal(mut a: [u128; 4]) -> Self {
        a.sort_unstable();
        let prod: u128 = a.iter().product();
        let t1 = factorize(prod as u64)
            .into_iter()
            .map(|(p, e)| (p as u128).pow(e.div_ceil(2)))
            .product();
        InvariantFactors { a, t1 }
    }

    pub fn balanced(&self) -> bool {
        self.t1 % self.a[3] == 0
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4] = self.a;
        write!(f, "({a1}, {a2}, {a3}, {a4})")
    }
}

/// Lattice of full rank in the algebra, in maximal-order coordinates.
#[derive(Clone, Debug)]
pub struct Lattice4 {
    hnf: [[i128; 4]; 4],
    den: i128,
    parent: Arc<MaximalOrder>,
}

impl PartialEq for Lattice4 {
    fn eq(&self, other: &Self) -> bool {
        self.hnf == other.hnf
            && self.den == other.den
            && (Arc::ptr_eq(&self.parent, &other.parent) || self.parent.rows == other.parent.rows)
    }
}

impl Eq for Lattice4 {}

impl std::hash::Hash for Lattice4 {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.hnf.hash(state);
        self.den.hash(state);
    }
}

/// Canonical form of the Z-span of the rational rows (any number of
/// generators).
pub fn hnf_canonicalize(rows: &QMat, parent: &Arc<MaximalOrder>) -> Result<Lattice4> {
    let den = common_denominator(rows);
    let ints = scale_to_integers(rows, &den);
    let h = hnf(&ints);
    if h.len() < 4 {
        return Err(Error::DegenerateLattice { rank: h.len() });
    }
    let den = den.to_i128().ok_or_else(|| Error::Precondition("denominator overflows i128".into()))?;
    let content = h.iter().flatten().fold(den, |g, &x| gcd(g, x));
    let mut m = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = h[i][j] / content;
        }
    }
    Ok(Lattice4 { hnf: m, den: den / content, parent: Arc::clone(parent) })
}

impl Lattice4 {
    pub fn from_int_rows(rows: &[OElt], parent: &Arc<MaximalOrder>) -> Result<Self> {
        let q: QMat = rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
        hnf_canonicalize(&q, parent)
    }

    pub fn maximal(parent: &Arc<MaximalOrder>) -> Self {
        let mut hnf = [[0i128; 4]; 4];
        for (i, row) in hnf.iter_mut().enumerate() {
            row[i] = 1;
        }
        Lattice4 { hnf, den: 1, parent: Arc::clone(parent) }
    }

    pub fn parent(&self) -> &Arc<MaximalOrder> {
        &self.parent
    }

    pub fn hnf(&self) -> &[[i128; 4]; 4] {
        &self.hnf
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn rows_q(&self) -> QMat {
        let d = qi(self.den);
        self.hnf.iter().map(|r| r.iter().map(|&x| qi(x) / &d).collect()).collect()
    }

    /// Basis rows as integer elements; requires containment in the maximal order.
    pub fn basis_elts(&self) -> Result<Vec<OElt>> {
        if self.den != 1 {
            return Err(Error::NotContained("the maximal order"));
        }
        Ok(self.hnf.to_vec())
    }

    pub fn basis_quats(&self) -> Vec<Quat> {
        self.rows_q().iter().map(|r| self.parent.rat_to_quat(r)).collect()
    }

    pub fn in_maximal(&self) -> bool {
        self.den == 1
    }

    /// Membership of `x / den_x` by back substitution in the triangular basis.
    fn contains_scaled(&self, x: &[i128; 4], den_x: i128) -> bool {
        // x / den_x = k * hnf / den  <=>  x * den = k * hnf * den_x
        let mut r: Vec<i128> = x.iter().map(|v| v * self.den).collect();
        for i in 0..4 {
            let piv = self.hnf[i][i] * den_x;
            if r[i] % piv != 0 {
                return false;
            }
            let k = r[i] / piv;
            for j in i..4 {
                r[j] -= k * self.hnf[i][j] * den_x;
            }
        }
        r.iter().all(|&v| v == 0)
    }

    pub fn contains(&self, x: &OElt) -> bool {
        self.contains_scaled(x, 1)
    }

    pub fn contains_rat(&self, x: &[BigRational]) -> bool {
        let den = x.iter().fold(BigInt::one(), |acc, v| num::integer::lcm(acc, v.denom().clone()));
        let Some(d) = den.to_i128() else { return false };
        let mut xi = [0i128; 4];
        for k in 0..4 {
            match (&x[k] * qi(d)).to_integer().to_i128() {
                Some(v) => xi[k] = v,
                None => return false,
            }
        }
        self.contains_scaled(&xi, d)
    }

    pub fn contains_quat(&self, q: &Quat) -> bool {
        self.parent.rat_coords(q).map(|c| self.contains_rat(&c)).unwrap_or(false)
    }

    pub fn contains_lattice(&self, other: &Lattice4) -> bool {
        other.hnf.iter().all(|row| self.contains_scaled(row, other.den))
    }

    pub fn contains_one(&self) -> bool {
        self.contains(&[1, 0, 0, 0])
    }

    /// `[O^m : L]`; errors unless `L` lies in the maximal order.
    pub fn level(&self) -> Result<u128> {
        if self.den != 1 {
            return Err(Error::NotContained("the maximal order"));
        }
        Ok((0..4).map(|i| self.hnf[i][i] as u128).product())
    }

    /// Basis of the trace-zero sublattice in `i1, i2, i3` coordinates.
    pub fn trace_zero_basis(&self) -> Result<IMat> {
        let rows = self.basis_elts()?;
        let col: IMat = rows.iter().map(|r| vec![self.parent.trd(r)]).collect();
        let (_, u, _) = hnf_with_transform(&col);
        Ok((1..4)
            .map(|k| {
                let mut x = [0i128; 4];
                for (i, r) in rows.iter().enumerate() {
                    for j in 0..4 {
                        x[j] += u[k][i] * r[j];
                    }
                }
                self.parent.icoords(&x).to_vec()
            })
            .collect())
    }

    /// Generator of the trace ideal `trd(L) = gZ`.
    pub fn trace_generator(&self) -> Result<i128> {
        let rows = self.basis_elts()?;
        Ok(rows.iter().fold(0, |g, r| gcd(g, self.parent.trd(r))))
    }

    pub fn shape(&self) -> Result<Shape> {
        if !self.contains_one() {
            return Err(Error::Precondition("shape needs 1 in the lattice".into()));
        }
        let n = self.level()?;
        let b0 = self.trace_zero_basis()?;
        let s = smith(&b0);
        let d = s.diagonal();
        let m: u128 = d.iter().map(|&x| x as u128).product();
        let g = self.trace_generator()?;
        let trace_index = (2 / g) as u8;
        if n % m != 0 || !(n / m == 1 || n / m == 2) || (n / m) as u8 * trace_index != 2 {
            return Err(Error::TheoremViolation(format!(
                "level {n}, trace-zero index {m}, trace ideal {g}Z are inconsistent"
            )));
        }
        Ok(Shape { m1: d[0] as u64, m2: d[1] as u64, m3: d[2] as u64, e: (n / m) as u8, trace_index })
    }

    /// Closure under multiplication on the 16 basis products, plus `1 in L`.
    pub fn is_order(&self) -> bool {
        if !self.contains_one() {
            return false;
        }
        let rows = self.rows_q();
        let qs: Vec<Quat> = rows.iter().map(|r| self.parent.rat_to_quat(r)).collect();
        qs.iter().all(|a| {
            qs.iter().all(|b| {
                let prod = a.mul(b).expect("same algebra");
                self.contains_quat(&prod)
            })
        })
    }

    /// `sqrt |det(trd(b_i conj(b_j)))|` over a basis of the order.
    pub fn reduced_discriminant(&self) -> Result<u128> {
        if !self.is_order() {
            return Err(Error::NotAnOrder("reduced discriminant needs an order".into()));
        }
        let g = self.parent.tgram.map(|r| r.map(qi).to_vec()).to_vec();
        let b = self.rows_q();
        let gram = qmat_mul(&qmat_mul(&b, &g), &transpose(&b));
        let det = qmat_det(&gram).abs();
        let det = det.to_integer();
        let root = det.sqrt();
        if &root * &root != det {
            return Err(Error::TheoremViolation(format!("Gram determinant {det} is not a square")));
        }
        root.to_u128().ok_or_else(|| Error::Precondition("discriminant overflow".into()))
    }

    /// `g L g^{-1}` and whether it lies in the maximal order.
    pub fn conjugate(&self, g: &Quat) -> Result<(Lattice4, bool)> {
        let ginv = g.inverse()?;
        let rows: Result<QMat> = self
            .basis_quats()
            .iter()
            .map(|b| self.parent.rat_coords(&g.mul(b)?.mul(&ginv)?))
            .collect();
        let l = hnf_canonicalize(&rows?, &self.parent)?;
        let inside = l.in_maximal();
        Ok((l, inside))
    }

    pub fn sum(&self, other: &Lattice4) -> Result<Lattice4> {
        let mut rows = self.rows_q();
        rows.extend(other.rows_q());
        hnf_canonicalize(&rows, &self.parent)
    }

    /// Dual under the coordinate dot product.
    pub fn dual(&self) -> Lattice4 {
        let inv = qmat_inverse(&self.rows_q()).expect("full rank");
        hnf_canonicalize(&transpose(&inv), &self.parent).expect("full rank")
    }

    pub fn intersect(&self, other: &Lattice4) -> Result<Lattice4> {
        Ok(self.dual().sum(&other.dual())?.dual())
    }

    /// `Z + f L`.
    pub fn scalar_plus(&self, f: i128) -> Result<Lattice4> {
        let mut rows: QMat = self.rows_q().into_iter().map(|r| r.into_iter().map(|x| x * qi(f)).collect()).collect();
        rows.push(vec![qi(1), qi(0), qi(0), qi(0)]);
        hnf_canonicalize(&rows, &self.parent)
    }
}

pub fn level(l: &Lattice4) -> Result<u128> {
    l.level()
}

pub fn shape(l: &Lattice4) -> Result<Shape> {
    l.shape()
}

pub fn is_order(l: &Lattice4) -> bool {
    l.is_order()
}

pub fn intersect(l1: &Lattice4, l2: &Lattice4) -> Result<Lattice4> {
    l1.intersect(l2)
}

pub fn conjugate_lattice(g: &Quat, l: &Lattice4) -> Result<(Lattice4, bool)> {
    l.conjugate(g)
}

pub fn reduced_discriminant(l: &Lattice4) -> Result<u128> {
    l.reduced_discriminant()
}

/// Elementary divisors of `l1` inside `l2`.
pub fn invariant_factors(l1: &Lattice4, l2: &Lattice4) -> Result<InvariantFactors> {
    let inv = qmat_inverse(&l2.rows_q()).expect("full rank");
    let c = qmat_mul(&l1.rows_q(), &inv);
    if !c.iter().flatten().all(|x| x.is_integer()) {
        return Err(Error::NotContained("the second lattice"));
    }
    let ci = scale_to_integers(&c, &BigInt::one());
    let d = smith(&ci).diagonal();
    Ok(InvariantFactors::from_diagonal([d[0] as u128, d[1] as u128, d[2] as u128, d[3] as u128]))
}

/// `a4 | t1` for the invariant factors in the maximal order.
pub fn is_balanced(l: &Lattice4) -> Result<bool> {
    let max = Lattice4::maximal(&l.parent);
    Ok(invariant_factors(l, &max)?.balanced())
}

/// A maximal order containing the order `l`, in the same coordinates.
pub fn saturate_to_maximal(l: &Lattice4) -> Result<Lattice4> {
    if !l.is_order() {
        return Err(Error::NotAnOrder("saturation needs an order".into()));
    }
    let parent = &l.parent;
    let std: QMat = l.basis_quats().iter().map(quat_row).collect();
    let sat = std_saturate(parent.alg(), &std)?;
    let rows: Result<QMat> = sat.iter().map(|r| parent.rat_coords(&row_quat(parent.alg(), r))).collect();
    hnf_canonicalize(&rows?, parent)
}
