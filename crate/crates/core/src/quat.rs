//! Rational quaternion algebras `(p, q)`, exact element arithmetic, the
//! real matrix realization and the hyperbolic point-pair invariant.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::{factorize, is_squarefree, jacobi};
use crate::error::{Error, Result};

/// Indefinite division algebra with basis `1, I, J, IJ`, `I^2 = p`, `J^2 = q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatAlg {
    p: i64,
    q: i64,
    ramified: Vec<u64>,
    d: u64,
}

impl QuatAlg {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p <= 0 || q >= 0 {
            return Err(Error::Usage(format!(
                "need p > 0 and q < 0 for an indefinite algebra, got ({p}, {q})"
            )));
        }
        let ramified = ramified_set(p, q)?;
        if ramified.is_empty() {
            return Err(Error::Usage(format!("({p}, {q}) is split, not a division algebra")));
        }
        let d = ramified.iter().product();
        Ok(QuatAlg { p, q, ramified, d })
    }

    /// The discriminant 6 algebra `(3, -1)`.
    pub fn disc6() -> Self {
        QuatAlg::new(3, -1).expect("(3,-1) is a division algebra")
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn ramified(&self) -> &[u64] {
        &self.ramified
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn elem(&self, c: [BigRational; 4]) -> Quat {
        Quat { p: self.p, q: self.q, c }
    }

    pub fn from_ints(&self, c: [i64; 4]) -> Quat {
        self.elem(c.map(|x| BigRational::from_integer(BigInt::from(x))))
    }

    pub fn scalar(&self, x: i64) -> Quat {
        self.from_ints([x, 0, 0, 0])
    }

    pub fn one(&self) -> Quat {
        self.scalar(1)
    }

    pub fn i(&self) -> Quat {
        self.from_ints([0, 1, 0, 0])
    }

    pub fn j(&self) -> Quat {
        self.from_ints([0, 0, 1, 0])
    }

    pub fn ij(&self) -> Quat {
        self.from_ints([0, 0, 0, 1])
    }

    /// Coordinate functionals `W_k` with `tr(iota_inf(x) W_k) = k`-th
    /// coordinate of `x` in `basis`.
    pub fn dual_matrices(&self, basis: &[Quat; 4]) -> [Mat2; 4] {
        // rows: vec(iota(b_j)) paired against vec(W) = (w11, w12, w21, w22)
        let mut a = [[0.0f64; 4]; 4];
        for (j, b) in basis.iter().enumerate() {
            let m = iota_inf(b);
            a[j] = [m[0][0], m[1][0], m[0][1], m[1][1]];
        }
        let mut out = [[[0.0; 2]; 2]; 4];
        for (k, w) in out.iter_mut().enumerate() {
            let mut rhs = [0.0; 4];
            rhs[k] = 1.0;
            let v = solve4(a, rhs);
            *w = [[v[0], v[1]], [v[2], v[3]]];
        }
        out
    }
}

impl fmt::Display for QuatAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// Element `x0 + x1 I + x2 J + x3 IJ` with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quat {
    p: i64,
    q: i64,
    c: [BigRational; 4],
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl Quat {
    pub fn coords(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn x(&self, i: usize) -> &BigRational {
        &self.c[i]
    }

    pub fn pq(&self) -> (i64, i64) {
        (self.p, self.q)
    }

    fn check(&self, other: &Quat) -> Result<()> {
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::Usage(format!(
                "mixing elements of ({}, {}) and ({}, {})",
                self.p, self.q, other.p, other.q
            )));
        }
        Ok(())
    }

    fn with(&self, c: [BigRational; 4]) -> Quat {
        Quat { p: self.p, q: self.q, c }
    }

    pub fn mul(&self, other: &Quat) -> Result<Quat> {
        self.check(other)?;
        let (p, q) = (rat(self.p), rat(self.q));
        let pq = &p * &q;
        let [a0, a1, a2, a3] = &self.c;
        let [b0, b1, b2, b3] = &other.c;
        Ok(self.with([
            a0 * b0 + &p * a1 * b1 + &q * a2 * b2 - &pq * a3 * b3,
            a0 * b1 + a1 * b0 - &q * a2 * b3 + &q * a3 * b2,
            a0 * b2 + a2 * b0 + &p * a1 * b3 - &p * a3 * b1,
            a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
        ]))
    }

    pub fn add(&self, other: &Quat) -> Result<Quat> {
        self.check(other)?;
        Ok(self.with(std::array::from_fn(|i| &self.c[i] + &other.c[i])))
    }

    pub fn sub(&self, other: &Quat) -> Result<Quat> {
        self.check(other)?;
        Ok(self.with(std::array::from_fn(|i| &self.c[i] - &other.c[i])))
    }

    pub fn neg(&self) -> Quat {
        self.with(self.c.clone().map(|x| -x))
    }

    pub fn scale(&self, s: &BigRational) -> Quat {
        self.with(std::array::from_fn(|i| &self.c[i] * s))
    }

    pub fn conj(&self) -> Quat {
        let [a0, a1, a2, a3] = self.c.clone();
        self.with([a0, -a1, -a2, -a3])
    }

    pub fn trd(&self) -> BigRational {
        &self.c[0] * rat(2)
    }

    pub fn nrd(&self) -> BigRational {
        let [a0, a1, a2, a3] = &self.c;
        let (p, q) = (rat(self.p), rat(self.q));
        a0 * a0 - &p * a1 * a1 - &q * a2 * a2 + &p * &q * a3 * a3
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn inverse(&self) -> Result<Quat> {
        let n = self.nrd();
        if n.is_zero() {
            return Err(Error::Precondition("element has reduced norm 0".into()));
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn to_f64(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.c[i].to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "I", "J", "IJ"];
        let mut first = true;
        for (x, n) in self.c.iter().zip(names) {
            if x.is_zero() {
                continue;
            }
            let sign = if x.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = x.abs();
            if n.is_empty() {
                write!(f, "{sign}{mag}")?;
            } else if mag.is_one() {
                write!(f, "{sign}{n}")?;
            } else {
                write!(f, "{sign}{mag}*{n}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Local Hilbert symbol `(a, b)_l` for nonzero integers and a prime `l`.
pub fn hilbert_symbol(a: i64, b: i64, l: u64) -> i32 {
    assert!(a != 0 && b != 0, "hilbert symbol of zero");
    let li = l as i64;
    let split = |mut x: i64| {
        let mut v = 0u32;
        while x % li == 0 {
            x /= li;
            v += 1;
        }
        (v, x)
    };
    let (alpha, u) = split(a);
    let (beta, v) = split(b);
    if l == 2 {
        let eps = |x: i64| ((x - 1) / 2).rem_euclid(2);
        let omg = |x: i64| ((x as i128 * x as i128 - 1) / 8).rem_euclid(2) as i64;
        let e = eps(u) * eps(v) + alpha as i64 * omg(v) + beta as i64 * omg(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let eps_l = ((l - 1) / 2) as i64;
        let mut s = if (alpha as i64 * beta as i64 * eps_l) % 2 == 0 { 1 } else { -1 };
        if beta % 2 == 1 {
            s *= jacobi(u as i128, li as i128);
        }
        if alpha % 2 == 1 {
            s *= jacobi(v as i128, li as i128);
        }
        s
    }
}

/// Primes at which `(p, q)` ramifies, cross-checked by the product formula.
pub fn ramified_set(p: i64, q: i64) -> Result<Vec<u64>> {
    if p == 0 || q == 0 || !is_squarefree(p.unsigned_abs()) || !is_squarefree(q.unsigned_abs()) {
        return Err(Error::Usage(format!("({p}, {q}) must be nonzero squarefree integers")));
    }
    let mut candidates: Vec<u64> = factorize(2 * p.unsigned_abs() * q.unsigned_abs())
        .into_iter()
        .map(|(l, _)| l)
        .collect();
    candidates.sort_unstable();
    let ram: Vec<u64> = candidates
        .into_iter()
        .filter(|&l| hilbert_symbol(p, q, l) == -1)
        .collect();
    let infinite = p < 0 && q < 0;
    if (ram.len() + usize::from(infinite)) % 2 != 0 {
        return Err(Error::TheoremViolation(format!(
            "Hilbert product formula fails for ({p}, {q}): {ram:?}"
        )));
    }
    Ok(ram)
}

pub type Mat2 = [[f64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn mat2_det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn frobenius_sq(a: &Mat2) -> f64 {
    a.iter().flatten().map(|x| x * x).sum()
}

/// `a + bI + cJ + dIJ -> [[a + b sqrt(p), q(c + d sqrt(p))], [c - d sqrt(p), a - b sqrt(p)]]`.
pub fn iota_inf(a: &Quat) -> Mat2 {
    let s = (a.p as f64).sqrt();
    let q = a.q as f64;
    let [x0, x1, x2, x3] = a.to_f64();
    [[x0 + x1 * s, q * (x2 + x3 * s)], [x2 - x3 * s, x0 - x1 * s]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Usage(format!("({x}, {y}) is not in the upper half plane")));
        }
        Ok(UpperHalfPoint { x, y })
    }

    pub fn i() -> Self {
        UpperHalfPoint { x: 0.0, y: 1.0 }
    }

    /// Moebius action of a matrix with positive determinant.
    pub fn act(&self, g: &Mat2) -> UpperHalfPoint {
        let (a, b, c, d) = (g[0][0], g[0][1], g[1][0], g[1][1]);
        let (x, y) = (self.x, self.y);
        let den_re = c * x + d;
        let den = den_re * den_re + c * c * y * y;
        let num_re = (a * x + b) * den_re + a * c * y * y;
        let det = a * d - b * c;
        UpperHalfPoint { x: num_re / den, y: det * y / den }
    }

    /// `sigma_z = [[sqrt y, x/sqrt y], [0, 1/sqrt y]]`, which sends `i` to `z`.
    pub fn sigma(&self) -> Mat2 {
        let r = self.y.sqrt();
        [[r, self.x / r], [0.0, 1.0 / r]]
    }

    pub fn sigma_inv(&self) -> Mat2 {
        let r = self.y.sqrt();
        [[1.0 / r, -self.x / r], [0.0, r]]
    }
}

/// `|z1 - z2|^2 / (4 y1 y2)`.
pub fn u_dist(z1: &UpperHalfPoint, z2: &UpperHalfPoint) -> f64 {
    let dx = z1.x - z2.x;
    let dy = z1.y - z2.y;
    (dx * dx + dy * dy) / (4.0 * z1.y * z2.y)
}

/// `u(z, g z)` for a matrix of positive determinant, computed through the
/// Frobenius norm of `sigma_z^{-1} g sigma_z`, which is stable near `u = 0`.
pub fn u_displacement(z: &UpperHalfPoint, g: &Mat2) -> f64 {
    let det = mat2_det(g);
    let y = mat2_mul(&mat2_mul(&z.sigma_inv(), g), &z.sigma());
    (frobenius_sq(&y) / det - 2.0) / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl ZBox {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_min <= x_max && y_min <= y_max && y_min > 0.0) {
            return Err(Error::Usage(format!(
                "empty or invalid box [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(ZBox { x_min, x_max, y_min, y_max })
    }

    pub fn contains(&self, z: &UpperHalfPoint) -> bool {
        (self.x_min..=self.x_max).contains(&z.x) && (self.y_min..=self.y_max).contains(&z.y)
    }
}

impl Default for ZBox {
    fn default() -> Self {
        ZBox { x_min: -1.0, x_max: 1.0, y_min: 0.5, y_max: 2.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxConstant {
    pub delta: f64,
    pub t: f64,
}

/// Box constant for coordinates in `1, I, J, IJ`.
pub fn box_constant(delta: f64, zbox: &ZBox, alg: &QuatAlg) -> BoxConstant {
    let basis = [alg.one(), alg.i(), alg.j(), alg.ij()];
    box_constant_for_basis(delta, zbox, alg, &basis)
}

/// Upper bound for `max |coordinate|` over norm-1 elements moving some point
/// of the box by at most `delta`, coordinates taken in `basis`.
///
/// With `Y = sigma^{-1} X sigma` we have `|Y|_F^2 = (4u + 2) det X` and
/// `a_k = tr(Y sigma^{-1} W_k sigma)`, so Cauchy-Schwarz gives
/// `|a_k| <= sqrt(4 delta + 2) |sigma^{-1} W_k sigma|_F`. The last factor is
/// bounded over the box term by term.
pub fn box_constant_for_basis(delta: f64, zbox: &ZBox, alg: &QuatAlg, basis: &[Quat; 4]) -> BoxConstant {
    assert!(delta > 0.0, "delta must be positive");
    let ws = alg.dual_matrices(basis);
    let worst = ws
        .iter()
        .map(|w| conj_frobenius_sup(w, zbox))
        .fold(0.0f64, f64::max);
    let t = (4.0 * delta + 2.0).sqrt() * worst.sqrt() * (1.0 + 1e-12);
    BoxConstant { delta, t }
}

/// Sup over the box of `|sigma_z^{-1} W sigma_z|_F^2`, bounded by the sum of
/// the sups of its four nonnegative terms.
fn conj_frobenius_sup(w: &Mat2, zbox: &ZBox) -> f64 {
    let (a, b, c, d) = (w[0][0], w[0][1], w[1][0], w[1][1]);
    let xs = [zbox.x_min, zbox.x_max];
    let t1 = xs.iter().map(|x| (a - c * x).powi(2)).fold(0.0, f64::max);
    let t4 = xs.iter().map(|x| (c * x + d).powi(2)).fold(0.0, f64::max);
    let t3 = c * c * zbox.y_max * zbox.y_max;
    // g(x) = -c x^2 + (a - d) x + b
    let g = |x: f64| -c * x * x + (a - d) * x + b;
    let mut gmax = xs.iter().map(|&x| g(x).abs()).fold(0.0, f64::max);
    if c != 0.0 {
        let v = (a - d) / (2.0 * c);
        if (zbox.x_min..=zbox.x_max).contains(&v) {
            gmax = gmax.max(g(v).abs());
        }
    }
    let t2 = (gmax / zbox.y_min).powi(2);
    t1 + t2 + t3 + t4
}

/// Samples norm-1 real matrices `X` with `u(z, X z) <= delta` for `z` in the
/// box and returns the first one whose coordinates exceed `t`.
pub fn falsify_box_constant<R: Rng>(
    bc: &BoxConstant,
    zbox: &ZBox,
    alg: &QuatAlg,
    basis: &[Quat; 4],
    samples: usize,
    rng: &mut R,
) -> Option<(UpperHalfPoint, [f64; 4])> {
    let ws = alg.dual_matrices(basis);
    let smax = 2.0 * bc.delta.sqrt().asinh();
    for _ in 0..samples {
        let z = UpperHalfPoint {
            x: rng.gen_range(zbox.x_min..=zbox.x_max),
            y: rng.gen_range(zbox.y_min..=zbox.y_max),
        };
        let rot = |th: f64| [[th.cos(), -th.sin()], [th.sin(), th.cos()]];
        let s: f64 = rng.gen_range(0.0..=smax);
        let diag = [[(s / 2.0).exp(), 0.0], [0.0, (-s / 2.0).exp()]];
        let k1 = rot(rng.gen_range(0.0..std::f64::consts::TAU));
        let k2 = rot(rng.gen_range(0.0..std::f64::consts::TAU));
        let y = mat2_mul(&mat2_mul(&k1, &diag), &k2);
        let x = mat2_mul(&mat2_mul(&z.sigma(), &y), &z.sigma_inv());
        let coords: [f64; 4] = std::array::from_fn(|k| {
            let m = mat2_mul(&x, &ws[k]);
            m[0][0] + m[1][1]
        });
        if coords.iter().any(|c| c.abs() > bc.t * (1.0 + 1e-9)) {
            return Some((z, coords));
        }
    }
    None
}

/// Gram matrix of `x -> |sigma_z^{-1} iota(x) sigma_z|_F^2` on `basis`.
pub fn frobenius_gram(basis: &[Quat], z: &UpperHalfPoint) -> Vec<Vec<f64>> {
    let ys: Vec<Mat2> = basis
        .iter()
        .map(|b| mat2_mul(&mat2_mul(&z.sigma_inv(), &iota_inf(b)), &z.sigma()))
        .collect();
    ys.iter()
        .map(|a| {
            ys.iter()
                .map(|b| (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| a[i][j] * b[i][j]).sum())
                .collect()
        })
        .collect()
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> [f64; 4] {
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..4 {
            let f = a[i][c] / a[c][c];
            for k in c..4 {
                a[i][k] -= f * a[c][k];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        let s: f64 = (i + 1..4).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_quat(alg: &QuatAlg, rng: &mut ChaCha8Rng) -> Quat {
        alg.elem(std::array::from_fn(|_| {
            BigRational::new(BigInt::from(rng.gen_range(-40i64..=40)), BigInt::from(rng.gen_range(1i64..=9)))
        }))
    }

    #[test]
    fn defining_relations() {
        let alg = QuatAlg::disc6();
        assert_eq!(alg.i().mul(&alg.j()).unwrap(), alg.ij());
        assert_eq!(alg.j().mul(&alg.i()).unwrap(), alg.ij().neg());
        assert_eq!(alg.i().mul(&alg.i()).unwrap(), alg.scalar(3));
        assert_eq!(alg.j().mul(&alg.j()).unwrap(), alg.scalar(-1));
        assert_eq!(alg.i().nrd(), rat(-3));
        assert_eq!(alg.j().nrd(), rat(1));
        assert_eq!(alg.one().trd(), rat(2));
    }

    #[test]
    fn mismatched_algebras_rejected() {
        let a = QuatAlg::disc6();
        let b = QuatAlg::new(2, -5).unwrap();
        assert!(matches!(a.one().mul(&b.one()), Err(Error::Usage(_))));
    }

    #[test]
    fn ramification() {
        assert_eq!(ramified_set(3, -1).unwrap(), vec![2, 3]);
        assert!(ramified_set(1, -1).unwrap().is_empty());
        assert!(QuatAlg::new(1, -1).is_err());
        assert!(ramified_set(4, -1).is_err());
        assert_eq!(QuatAlg::disc6().d(), 6);
    }

    #[test]
    fn iota_is_a_homomorphism() {
        let alg = QuatAlg::disc6();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (a, b) = (rand_quat(&alg, &mut rng), rand_quat(&alg, &mut rng));
            let lhs = iota_inf(&a.mul(&b).unwrap());
            let rhs = mat2_mul(&iota_inf(&a), &iota_inf(&b));
            for i in 0..2 {
                for j in 0..2 {
                    assert!((lhs[i][j] - rhs[i][j]).abs() <= 1e-9 * (1.0 + lhs[i][j].abs()));
                }
            }
            let n = a.nrd().to_f64().unwrap();
            assert!((mat2_det(&iota_inf(&a)) - n).abs() <= 1e-9 * (1.0 + n.abs()));
        }
    }

    #[test]
    fn point_pair_invariant() {
        let i = UpperHalfPoint::i();
        assert_eq!(u_dist(&i, &i), 0.0);
        assert!((u_dist(&i, &UpperHalfPoint::new(0.0, 2.0).unwrap()) - 0.125).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let g: Mat2 = [[rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)], [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]];
            if mat2_det(&g) <= 0.1 {
                continue;
            }
            let z1 = UpperHalfPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0)).unwrap();
            let z2 = UpperHalfPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0)).unwrap();
            let before = u_dist(&z1, &z2);
            let after = u_dist(&z1.act(&g), &z2.act(&g));
            assert!((before - after).abs() <= 1e-9 * (1.0 + before));
            let direct = u_dist(&z1, &z1.act(&g));
            assert!((u_displacement(&z1, &g) - direct).abs() <= 1e-9 * (1.0 + direct));
        }
    }

    #[test]
    fn box_constant_survives_sampling_and_is_monotone() {
        let alg = QuatAlg::disc6();
        let zbox = ZBox::default();
        let bc = box_constant(1.0, &zbox, &alg);
        assert!(box_constant(2.0, &zbox, &alg).t >= bc.t);
        assert!(bc.t >= 1.0);
        let basis = [alg.one(), alg.i(), alg.j(), alg.ij()];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(falsify_box_constant(&bc, &zbox, &alg, &basis, 20_000, &mut rng), None);
    }
}
