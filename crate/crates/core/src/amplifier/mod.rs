//! Hecke combinations `sum y_l kappa_l` under the trivial-character
//! convolution `kappa_m * kappa_n^* = sum_{t | (m, n)} kappa_{mn/t^2}`, the
//! amplifier built from them, and exponent calculators.

pub mod exponents;

use std::collections::BTreeMap;
use std::fmt::Debug;

use num::{BigInt, BigRational, Complex, One, Signed, Zero};
use rand::Rng;

use crate::arith::{gcd, is_prime, primes_in};
use crate::error::{Error, Result};

pub use exponents::{
    exponent_bound, microlocal_profile, minimal_type_profile, newform_bound, ExponentReport, Monomial,
};

/// Exact coefficient ring for Hecke combinations.
pub trait Coeff: Clone + Debug + PartialEq + Zero + One + Send + Sync {
    fn conj(&self) -> Self;
    fn norm_sqr(&self) -> BigRational;
    fn is_real(&self) -> bool;
    fn from_rational(x: BigRational) -> Self;
}

impl Coeff for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }
    fn norm_sqr(&self) -> BigRational {
        self * self
    }
    fn is_real(&self) -> bool {
        true
    }
    fn from_rational(x: BigRational) -> Self {
        x
    }
}

impl Coeff for Complex<BigRational> {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn norm_sqr(&self) -> BigRational {
        Complex::norm_sqr(self)
    }
    fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    fn from_rational(x: BigRational) -> Self {
        Complex::new(x, BigRational::zero())
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Finitely supported `l -> y_l`, indices coprime to the bad set.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeCombo<C: Coeff> {
    coeffs: BTreeMap<u64, C>,
    bad: Vec<u64>,
}

impl<C: Coeff> HeckeCombo<C> {
    pub fn zero(bad: &[u64]) -> Self {
        HeckeCombo { coeffs: BTreeMap::new(), bad: bad.to_vec() }
    }

    /// `c kappa_n`.
    pub fn kappa(n: u64, c: C, bad: &[u64]) -> Result<Self> {
        let mut out = Self::zero(bad);
        out.add_term(n, c)?;
        Ok(out)
    }

    pub fn add_term(&mut self, n: u64, c: C) -> Result<()> {
        if n == 0 || self.bad.iter().any(|&p| n % p == 0) {
            return Err(Error::Usage(format!("index {n} meets the bad set {:?}", self.bad)));
        }
        let slot = self.coeffs.entry(n).or_insert_with(C::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.coeffs.remove(&n);
        }
        Ok(())
    }

    pub fn coeff(&self, n: u64) -> C {
        self.coeffs.get(&n).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, C> {
        &self.coeffs
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn bad(&self) -> &[u64] {
        &self.bad
    }

    /// Hecke operators are self-adjoint here, so only coefficients conjugate.
    pub fn adjoint(&self) -> Self {
        HeckeCombo {
            coeffs: self.coeffs.iter().map(|(&n, c)| (n, c.conj())).collect(),
            bad: self.bad.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (&n, c) in &other.coeffs {
            out.add_term(n, c.clone())?;
        }
        Ok(out)
    }

    /// Product in the Hecke algebra.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(&self.bad);
        for (&m, a) in &self.coeffs {
            for (&n, b) in &other.coeffs {
                let ab = a.clone() * b.clone();
                let g = gcd(m as i128, n as i128) as u64;
                for t in 1..=g {
                    if g % t == 0 {
                        out.add_term(m / t * (n / t), ab.clone())?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Eigenvalue on a form with Hecke eigenvalues `s`.
    pub fn eval(&self, s: &SatakeSample) -> Result<C> {
        let mut acc = C::zero();
        for (&n, c) in &self.coeffs {
            acc = acc + c.clone() * C::from_rational(s.eigen(n)?);
        }
        Ok(acc)
    }
}

/// `a * b^*`.
pub fn convolve<C: Coeff>(a: &HeckeCombo<C>, b: &HeckeCombo<C>) -> Result<HeckeCombo<C>> {
    a.mul(&b.adjoint())
}

/// Normalized Hecke eigenvalues `lambda(p)` in `[-2, 2]` at finitely many
/// primes, extended by `lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1})`
/// and multiplicativity.
#[derive(Clone, Debug, PartialEq)]
pub struct SatakeSample {
    pub lambda_p: BTreeMap<u64, BigRational>,
}

impl SatakeSample {
    pub fn new(lambda_p: BTreeMap<u64, BigRational>) -> Result<Self> {
        for (p, l) in &lambda_p {
            if !is_prime(*p) || l.abs() > q(2) {
                return Err(Error::Usage(format!("lambda({p}) = {l} is not a valid sample")));
            }
        }
        Ok(SatakeSample { lambda_p })
    }

    /// Uniform on a grid of step `1/1000` in `[-2, 2]`.
    pub fn random<R: Rng>(primes: &[u64], rng: &mut R) -> Self {
        let lambda_p = primes
            .iter()
            .map(|&p| (p, BigRational::new(BigInt::from(rng.gen_range(-2000i64..=2000)), BigInt::from(1000))))
            .collect();
        SatakeSample { lambda_p }
    }

    pub fn constant(primes: &[u64], value: BigRational) -> Self {
        SatakeSample { lambda_p: primes.iter().map(|&p| (p, value.clone())).collect() }
    }

    pub fn prime_power(&self, p: u64, k: u32) -> Result<BigRational> {
        let l = self
            .lambda_p
            .get(&p)
            .ok_or_else(|| Error::Usage(format!("sample has no eigenvalue at {p}")))?;
        let (mut prev, mut cur) = (BigRational::zero(), BigRational::one());
        for _ in 0..k {
            let next = l * &cur - &prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    pub fn eigen(&self, n: u64) -> Result<BigRational> {
        let mut acc = BigRational::one();
        for (p, k) in crate::arith::factorize(n) {
            acc *= self.prime_power(p, k)?;
        }
        Ok(acc)
    }
}

/// Prime set `P` in `[Lambda, 2 Lambda]` avoiding `bad`, with unimodular
/// signs `c_r` for `r` and `r^2`.
#[derive(Clone, Debug)]
pub struct AmplifierSpec<C: Coeff> {
    pub lambda: f64,
    pub bad: Vec<u64>,
    pub primes: Vec<u64>,
    pub signs: BTreeMap<u64, C>,
}

pub fn amplifier_primes(lambda: f64, bad: &[u64]) -> Vec<u64> {
    let lo = lambda.ceil().max(2.0) as u64;
    let hi = (2.0 * lambda).floor() as u64;
    primes_in(lo, hi).into_iter().filter(|p| !bad.contains(p)).collect()
}

impl<C: Coeff> AmplifierSpec<C> {
    /// All signs equal to 1.
    pub fn unit_signs(lambda: f64, bad: &[u64]) -> Self {
        let primes = amplifier_primes(lambda, bad);
        let signs = primes.iter().flat_map(|&p| [(p, C::one()), (p * p, C::one())]).collect();
        AmplifierSpec { lambda, bad: bad.to_vec(), primes, signs }
    }

    pub fn with_signs(lambda: f64, bad: &[u64], signs: BTreeMap<u64, C>) -> Result<Self> {
        let primes = amplifier_primes(lambda, bad);
        for &p in &primes {
            for r in [p, p * p] {
                let c = signs.get(&r).ok_or_else(|| Error::Usage(format!("missing sign for {r}")))?;
                if !c.norm_sqr().is_one() {
                    return Err(Error::Usage(format!("sign for {r} is not unimodular")));
                }
            }
        }
        Ok(AmplifierSpec { lambda, bad: bad.to_vec(), primes, signs })
    }

    fn sign(&self, r: u64) -> C {
        self.signs.get(&r).cloned().unwrap_or_else(C::one)
    }
}

/// `c_r = |lambda(r)| / lambda(r)`, and 1 where `lambda(r) = 0`.
pub fn sign_of(x: &BigRational) -> BigRational {
    if x.is_negative() {
        q(-1)
    } else {
        q(1)
    }
}

impl AmplifierSpec<BigRational> {
    pub fn from_sample(lambda: f64, bad: &[u64], s: &SatakeSample) -> Result<Self> {
        let primes = amplifier_primes(lambda, bad);
        let mut signs = BTreeMap::new();
        for &p in &primes {
            signs.insert(p, sign_of(&s.prime_power(p, 1)?));
            signs.insert(p * p, sign_of(&s.prime_power(p, 2)?));
        }
        Ok(AmplifierSpec { lambda, bad: bad.to_vec(), primes, signs })
    }
}

/// `delta * delta^* + gamma * gamma^*` with `delta = sum c_r kappa_r`,
/// `gamma = sum c_{r^2} kappa_{r^2}`.
pub fn build_amplifier<C: Coeff>(spec: &AmplifierSpec<C>) -> Result<HeckeCombo<C>> {
    if spec.primes.is_empty() {
        return Err(Error::Usage(format!("no admissible primes in [{}, {}]", spec.lambda, 2.0 * spec.lambda)));
    }
    let mut delta = HeckeCombo::zero(&spec.bad);
    let mut gamma = HeckeCombo::zero(&spec.bad);
    for &r in &spec.primes {
        delta.add_term(r, spec.sign(r))?;
        gamma.add_term(r * r, spec.sign(r * r))?;
    }
    convolve(&delta, &delta)?.add(&convolve(&gamma, &gamma)?)
}

/// Which of the allowed index families `l` falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportClass {
    One,
    /// `l1 l2`
    Product,
    /// `l1^2 l2^2`
    SquareProduct,
}

pub fn support_class(n: u64, primes: &[u64]) -> Option<SupportClass> {
    if n == 1 {
        return Some(SupportClass::One);
    }
    for (i, &a) in primes.iter().enumerate() {
        for &b in &primes[i..] {
            if n == a * b {
                return Some(SupportClass::Product);
            }
            if n == a * a * b * b {
                return Some(SupportClass::SquareProduct);
            }
        }
    }
    None
}

/// Support in the three families, every index at most `16 Lambda^4`,
/// `|y_1| <= 2|P|` (equality for unimodular signs) and `|y_l| <= 2` otherwise.
pub fn check_amplifier<C: Coeff>(spec: &AmplifierSpec<C>, k: &HeckeCombo<C>) -> Result<()> {
    let cap = 16.0 * spec.lambda.powi(4);
    let np = spec.primes.len() as i64;
    for (&n, y) in k.coeffs() {
        let class = support_class(n, &spec.primes)
            .ok_or_else(|| Error::TheoremViolation(format!("index {n} outside the allowed support")))?;
        if n as f64 > cap {
            return Err(Error::TheoremViolation(format!("index {n} exceeds 16 Lambda^4")));
        }
        let limit = if class == SupportClass::One { q(2 * np) } else { q(2) };
        if y.norm_sqr() > &limit * &limit {
            return Err(Error::TheoremViolation(format!("|y_{n}| exceeds {limit}")));
        }
    }
    if k.coeff(1) != C::from_rational(q(2 * np)) {
        return Err(Error::TheoremViolation(format!("y_1 = {:?}, expected {}", k.coeff(1), 2 * np)));
    }
    Ok(())
}

/// `(sum |lambda(r)|)^2 + (sum |lambda(r^2)|)^2`, checked against `|P|^2 / 8`.
pub fn eigenvalue_lower_bound(primes: &[u64], s: &SatakeSample) -> Result<BigRational> {
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for &r in primes {
        a += s.prime_power(r, 1)?.abs();
        b += s.prime_power(r, 2)?.abs();
    }
    let value = &a * &a + &b * &b;
    let n = q(primes.len() as i64);
    if value < &n * &n / q(8) {
        return Err(Error::TheoremViolation(format!("lambda_ur = {value} < |P|^2/8")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    type R = BigRational;

    #[test]
    fn prime_relation() {
        let bad = [2, 3];
        let k5 = HeckeCombo::<R>::kappa(5, q(1), &bad).unwrap();
        let c = convolve(&k5, &k5).unwrap();
        let want = HeckeCombo::kappa(25, q(1), &bad).unwrap().add(&HeckeCombo::kappa(1, q(1), &bad).unwrap()).unwrap();
        assert_eq!(c, want);
        let one = HeckeCombo::<R>::kappa(1, q(1), &bad).unwrap();
        let k35 = HeckeCombo::<R>::kappa(35, q(3), &bad).unwrap();
        assert_eq!(convolve(&one, &k35).unwrap(), k35);
        assert!(HeckeCombo::<R>::kappa(6, q(1), &bad).is_err());
    }

    #[test]
    fn single_prime_amplifier() {
        let spec = AmplifierSpec::<R>::unit_signs(5.0, &[2, 3, 7]);
        assert_eq!(spec.primes, vec![5]);
        let k = build_amplifier(&spec).unwrap();
        assert_eq!(k.coeff(1), q(2));
        assert_eq!(k.coeff(25), q(2));
        assert_eq!(k.coeff(625), q(1));
        assert_eq!(k.coeffs().len(), 3);
        check_amplifier(&spec, &k).unwrap();
    }

    #[test]
    fn edge_samples() {
        let p = [5u64, 7];
        let two = SatakeSample::constant(&p, q(2));
        assert_eq!(eigenvalue_lower_bound(&p, &two).unwrap(), q(4 * 4 + 6 * 6));
        let zero = SatakeSample::constant(&p, q(0));
        assert_eq!(eigenvalue_lower_bound(&p, &zero).unwrap(), q(4));
        assert_eq!(two.prime_power(5, 3).unwrap(), q(4));
    }
}
