//! Sup-norm exponent calculators. Bounds are monomials `prod p^{r_p}` with
//! rational `r_p`, compared exactly; an exponent "on N" is reported as a
//! single rational only when `r_p / v_p(N)` is the same at every prime.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};

use crate::arith::Factored;
use crate::error::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `prod p^{r_p}` with rational exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Monomial(pub BTreeMap<u64, BigRational>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    /// `n^e`.
    pub fn pow_of(n: &Factored, e: BigRational) -> Self {
        let mut m = Monomial::one();
        for (&p, &k) in &n.0 {
            m.0.insert(p, &e * BigRational::from_integer(BigInt::from(k)));
        }
        m.normalize()
    }

    fn normalize(mut self) -> Self {
        self.0.retain(|_, e| !e.is_zero());
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (&p, e) in &other.0 {
            let slot = out.entry(p).or_insert_with(BigRational::zero);
            *slot = &*slot + e;
        }
        Monomial(out).normalize()
    }

    pub fn ln(&self) -> f64 {
        self.0.iter().map(|(&p, e)| e.to_f64().unwrap_or(f64::NAN) * (p as f64).ln()).sum()
    }

    /// Rational `x` with `self = base^x`, if one exists.
    pub fn exponent_on(&self, base: &Factored) -> Option<BigRational> {
        if self.0.keys().any(|p| base.exponent(*p) == 0) {
            return None;
        }
        let mut ratio: Option<BigRational> = None;
        for (&p, &k) in &base.0 {
            let r = self.0.get(&p).cloned().unwrap_or_else(BigRational::zero)
                / BigRational::from_integer(BigInt::from(k));
            match &ratio {
                None => ratio = Some(r),
                Some(x) if *x != r => return None,
                _ => {}
            }
        }
        Some(ratio.unwrap_or_else(BigRational::zero))
    }

    /// Exact comparison by clearing denominators: `prod p^{a_p D}` against
    /// `prod p^{b_p D}` as integers.
    pub fn cmp_exact(&self, other: &Monomial) -> Ordering {
        let mut diff = self.0.clone();
        for (&p, e) in &other.0 {
            let slot = diff.entry(p).or_insert_with(BigRational::zero);
            *slot = &*slot - e;
        }
        let den = diff.values().fold(BigInt::one(), |acc, e| num::integer::lcm(acc, e.denom().clone()));
        let (mut lhs, mut rhs) = (BigUint::one(), BigUint::one());
        for (&p, e) in &diff {
            let k = (e * BigRational::from_integer(den.clone())).to_integer();
            let pk = BigUint::from(p).pow(k.abs().to_u32().expect("exponent fits"));
            if k.is_positive() {
                lhs *= pk;
            } else if k.is_negative() {
                rhs *= pk;
            }
        }
        lhs.cmp(&rhs)
    }

    fn max(a: (Monomial, &'static str), b: (Monomial, &'static str)) -> (Monomial, &'static str) {
        if b.0.cmp_exact(&a.0) == Ordering::Greater {
            b
        } else {
            a
        }
    }

    fn min(a: (Monomial, &'static str), b: (Monomial, &'static str)) -> (Monomial, &'static str) {
        if b.0.cmp_exact(&a.0) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(p, e)| format!("{p}^({e})")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Per-prime local data for the minimal-type and microlocal families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalProfile {
    pub p: u64,
    pub c_p: u32,
    pub n_p: u32,
    pub d_p: u32,
}

#[derive(Clone, Debug)]
pub struct ExponentReport {
    pub mode: &'static str,
    /// Level of the order fed to the general bound.
    pub n_level: Factored,
    pub n1: Factored,
    pub c: Option<Factored>,
    pub c1: Option<Factored>,
    pub m_char: Option<Factored>,
    pub profile: Vec<LocalProfile>,
    /// Dimension of the representation of the unit group.
    pub dim: BigUint,
    pub branch: &'static str,
    /// The bound, without the `dim^{1/2}` factor when that is not a monomial.
    pub bound: Monomial,
    /// `ln` of the full bound, including the dimension.
    pub bound_ln: f64,
    /// Exponent on `N` (maingen) or on `C` (other modes), when uniform.
    pub exponent: Option<BigRational>,
    pub lambda_choices: Vec<String>,
    /// Local bound `C1^{1/2} prod (1 + 1/p)^{1/2}`, for comparison.
    pub local_bound: Option<f64>,
}

impl fmt::Display for ExponentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "N = {}, N1 = {}", self.n_level, self.n1)?;
        if let (Some(c), Some(c1)) = (&self.c, &self.c1) {
            writeln!(f, "C = {c}, C1 = {c1}")?;
        }
        if let Some(m) = &self.m_char {
            writeln!(f, "M = {m}")?;
        }
        for lp in &self.profile {
            writeln!(f, "p = {}: c_p = {}, n_p = {}, d_p = {}", lp.p, lp.c_p, lp.n_p, lp.d_p)?;
        }
        writeln!(f, "dim = {}", self.dim)?;
        writeln!(f, "branch: {}", self.branch)?;
        writeln!(f, "bound = {} (ln {:.6})", self.bound, self.bound_ln)?;
        match &self.exponent {
            Some(e) => writeln!(f, "exponent = {e}")?,
            None => writeln!(f, "exponent = not a single rational")?,
        }
        for l in &self.lambda_choices {
            writeln!(f, "Lambda: {l}")?;
        }
        if let Some(l) = self.local_bound {
            writeln!(f, "local bound = {l:.6}")?;
        }
        Ok(())
    }
}

/// `min(max(N^{1/3}, N1^{1/2}), N^{11/24})` with the winning branch.
fn general_bound(n: &Factored) -> (Monomial, &'static str) {
    let n1 = n.sqrt_ceil_divisor();
    let a = (Monomial::pow_of(n, rat(1, 3)), "N^(1/3)");
    let b = (Monomial::pow_of(&n1, rat(1, 2)), "N1^(1/2)");
    let c = (Monomial::pow_of(n, rat(11, 24)), "N^(11/24)");
    Monomial::min(Monomial::max(a, b), c)
}

pub fn exponent_bound(n: &Factored) -> ExponentReport {
    let (bound, branch) = general_bound(n);
    ExponentReport {
        mode: "maingen",
        n_level: n.clone(),
        n1: n.sqrt_ceil_divisor(),
        c: None,
        c1: None,
        m_char: None,
        profile: Vec::new(),
        dim: BigUint::one(),
        branch,
        bound_ln: bound.ln(),
        exponent: bound.exponent_on(n),
        bound,
        lambda_choices: vec![
            format!("N^(1/3) = {:.6}", (n.ln() / 3.0).exp()),
            "(1/2) C^(1/4) N^(1/12), C symbolic".into(),
        ],
        local_bound: None,
    }
}

/// `(n_p, d_p)` from `c_p` by the residue of `c_p` modulo 4.
pub fn minimal_type_local(c_p: u32) -> (u32, u32) {
    match c_p % 4 {
        0 => (c_p / 2, 0),
        2 => (c_p / 2 - 1, 1),
        _ => (c_p.div_ceil(2), 0),
    }
}

fn local_bound(c1: &Factored) -> f64 {
    let corr: f64 = c1.primes().map(|p| 1.0 + 1.0 / p as f64).product();
    (c1.ln() / 2.0).exp() * corr.sqrt()
}

/// Minimal-type vectors of conductor `C = prod p^{c_p}`, `p` odd, `c_p >= 2`.
/// The general bound for the order of level `prod p^{n_p}` times
/// `dim^{1/2}` is checked against `C1^{1/3} prod_{c_p = 2 mod 4} p^{1/6}`,
/// which is what gets reported.
pub fn minimal_type_profile(c: &Factored) -> Result<ExponentReport> {
    let mut profile = Vec::new();
    let mut level = Factored::one();
    let mut dim = BigUint::one();
    let mut dim_ln = 0.0;
    let mut extra = Monomial::one();
    for (&p, &c_p) in &c.0 {
        if p == 2 || c_p < 2 {
            return Err(Error::Usage(format!("minimal type needs odd p and c_p >= 2, got {p}^{c_p}")));
        }
        let (n_p, d_p) = minimal_type_local(c_p);
        profile.push(LocalProfile { p, c_p, n_p, d_p });
        level = level.mul(&Factored::from_pairs([(p, n_p)]));
        let dp = if c_p == 2 { BigUint::from(p - 1) } else { BigUint::from(p).pow(d_p) };
        dim_ln += dp.to_f64().unwrap_or(f64::NAN).ln();
        dim *= dp;
        if c_p % 4 == 2 {
            extra.0.insert(p, rat(1, 6));
        }
    }
    let c1 = c.sqrt_ceil_divisor();
    let stated = Monomial::pow_of(&c1, rat(1, 3)).mul(&extra);
    let (general, _) = general_bound(&level);
    let derived_ln = general.ln() + dim_ln / 2.0;
    if derived_ln > stated.ln() + 1e-9 {
        return Err(Error::TheoremViolation(format!(
            "general bound {derived_ln} exceeds the minimal-type bound {}",
            stated.ln()
        )));
    }
    Ok(ExponentReport {
        mode: "minimal",
        n1: level.sqrt_ceil_divisor(),
        n_level: level,
        c: Some(c.clone()),
        c1: Some(c1.clone()),
        m_char: None,
        profile,
        dim,
        branch: "C1^(1/3) prod p^(1/6)",
        bound_ln: stated.ln(),
        exponent: stated.exponent_on(c),
        bound: stated,
        lambda_choices: vec!["N^(1/3) on the order level".into()],
        local_bound: Some(local_bound(&c1)),
    })
}

/// Microlocal lifts: `C = prod p^{4 n_p}`, order level `prod p^{2 n_p}`.
pub fn microlocal_profile(n: &BTreeMap<u64, u32>) -> Result<ExponentReport> {
    let mut profile = Vec::new();
    for (&p, &n_p) in n {
        if p == 2 || n_p == 0 {
            return Err(Error::Usage(format!("microlocal needs odd p and n_p >= 1, got {p}, {n_p}")));
        }
        profile.push(LocalProfile { p, c_p: 4 * n_p, n_p: 2 * n_p, d_p: 0 });
    }
    let c = Factored::from_pairs(n.iter().map(|(&p, &k)| (p, 4 * k)));
    let level = Factored::from_pairs(n.iter().map(|(&p, &k)| (p, 2 * k)));
    let (bound, branch) = general_bound(&level);
    let c1 = c.sqrt_ceil_divisor();
    Ok(ExponentReport {
        mode: "microlocal",
        n1: level.sqrt_ceil_divisor(),
        n_level: level,
        c: Some(c.clone()),
        c1: Some(c1.clone()),
        m_char: None,
        profile,
        dim: BigUint::one(),
        branch,
        bound_ln: bound.ln(),
        exponent: bound.exponent_on(&c),
        bound,
        lambda_choices: vec!["N^(1/3) on the order level".into()],
        local_bound: Some(local_bound(&c1)),
    })
}

/// Newforms of conductor `C` with central character conductor `M | C`:
/// `min(max(C^{1/3}, C1^{1/2}), C'^{-1/24} lcm(M, C1)^{1/2})`,
/// `C' = C1^2 / C`.
pub fn newform_bound(c: &Factored, m: &Factored) -> Result<ExponentReport> {
    if !m.divides(c) {
        return Err(Error::Usage(format!("M = {m} does not divide C = {c}")));
    }
    let c1 = c.sqrt_ceil_divisor();
    let cprime = Factored::from_pairs(c.0.iter().filter(|(_, &e)| e % 2 == 1).map(|(&p, _)| (p, 1)));
    let first = Monomial::max(
        (Monomial::pow_of(c, rat(1, 3)), "C^(1/3)"),
        (Monomial::pow_of(&c1, rat(1, 2)), "C1^(1/2)"),
    );
    let second = Monomial::pow_of(&cprime, rat(-1, 24)).mul(&Monomial::pow_of(&m.lcm(&c1), rat(1, 2)));
    let (bound, branch) = Monomial::min(first, (second, "C'^(-1/24) lcm(M, C1)^(1/2)"));
    Ok(ExponentReport {
        mode: "newform",
        n1: c1.clone(),
        n_level: c.clone(),
        c: Some(c.clone()),
        c1: Some(c1.clone()),
        m_char: Some(m.clone()),
        profile: Vec::new(),
        dim: BigUint::one(),
        branch,
        bound_ln: bound.ln(),
        exponent: bound.exponent_on(c),
        bound,
        lambda_choices: vec![
            "Eichler level C".into(),
            format!("Eichler level C' = {cprime}"),
        ],
        local_bound: Some(local_bound(&c1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Factored {
        s.parse().unwrap()
    }

    #[test]
    fn headline_exponents() {
        assert_eq!(exponent_bound(&f("5*7*11")).exponent, Some(rat(11, 24)));
        assert_eq!(exponent_bound(&f("5^4")).exponent, Some(rat(1, 3)));
        let r = exponent_bound(&f("5^3"));
        assert_eq!(r.exponent, Some(rat(1, 3)));
        assert_eq!(r.n1, f("5^2"));
    }

    #[test]
    fn local_cases() {
        assert_eq!(minimal_type_local(4), (2, 0));
        assert_eq!(minimal_type_local(6), (2, 1));
        assert_eq!(minimal_type_local(3), (2, 0));
        let r = minimal_type_profile(&f("5^8")).unwrap();
        assert_eq!(r.exponent, Some(rat(1, 6)));
        assert!(minimal_type_profile(&f("2^4")).is_err());
        let two = minimal_type_profile(&f("7^2")).unwrap();
        assert_eq!(two.dim, BigUint::from(6u32));
    }

    #[test]
    fn microlocal_single_prime() {
        let r = microlocal_profile(&BTreeMap::from([(5, 1)])).unwrap();
        assert_eq!(r.c, Some(f("5^4")));
        assert_eq!(r.n_level, f("5^2"));
        assert_eq!(r.exponent, Some(rat(1, 6)));
    }

    #[test]
    fn newform_branches() {
        let r = newform_bound(&f("5*7"), &Factored::one()).unwrap();
        assert_eq!(r.exponent, Some(rat(11, 24)));
        assert!(newform_bound(&f("5"), &f("7")).is_err());
    }

    #[test]
    fn exact_comparison() {
        let a = Monomial::pow_of(&f("2"), rat(1, 2));
        let b = Monomial::pow_of(&f("3"), rat(1, 3));
        // 2^3 < 3^2
        assert_eq!(a.cmp_exact(&b), Ordering::Less);
        assert_eq!(a.cmp_exact(&a), Ordering::Equal);
    }
}
