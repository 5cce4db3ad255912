//! Elementary integer arithmetic: gcds, modular inverses, trial-division
//! factorization, multiplicative functions and factored-integer parsing.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigUint, One};

use crate::error::{Error, Result};

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    gcd(a as i128, b as i128) as u64
}

pub fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m` in `[0, m)`; `m = 1` yields 0.
pub fn mod_inv(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Largest squarefree divisor.
pub fn radical(n: u64) -> u64 {
    factorize(n).iter().map(|&(p, _)| p).product()
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> u32 {
    factorize(n).len() as u32
}

/// Divisor function d(n).
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Valuation of `n` at `p`.
pub fn valuation(mut n: u128, p: u128) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i128, n: i128) -> i32 {
    assert!(n > 0 && n % 2 == 1, "jacobi symbol needs odd positive modulus");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Maximum of d(k) over 1 <= k <= x. Exact by sieve up to 2*10^7, otherwise
/// the crude but valid bound d(k) <= 2*sqrt(k).
pub fn max_divisor_count_upto(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    if x > 20_000_000 {
        return 2 * ((x as f64).sqrt().ceil() as u64);
    }
    let n = x as usize;
    let mut counts = vec![0u32; n + 1];
    for d in 1..=n {
        let mut k = d;
        while k <= n {
            counts[k] += 1;
            k += d;
        }
    }
    counts[1..].iter().copied().max().unwrap_or(1) as u64
}

/// A positive integer held as its prime factorization, written `p1^e1*p2^e2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Factored(pub BTreeMap<u64, u32>);

impl Factored {
    pub fn one() -> Self {
        Factored(BTreeMap::new())
    }

    pub fn from_u64(n: u64) -> Self {
        assert!(n > 0, "factored integers are positive");
        Factored(factorize(n).into_iter().collect())
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Self {
        let mut map = BTreeMap::new();
        for (p, e) in pairs {
            if e > 0 {
                *map.entry(p).or_insert(0) += e;
            }
        }
        Factored(map)
    }

    pub fn value(&self) -> BigUint {
        self.0
            .iter()
            .fold(BigUint::one(), |acc, (&p, &e)| acc * BigUint::from(p).pow(e))
    }

    pub fn value_f64(&self) -> f64 {
        self.ln().exp()
    }

    pub fn ln(&self) -> f64 {
        self.0.iter().map(|(&p, &e)| e as f64 * (p as f64).ln()).sum()
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.0.get(&p).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.keys().copied()
    }

    /// Smallest `m` with `self | m^2`.
    pub fn sqrt_ceil_divisor(&self) -> Factored {
        Factored(self.0.iter().map(|(&p, &e)| (p, e.div_ceil(2))).collect())
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.values().all(|&e| e == 1)
    }

    pub fn is_squarefull(&self) -> bool {
        self.0.values().all(|&e| e >= 2)
    }

    pub fn divides(&self, other: &Factored) -> bool {
        self.0.iter().all(|(p, &e)| other.exponent(*p) >= e)
    }

    pub fn mul(&self, other: &Factored) -> Factored {
        Factored::from_pairs(self.0.iter().chain(other.0.iter()).map(|(&p, &e)| (p, e)))
    }

    pub fn lcm(&self, other: &Factored) -> Factored {
        let mut map = self.0.clone();
        for (&p, &e) in &other.0 {
            let slot = map.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
        Factored(map)
    }
}

impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl FromStr for Factored {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Factored::one());
        }
        let mut pairs = Vec::new();
        for part in s.split('*') {
            let part = part.trim();
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim()),
                None => (part, "1"),
            };
            let base: u64 = base
                .parse()
                .map_err(|_| Error::Usage(format!("bad factor base {base:?} in {s:?}")))?;
            let exp: u32 = exp
                .parse()
                .map_err(|_| Error::Usage(format!("bad exponent {exp:?} in {s:?}")))?;
            if base < 2 {
                return Err(Error::Usage(format!("factor base must be >= 2 in {s:?}")));
            }
            // composite bases are allowed and get refactored
            for (p, e) in factorize(base) {
                pairs.push((p, e * exp));
            }
        }
        Ok(Factored::from_pairs(pairs))
    }
}
