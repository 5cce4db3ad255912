//! Small nonnegative tuples `(p_1, .., p_n)` making `a_0 + sum a_i p_i`
//! coprime to `N`, with many distinct values on every coordinate projection.

use std::collections::BTreeSet;

use crate::arith::{euler_phi, factorize, gcd, omega, radical};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationProblem {
    /// `a_0, .., a_n`.
    pub a: Vec<i128>,
    pub big_n: u64,
    pub c: u64,
    /// Inclusive cap on every `p_i`.
    pub bound: u64,
}

impl CombinationProblem {
    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    /// `max(64, c 2^omega(N) ceil(ln^2(N + 2)))`.
    pub fn auto_bound(big_n: u64, c: u64) -> u64 {
        let l = ((big_n as f64 + 2.0).ln().powi(2)).ceil() as u64;
        (c * (1u64 << omega(big_n.max(1))) * l).max(64)
    }

    pub fn with_auto_bound(a: Vec<i128>, big_n: u64, c: u64) -> Self {
        let bound = Self::auto_bound(big_n, c);
        CombinationProblem { a, big_n, c, bound }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() < 2 {
            return Err(Error::Usage("need a_0 and at least one coefficient".into()));
        }
        if self.big_n == 0 || self.c == 0 || self.bound == 0 {
            return Err(Error::Usage("N, c and bound must be positive".into()));
        }
        let g = self.a.iter().fold(self.big_n as i128, |g, &x| gcd(g, x));
        if g != 1 {
            return Err(Error::Precondition(format!("gcd(a_0, .., a_n, N) = {g}, not 1")));
        }
        Ok(())
    }

    pub fn value(&self, p: &[u64]) -> i128 {
        self.a[0] + self.a[1..].iter().zip(p).map(|(a, &x)| a * x as i128).sum::<i128>()
    }

    pub fn qualifies(&self, p: &[u64]) -> bool {
        p.iter().all(|&x| x <= self.bound) && gcd(self.value(p), self.big_n as i128) == 1
    }
}

/// Builds the tuple set by induction on the last coordinate. Primes of `N`
/// dividing `a_n` are settled by the earlier coordinates (a smaller problem
/// modulo `gcd(a_n, N)`); for the rest, each earlier tuple is extended by
/// the `c` smallest admissible values of `p_n`. The result is sorted.
pub fn solve(prob: &CombinationProblem) -> Result<Vec<Vec<u64>>> {
    prob.validate()?;
    // dividing by d = gcd(a) changes no gcd with N, and only primes of N matter
    let d = prob.a.iter().fold(0, |g, &x| gcd(g, x)).max(1);
    let a: Vec<i128> = prob.a.iter().map(|x| x / d).collect();
    let n = radical(prob.big_n) as i128;
    let mut out = build(&a, n, prob.c as usize, prob.bound, prob.a.len() - 1)?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn build(a: &[i128], big_n: i128, c: usize, bound: u64, k: usize) -> Result<Vec<Vec<u64>>> {
    if k == 0 {
        debug_assert_eq!(gcd(a[0], big_n), 1);
        return Ok(vec![vec![]]);
    }
    let n1 = gcd(a[k], big_n);
    let n2 = big_n / n1;
    let prefix = build(&a[..k], n1, c, bound, k - 1)?;
    let mut out = Vec::with_capacity(prefix.len() * c);
    for s in prefix {
        let x = a[0] + a[1..k].iter().zip(&s).map(|(ai, &p)| ai * p as i128).sum::<i128>();
        let mut found = 0;
        for p in 0..=bound {
            if gcd(x + a[k] * p as i128, n2) == 1 {
                let mut t = s.clone();
                t.push(p);
                out.push(t);
                found += 1;
                if found == c {
                    break;
                }
            }
        }
        if found < c {
            return Err(Error::Infeasible {
                indices: vec![k],
                bound,
                detail: format!("only {found} of {c} admissible values for p_{k} after prefix {s:?} modulo {n2}"),
            });
        }
    }
    Ok(out)
}

/// Number of distinct projections of `set` onto the coordinates `idx`
/// (1-based, as in `p_1 .. p_n`).
pub fn projection_size(set: &[Vec<u64>], idx: &[usize]) -> usize {
    set.iter()
        .map(|t| idx.iter().map(|&i| t[i - 1]).collect::<Vec<_>>())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Checks bounds, gcd conditions and `|P_I(S)| >= c^|I|` for every nonempty
/// index set; returns the first failing index set.
pub fn verify(prob: &CombinationProblem, set: &[Vec<u64>]) -> std::result::Result<(), Vec<usize>> {
    if let Some(t) = set.iter().find(|t| t.len() != prob.n() || !prob.qualifies(t)) {
        return Err(t.iter().map(|&x| x as usize).collect());
    }
    let n = prob.n();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        let need = (prob.c as usize).pow(idx.len() as u32);
        if projection_size(set, &idx) < need {
            return Err(idx);
        }
    }
    Ok(())
}

/// Indicator table of residues coprime to `q`.
#[derive(Clone, Debug)]
pub struct CoprimeTable {
    q: u64,
    coprime: Vec<bool>,
}

impl CoprimeTable {
    pub fn new(q: u64) -> Self {
        assert!(q > 0);
        let mut coprime = vec![true; q as usize];
        for (p, _) in factorize(q) {
            let mut r = 0;
            while r < q {
                coprime[r as usize] = false;
                r += p;
            }
        }
        if q == 1 {
            coprime[0] = true;
        }
        CoprimeTable { q, coprime }
    }

    pub fn is_coprime(&self, x: i128) -> bool {
        self.coprime[x.rem_euclid(self.q as i128) as usize]
    }

    /// `#{1 <= m <= x : gcd(a0 + m a1, q) = 1}`.
    pub fn count(&self, a0: i128, a1: i128, x: u64) -> Result<u64> {
        if gcd(a1, self.q as i128) != 1 {
            return Err(Error::Precondition(format!("gcd({a1}, {}) != 1", self.q)));
        }
        let q = self.q as i128;
        let step = a1.rem_euclid(q);
        let mut r = (a0 + a1).rem_euclid(q);
        let mut n = 0;
        for _ in 0..x {
            n += u64::from(self.coprime[r as usize]);
            r += step;
            if r >= q {
                r -= q;
            }
        }
        Ok(n)
    }
}

pub fn sieve_count(a0: i128, a1: i128, q: u64, x: u64) -> Result<u64> {
    CoprimeTable::new(q).count(a0, a1, x)
}

/// `count >= phi(Q)/Q X - 2^omega(Q)`, compared in integers.
pub fn sieve_inequality_holds(count: u64, q: u64, x: u64) -> bool {
    let lhs = count as u128 * q as u128 + (1u128 << omega(q)) * q as u128;
    lhs >= euler_phi(q) as u128 * x as u128
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let prob = CombinationProblem { a: vec![0, 1], big_n: 6, c: 2, bound: 10 };
        assert_eq!(solve(&prob).unwrap(), vec![vec![1], vec![5]]);
        let prob = CombinationProblem { a: vec![5, 3, 7], big_n: 6, c: 2, bound: 10 };
        let s = solve(&prob).unwrap();
        assert!(s.contains(&vec![0, 0]));
        verify(&prob, &s).unwrap();
    }

    #[test]
    fn infeasible_reports_index() {
        let prob = CombinationProblem { a: vec![1, 1], big_n: 30, c: 5, bound: 3 };
        match solve(&prob) {
            Err(Error::Infeasible { indices, .. }) => assert_eq!(indices, vec![1]),
            other => panic!("expected infeasible, got {other:?}"),
        }
        let bad = CombinationProblem { a: vec![2, 4], big_n: 6, c: 1, bound: 3 };
        assert!(matches!(solve(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn coefficient_sharing_primes_with_n() {
        // 3 divides a_2, so p_1 alone must handle the prime 3
        let prob = CombinationProblem::with_auto_bound(vec![3, 1, 3], 30, 2);
        let s = solve(&prob).unwrap();
        verify(&prob, &s).unwrap();
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_count(0, 1, 6, 12).unwrap(), 4);
        assert_eq!(sieve_count(5, 7, 1, 9).unwrap(), 9);
        assert!(sieve_count(0, 2, 6, 12).is_err());
        assert!(sieve_inequality_holds(4, 6, 12));
    }
}
