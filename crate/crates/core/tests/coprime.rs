use std::collections::BTreeSet;

use quatlat::arith::gcd;
use quatlat::coprime::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn projections_ok(prob: &CombinationProblem, set: &[Vec<u64>]) -> bool {
    let n = prob.n();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let proj: BTreeSet<Vec<u64>> = set.iter().map(|t| idx.iter().map(|&i| t[i]).collect()).collect();
        proj.len() as u64 >= prob.c.pow(idx.len() as u32)
    })
}

fn random_problem<R: Rng>(rng: &mut R, n: usize, max_n: u64) -> CombinationProblem {
    loop {
        let big_n = rng.gen_range(1..=max_n);
        let a: Vec<i128> = (0..=n).map(|_| rng.gen_range(-1000..=1000)).collect();
        if a.iter().fold(big_n as i128, |g, &x| gcd(g, x)) == 1 {
            return CombinationProblem::with_auto_bound(a, big_n, 2);
        }
    }
}

#[test]
fn single_coefficient_matches_scan() {
    let prob = CombinationProblem { a: vec![0, 1], big_n: 6, c: 2, bound: 10 };
    let s = solve(&prob).unwrap();
    let scan: Vec<u64> = (0..=10).filter(|&p| gcd(p as i128, 6) == 1).collect();
    assert!(s.iter().all(|t| scan.contains(&t[0])));
    assert!(s.len() >= 2);
}

#[test]
fn coprime_constant_term_admits_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let mut prob = random_problem(&mut rng, 2, 10_000);
        prob.a[0] = 1;
        assert!(prob.qualifies(&[0, 0]));
        let s = solve(&prob).unwrap();
        assert!(verify(&prob, &s).is_ok());
    }
}

#[test]
fn random_problems_satisfy_all_projections() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for n in 1..=3 {
        for _ in 0..60 {
            let prob = random_problem(&mut rng, n, 1_000_000);
            let s = solve(&prob).unwrap();
            for t in &s {
                assert_eq!(t.len(), n);
                assert!(t.iter().all(|&x| x <= prob.bound));
                assert_eq!(gcd(prob.value(t), prob.big_n as i128), 1, "{prob:?} {t:?}");
            }
            assert!(projections_ok(&prob, &s), "{prob:?}");
        }
    }
}

#[test]
fn bad_input_is_rejected() {
    assert!(solve(&CombinationProblem { a: vec![2, 4], big_n: 6, c: 2, bound: 10 }).is_err());
    assert!(solve(&CombinationProblem { a: vec![1], big_n: 6, c: 2, bound: 10 }).is_err());
}

#[test]
fn sieve_counts_match_scan() {
    assert_eq!(sieve_count(5, 3, 1, 17).unwrap(), 17);
    assert_eq!(sieve_count(0, 1, 6, 12).unwrap(), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..300 {
        let q = rng.gen_range(1..=3000u64);
        let x = rng.gen_range(1..=500u64);
        let a1 = loop {
            let a = rng.gen_range(1..=5000i128);
            if gcd(a, q as i128) == 1 {
                break a;
            }
        };
        let a0 = rng.gen_range(-5000..=5000i128);
        let scan = (1..=x as i128).filter(|m| gcd(a0 + m * a1, q as i128) == 1).count() as u64;
        let got = sieve_count(a0, a1, q, x).unwrap();
        assert_eq!(got, scan);
        assert!(sieve_inequality_holds(got, q, x));
    }
}
