//! Small tuples making a linear form coprime to N, and the sieve count.

use quatlat::coprime::*;

fn main() -> quatlat::Result<()> {
    let prob = CombinationProblem::with_auto_bound(vec![6, 10, 15], 30 * 77, 2);
    let set = solve(&prob)?;
    println!("a = {:?}, N = {}, bound {}", prob.a, prob.big_n, prob.bound);
    for t in &set {
        println!("  {t:?} -> {}", prob.value(t));
    }
    assert!(verify(&prob, &set).is_ok());

    for q in [6u64, 210, 9699690] {
        let x = 1000;
        let c = sieve_count(1, 1, q, x)?;
        println!("Q = {q}: {c} of m <= {x} with 1 + m coprime to Q (inequality holds: {})", sieve_inequality_holds(c, q, x));
    }
    Ok(())
}
