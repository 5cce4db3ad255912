//! Conjugating Eichler orders of prime-power level into balanced position.

use quatlat::balance::*;
use quatlat::lattice::families::eichler_prime_power;
use quatlat::lattice::MaximalOrder;

fn main() -> quatlat::Result<()> {
    let o = MaximalOrder::disc6();
    for p in [5, 7] {
        for n in 2..=4 {
            let e = eichler_prime_power(&o, p, n)?;
            match balanced_search(&BalanceSearchSpec::new(e)?)? {
                Some(r) => println!(
                    "{p}^{n}: {} -> {} via {} (norm {}, {} candidates)",
                    r.before, r.after, r.conjugator, r.norm, r.candidates_tried
                ),
                None => println!("{p}^{n}: nothing found"),
            }
        }
    }
    Ok(())
}
