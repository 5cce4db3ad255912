//! Building the amplifier for a random eigenform and checking its eigenvalue.

use num::BigRational;
use quatlat::amplifier::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> quatlat::Result<()> {
    let bad = [2, 3];
    let lambda = 10.0;
    let primes = amplifier_primes(lambda, &bad);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = SatakeSample::random(&primes, &mut rng);
    for (p, l) in &s.lambda_p {
        println!("lambda({p}) = {l}");
    }

    let spec = AmplifierSpec::<BigRational>::from_sample(lambda, &bad, &s)?;
    let k = build_amplifier(&spec)?;
    check_amplifier(&spec, &k)?;
    println!("{} terms, y_1 = {}", k.coeffs().len(), k.coeff(1));

    let ev = k.eval(&s)?;
    let lb = eigenvalue_lower_bound(&primes, &s)?;
    println!("eigenvalue {ev} = {lb}, |P|^2/8 = {}", (primes.len() * primes.len()) as f64 / 8.0);
    Ok(())
}
