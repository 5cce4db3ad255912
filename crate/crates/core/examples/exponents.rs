//! Sup-norm exponents for a few levels and conductors.

use quatlat::amplifier::*;
use quatlat::arith::Factored;

fn main() -> quatlat::Result<()> {
    for n in ["5*7*11*13", "2^4*3^4", "5^3"] {
        let r = exponent_bound(&n.parse()?);
        println!("N = {n}: {} via {}", r.exponent.unwrap(), r.branch);
    }
    let r = minimal_type_profile(&"5^4*7^6".parse()?)?;
    println!("\n{r}");
    let r = newform_bound(&"5^3*7".parse()?, &Factored::one())?;
    println!("{r}");
    Ok(())
}
