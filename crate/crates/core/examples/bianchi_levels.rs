//! Bianchi complexes over Z[i] and Z[ρ] at small prime levels.

use eulercx::bianchi::{composite_surjectivity, conjecture_experiment, prime_suite};
use eulercx::numberfields::{parse_quad, primes_up_to_norm};

fn main() -> eulercx::Result<()> {
    for d in [1, 3] {
        for pr in primes_up_to_norm(d, 13)? {
            let s = prime_suite(&pr)?;
            println!("d={d} {:<8} dims {:?} eis {} cusp {} pass {}", s.ideal, s.dims, s.h2.eis, s.h2.cusp, s.pass());
        }
    }
    for (d, g) in [(1, "2+2i"), (1, "1+3i")] {
        let r = composite_surjectivity(parse_quad(d, g)?)?;
        println!("({g}): rank {} of {} rows", r.rank, r.rows);
    }
    let pr = eulercx::numberfields::PrimeIdeal::parse(3, "2")?;
    println!("{:?}", conjecture_experiment(&pr));
    Ok(())
}
