//! Γ₁(N) modular complex, its cyclotomic map and the cuspidal count.

use eulercx::modular_gl2z::{build_gamma1_complex, commute_check, conclusion1_coker, cyclotomic_map, dimension_report, verify_iso_prime, RelationMode};

fn main() -> eulercx::Result<()> {
    for n in [5, 7, 11, 12, 13] {
        let r = dimension_report(n, RelationMode::FullUnits)?;
        println!("N={n:>2} dims {:?} h1_cusp {:?} coker {:?}", r.dims, r.h1_cusp, r.coker);
    }
    let cx = build_gamma1_complex(11, RelationMode::FullUnits, true)?;
    let map = cyclotomic_map(&cx)?;
    println!("{:?}", commute_check(&cx, &map)?);
    println!("{:?}", verify_iso_prime(11)?);
    println!("{:?}", conclusion1_coker(13)?);
    Ok(())
}
