//! Five-term relation and the root-of-unity identity suites.

use eulercx::bloch::{five_term, cross_ratio_average_identity, i11_alternation_identity, P1, TAU_DEDUP};

fn main() -> eulercx::Result<()> {
    let pts = [P1::Inf, P1::c(0.0, 0.0), P1::c(1.0, 0.0), P1::c(2.0, 1.0), P1::c(-1.0, 3.0)];
    println!("five-term residual: {:.3e}", five_term(&pts, TAU_DEDUP)?.eval_l2());
    for n in [5, 7] {
        println!("N={n} alternation: {:?}", i11_alternation_identity(n)?);
        println!("N={n} cross-ratio average: {:?}", cross_ratio_average_identity(n)?);
    }
    Ok(())
}
