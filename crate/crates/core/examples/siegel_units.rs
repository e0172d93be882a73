//! Siegel unit expansions, distribution relations and cusp values.

use eulercx::qseries::{distribution_check, siegel_unit, sp_cusp, TorsionCoord};

fn main() -> eulercx::Result<()> {
    let n = 5;
    let t = TorsionCoord::of_level(n, 0, 1)?;
    let s = siegel_unit(&t, n, 6)?;
    println!("theta{} leading term q^({}/{}) * {:?}", t.label(), s.valuation().unwrap_or(0), s.scale, sp_cusp(&s)?);
    for m in [2, 3] {
        let start = std::time::Instant::now();
        let r = distribution_check(m, n, Some(&t), 40)?;
        println!("m={m} target {}: {:?} ({:?})", r.target, r.ratio, start.elapsed());
    }
    let r = distribution_check(2, n, None, 40)?;
    println!("m=2 kernel: {:?}", r.ratio);
    Ok(())
}
