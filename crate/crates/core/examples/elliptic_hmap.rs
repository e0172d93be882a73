//! The elliptic h-map at 3-torsion: θ values and their τ-derivatives.

use eulercx::hmap::{degeneration_check, theta_triple, verify_delta_22_10, Average, EllCurveC, TorsionPt};
use num_complex::Complex64 as C;

fn main() -> eulercx::Result<()> {
    let tau = C::new(0.13, 1.21);
    let e = EllCurveC::new(tau)?;
    let a1 = TorsionPt::of_level(3, 1, 0);
    let a2 = TorsionPt::of_level(3, 0, 1);
    let a3 = a1.add(&a2).neg();
    println!("L2 θ(a1,a2,a3) = {:.10}", theta_triple(&e, [&a1, &a2, &a3], 3, Average::Full)?.eval_l2());
    let r = verify_delta_22_10(3, tau, 1e-4)?;
    println!("derivative check: residual {:.2e} ({:?})", r.residual, r.verdict);
    for row in degeneration_check(3, 1, 1, &[2.0, 5.0, 10.0, 20.0])?.rows {
        println!("h={:>4}: θ {:+.6} li11 {:+.6} reduced {:.1e}", row.height, row.theta_l2, row.li11_l2, row.reduced);
    }
    Ok(())
}
