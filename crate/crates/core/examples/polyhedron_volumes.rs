//! Volumes of the basic Bianchi polyhedra from Bloch–Wigner values.

use eulercx::bianchi::{static_polyhedra, volume_report};

fn main() -> eulercx::Result<()> {
    for d in [3, 1] {
        let r = volume_report(d)?;
        println!("d={d}: volume {:.10} from {} distinct cross-ratio terms, apex drift {:.1e}", r.volume, r.tetrahedra, r.cone_independence);
    }
    for p in static_polyhedra() {
        println!("d={}: {}", p.d, p.face_kinds);
    }
    Ok(())
}
