//! Builds the three supported receive arrays and prints their layout.
//!
//!     cargo run --example array_geometry -- [n_uca] [n_3d]

use mimo_crb::{build_uca, build_ucya, build_ula, uca_radius, ArrayGeometry};

fn describe(g: &ArrayGeometry) {
    let max_r = g.elements().iter().map(|e| e.radial_distance()).fold(0.0, f64::max);
    let z_top = g.elements().iter().map(|e| e.z).fold(0.0, f64::max);
    println!(
        "{:>4}: {:3} elements, radial extent {:.4} λ, height {:.2} λ",
        g.kind().label(),
        g.len(),
        max_r,
        z_top
    );
}

fn main() -> mimo_crb::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_uca: usize = args.next().map_or(8, |s| s.parse().expect("n_uca"));
    let n_3d: usize = args.next().map_or(3, |s| s.parse().expect("n_3d"));

    println!("ring radius for {n_uca} elements at λ/2 chords: {:.6} λ", uca_radius(n_uca, 0.5)?);
    let ucya = build_ucya(n_uca, n_3d, 0.5, 0.5)?;
    for g in [build_ula(n_uca * n_3d, 0.5)?, build_uca(n_uca, 0.5)?, ucya.clone()] {
        describe(&g);
    }

    // neighbouring elements on a ring sit exactly one chord apart
    let e = ucya.elements();
    println!("chord between elements 0 and 1: {:.12} λ", e[0].distance_to(&e[1]));

    println!();
    ucya.write_csv(std::io::stdout().lock()).expect("stdout");
    Ok(())
}
