//! Compare the closed-form co-altitude solve against the general quadratic
//! path. When the landmarks share an altitude the quadratic's linear term
//! vanishes and a single square root replaces the root selection.

use nalgebra::Vector3;
use p2pa::solver::{angles_from_position, solve_coaltitude, solve_distances};
use p2pa::LandmarkPair;

fn main() {
    let d = 150.0;
    let landmarks =
        LandmarkPair::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(d, 0.0, 0.0)).unwrap();
    let camera = Vector3::new(40.0, -350.0, 220.0);

    let angles = angles_from_position(&landmarks, camera).unwrap();
    println!(
        "angles: rho1 = {:.6}, rho2 = {:.6}, beta = {:.6}",
        angles.rho1, angles.rho2, angles.beta
    );

    let fast = solve_coaltitude(&angles, d).unwrap();
    let general = solve_distances(&angles, &landmarks).unwrap();
    assert_eq!(general.len(), 1, "co-altitude pose is unique");

    println!("fast path:    d1 = {:.9}, d2 = {:.9}, h = {:.9}", fast.d1, fast.d2, fast.h1);
    println!(
        "general path: d1 = {:.9}, d2 = {:.9}, h = {:.9}",
        general[0].d1, general[0].d2, general[0].h1
    );
    println!(
        "max difference: {:.3e}",
        (fast.d1 - general[0].d1)
            .abs()
            .max((fast.d2 - general[0].d2).abs())
            .max((fast.h1 - general[0].h1).abs())
    );
}
