//! Map the solution-count regions for a tilted landmark pair: for each
//! camera position on a vertical grid through the landmarks, print whether
//! the pose is unique, double, or under-determined.

use nalgebra::Vector3;
use p2pa::classify::{multiplicity_from_ground_truth, Multiplicity};
use p2pa::LandmarkPair;

fn main() {
    let landmarks =
        LandmarkPair::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(100.0, 0.0, 100.0)).unwrap();

    println!("x: -150..250 mm, z: 200..-100 mm, grid step 12.5 mm");
    println!("1 = unique pose, 2 = two poses, * = infinitely many\n");
    for zi in (0..=24).rev() {
        let z = -100.0 + 12.5 * zi as f64;
        let mut row = String::new();
        for xi in 0..=32 {
            let x = -150.0 + 12.5 * xi as f64;
            let camera = Vector3::new(x, 0.0, z);
            let ch = match multiplicity_from_ground_truth(&landmarks, camera) {
                Ok(Multiplicity::One) => '1',
                Ok(Multiplicity::Two) => '2',
                Ok(Multiplicity::Infinite(_)) => '*',
                Err(_) => '!',
            };
            row.push(ch);
            row.push(' ');
        }
        println!("{row}");
    }
    println!("\nThe '*' diagonal is the landmark line itself; the '2' wedges");
    println!("are where both camera slopes are shallower than the landmark");
    println!("slope and the camera is off the double-root plane.");
}
