//! Solve without knowing which image point is which landmark: both
//! labelings are tried and the merged result is still at most two poses.

use nalgebra::{Rotation3, Vector3};
use p2pa::sim::synthesize_exact;
use p2pa::solver::{solve_labeled, solve_unlabeled, SolverParams};
use p2pa::{CameraPose, LandmarkPair};

fn main() {
    let landmarks =
        LandmarkPair::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(150.0, 0.0, 0.0)).unwrap();
    let truth = CameraPose {
        position: Vector3::new(75.0, -400.0, 250.0),
        rotation: Rotation3::from_euler_angles(0.0, 0.0, 0.3),
    };
    let params = SolverParams::default();

    let obs = synthesize_exact(&truth, &landmarks).unwrap();
    let labeled = solve_labeled(&obs, &landmarks, &params).unwrap();
    println!("labeled poses: {}", labeled.poses().len());

    // With co-altitude landmarks the two labelings are mirror images, so
    // the unlabeled solve returns the true pose plus its reflection across
    // the vertical line through the landmark midpoint.
    let unlabeled = solve_unlabeled(&obs, &landmarks, &params).unwrap();
    println!("unlabeled poses: {}", unlabeled.poses().len());
    for pose in unlabeled.poses() {
        println!("  candidate position: {:.6}", pose.position.transpose());
    }
}
