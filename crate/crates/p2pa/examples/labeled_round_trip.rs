//! Synthesize the exact observation a camera would produce, then recover
//! the pose from it. The landmarks are co-altitude, so the solution is
//! unique everywhere off their plane.

use nalgebra::{Rotation3, Vector3};
use p2pa::sim::synthesize_exact;
use p2pa::solver::{solve_labeled, SolverParams};
use p2pa::{CameraPose, LandmarkPair};

fn main() {
    let landmarks =
        LandmarkPair::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(150.0, 0.0, 0.0)).unwrap();
    let truth = CameraPose {
        position: Vector3::new(75.0, -500.0, 300.0),
        rotation: Rotation3::from_euler_angles(0.05, -0.1, 0.7),
    };

    let obs = synthesize_exact(&truth, &landmarks).unwrap();
    let outcome = solve_labeled(&obs, &landmarks, &SolverParams::default()).unwrap();

    for pose in outcome.poses() {
        println!("recovered position: {:.9}", pose.position.transpose());
        println!(
            "position error:     {:.3e} mm",
            (pose.position - truth.position).norm()
        );
        println!(
            "rotation error:     {:.3e} (Frobenius)",
            (pose.rotation.matrix() - truth.rotation.matrix()).norm()
        );
    }
}
