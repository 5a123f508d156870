//! Camera pose from two landmarks and a gravity direction.
//!
//! Given image directions to two landmarks with known positions in a
//! gravity-aligned coordinate system, plus the up vector measured by an
//! accelerometer, the camera pose (optical center and rotation) can be
//! recovered in closed form. Outside of three singular families there are
//! at most two solutions, and the library classifies exactly when the
//! solution is unique.
//!
//! Modules:
//! - [`geom`]: vectors, camera ray models, reduction of an observation to
//!   the three invariant angles (rho1, rho2, beta).
//! - [`classify`]: singular-case detection and the uniqueness
//!   characterization from ground truth.
//! - [`solver`]: the closed-form solve (labeled, unlabeled, and the
//!   co-altitude fast path).
//! - [`sim`]: noise injection and RMS-error-vs-altitude sweeps.
//! - [`scene`]: file formats for the CLI (scene and sweep-config documents,
//!   pose reports).
//! - [`cli`]: the command-line front end.
//!
//! See the `examples/` directory for a runnable tour of each capability.

pub mod classify;
pub mod cli;
pub mod geom;
pub mod scene;
pub mod sim;
pub mod solver;

pub use classify::{
    detect_singular, multiplicity_from_ground_truth, LandmarkPair, Multiplicity, SingularCase,
};
pub use geom::{CameraPose, ImageObservation, ObservationAngles, UnitVec3, Vec2, Vec3};
pub use sim::{run_sweep, NoiseModel, SweepConfig, SweepRow};
pub use solver::{solve_labeled, solve_unlabeled, SolveOutcome, SolverParams};
