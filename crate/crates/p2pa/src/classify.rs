//! Singular-case detection and the uniqueness characterization.
//!
//! Three configuration families admit infinitely many pose solutions:
//! camera colinear with the landmarks, landmarks on a vertical line, and
//! camera horizontally coplanar with the landmarks. Everywhere else there
//! are one or two solutions, with uniqueness decided by the slopes from the
//! camera to the landmarks versus the landmark-to-landmark slope, or by
//! membership in a particular plane through the landmarks.

use crate::geom::{ObservationAngles, Vec3};
use std::f64::consts::PI;
use thiserror::Error;

/// Default angle tolerance for singular-case tests on exact synthetic data.
/// Noisy data needs a caller-chosen tolerance; near-singular configurations
/// are ill-conditioned rather than cleanly detectable.
pub const EPS_ANGLE: f64 = 1e-9;

/// Relative tolerance for plane membership and colinearity tests, scaled by
/// configuration size.
pub const EPS_PLANE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("landmarks coincide")]
    CoincidentLandmarks,
    #[error("camera coincides with landmark {0}")]
    CameraAtLandmark(usize),
    #[error("denominator factor {0} too close to zero")]
    DegenerateDenominator(f64),
}

/// Two labeled landmark positions in object coordinates. The altitude
/// difference `H` and horizontal separation `d` are always recomputed from
/// the endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandmarkPair {
    m1: Vec3,
    m2: Vec3,
}

impl LandmarkPair {
    pub fn new(m1: Vec3, m2: Vec3) -> Result<Self, ClassifyError> {
        if (m2 - m1).norm() <= 0.0 {
            return Err(ClassifyError::CoincidentLandmarks);
        }
        Ok(Self { m1, m2 })
    }

    pub fn m1(&self) -> Vec3 {
        self.m1
    }

    pub fn m2(&self) -> Vec3 {
        self.m2
    }

    /// Altitude difference `H = m2.z - m1.z`.
    pub fn height_difference(&self) -> f64 {
        self.m2.z - self.m1.z
    }

    /// Distance between the landmarks' projections onto a horizontal plane.
    pub fn horizontal_distance(&self) -> f64 {
        (self.m2.xy() - self.m1.xy()).norm()
    }

    pub fn separation(&self) -> f64 {
        (self.m2 - self.m1).norm()
    }

    pub fn midpoint(&self) -> Vec3 {
        (self.m1 + self.m2) / 2.0
    }

    pub fn swapped(&self) -> Self {
        Self {
            m1: self.m2,
            m2: self.m1,
        }
    }
}

/// The three families of configurations with infinitely many solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularCase {
    /// Camera and both landmarks on one line.
    Colinear,
    /// Both landmarks on one vertical line (camera anywhere off it).
    VerticalLandmarkLine,
    /// Camera and both landmarks on one horizontal plane.
    HorizontalCoplanar,
}

impl std::fmt::Display for SingularCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SingularCase::Colinear => write!(f, "colinear"),
            SingularCase::VerticalLandmarkLine => write!(f, "vertical-landmark-line"),
            SingularCase::HorizontalCoplanar => write!(f, "horizontal-coplanar"),
        }
    }
}

/// Number of pose solutions for a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Infinite(SingularCase),
    One,
    Two,
}

/// Slopes in the altitude-over-horizontal-distance sense, allowing infinity
/// when the horizontal separation vanishes. `s` is landmark 1 to landmark 2;
/// `s1`, `s2` run from the camera to each landmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeData {
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
}

fn slope(from: Vec3, to: Vec3) -> f64 {
    let rise = to.z - from.z;
    let run = (to.xy() - from.xy()).norm();
    if run == 0.0 {
        if rise >= 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        rise / run
    }
}

/// Slopes between the camera and each landmark, and between the landmarks.
pub fn slopes(landmarks: &LandmarkPair, camera: Vec3) -> Result<SlopeData, ClassifyError> {
    check_camera(landmarks, camera)?;
    Ok(SlopeData {
        s: slope(landmarks.m1, landmarks.m2),
        s1: slope(camera, landmarks.m1),
        s2: slope(camera, landmarks.m2),
    })
}

fn check_camera(landmarks: &LandmarkPair, camera: Vec3) -> Result<(), ClassifyError> {
    let scale = landmarks.separation();
    if (camera - landmarks.m1).norm() <= 1e-12 * scale {
        return Err(ClassifyError::CameraAtLandmark(1));
    }
    if (camera - landmarks.m2).norm() <= 1e-12 * scale {
        return Err(ClassifyError::CameraAtLandmark(2));
    }
    Ok(())
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Detects whether the reduced angles plus landmark geometry lie in one of
/// the three singular families, using [`EPS_ANGLE`].
pub fn detect_singular(
    landmarks: &LandmarkPair,
    angles: &ObservationAngles,
) -> Option<SingularCase> {
    detect_singular_with_tol(landmarks, angles, EPS_ANGLE)
}

/// [`detect_singular`] with an explicit angle tolerance.
///
/// Colinear configurations are checked first: they subsume the obstruction
/// to reconstruction when several families overlap.
pub fn detect_singular_with_tol(
    landmarks: &LandmarkPair,
    angles: &ObservationAngles,
    tol: f64,
) -> Option<SingularCase> {
    let ObservationAngles { rho1, rho2, beta } = *angles;
    let on_pole = |rho: f64| near(rho, 0.0, tol) || near(rho, PI, tol);

    let colinear = (on_pole(rho1) && on_pole(rho2))
        || (near(beta, 0.0, tol) && near(rho1, rho2, tol))
        || (near(beta.abs(), PI, tol) && near(rho1, PI - rho2, tol));
    if colinear {
        return Some(SingularCase::Colinear);
    }

    let d = landmarks.horizontal_distance();
    if d <= EPS_PLANE * landmarks.separation()
        && near(beta, 0.0, tol)
        && !on_pole(rho1)
        && !on_pole(rho2)
    {
        return Some(SingularCase::VerticalLandmarkLine);
    }

    if near(rho1, PI / 2.0, tol) && near(rho2, PI / 2.0, tol) {
        return Some(SingularCase::HorizontalCoplanar);
    }

    None
}

/// Whether the camera lies on the plane through both landmarks and the
/// horizontal line through landmark 1 perpendicular to the landmark line.
/// Camera membership in this plane is the double-root locus where the two
/// algebraic solutions merge into one.
pub fn on_plane_l(landmarks: &LandmarkPair, camera: Vec3) -> bool {
    let e = landmarks.m2 - landmarks.m1;
    let run = e.xy().norm();
    if run == 0.0 {
        return false;
    }
    let n = Vec3::new(-e.y / run, e.x / run, 0.0);
    let normal = e.normalize().cross(&n);
    let scale = landmarks
        .separation()
        .max((camera - landmarks.m1).norm())
        .max((camera - landmarks.m2).norm());
    (camera - landmarks.m1).dot(&normal).abs() <= EPS_PLANE * scale
}

/// Solution multiplicity for a ground-truth configuration, evaluated purely
/// geometrically. This is the oracle the solver's pose count is checked
/// against.
pub fn multiplicity_from_ground_truth(
    landmarks: &LandmarkPair,
    camera: Vec3,
) -> Result<Multiplicity, ClassifyError> {
    check_camera(landmarks, camera)?;

    let e = landmarks.m2 - landmarks.m1;
    let r = camera - landmarks.m1;
    let scale = landmarks.separation().max(r.norm());

    if e.cross(&r).norm() <= EPS_PLANE * e.norm() * r.norm() {
        return Ok(Multiplicity::Infinite(SingularCase::Colinear));
    }
    if landmarks.horizontal_distance() <= EPS_PLANE * landmarks.separation() {
        return Ok(Multiplicity::Infinite(SingularCase::VerticalLandmarkLine));
    }
    let zs = [landmarks.m1.z, landmarks.m2.z, camera.z];
    let z_spread = zs.iter().cloned().fold(f64::MIN, f64::max)
        - zs.iter().cloned().fold(f64::MAX, f64::min);
    if z_spread <= EPS_PLANE * scale {
        return Ok(Multiplicity::Infinite(SingularCase::HorizontalCoplanar));
    }

    let sl = slopes(landmarks, camera)?;
    if sl.s1.abs().max(sl.s2.abs()) >= sl.s.abs() {
        return Ok(Multiplicity::One);
    }
    // Reaching here means |s| > 0 and both camera slopes finite.
    if on_plane_l(landmarks, camera) {
        return Ok(Multiplicity::One);
    }
    Ok(Multiplicity::Two)
}

/// Closed form for the quadratic discriminant in the canonical frame with
/// landmarks at `(-a, 0, -b)` and `(a, 0, b)`:
///
/// `64 a^2 (b c1 - a c3)^2 / ((a^2 - 2 a c1 + c1^2 + c2^2) (b + c3)^2)`
///
/// Used as a cross-check oracle against coefficients computed from angles.
pub fn discriminant_closed_form(a: f64, b: f64, c: Vec3) -> Result<f64, ClassifyError> {
    debug_assert!(a != 0.0 && b != 0.0);
    let den1 = a * a - 2.0 * a * c.x + c.x * c.x + c.y * c.y;
    let den2 = (b + c.z) * (b + c.z);
    if den1.abs() < 1e-12 {
        return Err(ClassifyError::DegenerateDenominator(den1));
    }
    if den2.abs() < 1e-12 {
        return Err(ClassifyError::DegenerateDenominator(den2));
    }
    let num = 64.0 * a * a * (b * c.x - a * c.z) * (b * c.x - a * c.z);
    Ok(num / (den1 * den2))
}
