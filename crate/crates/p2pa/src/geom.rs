//! Vector geometry, camera ray models, and the reduction of a raw
//! observation to the three angles that determine camera position.
//!
//! All positions are in millimeters; directions are unit vectors. The object
//! coordinate system has its z-axis pointing up (antiparallel to gravity).

use nalgebra::{Matrix3, Rotation3, Unit, Vector2, Vector3};
use std::f64::consts::PI;
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;
pub type UnitVec3 = Unit<Vector3<f64>>;

/// Horizontal projections shorter than this count as zero, which is the
/// `rho in {0, pi}` stipulation forcing `beta = 0`.
pub const EPS_HORIZONTAL: f64 = 1e-9;

/// Default congruence tolerance for [`rotation_from_two_pairs`]: the angle
/// between the two input pairs must agree to this in dot product.
pub const TOL_CONGRUENCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("vector norm {0} is too close to zero")]
    NearZeroVector(f64),
    #[error("angle vertex coincides with an endpoint")]
    DegenerateVertex,
    #[error("input directions are parallel")]
    ParallelInputs,
    #[error("vector pairs are not congruent (dot-product gap {0})")]
    IncongruentPairs(f64),
}

/// Raw sensor data: unit directions from the optical center to the two
/// landmarks, plus the up direction, all in camera coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageObservation {
    pub v1: UnitVec3,
    pub v2: UnitVec3,
    pub u: UnitVec3,
}

impl ImageObservation {
    pub fn new(v1: UnitVec3, v2: UnitVec3, u: UnitVec3) -> Self {
        Self { v1, v2, u }
    }

    /// Builds an observation from arbitrary vectors, normalizing each.
    pub fn from_vectors(v1: Vec3, v2: Vec3, u: Vec3) -> Result<Self, GeomError> {
        Ok(Self {
            v1: normalize(v1)?,
            v2: normalize(v2)?,
            u: normalize(u)?,
        })
    }

    /// The same observation with the two landmark images exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            v1: self.v2,
            v2: self.v1,
            u: self.u,
        }
    }
}

/// The reduced observation: tilt angles `rho1`, `rho2` in `[0, pi]` and the
/// signed horizontal landmark angle `beta` in `(-pi, pi]`. These three
/// numbers carry all the information relevant to camera position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationAngles {
    pub rho1: f64,
    pub rho2: f64,
    pub beta: f64,
}

impl ObservationAngles {
    pub fn new(rho1: f64, rho2: f64, beta: f64) -> Self {
        Self { rho1, rho2, beta }
    }

    /// Angles seen under the opposite landmark labeling: swapping the
    /// images swaps the tilt angles and negates beta.
    pub fn swapped(&self) -> Self {
        Self {
            rho1: self.rho2,
            rho2: self.rho1,
            beta: wrap_to_half_open(-self.beta),
        }
    }
}

/// Camera pose: optical-center position in object coordinates and the
/// rotation taking object-frame directions to camera-frame directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    pub position: Vec3,
    pub rotation: Rotation3<f64>,
}

fn normalize(v: Vec3) -> Result<UnitVec3, GeomError> {
    let n = v.norm();
    if n <= 1e-12 || !n.is_finite() {
        return Err(GeomError::NearZeroVector(n));
    }
    Ok(Unit::new_unchecked(v / n))
}

/// Remaps an atan2 result of exactly -pi to +pi so angles live in (-pi, pi].
pub fn wrap_to_half_open(angle: f64) -> f64 {
    if angle == -PI {
        PI
    } else {
        angle
    }
}

/// Smallest absolute difference between two angles modulo 2*pi.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d = 2.0 * PI - d;
    }
    d
}

/// Unit ray from the optical center toward the scene point imaged at sensor
/// coordinates `(x, y)`, for a pinhole camera with focal length `f`.
///
/// The sensor sits behind the pinhole at `w = (x, -f, y)`, so the outgoing
/// ray is `-w / |w|`: the camera looks along +y with +z up.
pub fn pinhole_ray(x: f64, y: f64, f: f64) -> UnitVec3 {
    debug_assert!(f > 0.0);
    Unit::new_normalize(Vec3::new(-x, f, -y))
}

/// Unit ray at polar angle `theta` from +z and azimuth `phi`, for a
/// spherical camera.
pub fn spherical_ray(theta: f64, phi: f64) -> UnitVec3 {
    Unit::new_unchecked(Vec3::new(
        phi.cos() * theta.sin(),
        phi.sin() * theta.sin(),
        theta.cos(),
    ))
}

/// Up direction from a resting accelerometer reading: specific force points
/// opposite gravity, so the normalized reading is up.
pub fn up_from_accelerometer(a: Vec3) -> Result<UnitVec3, GeomError> {
    let n = a.norm();
    if n <= 1e-6 {
        return Err(GeomError::NearZeroVector(n));
    }
    Ok(Unit::new_unchecked(a / n))
}

/// Reduces an observation to `(rho1, rho2, beta)`.
///
/// `rho_i = arccos(u . v_i)`; `beta` is the counterclockwise angle about `u`
/// between the horizontal projections of `v1` and `v2`, or zero when either
/// projection vanishes (camera on the vertical line through a landmark).
pub fn reduce_to_angles(obs: &ImageObservation) -> ObservationAngles {
    let u = obs.u.into_inner();
    let v1 = obs.v1.into_inner();
    let v2 = obs.v2.into_inner();
    let rho1 = v1.dot(&u).clamp(-1.0, 1.0).acos();
    let rho2 = v2.dot(&u).clamp(-1.0, 1.0).acos();
    let q1 = v1 - v1.dot(&u) * u;
    let q2 = v2 - v2.dot(&u) * u;
    let beta = if q1.norm() > EPS_HORIZONTAL && q2.norm() > EPS_HORIZONTAL {
        wrap_to_half_open(q1.cross(&q2).dot(&u).atan2(q1.dot(&q2)))
    } else {
        0.0
    };
    ObservationAngles { rho1, rho2, beta }
}

/// Counterclockwise angle at vertex `c` from ray `c->a` to ray `c->b`,
/// in `(-pi, pi]`, positive when the turn is counterclockwise viewed
/// from +z.
pub fn signed_horizontal_angle(a: Vec2, c: Vec2, b: Vec2) -> Result<f64, GeomError> {
    let p = a - c;
    let q = b - c;
    if p.norm() <= 1e-12 || q.norm() <= 1e-12 {
        return Err(GeomError::DegenerateVertex);
    }
    let cross = p.x * q.y - p.y * q.x;
    Ok(wrap_to_half_open(cross.atan2(p.dot(&q))))
}

/// The unique proper rotation mapping `a1 -> b1` and `a2 -> b2`, built from
/// the orthonormal triads of each pair. Errors if the pair angles disagree
/// beyond `tol_congruence`; see [`rotation_from_two_pairs`] for the default.
pub fn rotation_from_two_pairs_with_tol(
    a1: UnitVec3,
    a2: UnitVec3,
    b1: UnitVec3,
    b2: UnitVec3,
    tol_congruence: f64,
) -> Result<Rotation3<f64>, GeomError> {
    let cross_a = a1.cross(&a2);
    let cross_b = b1.cross(&b2);
    if cross_a.norm() <= 1e-9 || cross_b.norm() <= 1e-9 {
        return Err(GeomError::ParallelInputs);
    }
    let gap = (a1.dot(&a2) - b1.dot(&b2)).abs();
    if gap > tol_congruence {
        return Err(GeomError::IncongruentPairs(gap));
    }
    let triad = |e1: Vec3, cross: Vec3| {
        let e2 = cross.normalize();
        let e3 = e1.cross(&e2);
        Matrix3::from_columns(&[e1, e2, e3])
    };
    let ma = triad(a1.into_inner(), cross_a);
    let mb = triad(b1.into_inner(), cross_b);
    Ok(Rotation3::from_matrix_unchecked(mb * ma.transpose()))
}

/// [`rotation_from_two_pairs_with_tol`] with the default congruence
/// tolerance [`TOL_CONGRUENCE`]. With noisy data the pairs are never exactly
/// congruent; callers that expect noise should pass a wider tolerance and
/// validate the residual themselves.
pub fn rotation_from_two_pairs(
    a1: UnitVec3,
    a2: UnitVec3,
    b1: UnitVec3,
    b2: UnitVec3,
) -> Result<Rotation3<f64>, GeomError> {
    rotation_from_two_pairs_with_tol(a1, a2, b1, b2, TOL_CONGRUENCE)
}
