//! The closed-form two-landmark pose solve.
//!
//! From the reduced angles `(rho1, rho2, beta)` and the landmark pair, the
//! camera's horizontal distances to the landmarks satisfy a quadratic whose
//! positive roots enumerate the candidate positions; each position then
//! fixes the rotation uniquely. Also provides the unlabeled variant (try
//! both labelings, at most two poses survive) and the co-altitude fast path.

use crate::classify::{
    detect_singular_with_tol, ClassifyError, LandmarkPair, SingularCase,
};
use crate::geom::{
    self, angle_distance, reduce_to_angles, rotation_from_two_pairs_with_tol, CameraPose,
    ImageObservation, ObservationAngles, Vec2, Vec3,
};
use nalgebra::Unit;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("configuration is singular ({0})")]
    SingularInput(SingularCase),
    #[error("index {0} is not a valid pivot for these angles")]
    BadIndexChoice(usize),
    #[error("circles around the landmark projections do not intersect")]
    NoIntersection,
    #[error("tilt angles straddle pi/2, inconsistent with co-altitude landmarks")]
    MixedHemisphere,
    #[error("angles are outside the co-altitude fast-path domain")]
    NotCoaltitude,
    #[error("more than two poses survived, which should be impossible")]
    TheoremViolation,
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// The four position parameters: horizontal distances `d1`, `d2` from the
/// camera to each landmark's vertical line, and heights `h1`, `h2` of the
/// camera above each landmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSolution {
    pub d1: f64,
    pub d2: f64,
    pub h1: f64,
    pub h2: f64,
}

/// Coefficients of `a * d_j^2 + b * d_j + c = 0`, where `j` is the landmark
/// opposite the pivot `i` (the one with `rho_i != pi/2`). The starred twin
/// of the proof is obtained by constructing with the swapped index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Pivot landmark index, 1 or 2.
    pub i: usize,
    /// `h_i - h_j`; equals `H` when `i = 1` and `-H` when `i = 2`.
    pub delta: f64,
}

impl QuadraticCoeffs {
    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }
}

/// Outcome of a solve: a singular configuration, or zero to two poses.
/// An empty pose list means the angles are mutually inconsistent (possible
/// with noisy data), which callers must distinguish from singularity.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Singular(SingularCase),
    Poses(Vec<CameraPose>),
}

impl SolveOutcome {
    pub fn poses(&self) -> &[CameraPose] {
        match self {
            SolveOutcome::Singular(_) => &[],
            SolveOutcome::Poses(p) => p,
        }
    }
}

/// Tolerances for the solve pipeline.
#[derive(Debug, Clone, Copy)]
pub struct SolverParams {
    /// Angle tolerance for singular-case screening.
    pub singular_tol: f64,
    /// Tolerance on the re-synthesized angles when validating a candidate.
    /// Every positive quadratic root with a valid horizontal triangle is a
    /// genuine solution, so this acts as a numerical safety net rather than
    /// a feasibility filter; it is deliberately loose enough to survive
    /// cancellation when a solution sits very close to a landmark.
    pub round_trip_tol: f64,
    /// Tolerance on `R * z_hat` versus the observed up vector. Must be
    /// widened for noisy observations, where the recovered rotation cannot
    /// reproduce the independently perturbed up vector exactly.
    pub up_tol: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            singular_tol: 1e-9,
            round_trip_tol: 1e-7,
            up_tol: 1e-8,
        }
    }
}

impl SolverParams {
    /// Parameters suitable for observations carrying sensor noise.
    pub fn noisy() -> Self {
        Self {
            singular_tol: 1e-9,
            round_trip_tol: 1e-6,
            up_tol: 0.1,
        }
    }
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn rho(angles: &ObservationAngles, index: usize) -> f64 {
    match index {
        1 => angles.rho1,
        2 => angles.rho2,
        _ => unreachable!(),
    }
}

/// Coefficients of the distance quadratic for pivot `i`:
///
/// `a = 1 - 2 cos(beta) cot(rho_j) tan(rho_i) + (cot(rho_j) tan(rho_i))^2`
/// `b = 2 delta tan(rho_i) (cos(beta) - cot(rho_j) tan(rho_i))`
/// `c = delta^2 tan^2(rho_i) - d^2`
///
/// `h_diff` is the landmark altitude difference `H`, `d` the horizontal
/// landmark separation.
pub fn quadratic_coeffs(
    angles: &ObservationAngles,
    i: usize,
    h_diff: f64,
    d: f64,
) -> Result<QuadraticCoeffs, SolveError> {
    if i != 1 && i != 2 {
        return Err(SolveError::BadIndexChoice(i));
    }
    let j = 3 - i;
    let rho_i = rho(angles, i);
    let rho_j = rho(angles, j);
    let eps = 1e-12;
    if near(rho_i, 0.0, eps) || near(rho_i, PI, eps) || near(rho_i, PI / 2.0, eps) {
        return Err(SolveError::BadIndexChoice(i));
    }
    if near(rho_j, 0.0, eps) || near(rho_j, PI, eps) {
        return Err(SolveError::BadIndexChoice(i));
    }
    let delta = if i == 1 { h_diff } else { -h_diff };
    let t = rho_i.tan();
    let k = cot(rho_j) * t;
    let cb = angles.beta.cos();
    Ok(QuadraticCoeffs {
        a: 1.0 - 2.0 * cb * k + k * k,
        b: 2.0 * delta * t * (cb - k),
        c: delta * delta * t * t - d * d,
        i,
        delta,
    })
}

/// Solves the four position parameters from the angles. Returns zero, one,
/// or two solutions; an empty list means the angles are inconsistent with
/// the landmark geometry.
pub fn solve_distances(
    angles: &ObservationAngles,
    landmarks: &LandmarkPair,
) -> Result<Vec<DistanceSolution>, SolveError> {
    solve_distances_with_tol(angles, landmarks, 1e-9)
}

pub fn solve_distances_with_tol(
    angles: &ObservationAngles,
    landmarks: &LandmarkPair,
    singular_tol: f64,
) -> Result<Vec<DistanceSolution>, SolveError> {
    if let Some(case) = detect_singular_with_tol(landmarks, angles, singular_tol) {
        return Err(SolveError::SingularInput(case));
    }
    let d = landmarks.horizontal_distance();
    let h_diff = landmarks.height_difference();
    let on_pole =
        |r: f64| near(r, 0.0, singular_tol) || near(r, PI, singular_tol);

    // Camera on the vertical line through landmark i: the parameters are
    // forced outright, no quadratic needed.
    for i in [1usize, 2] {
        let rho_i = rho(angles, i);
        if !on_pole(rho_i) {
            continue;
        }
        let j = 3 - i;
        let rho_j = rho(angles, j);
        let delta = if i == 1 { h_diff } else { -h_diff };
        let h_j = -d * cot(rho_j);
        let h_i = h_j + delta;
        if !zero_distance_sign_ok(h_i, rho_i, singular_tol) {
            return Ok(vec![]);
        }
        let sol = assemble(i, 0.0, d, h_i, h_j);
        return Ok(vec![sol]);
    }

    // Pivot on the tilt angle farthest from pi/2 for conditioning of tan.
    let i = if (angles.rho1.cos()).abs() >= (angles.rho2.cos()).abs() {
        1
    } else {
        2
    };
    let j = 3 - i;
    let q = quadratic_coeffs(angles, i, h_diff, d)?;
    let rho_i = rho(angles, i);
    let rho_j = rho(angles, j);
    let cot_j = cot(rho_j);
    let tan_i = rho_i.tan();

    let roots = real_roots(&q);
    let eps_d = 1e-9 * d;
    let mut out = Vec::new();
    for root in roots {
        let d_j = if root.abs() <= eps_d { 0.0 } else { root };
        if d_j < 0.0 {
            continue;
        }
        let raw_i = (d_j * cot_j - q.delta) * tan_i;
        let d_i = if raw_i.abs() <= eps_d { 0.0 } else { raw_i };
        if d_i < 0.0 {
            continue;
        }
        let h_i = -d_i * cot(rho_i);
        let h_j = h_i - q.delta;
        // A vanishing distance is only consistent with a tilt angle at a
        // pole, which the general path has already excluded; the sign
        // condition rejects such roots.
        if d_i == 0.0 && !zero_distance_sign_ok(h_i, rho_i, singular_tol) {
            continue;
        }
        if d_j == 0.0 && !zero_distance_sign_ok(h_j, rho_j, singular_tol) {
            continue;
        }
        out.push(assemble(i, d_i, d_j, h_i, h_j));
    }
    Ok(out)
}

/// Sign condition for a vanishing horizontal distance: the camera is then
/// directly above the landmark (`h > 0`, `rho = pi`) or directly below it
/// (`h < 0`, `rho = 0`).
fn zero_distance_sign_ok(h: f64, rho: f64, tol: f64) -> bool {
    (h > 0.0 && near(rho, PI, tol)) || (h < 0.0 && near(rho, 0.0, tol))
}

fn assemble(i: usize, d_i: f64, d_j: f64, h_i: f64, h_j: f64) -> DistanceSolution {
    if i == 1 {
        DistanceSolution {
            d1: d_i,
            d2: d_j,
            h1: h_i,
            h2: h_j,
        }
    } else {
        DistanceSolution {
            d1: d_j,
            d2: d_i,
            h1: h_j,
            h2: h_i,
        }
    }
}

/// Real roots of the quadratic, with the discriminant clamped to zero when
/// it vanishes to within rounding: that collapse is exactly the double-root
/// (single-solution) locus.
fn real_roots(q: &QuadraticCoeffs) -> Vec<f64> {
    let disc = q.discriminant();
    let eps_disc = 1e-9 * (q.b * q.b + (4.0 * q.a * q.c).abs() + 1.0);
    if disc < -eps_disc {
        return vec![];
    }
    if disc.abs() <= eps_disc {
        return vec![-q.b / (2.0 * q.a)];
    }
    let sq = disc.sqrt();
    let r = if q.b >= 0.0 {
        -0.5 * (q.b + sq)
    } else {
        -0.5 * (q.b - sq)
    };
    vec![r / q.a, q.c / r]
}

/// Closed-form solve for co-altitude landmarks (`H = 0`): the quadratic has
/// `b = 0` and `c = -d^2`, leaving a single positive root. Requires both
/// tilt angles strictly inside the same hemisphere, `(0, pi/2)` or
/// `(pi/2, pi)`.
pub fn solve_coaltitude(
    angles: &ObservationAngles,
    d: f64,
) -> Result<DistanceSolution, SolveError> {
    let eps = 1e-12;
    let side = |r: f64| -> Result<f64, SolveError> {
        if near(r, 0.0, eps) || near(r, PI, eps) {
            Err(SolveError::NotCoaltitude)
        } else {
            Ok(r - PI / 2.0)
        }
    };
    let s1 = side(angles.rho1)?;
    let s2 = side(angles.rho2)?;
    if s1.abs() <= eps && s2.abs() <= eps {
        return Err(SolveError::SingularInput(SingularCase::HorizontalCoplanar));
    }
    if s1 * s2 <= 0.0 {
        return Err(SolveError::MixedHemisphere);
    }
    let k = cot(angles.rho1) * angles.rho2.tan();
    let a = 1.0 - 2.0 * angles.beta.cos() * k + k * k;
    let d1 = d / a.sqrt();
    let d2 = d1 * k;
    let h = -d1 * cot(angles.rho1);
    Ok(DistanceSolution {
        d1,
        d2,
        h1: h,
        h2: h,
    })
}

/// Camera position from a distance solution: intersect the circles of radii
/// `d1`, `d2` around the landmark projections, pick the branch matching the
/// sign of `beta`, and set the altitude from `h1`.
pub fn position_from_distances(
    sol: &DistanceSolution,
    landmarks: &LandmarkPair,
    beta: f64,
) -> Result<Vec3, SolveError> {
    let p1 = landmarks.m1().xy();
    let p2 = landmarks.m2().xy();
    let d = (p2 - p1).norm();
    let scale = d + sol.d1 + sol.d2;
    let eps = 1e-12 * scale;

    let c_xy = if sol.d1 <= eps {
        p1
    } else if sol.d2 <= eps {
        p2
    } else {
        let along = (d * d + sol.d1 * sol.d1 - sol.d2 * sol.d2) / (2.0 * d);
        let off_sq = sol.d1 * sol.d1 - along * along;
        if off_sq < -1e-9 * scale * scale {
            return Err(SolveError::NoIntersection);
        }
        // beta = 0 or pi puts the camera exactly on the projected landmark
        // line; the square root would otherwise amplify cancellation noise in
        // `off_sq` into the reconstructed position.
        let off = if beta == 0.0 || beta == std::f64::consts::PI {
            0.0
        } else {
            off_sq.max(0.0).sqrt()
        };
        let dir = (p2 - p1) / d;
        let perp = Vec2::new(-dir.y, dir.x);
        let base = p1 + along * dir;
        let candidates = [base + off * perp, base - off * perp];
        // Pick the intersection whose signed angle at the camera matches beta.
        let mut best = candidates[0];
        let mut best_err = f64::INFINITY;
        for cand in candidates {
            if let Ok(angle) = geom::signed_horizontal_angle(p1, cand, p2) {
                let err = angle_distance(angle, beta);
                if err < best_err {
                    best_err = err;
                    best = cand;
                }
            }
        }
        best
    };
    Ok(Vec3::new(c_xy.x, c_xy.y, landmarks.m1().z + sol.h1))
}

/// Angles an ideal camera at `camera` would reduce to. The reduction is
/// yaw-invariant, so object-frame directions with up = +z suffice.
pub fn angles_from_position(
    landmarks: &LandmarkPair,
    camera: Vec3,
) -> Result<ObservationAngles, ClassifyError> {
    let obs = exact_object_frame_observation(landmarks, camera)?;
    Ok(reduce_to_angles(&obs))
}

fn exact_object_frame_observation(
    landmarks: &LandmarkPair,
    camera: Vec3,
) -> Result<ImageObservation, ClassifyError> {
    let to1 = landmarks.m1() - camera;
    let to2 = landmarks.m2() - camera;
    if to1.norm() == 0.0 {
        return Err(ClassifyError::CameraAtLandmark(1));
    }
    if to2.norm() == 0.0 {
        return Err(ClassifyError::CameraAtLandmark(2));
    }
    Ok(ImageObservation::new(
        Unit::new_normalize(to1),
        Unit::new_normalize(to2),
        Unit::new_unchecked(Vec3::z()),
    ))
}

/// Full labeled solve: reduce, screen singularities, solve distances,
/// reconstruct positions, and recover the rotation mapping the object-frame
/// landmark directions onto the observed image vectors. Candidates that do
/// not re-synthesize the input angles, or whose rotation does not carry
/// object-up to the observed up vector, are dropped.
pub fn solve_labeled(
    obs: &ImageObservation,
    landmarks: &LandmarkPair,
    params: &SolverParams,
) -> Result<SolveOutcome, SolveError> {
    let angles = reduce_to_angles(obs);
    if let Some(case) = detect_singular_with_tol(landmarks, &angles, params.singular_tol) {
        return Ok(SolveOutcome::Singular(case));
    }
    let sols = solve_distances_with_tol(&angles, landmarks, params.singular_tol)?;
    let mut poses = Vec::new();
    for sol in &sols {
        let position = match position_from_distances(sol, landmarks, angles.beta) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let Ok(object_obs) = exact_object_frame_observation(landmarks, position) else {
            continue;
        };

        let resynth = reduce_to_angles(&object_obs);
        if (resynth.rho1 - angles.rho1).abs() > params.round_trip_tol
            || (resynth.rho2 - angles.rho2).abs() > params.round_trip_tol
            || angle_distance(resynth.beta, angles.beta) > params.round_trip_tol
        {
            continue;
        }

        let rotation = match rotation_from_two_pairs_with_tol(
            object_obs.v1,
            object_obs.v2,
            obs.v1,
            obs.v2,
            // Congruence is validated through the up-vector check below
            // instead, so noisy pairs still produce a best-effort rotation.
            f64::INFINITY,
        ) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if (rotation * Vec3::z() - obs.u.into_inner()).norm() > params.up_tol {
            continue;
        }
        poses.push(CameraPose { position, rotation });
    }
    Ok(SolveOutcome::Poses(poses))
}

/// Solve with unknown landmark correspondence: run the labeled solve under
/// both labelings and merge. At most two poses can survive; when the
/// labeled problem has two solutions the swapped labeling contributes none,
/// so the image itself identifies the landmarks in that case.
pub fn solve_unlabeled(
    obs: &ImageObservation,
    landmarks: &LandmarkPair,
    params: &SolverParams,
) -> Result<SolveOutcome, SolveError> {
    let first = solve_labeled(obs, landmarks, params)?;
    if let SolveOutcome::Singular(case) = first {
        return Ok(SolveOutcome::Singular(case));
    }
    let second = solve_labeled(&obs.swapped(), landmarks, params)?;
    if let SolveOutcome::Singular(case) = second {
        return Ok(SolveOutcome::Singular(case));
    }

    let scale = landmarks.separation();
    let tol = 1e-9 * (scale + 1.0);
    let mut merged: Vec<CameraPose> = first.poses().to_vec();
    for pose in second.poses() {
        let duplicate = merged.iter().any(|p| {
            (p.position - pose.position).norm() <= tol
                && (p.rotation.matrix() - pose.rotation.matrix()).norm() <= tol
        });
        if !duplicate {
            merged.push(*pose);
        }
    }
    if merged.len() > 2 {
        return Err(SolveError::TheoremViolation);
    }
    Ok(SolveOutcome::Poses(merged))
}
