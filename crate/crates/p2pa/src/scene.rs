//! On-disk formats for the CLI: scene documents (landmarks plus an optional
//! observation and ground-truth camera), sweep-config documents, and the
//! JSON pose report. Scenes and configs are TOML; reports are JSON printed
//! with round-trip float precision.

use crate::classify::{ClassifyError, LandmarkPair};
use crate::geom::{
    pinhole_ray, up_from_accelerometer, CameraPose, GeomError, ImageObservation, ObservationAngles,
    Vec3,
};
use crate::sim::{AltitudeSpacing, NoiseModel, SweepConfig};
use nalgebra::{Matrix3, Rotation3, Unit};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("failed to parse document: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("scene must contain exactly two landmarks, got {0}")]
    LandmarkCount(usize),
    #[error("scene has no observation")]
    MissingObservation,
    #[error("scene has no ground-truth camera")]
    MissingCamera,
    #[error("invalid observation: {0}")]
    Geom(#[from] GeomError),
    #[error("invalid landmarks: {0}")]
    Classify(#[from] ClassifyError),
    #[error("invalid field: {0}")]
    Invalid(String),
}

/// One landmark entry: an identifying label and object coordinates in mm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LandmarkEntry {
    pub id: String,
    pub position: [f64; 3],
}

/// The observation in one of three equivalent representations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservationSpec {
    /// Unit vectors in camera coordinates.
    Vectors {
        v1: [f64; 3],
        v2: [f64; 3],
        u: [f64; 3],
    },
    /// Pinhole sensor coordinates plus a raw accelerometer reading.
    Pixels {
        pixels: PixelCoords,
        focal_mm: f64,
        accel: [f64; 3],
    },
    /// The reduced angles directly, radians.
    Angles { angles: AngleSpec },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PixelCoords {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleSpec {
    pub rho1: f64,
    pub rho2: f64,
    pub beta: f64,
}

/// Optional ground-truth camera. The rotation is row-major; when absent,
/// synthesis orients the camera toward the landmark midpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CameraSpec {
    pub position: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[[f64; 3]; 3]>,
}

/// A scene document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneFile {
    pub landmarks: Vec<LandmarkEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observation: Option<ObservationSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub camera: Option<CameraSpec>,
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self, SceneError> {
        let scene: SceneFile = toml::from_str(text)?;
        if scene.landmarks.len() != 2 {
            return Err(SceneError::LandmarkCount(scene.landmarks.len()));
        }
        Ok(scene)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene serialization cannot fail")
    }

    pub fn landmark_pair(&self) -> Result<LandmarkPair, SceneError> {
        let m1 = Vec3::from(self.landmarks[0].position);
        let m2 = Vec3::from(self.landmarks[1].position);
        Ok(LandmarkPair::new(m1, m2)?)
    }

    /// Builds the camera-frame observation, deriving rays and the up vector
    /// where the scene supplies pixels or reduced angles.
    pub fn observation(&self) -> Result<ImageObservation, SceneError> {
        match self.observation.as_ref().ok_or(SceneError::MissingObservation)? {
            ObservationSpec::Vectors { v1, v2, u } => Ok(ImageObservation::from_vectors(
                Vec3::from(*v1),
                Vec3::from(*v2),
                Vec3::from(*u),
            )?),
            ObservationSpec::Pixels {
                pixels,
                focal_mm,
                accel,
            } => {
                if *focal_mm <= 0.0 {
                    return Err(SceneError::Invalid(format!(
                        "focal_mm must be positive, got {focal_mm}"
                    )));
                }
                Ok(ImageObservation::new(
                    pinhole_ray(pixels.x1, pixels.y1, *focal_mm),
                    pinhole_ray(pixels.x2, pixels.y2, *focal_mm),
                    up_from_accelerometer(Vec3::from(*accel))?,
                ))
            }
            ObservationSpec::Angles { angles } => {
                let a = ObservationAngles::new(angles.rho1, angles.rho2, angles.beta);
                Ok(observation_from_angles(&a)?)
            }
        }
    }

    pub fn camera_pose(&self, landmarks: &LandmarkPair) -> Result<CameraPose, SceneError> {
        let spec = self.camera.as_ref().ok_or(SceneError::MissingCamera)?;
        let position = Vec3::from(spec.position);
        let rotation = match &spec.rotation {
            Some(rows) => {
                let m = Matrix3::from_rows(&[
                    Vec3::from(rows[0]).transpose(),
                    Vec3::from(rows[1]).transpose(),
                    Vec3::from(rows[2]).transpose(),
                ]);
                let ortho = (m.transpose() * m - Matrix3::identity()).norm();
                if ortho > 1e-6 || (m.determinant() - 1.0).abs() > 1e-6 {
                    return Err(SceneError::Invalid(
                        "camera.rotation is not a proper rotation matrix".into(),
                    ));
                }
                Rotation3::from_matrix_unchecked(m)
            }
            None => crate::sim::facing_midpoint_rotation(landmarks, position),
        };
        Ok(CameraPose { position, rotation })
    }
}

/// A camera-frame observation realizing the given reduced angles, with the
/// camera frame chosen gravity-aligned (u = +z). Any other realization is a
/// yaw of this one, which does not affect the solve.
pub fn observation_from_angles(
    angles: &ObservationAngles,
) -> Result<ImageObservation, SceneError> {
    for (name, rho) in [("rho1", angles.rho1), ("rho2", angles.rho2)] {
        if !(0.0..=std::f64::consts::PI).contains(&rho) {
            return Err(SceneError::Invalid(format!(
                "{name} must be in [0, pi], got {rho}"
            )));
        }
    }
    if !angles.beta.is_finite() {
        return Err(SceneError::Invalid("beta must be finite".into()));
    }
    Ok(ImageObservation::new(
        crate::geom::spherical_ray(angles.rho1, 0.0),
        crate::geom::spherical_ray(angles.rho2, angles.beta),
        Unit::new_unchecked(Vec3::z()),
    ))
}

/// JSON pose report emitted by the solve command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoseReport {
    /// "solved", "singular", or "infeasible".
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_case: Option<String>,
    pub poses: Vec<PoseEntry>,
    /// Uniqueness verdict from ground truth, when the scene carries one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoseEntry {
    pub position: [f64; 3],
    /// Row-major rotation taking object-frame directions to camera-frame
    /// directions.
    pub rotation: [[f64; 3]; 3],
    /// Largest mismatch (radians) between the input angles and the angles
    /// re-synthesized from this pose.
    pub residual_angle_error: f64,
}

impl PoseEntry {
    pub fn from_pose(pose: &CameraPose, residual_angle_error: f64) -> Self {
        let m = pose.rotation.matrix();
        Self {
            position: [pose.position.x, pose.position.y, pose.position.z],
            rotation: [
                [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
                [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
                [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
            ],
            residual_angle_error,
        }
    }
}

/// Sweep-config document for the simulate command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfigFile {
    pub landmarks: SweepLandmarks,
    pub camera_xy: [f64; 2],
    pub altitude_range: [f64; 2],
    pub num_positions: usize,
    pub samples_per_position: usize,
    #[serde(default = "default_spacing")]
    pub spacing: AltitudeSpacing,
    pub noise: NoiseSpec,
}

fn default_spacing() -> AltitudeSpacing {
    AltitudeSpacing::Logarithmic
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepLandmarks {
    pub m1: [f64; 3],
    pub m2: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub cone_radius_deg: f64,
    pub accel_noise: f64,
    pub seed: u64,
}

impl SweepConfigFile {
    pub fn parse(text: &str) -> Result<Self, SceneError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_sweep_config(&self) -> Result<SweepConfig, SceneError> {
        Ok(SweepConfig {
            landmarks: LandmarkPair::new(
                Vec3::from(self.landmarks.m1),
                Vec3::from(self.landmarks.m2),
            )?,
            camera_horizontal: self.camera_xy,
            altitude_range: (self.altitude_range[0], self.altitude_range[1]),
            num_positions: self.num_positions,
            samples_per_position: self.samples_per_position,
            noise: NoiseModel {
                direction_cone_radius: self.noise.cone_radius_deg.to_radians(),
                accel_noise_half_width: self.noise.accel_noise,
                rng_seed: self.noise.seed,
            },
            spacing: self.spacing,
        })
    }
}
