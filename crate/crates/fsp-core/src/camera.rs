//! Camera intrinsics, projection onto the fisheye image, and rigid poses.
//!
//! Conventions: right-handed camera frames with +z along the optical axis,
//! +x right, +y down; image coordinates in pixels with the origin at the
//! top-left corner. A pose's rotation maps camera-frame vectors into the
//! parent frame (`x_parent = R·x_cam + t`).

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lens::LensModel;

/// Allowed deviation of RᵀR from the identity (and of det R from +1).
pub const ROTATION_TOL: f64 = 1e-9;

/// A position on an image, in pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImagePoint {
    pub x: f64,
    pub y: f64,
}

impl ImagePoint {
    pub fn new(x: f64, y: f64) -> Self {
        ImagePoint { x, y }
    }

    pub fn distance_to(&self, other: &ImagePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Lens, principal point and sensor size of one camera.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraIntrinsics {
    lens: LensModel,
    principal_point: (f64, f64),
    resolution: (u32, u32),
}

impl CameraIntrinsics {
    /// The principal point must lie inside the sensor.
    pub fn new(lens: LensModel, principal_point: (f64, f64), resolution: (u32, u32)) -> Result<Self> {
        let (w, h) = resolution;
        if w == 0 || h == 0 {
            return Err(Error::InvalidParameter(format!(
                "resolution must be positive, got {w}x{h}"
            )));
        }
        let (cx, cy) = principal_point;
        if !cx.is_finite() || !cy.is_finite() || cx < 0.0 || cy < 0.0 || cx > w as f64 || cy > h as f64 {
            return Err(Error::InvalidParameter(format!(
                "principal point ({cx}, {cy}) outside {w}x{h} sensor"
            )));
        }
        Ok(CameraIntrinsics {
            lens,
            principal_point,
            resolution,
        })
    }

    pub fn lens(&self) -> &LensModel {
        &self.lens
    }

    pub fn principal_point(&self) -> (f64, f64) {
        self.principal_point
    }

    pub fn resolution(&self) -> (u32, u32) {
        self.resolution
    }

    pub fn width(&self) -> u32 {
        self.resolution.0
    }

    pub fn height(&self) -> u32 {
        self.resolution.1
    }

    /// Whether a point can be sampled from the image: inside
    /// [0, w−1] × [0, h−1].
    pub fn contains_sample(&self, p: &ImagePoint) -> bool {
        p.x >= 0.0
            && p.y >= 0.0
            && p.x <= (self.resolution.0 - 1) as f64
            && p.y <= (self.resolution.1 - 1) as f64
    }

    /// Projects a camera-frame point onto the image.
    ///
    /// The inclination is computed as atan2(√(x²+y²), z), which stays
    /// well-conditioned near the optical axis where z/‖o‖ ≈ 1.
    pub fn project(&self, object_point: &Vector3<f64>) -> Result<ImagePoint> {
        if !(object_point.x.is_finite() && object_point.y.is_finite() && object_point.z.is_finite()) {
            return Err(Error::DegenerateInput("non-finite object point".into()));
        }
        let radial = object_point.x.hypot(object_point.y);
        if radial == 0.0 && object_point.z == 0.0 {
            return Err(Error::DegenerateInput(
                "cannot project the optical center".into(),
            ));
        }
        let theta = radial.atan2(object_point.z);
        let rd = self.lens.theta_to_rd(theta)?;
        let (cx, cy) = self.principal_point;
        if radial == 0.0 {
            return Ok(ImagePoint::new(cx, cy));
        }
        // (cos φ, sin φ) without evaluating φ itself
        Ok(ImagePoint::new(
            cx + rd * object_point.x / radial,
            cy + rd * object_point.y / radial,
        ))
    }

    /// Inverse of [`CameraIntrinsics::project`]: the unit-norm ray through
    /// an image point, in the camera frame.
    pub fn unproject(&self, image_point: &ImagePoint) -> Result<Vector3<f64>> {
        if !image_point.is_finite() {
            return Err(Error::DegenerateInput("non-finite image point".into()));
        }
        let (cx, cy) = self.principal_point;
        let nx = image_point.x - cx;
        let ny = image_point.y - cy;
        let rd = nx.hypot(ny);
        let theta = self.lens.rd_to_theta(rd)?;
        if rd == 0.0 {
            return Ok(Vector3::z());
        }
        let (sin_t, cos_t) = theta.sin_cos();
        Ok(Vector3::new(sin_t * nx / rd, sin_t * ny / rd, cos_t))
    }
}

/// Returns how far RᵀR deviates from the identity, plus the determinant
/// deviation from +1. Used by every rotation-accepting constructor.
pub(crate) fn rotation_deviation(rotation: &Matrix3<f64>) -> f64 {
    let gram = rotation.transpose() * rotation;
    let ortho = (gram - Matrix3::identity()).abs().max();
    let det = (rotation.determinant() - 1.0).abs();
    ortho.max(det)
}

pub(crate) fn check_rotation(rotation: &Matrix3<f64>) -> Result<()> {
    if !rotation.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite rotation matrix".into()));
    }
    let dev = rotation_deviation(rotation);
    if dev > ROTATION_TOL {
        return Err(Error::InvalidParameter(format!(
            "matrix is not a proper rotation (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

/// A rigid transform: `x_parent = R·x_cam + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidPose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl RigidPose {
    /// R must be orthonormal with determinant +1, to within [`ROTATION_TOL`].
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        check_rotation(&rotation)?;
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite translation".into()));
        }
        Ok(RigidPose {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        RigidPose {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Extracts the pose from a 4×4 homogeneous matrix with bottom row
    /// (0, 0, 0, 1).
    pub fn from_homogeneous(m: &Matrix4<f64>) -> Result<Self> {
        let bottom_ok = m[(3, 0)] == 0.0 && m[(3, 1)] == 0.0 && m[(3, 2)] == 0.0 && m[(3, 3)] == 1.0;
        if !bottom_ok {
            return Err(Error::InvalidParameter(
                "homogeneous pose must have bottom row (0, 0, 0, 1)".into(),
            ));
        }
        RigidPose::new(
            m.fixed_view::<3, 3>(0, 0).into_owned(),
            m.fixed_view::<3, 1>(0, 3).into_owned(),
        )
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// Inverse transform; a valid pose inverts exactly (Rᵀ, −Rᵀt).
    pub fn inverse(&self) -> RigidPose {
        let rt = self.rotation.transpose();
        RigidPose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidPose) -> RigidPose {
        RigidPose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }
}

/// Maps an image point between two cameras sharing an optical center:
/// unproject in the source, rotate into the destination frame, reproject.
/// Rotations map each camera's frame into the common parent frame.
pub fn map_point(
    point: &ImagePoint,
    src: &CameraIntrinsics,
    src_rotation: &Matrix3<f64>,
    dst: &CameraIntrinsics,
    dst_rotation: &Matrix3<f64>,
) -> Result<ImagePoint> {
    let ray = src.unproject(point)?;
    let rotated = dst_rotation.transpose() * (src_rotation * ray);
    dst.project(&rotated)
}
