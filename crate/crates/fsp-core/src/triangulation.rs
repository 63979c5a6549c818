//! Two-view triangulation by the direct linear transform.
//!
//! Projection matrices are built per virtual view as P = K·Rᵥᵀ·[Wᵣᵀ | −Wᵣᵀt]
//! where (Wᵣ, t) maps the parent camera frame into the world frame and Rᵥ
//! maps view vectors into the parent frame. The third row of P evaluates to
//! the view-frame depth of a world point.

use nalgebra::{Matrix3, Matrix3x4, Matrix4, RowVector4, Vector3, Vector4, SVD};

use crate::camera::{ImagePoint, RigidPose};
use crate::error::{Error, Result};
use crate::view::VirtualView;

/// Camera centers closer than this are treated as coincident.
pub const MIN_BASELINE: f64 = 1e-12;

/// Relative threshold below which the design matrix is rank-deficient.
const RANK_TOL: f64 = 1e-12;

/// σ₄/σ₃ above this means the two smallest singular values are
/// indistinguishable and the solution direction is arbitrary.
const SEPARATION_TOL: f64 = 1.0 - 1e-9;

/// Homogeneous-solution w below this magnitude is a point at infinity.
const INFINITY_TOL: f64 = 1e-9;

/// A 3×4 projection from homogeneous world points to pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionMatrix {
    matrix: Matrix3x4<f64>,
}

impl ProjectionMatrix {
    pub fn from_matrix(matrix: Matrix3x4<f64>) -> Self {
        ProjectionMatrix { matrix }
    }

    /// The projection of a virtual view whose parent camera sits at
    /// `world_pose` (camera frame → world frame).
    pub fn for_view(view: &VirtualView, world_pose: &RigidPose) -> ProjectionMatrix {
        let k = view.intrinsic_matrix();
        let world_to_parent = world_pose.inverse();
        let world_to_view_rot = view.rotation().transpose() * world_to_parent.rotation();
        let world_to_view_t = view.rotation().transpose() * world_to_parent.translation();
        let left = k * world_to_view_rot;
        let right = k * world_to_view_t;
        let mut matrix = Matrix3x4::zeros();
        matrix.fixed_view_mut::<3, 3>(0, 0).copy_from(&left);
        matrix.fixed_view_mut::<3, 1>(0, 3).copy_from(&right);
        ProjectionMatrix { matrix }
    }

    pub fn as_matrix(&self) -> &Matrix3x4<f64> {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> RowVector4<f64> {
        self.matrix.row(i).into_owned()
    }

    /// The camera center: the right null direction of P, dehomogenized.
    /// None when the left 3×3 block is singular.
    pub fn center(&self) -> Option<Vector3<f64>> {
        let m = self.matrix.fixed_view::<3, 3>(0, 0).into_owned();
        let p4 = self.matrix.fixed_view::<3, 1>(0, 3).into_owned();
        let inv = m.try_inverse()?;
        Some(-(inv * p4))
    }

    /// Projects a world point, returning the pixel and the view-frame depth.
    pub fn project_point(&self, world: &Vector3<f64>) -> Result<(ImagePoint, f64)> {
        let h = self.matrix * Vector4::new(world.x, world.y, world.z, 1.0);
        if h.z <= 0.0 {
            return Err(Error::BehindCamera(format!(
                "world point has depth {} in this view",
                h.z
            )));
        }
        Ok((ImagePoint::new(h.x / h.z, h.y / h.z), h.z))
    }
}

/// A matched image point pair across the two views.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correspondence {
    pub point_a: ImagePoint,
    pub point_b: ImagePoint,
    /// min of the two detection confidences, in [0, 1]
    pub confidence: f64,
}

/// A homogeneous world point; `position` dehomogenizes it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl WorldPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        WorldPoint { x, y, z, w: 1.0 }
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x / self.w, self.y / self.w, self.z / self.w)
    }
}

/// Triangulates one correspondence.
///
/// Each view contributes the two incidence rows (x·p₂ − p₀)·X = 0 and
/// (y·p₂ − p₁)·X = 0. For conditioning, each view's rows are formed with
/// the measured point translated to the image origin (exact per-point
/// centering), and every row is scaled to unit norm before the SVD. The
/// solution is the right singular vector of the smallest singular value.
pub fn triangulate_dlt(
    correspondence: &Correspondence,
    view_a: &ProjectionMatrix,
    view_b: &ProjectionMatrix,
) -> Result<WorldPoint> {
    if !correspondence.point_a.is_finite() || !correspondence.point_b.is_finite() {
        return Err(Error::DegenerateInput("non-finite image point".into()));
    }
    let center_a = view_a
        .center()
        .ok_or_else(|| Error::DegenerateGeometry("view A projection is singular".into()))?;
    let center_b = view_b
        .center()
        .ok_or_else(|| Error::DegenerateGeometry("view B projection is singular".into()))?;
    if (center_a - center_b).norm() <= MIN_BASELINE {
        return Err(Error::DegenerateGeometry(
            "camera centers coincide; no baseline to triangulate across".into(),
        ));
    }

    // rows of T·P where T translates the measured point to the origin
    let rows = [
        view_a.row(0) - correspondence.point_a.x * view_a.row(2),
        view_a.row(1) - correspondence.point_a.y * view_a.row(2),
        view_b.row(0) - correspondence.point_b.x * view_b.row(2),
        view_b.row(1) - correspondence.point_b.y * view_b.row(2),
    ];
    let mut design = Matrix4::zeros();
    for (i, row) in rows.iter().enumerate() {
        let norm = row.norm();
        if norm > 0.0 {
            design.set_row(i, &(row / norm));
        }
    }

    let svd = SVD::new(design, false, true);
    let v_t = svd
        .v_t
        .expect("v_t requested from the decomposition");
    let sigma = svd.singular_values;
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap());
    let (s1, s3, s4) = (sigma[order[0]], sigma[order[2]], sigma[order[3]]);

    // rank < 3: the rows do not span enough directions (e.g. both views
    // share a projection matrix)
    if s3 <= s1 * RANK_TOL {
        return Err(Error::DegenerateGeometry(
            "design matrix is rank deficient; correspondence does not pin down a point".into(),
        ));
    }
    if s4 / s3 > SEPARATION_TOL {
        return Err(Error::DegenerateGeometry(
            "smallest singular values are indistinguishable; solution is not unique".into(),
        ));
    }

    let solution: Vector4<f64> = v_t.row(order[3]).transpose();
    let spatial = solution.fixed_rows::<3>(0).norm();
    if solution.w.abs() <= INFINITY_TOL * spatial {
        return Err(Error::DegenerateGeometry(
            "rays are nearly parallel; solution lies at infinity".into(),
        ));
    }

    let position = solution.fixed_rows::<3>(0) / solution.w;
    let point = Vector3::new(position.x, position.y, position.z);
    let depth_a = (view_a.row(2) * Vector4::new(point.x, point.y, point.z, 1.0)).x;
    if depth_a <= 0.0 {
        return Err(Error::BehindCamera("triangulated point behind view A".into()));
    }
    let depth_b = (view_b.row(2) * Vector4::new(point.x, point.y, point.z, 1.0)).x;
    if depth_b <= 0.0 {
        return Err(Error::BehindCamera("triangulated point behind view B".into()));
    }
    Ok(WorldPoint::new(point.x, point.y, point.z))
}

/// Distances between the reprojections of `point` and the measured pixels,
/// one per view.
pub fn reprojection_error(
    point: &WorldPoint,
    correspondence: &Correspondence,
    view_a: &ProjectionMatrix,
    view_b: &ProjectionMatrix,
) -> Result<(f64, f64)> {
    if ![point.x, point.y, point.z, point.w]
        .iter()
        .all(|v| v.is_finite())
        || point.w == 0.0
    {
        return Err(Error::DegenerateInput("invalid world point".into()));
    }
    let p = point.position();
    let (proj_a, _) = view_a.project_point(&p)?;
    let (proj_b, _) = view_b.project_point(&p)?;
    Ok((
        proj_a.distance_to(&correspondence.point_a),
        proj_b.distance_to(&correspondence.point_b),
    ))
}

/// Builds a projection matrix directly from a pinhole K and a
/// world-from-camera pose, bypassing the virtual-view machinery. Mostly
/// useful for tests and tooling.
pub fn projection_from_k_pose(k: &Matrix3<f64>, world_pose: &RigidPose) -> ProjectionMatrix {
    let world_to_cam = world_pose.inverse();
    let left = k * world_to_cam.rotation();
    let right = k * world_to_cam.translation();
    let mut matrix = Matrix3x4::zeros();
    matrix.fixed_view_mut::<3, 3>(0, 0).copy_from(&left);
    matrix.fixed_view_mut::<3, 1>(0, 3).copy_from(&right);
    ProjectionMatrix::from_matrix(matrix)
}
