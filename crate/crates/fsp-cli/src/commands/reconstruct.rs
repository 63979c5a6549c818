use std::f64::consts::FRAC_PI_2;

use fsp_core::formats::{CalibrationFile, KeypointFile, SkeletonFile};
use fsp_core::skeleton::{match_joints, reconstruct_skeleton, Skeleton2D, Skeleton3D};
use fsp_core::{
    focus_view, map_point, CameraIntrinsics, Correspondence, Error, ImagePoint, ProjectionMatrix,
    Result, RigidPose, VirtualView,
};
use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::StageClock;
use crate::args::ReconstructArgs;

/// Knobs of [`reconstruct_records`]; angles in radians.
#[derive(Clone, Copy, Debug)]
pub struct ReconstructOptions {
    /// joints whose lower detection confidence falls below this are ignored
    pub min_confidence: f64,
    /// joints with a worse reprojection residual (view pixels) are dropped
    pub max_residual: f64,
    /// horizontal field of view of the per-person virtual views
    pub view_fov: f64,
    /// side length of the square virtual views, pixels
    pub view_size: u32,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            min_confidence: 0.3,
            max_residual: 5.0,
            view_fov: FRAC_PI_2,
            view_size: 640,
        }
    }
}

struct CameraContext {
    intrinsics: CameraIntrinsics,
    /// camera-to-world
    world_pose: RigidPose,
    /// world "down" in the camera frame
    gravity: Vector3<f64>,
    /// identity-rotation view reoriented per person by [`focus_view`]
    template: VirtualView,
}

impl CameraContext {
    fn new(
        calibration: &CalibrationFile,
        camera_id: &str,
        options: &ReconstructOptions,
    ) -> Result<CameraContext> {
        let record = calibration.camera(camera_id)?;
        let intrinsics = record.intrinsics()?;
        let template = VirtualView::with_fov(
            camera_id,
            Matrix3::identity(),
            options.view_fov,
            (options.view_size, options.view_size),
        )?;
        Ok(CameraContext {
            intrinsics,
            world_pose: record.pose()?,
            gravity: calibration.gravity_in_camera(record)?,
            template,
        })
    }
}

/// Triangulates every person seen by both cameras in the same frame.
///
/// For each matched (frame, person) pair a virtual view per camera is aimed
/// at the person's detected-joint centroid and leveled against gravity;
/// matched joints are transferred into those views and triangulated.
/// Joints that fall outside a view or reproject worse than
/// `options.max_residual` are dropped, never invented; a pair whose joints
/// all drop still yields a record with 18 null joints. Pairs seen by only
/// one camera are skipped.
pub fn reconstruct_records(
    calibration: &CalibrationFile,
    keypoints_a: &KeypointFile,
    keypoints_b: &KeypointFile,
    options: &ReconstructOptions,
) -> Result<SkeletonFile> {
    if !(options.min_confidence.is_finite()) {
        return Err(Error::InvalidParameter(
            "min_confidence must be finite".into(),
        ));
    }
    if !(options.max_residual.is_finite() && options.max_residual >= 0.0) {
        return Err(Error::InvalidParameter(
            "max_residual must be finite and non-negative".into(),
        ));
    }
    calibration.validate()?;
    keypoints_a.validate()?;
    keypoints_b.validate()?;

    let id_a = keypoints_a.sole_camera_id()?.to_string();
    let id_b = keypoints_b.sole_camera_id()?.to_string();
    if id_a == id_b {
        return Err(Error::InvalidParameter(format!(
            "both keypoint files come from camera {id_a:?}; stereo needs two cameras"
        )));
    }
    let ctx_a = CameraContext::new(calibration, &id_a, options)?;
    let ctx_b = CameraContext::new(calibration, &id_b, options)?;
    keypoints_a.validate_against(&ctx_a.intrinsics)?;
    keypoints_b.validate_against(&ctx_b.intrinsics)?;

    let skels_a = keypoints_a.skeletons();
    let skels_b = keypoints_b.skeletons();
    let pairs: Vec<(&Skeleton2D, &Skeleton2D)> = skels_a
        .iter()
        .filter_map(|(key, sa)| skels_b.get(key).map(|sb| (sa, sb)))
        .collect();

    let skeletons: Vec<Skeleton3D> = pairs
        .par_iter()
        .map(|(sa, sb)| reconstruct_pair(&ctx_a, &ctx_b, sa, sb, options))
        .collect::<Result<_>>()?;
    Ok(SkeletonFile::from_skeletons(skeletons.iter()))
}

/// One (frame, person) pair. Both skeletons must describe the same person;
/// a [`Error::PersonMismatch`] says the caller paired records up wrong.
fn reconstruct_pair(
    a: &CameraContext,
    b: &CameraContext,
    skel_a: &Skeleton2D,
    skel_b: &Skeleton2D,
    options: &ReconstructOptions,
) -> Result<Skeleton3D> {
    let matched = match_joints(skel_a, skel_b, options.min_confidence)?;
    let person = skel_a.person_id;
    let frame = skel_a.frame_index;
    if matched.is_empty() {
        return Ok(Skeleton3D::empty(person, frame));
    }

    let view_a = aim_at_person(a, skel_a)?;
    let view_b = aim_at_person(b, skel_b)?;

    // fisheye pixels -> virtual-view pixels; the fisheye camera is the
    // view's parent, so the source rotation is the identity
    let identity = Matrix3::identity();
    let mut correspondences = Vec::with_capacity(matched.len());
    for (joint, corr) in &matched {
        let pa = map_point(
            &corr.point_a,
            &a.intrinsics,
            &identity,
            view_a.intrinsics(),
            view_a.rotation(),
        );
        let pb = map_point(
            &corr.point_b,
            &b.intrinsics,
            &identity,
            view_b.intrinsics(),
            view_b.rotation(),
        );
        let (Ok(pa), Ok(pb)) = (pa, pb) else {
            continue;
        };
        if !view_a.intrinsics().contains_sample(&pa) || !view_b.intrinsics().contains_sample(&pb) {
            continue;
        }
        correspondences.push((
            *joint,
            Correspondence {
                point_a: pa,
                point_b: pb,
                confidence: corr.confidence,
            },
        ));
    }

    let proj_a = ProjectionMatrix::for_view(&view_a, &a.world_pose);
    let proj_b = ProjectionMatrix::for_view(&view_b, &b.world_pose);
    Ok(reconstruct_skeleton(
        person,
        frame,
        &correspondences,
        &proj_a,
        &proj_b,
        options.max_residual,
    ))
}

fn aim_at_person(ctx: &CameraContext, skeleton: &Skeleton2D) -> Result<VirtualView> {
    let (cx, cy) = skeleton.centroid().ok_or_else(|| {
        Error::DegenerateInput("cannot aim a view at a skeleton with no joints".into())
    })?;
    focus_view(
        &ctx.template,
        &ctx.intrinsics,
        &ImagePoint::new(cx, cy),
        Some(ctx.gravity),
    )
}

pub fn run(args: &ReconstructArgs) -> Result<()> {
    let mut clock = StageClock::new(args.timings);

    let calibration = CalibrationFile::load(&args.calibration)?;
    let keypoints_a = KeypointFile::load(&args.keypoints_a)?;
    let keypoints_b = KeypointFile::load(&args.keypoints_b)?;
    clock.stage("load");

    let options = ReconstructOptions {
        min_confidence: args.min_confidence,
        max_residual: args.max_residual,
        view_fov: args.fov_deg.to_radians(),
        view_size: args.view_size,
    };
    let skeletons = reconstruct_records(&calibration, &keypoints_a, &keypoints_b, &options)?;
    clock.stage("reconstruct");

    skeletons.save(&args.output)?;
    clock.stage("write");

    if args.timings {
        let joints: usize = skeletons
            .records
            .iter()
            .map(|r| r.joints.iter().filter(|j| j.is_some()).count())
            .sum();
        println!(
            "timing summary: {} records, {} joints",
            skeletons.records.len(),
            joints
        );
    }
    Ok(())
}
