//! Synthetic motion-capture scenes with known geometry.
//!
//! Articulated figures walk configurable paths on the floor of a room
//! observed by a calibrated rig (by default two overhead fisheye cameras).
//! The generator emits per-camera 2D detections — optionally noisy and
//! with simulated misses — plus exact 3D ground truth, all reproducible
//! from a seed.

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::camera::{CameraIntrinsics, RigidPose};
use crate::error::{Error, Result};
use crate::formats::{
    CalibrationFile, CameraRecord, KeypointFile, KeypointRecord, PathConfig, PersonConfig,
    SceneConfig, SkeletonFile,
};
use crate::lens::{LensKind, LensModel};
use crate::skeleton::{Joint3D, Skeleton3D, JOINT_COUNT};

/// Frames per full arm-swing cycle.
const ARM_SWING_PERIOD: f64 = 40.0;

/// Confidence of a simulated detection is uniform in this range.
const CONFIDENCE_RANGE: (f64, f64) = (0.7, 1.0);

/// The built-in rig: two fisheye cameras 1.5 m apart on a 3 m ceiling,
/// both looking straight down, world z up and gravity along −z.
pub fn default_rig() -> CalibrationFile {
    // camera +z (optical axis) maps to world −z, camera +y to world −y
    let down = Matrix3::new(
        1.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, //
        0.0, 0.0, -1.0,
    );
    let lens = LensModel::new(LensKind::Equidistant, 618.75).unwrap();
    let intr = CameraIntrinsics::new(lens, (1296.0, 972.0), (2592, 1944)).unwrap();
    let cam = |id: &str, x: f64| -> CameraRecord {
        let pose = RigidPose::new(down, Vector3::new(x, 0.0, 3.0)).unwrap();
        CameraRecord::from_parts(id, &intr, &pose)
    };
    CalibrationFile {
        cameras: vec![cam("cam0", -0.75), cam("cam1", 0.75)],
        gravity_world: [0.0, 0.0, -1.0],
    }
}

/// Joint positions of an upright figure in its body frame: x forward,
/// y to the person's left, z up from the floor. `scale` multiplies the
/// whole template; `leg_extra` adds length split between thigh and shin.
pub fn body_template(scale: f64, leg_extra: f64) -> [Vector3<f64>; JOINT_COUNT] {
    let s = scale;
    let half_leg = leg_extra / 2.0;
    let ankle_z = 0.08 * s;
    let knee_z = ankle_z + 0.42 * s + half_leg;
    let hip_z = knee_z + 0.45 * s + half_leg;
    let neck_z = hip_z + 0.50 * s;
    let shoulder_z = neck_z - 0.05 * s;
    let elbow_z = shoulder_z - 0.28 * s;
    let wrist_z = elbow_z - 0.27 * s;
    let mut joints = [Vector3::zeros(); JOINT_COUNT];
    joints[0] = Vector3::new(0.10 * s, 0.0, neck_z + 0.15 * s); // nose
    joints[1] = Vector3::new(0.0, 0.0, neck_z); // neck
    joints[2] = Vector3::new(0.0, -0.19 * s, shoulder_z); // r_shoulder
    joints[3] = Vector3::new(0.0, -0.21 * s, elbow_z); // r_elbow
    joints[4] = Vector3::new(0.0, -0.21 * s, wrist_z); // r_wrist
    joints[5] = Vector3::new(0.0, 0.19 * s, shoulder_z); // l_shoulder
    joints[6] = Vector3::new(0.0, 0.21 * s, elbow_z); // l_elbow
    joints[7] = Vector3::new(0.0, 0.21 * s, wrist_z); // l_wrist
    joints[8] = Vector3::new(0.0, -0.11 * s, hip_z); // r_hip
    joints[9] = Vector3::new(0.0, -0.12 * s, knee_z); // r_knee
    joints[10] = Vector3::new(0.0, -0.12 * s, ankle_z); // r_ankle
    joints[11] = Vector3::new(0.0, 0.11 * s, hip_z); // l_hip
    joints[12] = Vector3::new(0.0, 0.12 * s, knee_z); // l_knee
    joints[13] = Vector3::new(0.0, 0.12 * s, ankle_z); // l_ankle
    joints[14] = Vector3::new(0.07 * s, -0.035 * s, neck_z + 0.20 * s); // r_eye
    joints[15] = Vector3::new(0.07 * s, 0.035 * s, neck_z + 0.20 * s); // l_eye
    joints[16] = Vector3::new(0.0, -0.08 * s, neck_z + 0.18 * s); // r_ear
    joints[17] = Vector3::new(0.0, 0.08 * s, neck_z + 0.18 * s); // l_ear
    joints
}

/// Floor position and heading (radians CCW from +x) at a frame.
fn path_state(path: &PathConfig, frame: u64, total_frames: u64) -> (f64, f64, f64) {
    match path {
        PathConfig::Static {
            position,
            heading_deg,
        } => (position[0], position[1], heading_deg.to_radians()),
        PathConfig::Circle {
            center,
            radius,
            start_deg,
            deg_per_frame,
        } => {
            let a = (start_deg + deg_per_frame * frame as f64).to_radians();
            let x = center[0] + radius * a.cos();
            let y = center[1] + radius * a.sin();
            // facing the direction of travel: the tangent
            let heading = a + std::f64::consts::FRAC_PI_2 * deg_per_frame.signum();
            (x, y, heading)
        }
        PathConfig::Line { from, to } => {
            let t = if total_frames <= 1 {
                0.0
            } else {
                frame as f64 / (total_frames - 1) as f64
            };
            let x = from[0] + t * (to[0] - from[0]);
            let y = from[1] + t * (to[1] - from[1]);
            let heading = (to[1] - from[1]).atan2(to[0] - from[0]);
            (x, y, heading)
        }
    }
}

/// World-frame joints of a person at a frame: template, arm swing,
/// heading rotation, then floor translation. The articulation is rigid
/// per arm, so limb lengths never change across frames.
pub fn pose_person(person: &PersonConfig, frame: u64, total_frames: u64) -> [Vector3<f64>; JOINT_COUNT] {
    let mut joints = body_template(person.scale, person.leg_extra_m);

    let amplitude = person.arm_swing_deg.to_radians();
    if amplitude > 0.0 {
        let phase = (frame as f64 / ARM_SWING_PERIOD) * std::f64::consts::TAU;
        let swing = amplitude * phase.sin();
        // arms pivot rigidly about their shoulders, about the lateral (y) axis
        for (shoulder, arm, angle) in [(2usize, [3usize, 4], swing), (5, [6, 7], -swing)] {
            let pivot = joints[shoulder];
            let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), angle);
            for j in arm {
                joints[j] = pivot + rot * (joints[j] - pivot);
            }
        }
    }

    let (x, y, heading) = path_state(&person.path, frame, total_frames);
    let spin = Rotation3::from_axis_angle(&Vector3::z_axis(), heading);
    let offset = Vector3::new(x, y, 0.0);
    for j in joints.iter_mut() {
        *j = spin * *j + offset;
    }
    joints
}

/// Everything one generated scene produces.
pub struct SynthOutput {
    pub calibration: CalibrationFile,
    /// one keypoint file per camera, in calibration order
    pub keypoints: Vec<KeypointFile>,
    /// exact world-frame joints per frame and person, residuals all zero
    pub ground_truth: SkeletonFile,
}

pub struct SyntheticScene {
    config: SceneConfig,
    calibration: CalibrationFile,
}

impl SyntheticScene {
    pub fn new(config: SceneConfig) -> Result<Self> {
        config.validate()?;
        let calibration = config.calibration.clone().unwrap_or_else(default_rig);
        calibration.validate()?;
        Ok(SyntheticScene {
            config,
            calibration,
        })
    }

    pub fn calibration(&self) -> &CalibrationFile {
        &self.calibration
    }

    pub fn config(&self) -> &SceneConfig {
        &self.config
    }

    /// Renders the whole sequence. Identical config and seed give
    /// identical output, byte for byte.
    pub fn generate(&self, seed: u64) -> Result<SynthOutput> {
        struct Cam {
            id: String,
            intrinsics: CameraIntrinsics,
            world_to_cam: RigidPose,
        }
        let cams: Vec<Cam> = self
            .calibration
            .cameras
            .iter()
            .map(|rec| {
                Ok(Cam {
                    id: rec.id.clone(),
                    intrinsics: rec.intrinsics()?,
                    world_to_cam: rec.pose()?.inverse(),
                })
            })
            .collect::<Result<_>>()?;

        let sigma = self.config.noise_sigma_px;
        let noise = Normal::new(0.0, sigma)
            .map_err(|e| Error::InvalidParameter(format!("noise sigma: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut per_camera: Vec<Vec<KeypointRecord>> = vec![Vec::new(); cams.len()];
        let mut ground_truth: Vec<Skeleton3D> = Vec::new();

        for frame in 0..self.config.frames {
            for person in &self.config.persons {
                let world_joints = pose_person(person, frame, self.config.frames);

                let mut gt = Skeleton3D::empty(person.person_id, frame);
                for (i, p) in world_joints.iter().enumerate() {
                    gt.joints[i] = Some(Joint3D {
                        position: *p,
                        residual: 0.0,
                    });
                }
                ground_truth.push(gt);

                for (cam_index, cam) in cams.iter().enumerate() {
                    let (w, h) = cam.intrinsics.resolution();
                    let mut joints: Vec<Option<[f64; 3]>> = vec![None; JOINT_COUNT];
                    for (i, world_point) in world_joints.iter().enumerate() {
                        // one occlusion draw per joint, visible or not, so
                        // the stream layout is easy to reason about
                        let occlusion_draw: f64 = rng.gen();
                        let occluded = person.occlusion.iter().any(|occ| {
                            occ.joint == i
                                && occ.camera.as_deref().map_or(true, |c| c == cam.id)
                                && occlusion_draw < occ.probability
                        });
                        if occluded {
                            continue;
                        }
                        let in_cam = cam.world_to_cam.transform_point(world_point);
                        let Ok(pixel) = cam.intrinsics.project(&in_cam) else {
                            continue;
                        };
                        if pixel.x < 0.0
                            || pixel.y < 0.0
                            || pixel.x >= w as f64
                            || pixel.y >= h as f64
                        {
                            continue;
                        }
                        let dx = noise.sample(&mut rng);
                        let dy = noise.sample(&mut rng);
                        let confidence =
                            rng.gen_range(CONFIDENCE_RANGE.0..CONFIDENCE_RANGE.1);
                        let x = (pixel.x + dx).clamp(0.0, w as f64 - 1e-6);
                        let y = (pixel.y + dy).clamp(0.0, h as f64 - 1e-6);
                        joints[i] = Some([x, y, confidence]);
                    }
                    per_camera[cam_index].push(KeypointRecord {
                        frame_index: frame,
                        camera_id: cam.id.clone(),
                        person_id: person.person_id,
                        joints,
                    });
                }
            }
        }

        Ok(SynthOutput {
            calibration: self.calibration.clone(),
            keypoints: per_camera
                .into_iter()
                .map(|records| KeypointFile { records })
                .collect(),
            ground_truth: SkeletonFile::from_skeletons(ground_truth.iter()),
        })
    }
}
