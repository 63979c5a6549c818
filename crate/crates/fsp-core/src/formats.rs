//! JSON file formats: calibration, 2D keypoints, reconstructed skeletons,
//! statistics, and synthetic scene configs.
//!
//! Every reader rejects unknown fields and validates invariants beyond the
//! schema (unique ids, rigid poses, joint counts, coordinate ranges).

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::camera::{CameraIntrinsics, RigidPose};
use crate::error::{Error, Result};
use crate::lens::{LensKind, LensModel};
use crate::skeleton::{Joint2D, Joint3D, Skeleton2D, Skeleton3D, JOINT_COUNT, LIMB_COUNT};

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// calibration

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LensRecord {
    pub kind: LensKind,
    pub focal_length: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraRecord {
    pub id: String,
    pub lens: LensRecord,
    pub principal_point: [f64; 2],
    pub resolution: [u32; 2],
    /// 4×4 homogeneous camera-to-world transform, row-major.
    pub world_pose: [[f64; 4]; 4],
}

impl CameraRecord {
    pub fn intrinsics(&self) -> Result<CameraIntrinsics> {
        let lens = LensModel::new(self.lens.kind, self.lens.focal_length)?;
        CameraIntrinsics::new(
            lens,
            (self.principal_point[0], self.principal_point[1]),
            (self.resolution[0], self.resolution[1]),
        )
    }

    pub fn pose(&self) -> Result<RigidPose> {
        let mut m = Matrix4::zeros();
        for (r, row) in self.world_pose.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        RigidPose::from_homogeneous(&m)
    }

    pub fn from_parts(id: &str, intrinsics: &CameraIntrinsics, pose: &RigidPose) -> CameraRecord {
        let h = pose.to_homogeneous();
        let mut world_pose = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                world_pose[r][c] = h[(r, c)];
            }
        }
        CameraRecord {
            id: id.to_string(),
            lens: LensRecord {
                kind: intrinsics.lens().kind(),
                focal_length: intrinsics.lens().focal_length(),
            },
            principal_point: [intrinsics.principal_point().0, intrinsics.principal_point().1],
            resolution: [intrinsics.resolution().0, intrinsics.resolution().1],
            world_pose,
        }
    }
}

fn default_gravity() -> [f64; 3] {
    [0.0, 0.0, -1.0]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationFile {
    pub cameras: Vec<CameraRecord>,
    /// "down" in world coordinates; defaults to −z.
    #[serde(default = "default_gravity")]
    pub gravity_world: [f64; 3],
}

impl CalibrationFile {
    pub fn load(path: &Path) -> Result<Self> {
        let calib: CalibrationFile = read_json(path)?;
        calib.validate()?;
        Ok(calib)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        write_json(path, self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cameras.is_empty() {
            return Err(Error::InvalidParameter(
                "calibration lists no cameras".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for cam in &self.cameras {
            if !seen.insert(cam.id.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate camera id {:?}",
                    cam.id
                )));
            }
            cam.intrinsics()?;
            cam.pose()?;
        }
        let g = Vector3::from(self.gravity_world);
        if !g.iter().all(|v| v.is_finite()) || g.norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "gravity_world must be a finite non-zero vector".into(),
            ));
        }
        Ok(())
    }

    pub fn camera(&self, id: &str) -> Result<&CameraRecord> {
        self.cameras.iter().find(|c| c.id == id).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "camera {:?} not in calibration (have: {})",
                id,
                self.cameras
                    .iter()
                    .map(|c| c.id.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })
    }

    /// The world "down" direction expressed in a camera's frame.
    pub fn gravity_in_camera(&self, camera: &CameraRecord) -> Result<Vector3<f64>> {
        let pose = camera.pose()?;
        Ok(pose.rotation().transpose() * Vector3::from(self.gravity_world))
    }
}

// ---------------------------------------------------------------------------
// 2D keypoints

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeypointRecord {
    pub frame_index: u64,
    pub camera_id: String,
    pub person_id: u32,
    /// 18 entries of [x, y, confidence]; null marks an undetected joint.
    pub joints: Vec<Option<[f64; 3]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeypointFile {
    pub records: Vec<KeypointRecord>,
}

impl KeypointFile {
    pub fn load(path: &Path) -> Result<Self> {
        let file: KeypointFile = read_json(path)?;
        file.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        write_json(path, self)
    }

    pub fn validate(&self) -> Result<()> {
        for rec in &self.records {
            if rec.joints.len() != JOINT_COUNT {
                return Err(Error::InvalidParameter(format!(
                    "record (frame {}, person {}) has {} joints, expected {JOINT_COUNT}",
                    rec.frame_index,
                    rec.person_id,
                    rec.joints.len()
                )));
            }
            for joint in rec.joints.iter().flatten() {
                let [x, y, conf] = joint;
                if !x.is_finite() || !y.is_finite() || !conf.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite joint in frame {}, person {}",
                        rec.frame_index, rec.person_id
                    )));
                }
                if !(0.0..=1.0).contains(conf) {
                    return Err(Error::InvalidParameter(format!(
                        "confidence {conf} outside [0, 1] in frame {}, person {}",
                        rec.frame_index, rec.person_id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that all records name the same camera and returns its id.
    pub fn sole_camera_id(&self) -> Result<&str> {
        let mut ids = self.records.iter().map(|r| r.camera_id.as_str());
        let Some(first) = ids.next() else {
            return Err(Error::InvalidParameter(
                "keypoint file contains no records".into(),
            ));
        };
        if let Some(other) = ids.find(|id| *id != first) {
            return Err(Error::InvalidParameter(format!(
                "keypoint file mixes cameras {first:?} and {other:?}"
            )));
        }
        Ok(first)
    }

    /// Checks every detection lies inside the camera's image.
    pub fn validate_against(&self, intrinsics: &CameraIntrinsics) -> Result<()> {
        let (w, h) = intrinsics.resolution();
        for rec in &self.records {
            for joint in rec.joints.iter().flatten() {
                let [x, y, _] = joint;
                if *x < 0.0 || *y < 0.0 || *x >= w as f64 || *y >= h as f64 {
                    return Err(Error::InvalidParameter(format!(
                        "joint ({x}, {y}) outside {w}x{h} image in frame {}, person {}",
                        rec.frame_index, rec.person_id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Groups records into per-(frame, person) skeletons.
    pub fn skeletons(&self) -> BTreeMap<(u64, u32), Skeleton2D> {
        let mut map = BTreeMap::new();
        for rec in &self.records {
            let skel = map
                .entry((rec.frame_index, rec.person_id))
                .or_insert_with(|| Skeleton2D::empty(rec.person_id, rec.frame_index));
            for (i, joint) in rec.joints.iter().enumerate().take(JOINT_COUNT) {
                if let Some([x, y, conf]) = joint {
                    skel.joints[i] = Some(Joint2D {
                        x: *x,
                        y: *y,
                        confidence: *conf,
                    });
                }
            }
        }
        map
    }

    pub fn from_skeletons<'a, I>(camera_id: &str, skeletons: I) -> KeypointFile
    where
        I: IntoIterator<Item = &'a Skeleton2D>,
    {
        let records = skeletons
            .into_iter()
            .map(|s| KeypointRecord {
                frame_index: s.frame_index,
                camera_id: camera_id.to_string(),
                person_id: s.person_id,
                joints: s
                    .joints
                    .iter()
                    .map(|j| j.map(|j| [j.x, j.y, j.confidence]))
                    .collect(),
            })
            .collect();
        KeypointFile { records }
    }
}

// ---------------------------------------------------------------------------
// reconstructed skeletons

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonRecord {
    pub frame_index: u64,
    pub person_id: u32,
    /// 18 entries of [x, y, z, residual]; null marks an unreconstructed joint.
    pub joints: Vec<Option<[f64; 4]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonFile {
    pub records: Vec<SkeletonRecord>,
}

impl SkeletonFile {
    pub fn load(path: &Path) -> Result<Self> {
        let file: SkeletonFile = read_json(path)?;
        file.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        write_json(path, self)
    }

    pub fn validate(&self) -> Result<()> {
        for rec in &self.records {
            if rec.joints.len() != JOINT_COUNT {
                return Err(Error::InvalidParameter(format!(
                    "record (frame {}, person {}) has {} joints, expected {JOINT_COUNT}",
                    rec.frame_index,
                    rec.person_id,
                    rec.joints.len()
                )));
            }
            for joint in rec.joints.iter().flatten() {
                if !joint.iter().all(|v| v.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite joint in frame {}, person {}",
                        rec.frame_index, rec.person_id
                    )));
                }
                if joint[3] < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "negative residual in frame {}, person {}",
                        rec.frame_index, rec.person_id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_skeletons<'a, I>(skeletons: I) -> SkeletonFile
    where
        I: IntoIterator<Item = &'a Skeleton3D>,
    {
        let records = skeletons
            .into_iter()
            .map(|s| SkeletonRecord {
                frame_index: s.frame_index,
                person_id: s.person_id,
                joints: s
                    .joints
                    .iter()
                    .map(|j| j.map(|j| [j.position.x, j.position.y, j.position.z, j.residual]))
                    .collect(),
            })
            .collect();
        SkeletonFile { records }
    }

    pub fn to_skeletons(&self) -> Vec<Skeleton3D> {
        self.records
            .iter()
            .map(|rec| {
                let mut s = Skeleton3D::empty(rec.person_id, rec.frame_index);
                for (i, joint) in rec.joints.iter().enumerate().take(JOINT_COUNT) {
                    if let Some([x, y, z, residual]) = joint {
                        s.joints[i] = Some(Joint3D {
                            position: Vector3::new(*x, *y, *z),
                            residual: *residual,
                        });
                    }
                }
                s
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// statistics

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimbStatsRecord {
    pub limb: usize,
    pub name: String,
    pub count: usize,
    /// fraction of the person's frames in which the limb was measured
    pub frequency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stddev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonStats {
    pub person_id: u32,
    /// number of skeleton records seen for this person
    pub frames: usize,
    pub limbs: Vec<LimbStatsRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsFile {
    pub persons: Vec<PersonStats>,
}

impl StatsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let file: StatsFile = read_json(path)?;
        file.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        write_json(path, self)
    }

    pub fn validate(&self) -> Result<()> {
        for person in &self.persons {
            if person.limbs.len() != LIMB_COUNT {
                return Err(Error::InvalidParameter(format!(
                    "person {} lists {} limbs, expected {LIMB_COUNT}",
                    person.person_id,
                    person.limbs.len()
                )));
            }
            for limb in &person.limbs {
                if limb.limb >= LIMB_COUNT {
                    return Err(Error::InvalidParameter(format!(
                        "limb index {} out of range",
                        limb.limb
                    )));
                }
                if !(0.0..=1.0).contains(&limb.frequency) {
                    return Err(Error::InvalidParameter(format!(
                        "limb frequency {} outside [0, 1]",
                        limb.frequency
                    )));
                }
                if (limb.count == 0) != limb.mean.is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "limb {} summary fields inconsistent with count {}",
                        limb.limb, limb.count
                    )));
                }
            }
        }
        Ok(())
    }

    /// Renders per-person accumulators into the serializable form.
    pub fn from_accumulators(
        accumulators: &BTreeMap<u32, crate::skeleton::StatsAccumulator>,
    ) -> StatsFile {
        let persons = accumulators
            .iter()
            .map(|(person_id, acc)| PersonStats {
                person_id: *person_id,
                frames: acc.frames(),
                limbs: (0..LIMB_COUNT)
                    .map(|limb| {
                        let stats = acc.limb_stats(limb);
                        LimbStatsRecord {
                            limb,
                            name: crate::skeleton::limb_name(limb),
                            count: acc.limb_count(limb),
                            frequency: acc.frequency(limb),
                            mean: stats.map(|s| s.mean),
                            stddev: stats.map(|s| s.stddev),
                            min: stats.map(|s| s.min),
                            q1: stats.map(|s| s.q1),
                            median: stats.map(|s| s.median),
                            q3: stats.map(|s| s.q3),
                            max: stats.map(|s| s.max),
                        }
                    })
                    .collect(),
            })
            .collect();
        StatsFile { persons }
    }
}

// ---------------------------------------------------------------------------
// synthetic scene configuration

fn default_scale() -> f64 {
    1.0
}

fn default_arm_swing_deg() -> f64 {
    20.0
}

/// Trajectory of a synthetic person, discriminated by a `kind` field in
/// JSON (`static`, `circle` or `line`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathRecord", into = "PathRecord")]
pub enum PathConfig {
    /// Stands still at a floor position, facing `heading_deg`.
    Static { position: [f64; 2], heading_deg: f64 },
    /// Walks a circle of `radius` around `center`, advancing
    /// `deg_per_frame` each frame and facing along the tangent.
    Circle {
        center: [f64; 2],
        radius: f64,
        start_deg: f64,
        deg_per_frame: f64,
    },
    /// Walks a straight segment, start to end over the whole sequence.
    Line { from: [f64; 2], to: [f64; 2] },
}

/// Flat on-disk form of [`PathConfig`]; field applicability depends on
/// `kind`, checked in the conversion.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathRecord {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    heading_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    deg_per_frame: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<[f64; 2]>,
}

impl PathRecord {
    fn empty(kind: &str) -> PathRecord {
        PathRecord {
            kind: kind.to_string(),
            position: None,
            heading_deg: None,
            center: None,
            radius: None,
            start_deg: None,
            deg_per_frame: None,
            from: None,
            to: None,
        }
    }
}

impl TryFrom<PathRecord> for PathConfig {
    type Error = String;

    fn try_from(rec: PathRecord) -> std::result::Result<PathConfig, String> {
        fn require<T>(v: Option<T>, kind: &str, field: &str) -> std::result::Result<T, String> {
            v.ok_or_else(|| format!("path kind {kind:?} requires field {field:?}"))
        }
        fn forbid<T>(v: &Option<T>, kind: &str, field: &str) -> std::result::Result<(), String> {
            if v.is_some() {
                Err(format!("path kind {kind:?} does not take field {field:?}"))
            } else {
                Ok(())
            }
        }
        match rec.kind.as_str() {
            "static" => {
                forbid(&rec.center, "static", "center")?;
                forbid(&rec.radius, "static", "radius")?;
                forbid(&rec.start_deg, "static", "start_deg")?;
                forbid(&rec.deg_per_frame, "static", "deg_per_frame")?;
                forbid(&rec.from, "static", "from")?;
                forbid(&rec.to, "static", "to")?;
                Ok(PathConfig::Static {
                    position: require(rec.position, "static", "position")?,
                    heading_deg: rec.heading_deg.unwrap_or(0.0),
                })
            }
            "circle" => {
                forbid(&rec.position, "circle", "position")?;
                forbid(&rec.heading_deg, "circle", "heading_deg")?;
                forbid(&rec.from, "circle", "from")?;
                forbid(&rec.to, "circle", "to")?;
                Ok(PathConfig::Circle {
                    center: require(rec.center, "circle", "center")?,
                    radius: require(rec.radius, "circle", "radius")?,
                    start_deg: rec.start_deg.unwrap_or(0.0),
                    deg_per_frame: require(rec.deg_per_frame, "circle", "deg_per_frame")?,
                })
            }
            "line" => {
                forbid(&rec.position, "line", "position")?;
                forbid(&rec.heading_deg, "line", "heading_deg")?;
                forbid(&rec.center, "line", "center")?;
                forbid(&rec.radius, "line", "radius")?;
                forbid(&rec.start_deg, "line", "start_deg")?;
                forbid(&rec.deg_per_frame, "line", "deg_per_frame")?;
                Ok(PathConfig::Line {
                    from: require(rec.from, "line", "from")?,
                    to: require(rec.to, "line", "to")?,
                })
            }
            other => Err(format!(
                "unknown path kind {other:?} (expected static, circle or line)"
            )),
        }
    }
}

impl From<PathConfig> for PathRecord {
    fn from(path: PathConfig) -> PathRecord {
        match path {
            PathConfig::Static {
                position,
                heading_deg,
            } => PathRecord {
                position: Some(position),
                heading_deg: Some(heading_deg),
                ..PathRecord::empty("static")
            },
            PathConfig::Circle {
                center,
                radius,
                start_deg,
                deg_per_frame,
            } => PathRecord {
                center: Some(center),
                radius: Some(radius),
                start_deg: Some(start_deg),
                deg_per_frame: Some(deg_per_frame),
                ..PathRecord::empty("circle")
            },
            PathConfig::Line { from, to } => PathRecord {
                from: Some(from),
                to: Some(to),
                ..PathRecord::empty("line")
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcclusionConfig {
    pub joint: usize,
    /// per-frame probability that the joint goes undetected
    pub probability: f64,
    /// restrict to one camera id; None hits every camera
    #[serde(default)]
    pub camera: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonConfig {
    pub person_id: u32,
    /// overall body scale relative to a 1.7 m template
    #[serde(default = "default_scale")]
    pub scale: f64,
    /// extra leg length in meters, split evenly between thigh and shin
    #[serde(default)]
    pub leg_extra_m: f64,
    pub path: PathConfig,
    /// peak arm-swing amplitude in degrees
    #[serde(default = "default_arm_swing_deg")]
    pub arm_swing_deg: f64,
    #[serde(default)]
    pub occlusion: Vec<OcclusionConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    /// cameras to render with; omitted means the built-in two-camera rig
    #[serde(default)]
    pub calibration: Option<CalibrationFile>,
    pub frames: u64,
    /// standard deviation of Gaussian pixel noise added to detections
    #[serde(default)]
    pub noise_sigma_px: f64,
    pub persons: Vec<PersonConfig>,
}

impl SceneConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let config: SceneConfig = read_json(path)?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        write_json(path, self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::InvalidParameter(
                "scene must have at least one frame".into(),
            ));
        }
        if !self.noise_sigma_px.is_finite() || self.noise_sigma_px < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma_px
            )));
        }
        if self.persons.is_empty() {
            return Err(Error::InvalidParameter("scene lists no persons".into()));
        }
        let mut ids = std::collections::BTreeSet::new();
        for person in &self.persons {
            if !ids.insert(person.person_id) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate person id {}",
                    person.person_id
                )));
            }
            if !person.scale.is_finite() || person.scale <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "person {} scale must be positive",
                    person.person_id
                )));
            }
            if !person.leg_extra_m.is_finite() || person.leg_extra_m < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "person {} leg_extra_m must be non-negative",
                    person.person_id
                )));
            }
            if !person.arm_swing_deg.is_finite() || person.arm_swing_deg < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "person {} arm_swing_deg must be non-negative",
                    person.person_id
                )));
            }
            for occ in &person.occlusion {
                if occ.joint >= JOINT_COUNT {
                    return Err(Error::InvalidParameter(format!(
                        "occlusion joint {} out of range",
                        occ.joint
                    )));
                }
                if !(0.0..=1.0).contains(&occ.probability) {
                    return Err(Error::InvalidParameter(format!(
                        "occlusion probability {} outside [0, 1]",
                        occ.probability
                    )));
                }
            }
            if let PathConfig::Circle { radius, .. } = &person.path {
                if !radius.is_finite() || *radius < 0.0 {
                    return Err(Error::InvalidParameter(
                        "circle radius must be non-negative".into(),
                    ));
                }
            }
        }
        if let Some(calib) = &self.calibration {
            calib.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn rig_json() -> String {
        r#"{
            "cameras": [
                {
                    "id": "cam0",
                    "lens": { "kind": "equidistant", "focal_length": 618.75 },
                    "principal_point": [1296.0, 972.0],
                    "resolution": [2592, 1944],
                    "world_pose": [
                        [1.0, 0.0, 0.0, -0.75],
                        [0.0, -1.0, 0.0, 0.0],
                        [0.0, 0.0, -1.0, 3.0],
                        [0.0, 0.0, 0.0, 1.0]
                    ]
                }
            ],
            "gravity_world": [0.0, 0.0, -1.0]
        }"#
        .to_string()
    }

    #[test]
    fn calibration_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("calib.json");
        std::fs::write(&path, rig_json()).unwrap();
        let calib = CalibrationFile::load(&path).unwrap();
        assert_eq!(calib.cameras.len(), 1);
        let cam = calib.camera("cam0").unwrap();
        let intr = cam.intrinsics().unwrap();
        assert_eq!(intr.resolution(), (2592, 1944));
        assert_eq!(intr.lens().kind(), LensKind::Equidistant);
        let pose = cam.pose().unwrap();
        assert_eq!(pose.translation(), &Vector3::new(-0.75, 0.0, 3.0));

        let out = dir.path().join("copy.json");
        calib.save(&out).unwrap();
        let again = CalibrationFile::load(&out).unwrap();
        assert_eq!(again.cameras[0].id, "cam0");
        assert_eq!(again.cameras[0].world_pose, calib.cameras[0].world_pose);
    }

    #[test]
    fn calibration_rejects_unknown_fields_and_bad_poses() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("calib.json");
        std::fs::write(&path, rig_json().replace("\"gravity_world\"", "\"gravityworld\""))
            .unwrap();
        assert!(matches!(
            CalibrationFile::load(&path),
            Err(Error::Parse(_))
        ));

        // scaled rotation block: not rigid
        std::fs::write(&path, rig_json().replace("[1.0, 0.0, 0.0, -0.75]", "[2.0, 0.0, 0.0, -0.75]"))
            .unwrap();
        assert!(matches!(
            CalibrationFile::load(&path),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn camera_lookup_reports_known_ids() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("calib.json");
        std::fs::write(&path, rig_json()).unwrap();
        let calib = CalibrationFile::load(&path).unwrap();
        let err = calib.camera("cam9").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cam9") && msg.contains("cam0"), "{msg}");
    }

    #[test]
    fn gravity_rotates_into_the_camera_frame() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("calib.json");
        std::fs::write(&path, rig_json()).unwrap();
        let calib = CalibrationFile::load(&path).unwrap();
        let cam = calib.camera("cam0").unwrap();
        // ceiling camera looks straight down: world "down" is its +z
        let g = calib.gravity_in_camera(cam).unwrap();
        assert!((g - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn duplicate_camera_ids_are_rejected() {
        let calib = CalibrationFile {
            cameras: vec![
                serde_json::from_str::<CalibrationFile>(&rig_json())
                    .unwrap()
                    .cameras[0]
                    .clone(),
                serde_json::from_str::<CalibrationFile>(&rig_json())
                    .unwrap()
                    .cameras[0]
                    .clone(),
            ],
            gravity_world: [0.0, 0.0, -1.0],
        };
        assert!(calib.validate().is_err());
    }

    fn keypoint_record(frame: u64, person: u32) -> KeypointRecord {
        let mut joints: Vec<Option<[f64; 3]>> = vec![None; JOINT_COUNT];
        joints[0] = Some([100.0, 200.0, 0.9]);
        joints[1] = Some([110.0, 260.0, 0.8]);
        KeypointRecord {
            frame_index: frame,
            camera_id: "cam0".into(),
            person_id: person,
            joints,
        }
    }

    #[test]
    fn keypoints_round_trip_and_group_into_skeletons() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("kp.json");
        let file = KeypointFile {
            records: vec![keypoint_record(0, 1), keypoint_record(1, 1), keypoint_record(0, 2)],
        };
        file.save(&path).unwrap();
        let back = KeypointFile::load(&path).unwrap();
        assert_eq!(back.records.len(), 3);
        assert_eq!(back.sole_camera_id().unwrap(), "cam0");
        let skels = back.skeletons();
        assert_eq!(skels.len(), 3);
        let s = &skels[&(0, 1)];
        assert_eq!(s.joint_count(), 2);
        assert_eq!(s.joints[0].unwrap().x, 100.0);
        assert_eq!(s.joints[1].unwrap().confidence, 0.8);
    }

    #[test]
    fn keypoints_validate_joint_count_and_ranges() {
        let mut bad = keypoint_record(0, 1);
        bad.joints.pop();
        assert!(KeypointFile {
            records: vec![bad]
        }
        .validate()
        .is_err());

        let mut bad = keypoint_record(0, 1);
        bad.joints[0] = Some([1.0, 1.0, 1.5]);
        assert!(KeypointFile {
            records: vec![bad]
        }
        .validate()
        .is_err());

        let mut bad = keypoint_record(0, 1);
        bad.joints[0] = Some([f64::NAN, 1.0, 0.5]);
        assert!(KeypointFile {
            records: vec![bad]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn keypoints_check_image_bounds_against_intrinsics() {
        let lens = LensModel::new(LensKind::Equidistant, 100.0).unwrap();
        let intr = CameraIntrinsics::new(lens, (160.0, 120.0), (320, 240)).unwrap();
        let mut rec = keypoint_record(0, 1);
        rec.joints[1] = Some([110.0, 239.5, 0.8]);
        rec.joints[0] = Some([319.5, 10.0, 0.9]);
        let file = KeypointFile { records: vec![rec.clone()] };
        assert!(file.validate_against(&intr).is_ok());
        rec.joints[0] = Some([320.0, 10.0, 0.9]);
        let file = KeypointFile { records: vec![rec] };
        assert!(file.validate_against(&intr).is_err());
    }

    #[test]
    fn mixed_camera_files_are_detected() {
        let mut other = keypoint_record(0, 1);
        other.camera_id = "cam1".into();
        let file = KeypointFile {
            records: vec![keypoint_record(0, 1), other],
        };
        assert!(file.sole_camera_id().is_err());
    }

    #[test]
    fn skeleton_file_round_trips_through_domain_types() {
        let mut s = Skeleton3D::empty(4, 9);
        s.joints[1] = Some(Joint3D {
            position: Vector3::new(0.5, -0.25, 1.5),
            residual: 0.75,
        });
        let file = SkeletonFile::from_skeletons([&s]);
        let dir = tempdir().unwrap();
        let path = dir.path().join("skel.json");
        file.save(&path).unwrap();
        let back = SkeletonFile::load(&path).unwrap().to_skeletons();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].person_id, 4);
        assert_eq!(back[0].frame_index, 9);
        assert_eq!(back[0].joints[1].unwrap(), s.joints[1].unwrap());
        assert_eq!(back[0].joint_count(), 1);
    }

    #[test]
    fn skeleton_file_rejects_negative_residuals() {
        let file = SkeletonFile {
            records: vec![SkeletonRecord {
                frame_index: 0,
                person_id: 1,
                joints: {
                    let mut j: Vec<Option<[f64; 4]>> = vec![None; JOINT_COUNT];
                    j[0] = Some([0.0, 0.0, 1.0, -0.5]);
                    j
                },
            }],
        };
        assert!(file.validate().is_err());
    }

    #[test]
    fn stats_file_counts_must_match_summaries() {
        let mut acc_map = BTreeMap::new();
        let mut acc = crate::skeleton::StatsAccumulator::new();
        let mut s = Skeleton3D::empty(1, 0);
        s.joints[1] = Some(Joint3D {
            position: Vector3::zeros(),
            residual: 0.0,
        });
        s.joints[2] = Some(Joint3D {
            position: Vector3::new(0.4, 0.0, 0.0),
            residual: 0.0,
        });
        acc.add(&s);
        acc_map.insert(1u32, acc);
        let file = StatsFile::from_accumulators(&acc_map);
        assert!(file.validate().is_ok());
        assert_eq!(file.persons.len(), 1);
        assert_eq!(file.persons[0].limbs.len(), LIMB_COUNT);
        let limb0 = &file.persons[0].limbs[0];
        assert_eq!(limb0.count, 1);
        assert_eq!(limb0.mean, Some(0.4));
        let limb1 = &file.persons[0].limbs[1];
        assert_eq!(limb1.count, 0);
        assert_eq!(limb1.mean, None);

        let mut broken = file.clone();
        broken.persons[0].limbs[0].mean = None;
        assert!(broken.validate().is_err());
    }

    #[test]
    fn stats_file_round_trips_with_absent_summaries() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("stats.json");
        let mut acc_map = BTreeMap::new();
        acc_map.insert(2u32, crate::skeleton::StatsAccumulator::new());
        let file = StatsFile::from_accumulators(&acc_map);
        file.save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        // empty limbs serialize without summary keys
        assert!(!text.contains("\"mean\""));
        let back = StatsFile::load(&path).unwrap();
        assert_eq!(back.persons[0].person_id, 2);
        assert_eq!(back.persons[0].limbs[0].mean, None);
    }

    fn scene_json() -> String {
        r#"{
            "frames": 10,
            "noise_sigma_px": 1.0,
            "persons": [
                {
                    "person_id": 1,
                    "scale": 0.95,
                    "path": { "kind": "circle", "center": [0.0, 0.0], "radius": 1.5, "deg_per_frame": 3.0 },
                    "occlusion": [ { "joint": 4, "probability": 0.2 } ]
                },
                {
                    "person_id": 2,
                    "leg_extra_m": 0.12,
                    "path": { "kind": "static", "position": [1.0, -1.0], "heading_deg": 90.0 }
                }
            ]
        }"#
        .to_string()
    }

    #[test]
    fn scene_config_parses_with_defaults() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("scene.json");
        std::fs::write(&path, scene_json()).unwrap();
        let config = SceneConfig::load(&path).unwrap();
        assert!(config.calibration.is_none());
        assert_eq!(config.frames, 10);
        assert_eq!(config.persons[0].scale, 0.95);
        assert_eq!(config.persons[0].leg_extra_m, 0.0);
        assert_eq!(config.persons[0].arm_swing_deg, 20.0);
        assert_eq!(config.persons[1].scale, 1.0);
        match &config.persons[1].path {
            PathConfig::Static { position, heading_deg } => {
                assert_eq!(*position, [1.0, -1.0]);
                assert_eq!(*heading_deg, 90.0);
            }
            other => panic!("wrong path {other:?}"),
        }
    }

    #[test]
    fn scene_config_validates_ranges() {
        let base = scene_json();
        for (from, to) in [
            ("\"frames\": 10", "\"frames\": 0"),
            ("\"noise_sigma_px\": 1.0", "\"noise_sigma_px\": -0.5"),
            ("\"probability\": 0.2", "\"probability\": 1.2"),
            ("\"joint\": 4", "\"joint\": 18"),
            ("\"scale\": 0.95", "\"scale\": 0.0"),
            ("\"person_id\": 2", "\"person_id\": 1"),
        ] {
            let dir = tempdir().unwrap();
            let path = dir.path().join("scene.json");
            std::fs::write(&path, base.replace(from, to)).unwrap();
            assert!(SceneConfig::load(&path).is_err(), "{from} -> {to}");
        }
    }

    #[test]
    fn camera_record_from_parts_round_trips() {
        let lens = LensModel::new(LensKind::Equisolid, 400.0).unwrap();
        let intr = CameraIntrinsics::new(lens, (512.0, 384.0), (1024, 768)).unwrap();
        let rot = *nalgebra::Rotation3::from_euler_angles(0.1, 0.2, 0.3).matrix();
        let pose = RigidPose::new(rot, Vector3::new(1.0, 2.0, 3.0)).unwrap();
        let rec = CameraRecord::from_parts("camX", &intr, &pose);
        assert_eq!(rec.intrinsics().unwrap(), intr);
        let back = rec.pose().unwrap();
        assert!((back.rotation() - rot).abs().max() < 1e-15);
    }

    #[test]
    fn path_configs_are_strict_about_their_fields() {
        let parse = |s: &str| serde_json::from_str::<PathConfig>(s);
        assert_eq!(
            parse(r#"{ "kind": "static", "position": [1.0, 2.0] }"#).unwrap(),
            PathConfig::Static {
                position: [1.0, 2.0],
                heading_deg: 0.0
            }
        );
        assert_eq!(
            parse(r#"{ "kind": "line", "from": [0.0, 0.0], "to": [1.0, 1.0] }"#).unwrap(),
            PathConfig::Line {
                from: [0.0, 0.0],
                to: [1.0, 1.0]
            }
        );
        // missing required field
        assert!(parse(r#"{ "kind": "circle", "center": [0.0, 0.0], "radius": 1.0 }"#).is_err());
        // field from another kind
        assert!(parse(r#"{ "kind": "static", "position": [0.0, 0.0], "radius": 1.0 }"#).is_err());
        // unknown field and unknown kind
        assert!(parse(r#"{ "kind": "static", "position": [0.0, 0.0], "speed": 1.0 }"#).is_err());
        assert!(parse(r#"{ "kind": "spiral", "position": [0.0, 0.0] }"#).is_err());
    }
}
