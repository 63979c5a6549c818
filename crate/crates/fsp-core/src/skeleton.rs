//! Body skeletons: the 18-joint model, cross-view joint matching,
//! per-joint 3D reconstruction, and limb-length statistics.

use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::triangulation::{
    reprojection_error, triangulate_dlt, Correspondence, ProjectionMatrix,
};

pub const JOINT_COUNT: usize = 18;
pub const LIMB_COUNT: usize = 17;

/// Joint names, indexed as detectors emit them: nose, neck, then
/// right/left arm, right/left leg, and the face.
pub const JOINT_NAMES: [&str; JOINT_COUNT] = [
    "nose",
    "neck",
    "r_shoulder",
    "r_elbow",
    "r_wrist",
    "l_shoulder",
    "l_elbow",
    "l_wrist",
    "r_hip",
    "r_knee",
    "r_ankle",
    "l_hip",
    "l_knee",
    "l_ankle",
    "r_eye",
    "l_eye",
    "r_ear",
    "l_ear",
];

/// Limbs as joint index pairs; they form a spanning tree of the joints.
pub const LIMBS: [(usize, usize); LIMB_COUNT] = [
    (1, 2),   // neck → r_shoulder
    (2, 3),   // r_shoulder → r_elbow
    (3, 4),   // r_elbow → r_wrist
    (1, 5),   // neck → l_shoulder
    (5, 6),   // l_shoulder → l_elbow
    (6, 7),   // l_elbow → l_wrist
    (1, 8),   // neck → r_hip
    (8, 9),   // r_hip → r_knee
    (9, 10),  // r_knee → r_ankle
    (1, 11),  // neck → l_hip
    (11, 12), // l_hip → l_knee
    (12, 13), // l_knee → l_ankle
    (1, 0),   // neck → nose
    (0, 14),  // nose → r_eye
    (14, 16), // r_eye → r_ear
    (0, 15),  // nose → l_eye
    (15, 17), // l_eye → l_ear
];

pub fn joint_index(name: &str) -> Option<usize> {
    JOINT_NAMES.iter().position(|n| *n == name)
}

/// Human-readable limb label, e.g. `neck:r_shoulder`.
pub fn limb_name(limb: usize) -> String {
    let (a, b) = LIMBS[limb];
    format!("{}:{}", JOINT_NAMES[a], JOINT_NAMES[b])
}

/// One detected joint on an image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Joint2D {
    pub x: f64,
    pub y: f64,
    /// detection confidence in [0, 1]
    pub confidence: f64,
}

/// A person's detections in one camera at one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton2D {
    pub person_id: u32,
    pub frame_index: u64,
    pub joints: [Option<Joint2D>; JOINT_COUNT],
}

impl Skeleton2D {
    pub fn empty(person_id: u32, frame_index: u64) -> Self {
        Skeleton2D {
            person_id,
            frame_index,
            joints: [None; JOINT_COUNT],
        }
    }

    pub fn joint_count(&self) -> usize {
        self.joints.iter().filter(|j| j.is_some()).count()
    }

    /// Mean position of the present joints; None when there are none.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let mut n = 0usize;
        let (mut sx, mut sy) = (0.0, 0.0);
        for j in self.joints.iter().flatten() {
            sx += j.x;
            sy += j.y;
            n += 1;
        }
        if n == 0 {
            None
        } else {
            Some((sx / n as f64, sy / n as f64))
        }
    }
}

/// A reconstructed joint with its worst per-view reprojection residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Joint3D {
    pub position: Vector3<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton3D {
    pub person_id: u32,
    pub frame_index: u64,
    pub joints: [Option<Joint3D>; JOINT_COUNT],
}

impl Skeleton3D {
    pub fn empty(person_id: u32, frame_index: u64) -> Self {
        Skeleton3D {
            person_id,
            frame_index,
            joints: [None; JOINT_COUNT],
        }
    }

    pub fn joint_count(&self) -> usize {
        self.joints.iter().filter(|j| j.is_some()).count()
    }
}

/// Pairs up joints seen in both skeletons whose lower confidence still
/// reaches `min_confidence`. Both skeletons must describe the same person.
pub fn match_joints(
    a: &Skeleton2D,
    b: &Skeleton2D,
    min_confidence: f64,
) -> Result<Vec<(usize, Correspondence)>> {
    if a.person_id != b.person_id {
        return Err(Error::PersonMismatch {
            a: a.person_id,
            b: b.person_id,
        });
    }
    let mut matched = Vec::new();
    for (index, (ja, jb)) in a.joints.iter().zip(b.joints.iter()).enumerate() {
        let (Some(ja), Some(jb)) = (ja, jb) else {
            continue;
        };
        let confidence = ja.confidence.min(jb.confidence);
        if confidence < min_confidence {
            continue;
        }
        matched.push((
            index,
            Correspondence {
                point_a: crate::camera::ImagePoint::new(ja.x, ja.y),
                point_b: crate::camera::ImagePoint::new(jb.x, jb.y),
                confidence,
            },
        ));
    }
    Ok(matched)
}

/// Triangulates every matched joint, dropping those that are degenerate,
/// behind a camera, or whose worst-view reprojection residual exceeds
/// `max_residual` pixels.
pub fn reconstruct_skeleton(
    person_id: u32,
    frame_index: u64,
    correspondences: &[(usize, Correspondence)],
    view_a: &ProjectionMatrix,
    view_b: &ProjectionMatrix,
    max_residual: f64,
) -> Skeleton3D {
    let mut skeleton = Skeleton3D::empty(person_id, frame_index);
    for (joint, corr) in correspondences {
        let Ok(point) = triangulate_dlt(corr, view_a, view_b) else {
            continue;
        };
        let Ok((res_a, res_b)) = reprojection_error(&point, corr, view_a, view_b) else {
            continue;
        };
        let residual = res_a.max(res_b);
        if residual <= max_residual {
            skeleton.joints[*joint] = Some(Joint3D {
                position: point.position(),
                residual,
            });
        }
    }
    skeleton
}

/// Euclidean limb lengths; None where either endpoint is missing.
pub fn limb_lengths(skeleton: &Skeleton3D) -> [Option<f64>; LIMB_COUNT] {
    let mut lengths = [None; LIMB_COUNT];
    for (i, (a, b)) in LIMBS.iter().enumerate() {
        if let (Some(ja), Some(jb)) = (&skeleton.joints[*a], &skeleton.joints[*b]) {
            lengths[i] = Some((ja.position - jb.position).norm());
        }
    }
    lengths
}

/// Distribution summary of one limb's observed lengths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimbStats {
    pub count: usize,
    pub mean: f64,
    /// sample standard deviation (n−1); 0 when count < 2
    pub stddev: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Accumulates limb lengths for one person across frames. Accumulators
/// merge associatively, and results do not depend on insertion order.
#[derive(Clone, Debug, Default)]
pub struct StatsAccumulator {
    frames: usize,
    lengths: [Vec<f64>; LIMB_COUNT],
}

impl StatsAccumulator {
    pub fn new() -> Self {
        StatsAccumulator::default()
    }

    /// Records one skeleton observation (one frame).
    pub fn add(&mut self, skeleton: &Skeleton3D) {
        self.frames += 1;
        for (i, len) in limb_lengths(skeleton).iter().enumerate() {
            if let Some(len) = len {
                self.lengths[i].push(*len);
            }
        }
    }

    pub fn merge(&mut self, other: &StatsAccumulator) {
        self.frames += other.frames;
        for (mine, theirs) in self.lengths.iter_mut().zip(other.lengths.iter()) {
            mine.extend_from_slice(theirs);
        }
    }

    /// Number of skeleton observations recorded.
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn limb_count(&self, limb: usize) -> usize {
        self.lengths[limb].len()
    }

    /// Fraction of recorded frames in which the limb was measurable.
    pub fn frequency(&self, limb: usize) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.lengths[limb].len() as f64 / self.frames as f64
        }
    }

    /// None when the limb was never observed.
    pub fn limb_stats(&self, limb: usize) -> Option<LimbStats> {
        let raw = &self.lengths[limb];
        if raw.is_empty() {
            return None;
        }
        let mut sorted = raw.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let stddev = if n < 2 {
            0.0
        } else {
            let ss = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
            (ss / (n - 1) as f64).sqrt()
        };
        Some(LimbStats {
            count: n,
            mean,
            stddev,
            min: sorted[0],
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            q3: quantile_sorted(&sorted, 0.75),
            max: sorted[n - 1],
        })
    }
}

/// Linear-interpolation quantile (the common "type 7" rule): index
/// h = (n−1)p, value v[⌊h⌋] + (h−⌊h⌋)·(v[⌊h⌋+1] − v[⌊h⌋]).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= n {
        sorted[n - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Groups skeletons by person and accumulates each person's limb lengths.
pub fn accumulate_stats<'a, I>(skeletons: I) -> BTreeMap<u32, StatsAccumulator>
where
    I: IntoIterator<Item = &'a Skeleton3D>,
{
    let mut by_person: BTreeMap<u32, StatsAccumulator> = BTreeMap::new();
    for s in skeletons {
        by_person.entry(s.person_id).or_default().add(s);
    }
    by_person
}
