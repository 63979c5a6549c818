//! Geometry for fisheye stereo rigs: lens projection models, virtual
//! pinhole views synthesized out of fisheye images, two-view DLT
//! triangulation, and body-skeleton statistics.

pub mod camera;
pub mod error;
pub mod formats;
pub mod lens;
pub mod raster;
pub mod skeleton;
pub mod synth;
pub mod triangulation;
pub mod view;

pub use camera::{map_point, CameraIntrinsics, ImagePoint, RigidPose};
pub use error::{Error, Result};
pub use lens::{LensKind, LensModel};
pub use raster::Image;
pub use triangulation::{
    reprojection_error, triangulate_dlt, Correspondence, ProjectionMatrix, WorldPoint,
};
pub use view::{
    apply_homography, build_lookup_map, focus_view, rectilinear_homography, remap, remap_with,
    rotation_from_yaw_pitch_roll, Interpolation, LookupMap, MapCache, VirtualView,
};
