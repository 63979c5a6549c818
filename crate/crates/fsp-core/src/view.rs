//! Virtual perspective views carved out of fisheye images.
//!
//! A [`VirtualView`] is a rectilinear camera that shares its optical center
//! with a parent fisheye camera; only the orientation and intrinsics differ.
//! Pixels are transferred through a per-view [`LookupMap`] that stores, for
//! every destination pixel, the source coordinates to sample.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex};

use nalgebra::{Matrix3, Rotation3, Vector3};
use rayon::prelude::*;

use crate::camera::{check_rotation, CameraIntrinsics, ImagePoint};
use crate::error::{Error, Result};
use crate::lens::{LensKind, LensModel};
use crate::raster::Image;

/// When the view axis is within this angle (radians) of the gravity
/// direction, the roll is left unchanged rather than solved from gravity.
const GRAVITY_ALIGNMENT_MARGIN: f64 = 1e-9;

/// A rectilinear camera anchored to a parent camera's optical center.
#[derive(Clone, Debug)]
pub struct VirtualView {
    parent: String,
    /// Maps view-frame vectors into the parent camera frame.
    rotation: Matrix3<f64>,
    intrinsics: CameraIntrinsics,
}

impl VirtualView {
    /// The intrinsics must be rectilinear; the rotation must be a proper
    /// rotation matrix.
    pub fn new(
        parent: impl Into<String>,
        rotation: Matrix3<f64>,
        intrinsics: CameraIntrinsics,
    ) -> Result<Self> {
        if intrinsics.lens().kind() != LensKind::Rectilinear {
            return Err(Error::NotRectilinear(intrinsics.lens().kind()));
        }
        check_rotation(&rotation)?;
        Ok(VirtualView {
            parent: parent.into(),
            rotation,
            intrinsics,
        })
    }

    /// Builds a square-pixel view from a horizontal field of view (radians):
    /// f = (w/2) / tan(fov/2), principal point at the image center.
    pub fn with_fov(
        parent: impl Into<String>,
        rotation: Matrix3<f64>,
        fov: f64,
        size: (u32, u32),
    ) -> Result<Self> {
        if !(fov.is_finite() && fov > 0.0 && fov < std::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!(
                "field of view must lie in (0, \u{3c0}), got {fov}"
            )));
        }
        let (w, h) = size;
        let f = (w as f64 / 2.0) / (fov / 2.0).tan();
        let lens = LensModel::new(LensKind::Rectilinear, f)?;
        let intrinsics = CameraIntrinsics::new(lens, (w as f64 / 2.0, h as f64 / 2.0), size)?;
        VirtualView::new(parent, rotation, intrinsics)
    }

    pub fn parent(&self) -> &str {
        &self.parent
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn intrinsics(&self) -> &CameraIntrinsics {
        &self.intrinsics
    }

    pub fn size(&self) -> (u32, u32) {
        self.intrinsics.resolution()
    }

    /// The pinhole calibration matrix K = [[f, 0, cx], [0, f, cy], [0, 0, 1]].
    pub fn intrinsic_matrix(&self) -> Matrix3<f64> {
        let f = self.intrinsics.lens().focal_length();
        let (cx, cy) = self.intrinsics.principal_point();
        Matrix3::new(f, 0.0, cx, 0.0, f, cy, 0.0, 0.0, 1.0)
    }

    /// Replaces the orientation, keeping parent and intrinsics.
    pub fn with_rotation(&self, rotation: Matrix3<f64>) -> Result<Self> {
        VirtualView::new(self.parent.clone(), rotation, self.intrinsics)
    }
}

/// Homography transferring pixels from view `a` to view `b`, valid because
/// both views share an optical center: H = K_b · R_bᵀ · R_a · K_a⁻¹.
pub fn rectilinear_homography(a: &VirtualView, b: &VirtualView) -> Matrix3<f64> {
    let ka = a.intrinsic_matrix();
    let kb = b.intrinsic_matrix();
    let fa = a.intrinsics().lens().focal_length();
    let (cx, cy) = a.intrinsics().principal_point();
    // closed-form inverse of an axis-aligned K
    let ka_inv = Matrix3::new(
        1.0 / fa,
        0.0,
        -cx / fa,
        0.0,
        1.0 / fa,
        -cy / fa,
        0.0,
        0.0,
        1.0,
    );
    debug_assert!(((ka * ka_inv) - Matrix3::identity()).abs().max() < 1e-12);
    kb * b.rotation().transpose() * a.rotation() * ka_inv
}

/// Applies a 3×3 homography to a pixel position.
pub fn apply_homography(h: &Matrix3<f64>, p: &ImagePoint) -> Result<ImagePoint> {
    let v = h * Vector3::new(p.x, p.y, 1.0);
    let denom_scale = v.x.abs().max(v.y.abs()).max(1.0);
    if v.z.abs() <= 1e-15 * denom_scale {
        return Err(Error::Domain(
            "homography maps the point to infinity".into(),
        ));
    }
    Ok(ImagePoint::new(v.x / v.z, v.y / v.z))
}

/// Re-aims a view at a target pixel of the parent image.
///
/// The returned view keeps the template's intrinsics and applies the
/// smallest rotation taking the current optical axis (+z) onto the ray
/// through `target`. If `gravity` is given (a "down" direction in the
/// parent camera frame), the view is then rolled about its new axis so
/// image +y points as much downward as possible.
pub fn focus_view(
    template: &VirtualView,
    parent: &CameraIntrinsics,
    target: &ImagePoint,
    gravity: Option<Vector3<f64>>,
) -> Result<VirtualView> {
    let axis = parent.unproject(target)?;
    let minimal = Rotation3::rotation_between(&Vector3::z(), &axis).ok_or_else(|| {
        Error::DegenerateInput("target is diametrically opposite the optical axis".into())
    })?;
    let mut rotation = *minimal.matrix();

    if let Some(g) = gravity {
        let g_norm = g.norm();
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite gravity vector".into()));
        }
        if g_norm > 0.0 {
            let g_unit = g / g_norm;
            // component of gravity perpendicular to the view axis
            let perp = g_unit - axis * g_unit.dot(&axis);
            if perp.norm() > GRAVITY_ALIGNMENT_MARGIN {
                let down = perp.normalize();
                let x_v = rotation.column(0).into_owned();
                let y_v = rotation.column(1).into_owned();
                // roll ψ so that R·R_z(ψ)·e_y ∥ down
                let roll = (-x_v.dot(&down)).atan2(y_v.dot(&down));
                let rz = Rotation3::from_axis_angle(&Vector3::z_axis(), roll);
                rotation = rotation * *rz.matrix();
            }
        }
    }

    template.with_rotation(rotation)
}

/// Convenience: the minimal-rotation axis for aiming at `target`, i.e. the
/// optical axis of [`focus_view`]'s result expressed in the parent frame.
pub fn focus_axis(parent: &CameraIntrinsics, target: &ImagePoint) -> Result<Vector3<f64>> {
    parent.unproject(target)
}

/// Per-destination-pixel source coordinates. Entries are NaN pairs where the
/// destination pixel has no source (outside the lens domain or the source
/// frame); valid entries always lie inside the source sampling bounds
/// [0, w−1] × [0, h−1].
#[derive(Clone, Debug)]
pub struct LookupMap {
    width: u32,
    height: u32,
    src_width: u32,
    src_height: u32,
    entries: Vec<[f64; 2]>,
}

/// Magic bytes of the lookup-map cache format.
pub const LOOKUP_CACHE_MAGIC: &[u8; 4] = b"FLKM";

impl LookupMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn source_size(&self) -> (u32, u32) {
        (self.src_width, self.src_height)
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Option<(f64, f64)> {
        let [sx, sy] = self.entries[y as usize * self.width as usize + x as usize];
        if sx.is_nan() {
            None
        } else {
            Some((sx, sy))
        }
    }

    pub fn valid_count(&self) -> usize {
        self.entries.iter().filter(|e| !e[0].is_nan()).count()
    }

    /// Serializes as `FLKM`, width and height as little-endian u32, then
    /// row-major (x, y) pairs as little-endian f32; invalid entries are
    /// NaN pairs.
    pub fn write_cache<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(LOOKUP_CACHE_MAGIC)?;
        out.write_all(&self.width.to_le_bytes())?;
        out.write_all(&self.height.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.entries.len() * 8);
        for [sx, sy] in &self.entries {
            buf.extend_from_slice(&(*sx as f32).to_le_bytes());
            buf.extend_from_slice(&(*sy as f32).to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Reads the format written by [`LookupMap::write_cache`]. The source
    /// image size is not part of the format, so it must be supplied; all
    /// valid entries are checked against it.
    pub fn read_cache<R: Read>(mut input: R, source_size: (u32, u32)) -> Result<LookupMap> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != LOOKUP_CACHE_MAGIC {
            return Err(Error::Parse("bad lookup-map magic".into()));
        }
        let mut word = [0u8; 4];
        input.read_exact(&mut word)?;
        let width = u32::from_le_bytes(word);
        input.read_exact(&mut word)?;
        let height = u32::from_le_bytes(word);
        if width == 0 || height == 0 || width as u64 * height as u64 > (1 << 32) {
            return Err(Error::Parse(format!(
                "implausible lookup-map size {width}x{height}"
            )));
        }
        let count = width as usize * height as usize;
        let mut buf = vec![0u8; count * 8];
        input.read_exact(&mut buf)?;
        let (sw, sh) = source_size;
        let max_x = (sw - 1) as f64;
        let max_y = (sh - 1) as f64;
        let mut entries = Vec::with_capacity(count);
        for pair in buf.chunks_exact(8) {
            let sx = f32::from_le_bytes(pair[0..4].try_into().unwrap()) as f64;
            let sy = f32::from_le_bytes(pair[4..8].try_into().unwrap()) as f64;
            if sx.is_nan() || sy.is_nan() {
                entries.push([f64::NAN, f64::NAN]);
            } else if sx >= 0.0 && sy >= 0.0 && sx <= max_x && sy <= max_y {
                entries.push([sx, sy]);
            } else {
                return Err(Error::Parse(format!(
                    "lookup entry ({sx}, {sy}) outside {sw}x{sh} source"
                )));
            }
        }
        Ok(LookupMap {
            width,
            height,
            src_width: sw,
            src_height: sh,
            entries,
        })
    }
}

/// Computes the source coordinates in the parent fisheye image for every
/// pixel of the view.
pub fn build_lookup_map(view: &VirtualView, source: &CameraIntrinsics) -> LookupMap {
    let (w, h) = view.size();
    let (cx, cy) = view.intrinsics().principal_point();
    let f = view.intrinsics().lens().focal_length();
    let rot = *view.rotation();
    let lens = *source.lens();
    let (scx, scy) = source.principal_point();
    let (sw, sh) = source.resolution();
    let max_x = (sw - 1) as f64;
    let max_y = (sh - 1) as f64;

    let mut entries = vec![[f64::NAN, f64::NAN]; w as usize * h as usize];
    entries
        .par_chunks_mut(w as usize)
        .enumerate()
        .for_each(|(y, row)| {
            for (x, entry) in row.iter_mut().enumerate() {
                // ray through the view pixel: ((x−cx)/f, (y−cy)/f, 1), here
                // unnormalized as (nx, ny, f)
                let nx = x as f64 - cx;
                let ny = y as f64 - cy;
                let ray = rot * Vector3::new(nx, ny, f);
                let radial = ray.x.hypot(ray.y);
                let theta = radial.atan2(ray.z);
                if !lens.theta_in_domain(theta) {
                    continue;
                }
                let rd = lens.rd_unchecked(theta);
                let (sx, sy) = if radial == 0.0 {
                    (scx, scy)
                } else {
                    (scx + rd * ray.x / radial, scy + rd * ray.y / radial)
                };
                if sx >= 0.0 && sy >= 0.0 && sx <= max_x && sy <= max_y {
                    *entry = [sx, sy];
                }
            }
        });

    LookupMap {
        width: w,
        height: h,
        src_width: sw,
        src_height: sh,
        entries,
    }
}

/// Pixel transfer strategy for [`remap_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Bilinear,
    Nearest,
}

/// Renders a view by sampling the source through the map with bilinear
/// interpolation; unmapped pixels get `fill`.
pub fn remap(source: &Image, map: &LookupMap, fill: u8) -> Result<Image> {
    remap_with(source, map, fill, Interpolation::Bilinear)
}

pub fn remap_with(
    source: &Image,
    map: &LookupMap,
    fill: u8,
    interpolation: Interpolation,
) -> Result<Image> {
    if (source.width(), source.height()) != map.source_size() {
        return Err(Error::SizeMismatch(format!(
            "source image is {}x{}, map expects {}x{}",
            source.width(),
            source.height(),
            map.source_size().0,
            map.source_size().1
        )));
    }
    let channels = source.channels();
    let mut out = Image::filled(map.width(), map.height(), channels, fill)?;
    let stride = out.stride();
    let ch = channels as usize;
    out.data_mut()
        .par_chunks_mut(stride)
        .enumerate()
        .for_each(|(y, row)| {
            for x in 0..map.width() {
                let Some((sx, sy)) = map.get(x, y as u32) else {
                    continue;
                };
                let px = &mut row[x as usize * ch..(x as usize + 1) * ch];
                match interpolation {
                    Interpolation::Nearest => {
                        let ix = (sx.round() as u32).min(source.width() - 1);
                        let iy = (sy.round() as u32).min(source.height() - 1);
                        for (c, slot) in px.iter_mut().enumerate() {
                            *slot = source.get(ix, iy, c as u8);
                        }
                    }
                    Interpolation::Bilinear => {
                        let x0 = sx.floor();
                        let y0 = sy.floor();
                        let fx = sx - x0;
                        let fy = sy - y0;
                        let x0 = x0 as u32;
                        let y0 = y0 as u32;
                        let x1 = (x0 + 1).min(source.width() - 1);
                        let y1 = (y0 + 1).min(source.height() - 1);
                        for (c, slot) in px.iter_mut().enumerate() {
                            let c = c as u8;
                            let v00 = source.get(x0, y0, c) as f64;
                            let v10 = source.get(x1, y0, c) as f64;
                            let v01 = source.get(x0, y1, c) as f64;
                            let v11 = source.get(x1, y1, c) as f64;
                            let v = v00 * (1.0 - fx) * (1.0 - fy)
                                + v10 * fx * (1.0 - fy)
                                + v01 * (1.0 - fx) * fy
                                + v11 * fx * fy;
                            *slot = v.round() as u8;
                        }
                    }
                }
            }
        });
    Ok(out)
}

/// Quantization step for rotation entries and intrinsics when forming
/// cache keys; orientation differences below this are treated as equal.
pub const CACHE_QUANTUM: f64 = 1e-6;

#[derive(Clone, PartialEq, Eq, Hash)]
struct MapKey {
    parent: String,
    rotation: [i64; 9],
    focal: i64,
    center: (i64, i64),
    size: (u32, u32),
}

fn quantize(v: f64) -> i64 {
    (v / CACHE_QUANTUM).round() as i64
}

impl MapKey {
    fn for_view(view: &VirtualView) -> MapKey {
        let r = view.rotation();
        let mut rotation = [0i64; 9];
        for (i, v) in r.iter().enumerate() {
            rotation[i] = quantize(*v);
        }
        let (cx, cy) = view.intrinsics().principal_point();
        MapKey {
            parent: view.parent().to_string(),
            rotation,
            focal: quantize(view.intrinsics().lens().focal_length()),
            center: (quantize(cx), quantize(cy)),
            size: view.size(),
        }
    }
}

/// Thread-safe cache of lookup maps, keyed by parent camera, quantized
/// orientation, quantized pinhole intrinsics, and view size. One cache
/// serves one calibration: parent ids are assumed to identify cameras
/// uniquely.
#[derive(Default)]
pub struct MapCache {
    maps: Mutex<HashMap<MapKey, Arc<LookupMap>>>,
}

impl MapCache {
    pub fn new() -> Self {
        MapCache::default()
    }

    pub fn len(&self) -> usize {
        self.maps.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the cached map for an equivalent view, building and storing
    /// it on first use.
    pub fn get_or_build(&self, view: &VirtualView, source: &CameraIntrinsics) -> Arc<LookupMap> {
        let key = MapKey::for_view(view);
        if let Some(hit) = self.maps.lock().unwrap().get(&key) {
            return Arc::clone(hit);
        }
        // built outside the lock; a racing duplicate build is harmless
        let map = Arc::new(build_lookup_map(view, source));
        let mut guard = self.maps.lock().unwrap();
        Arc::clone(guard.entry(key).or_insert(map))
    }
}

/// Rotation from yaw/pitch/roll (radians): R = R_y(yaw)·R_x(pitch)·R_z(roll).
pub fn rotation_from_yaw_pitch_roll(yaw: f64, pitch: f64, roll: f64) -> Matrix3<f64> {
    let ry = Rotation3::from_axis_angle(&Vector3::y_axis(), yaw);
    let rx = Rotation3::from_axis_angle(&Vector3::x_axis(), pitch);
    let rz = Rotation3::from_axis_angle(&Vector3::z_axis(), roll);
    *(ry * rx * rz).matrix()
}
