use std::fs::File;
use std::io::{BufReader, BufWriter};

use fsp_core::formats::CalibrationFile;
use fsp_core::{
    build_lookup_map, focus_view, rotation_from_yaw_pitch_roll, Error, Image, ImagePoint,
    LookupMap, Result, VirtualView,
};
use nalgebra::Matrix3;

use super::StageClock;
use crate::args::RemapArgs;

pub fn run(args: &RemapArgs) -> Result<()> {
    let mut clock = StageClock::new(args.timings);

    let calibration = CalibrationFile::load(&args.calibration)?;
    let camera = calibration.camera(&args.camera)?;
    let intrinsics = camera.intrinsics()?;
    let source = Image::load(&args.input)?;
    if (source.width(), source.height()) != intrinsics.resolution() {
        return Err(Error::SizeMismatch(format!(
            "image is {}x{} but camera {:?} is calibrated for {}x{}",
            source.width(),
            source.height(),
            camera.id,
            intrinsics.width(),
            intrinsics.height()
        )));
    }
    clock.stage("load");

    let fov = args.fov_deg.to_radians();
    let size = (args.width, args.height);
    let view = match (args.target_x, args.target_y) {
        (Some(x), Some(y)) => {
            let template = VirtualView::with_fov(&camera.id, Matrix3::identity(), fov, size)?;
            let gravity = calibration.gravity_in_camera(camera)?;
            focus_view(&template, &intrinsics, &ImagePoint::new(x, y), Some(gravity))?
        }
        _ => {
            let rotation = rotation_from_yaw_pitch_roll(
                args.yaw.to_radians(),
                args.pitch.to_radians(),
                args.roll.to_radians(),
            );
            VirtualView::with_fov(&camera.id, rotation, fov, size)?
        }
    };

    let map = load_or_build_map(args, &view, &intrinsics)?;
    if map.valid_count() == 0 {
        eprintln!("warning: the requested view shares no pixels with the source field of view");
    }
    clock.stage("map");

    let rendered = fsp_core::remap_with(&source, &map, args.fill, args.interpolation.into())?;
    clock.stage("remap");

    rendered.save(&args.output)?;
    clock.stage("write");
    Ok(())
}

fn load_or_build_map(
    args: &RemapArgs,
    view: &VirtualView,
    intrinsics: &fsp_core::CameraIntrinsics,
) -> Result<LookupMap> {
    if let Some(path) = &args.map_cache {
        if path.exists() {
            let file =
                File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let map = LookupMap::read_cache(BufReader::new(file), intrinsics.resolution())?;
            if (map.width(), map.height()) != view.size() {
                return Err(Error::SizeMismatch(format!(
                    "cached map is {}x{} but the requested view is {}x{}",
                    map.width(),
                    map.height(),
                    view.size().0,
                    view.size().1
                )));
            }
            return Ok(map);
        }
    }
    let map = build_lookup_map(view, intrinsics);
    if let Some(path) = &args.map_cache {
        let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        map.write_cache(BufWriter::new(file))?;
    }
    Ok(map)
}
