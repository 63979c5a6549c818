use fsp_core::formats::SceneConfig;
use fsp_core::synth::SyntheticScene;
use fsp_core::{Error, Result};

use super::StageClock;
use crate::args::SynthArgs;

pub fn run(args: &SynthArgs) -> Result<()> {
    let mut clock = StageClock::new(args.timings);

    let config = SceneConfig::load(&args.config)?;
    let scene = SyntheticScene::new(config)?;
    clock.stage("load");

    let output = scene.generate(args.seed)?;
    clock.stage("generate");

    std::fs::create_dir_all(&args.output_dir)
        .map_err(|e| Error::Io(format!("{}: {e}", args.output_dir.display())))?;

    let calibration_path = args.output_dir.join("calibration.json");
    output.calibration.save(&calibration_path)?;
    println!("wrote {}", calibration_path.display());

    // keypoint files land in calibration order, one per camera
    for (camera, keypoints) in output.calibration.cameras.iter().zip(&output.keypoints) {
        let path = args
            .output_dir
            .join(format!("keypoints_{}.json", file_safe(&camera.id)));
        keypoints.save(&path)?;
        println!("wrote {}", path.display());
    }

    let truth_path = args.output_dir.join("ground_truth.json");
    output.ground_truth.save(&truth_path)?;
    println!("wrote {}", truth_path.display());
    clock.stage("write");
    Ok(())
}

/// Camera ids are arbitrary strings; keep generated file names tame.
fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}
