//! Pins the JSON schemas to the serialized formats: everything the tools
//! emit must validate, and structurally broken documents must not.

use std::path::Path;

use fsp_cli::commands::reconstruct::{reconstruct_records, ReconstructOptions};
use fsp_core::formats::{PathConfig, PersonConfig, SceneConfig, StatsFile};
use fsp_core::skeleton::accumulate_stats;
use fsp_core::synth::SyntheticScene;
use jsonschema::JSONSchema;
use serde_json::{json, Value};

fn load_schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap()
}

/// Compiles one schema with the calibration schema preloaded, so the
/// scene schema's cross-file reference resolves without any fetching.
fn compiled(name: &str) -> JSONSchema {
    let schema = load_schema(name);
    JSONSchema::options()
        .with_document(
            "https://fsp.invalid/schemas/calibration.schema.json".to_string(),
            load_schema("calibration.schema.json"),
        )
        .compile(&schema)
        .expect("schema compiles")
}

fn assert_valid(schema: &JSONSchema, doc: &Value, what: &str) {
    if let Err(errors) = schema.validate(doc) {
        let detail: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("{what} failed validation:\n{}", detail.join("\n"));
    }
}

fn sample_scene() -> SceneConfig {
    SceneConfig {
        calibration: None,
        frames: 2,
        noise_sigma_px: 0.4,
        persons: vec![PersonConfig {
            person_id: 0,
            scale: 1.0,
            leg_extra_m: 0.0,
            path: PathConfig::Circle {
                center: [0.0, 0.0],
                radius: 0.5,
                start_deg: 0.0,
                deg_per_frame: 15.0,
            },
            arm_swing_deg: 20.0,
            occlusion: Vec::new(),
        }],
    }
}

#[test]
fn generated_documents_validate() {
    let out = SyntheticScene::new(sample_scene())
        .unwrap()
        .generate(3)
        .unwrap();

    let calibration = compiled("calibration.schema.json");
    assert_valid(
        &calibration,
        &serde_json::to_value(&out.calibration).unwrap(),
        "generated calibration",
    );

    let keypoints = compiled("keypoints.schema.json");
    for file in &out.keypoints {
        assert_valid(
            &keypoints,
            &serde_json::to_value(file).unwrap(),
            "generated keypoints",
        );
    }

    let skeleton = compiled("skeleton.schema.json");
    assert_valid(
        &skeleton,
        &serde_json::to_value(&out.ground_truth).unwrap(),
        "ground truth",
    );
    let reconstructed = reconstruct_records(
        &out.calibration,
        &out.keypoints[0],
        &out.keypoints[1],
        &ReconstructOptions::default(),
    )
    .unwrap();
    assert_valid(
        &skeleton,
        &serde_json::to_value(&reconstructed).unwrap(),
        "reconstructed skeletons",
    );

    let stats = compiled("stats.schema.json");
    let skeletons = out.ground_truth.to_skeletons();
    let accumulators = accumulate_stats(skeletons.iter());
    let file = StatsFile::from_accumulators(&accumulators);
    assert_valid(
        &stats,
        &serde_json::to_value(&file).unwrap(),
        "limb statistics",
    );
}

#[test]
fn scene_configs_validate() {
    let schema = compiled("scene.schema.json");
    let static_person = json!({
        "person_id": 1,
        "path": { "kind": "static", "position": [2.0, 1.0], "heading_deg": 45.0 },
        "occlusion": [
            { "joint": 4, "probability": 0.5, "camera": "cam0" },
            { "joint": 7, "probability": 1.0, "camera": null }
        ]
    });
    let circle_person = json!({
        "person_id": 2,
        "scale": 0.9,
        "leg_extra_m": 0.05,
        "path": { "kind": "circle", "center": [0.0, 0.0], "radius": 1.2,
                  "start_deg": 90.0, "deg_per_frame": 3.0 },
        "arm_swing_deg": 10.0
    });
    let line_person = json!({
        "person_id": 3,
        "path": { "kind": "line", "from": [-1.0, 0.0], "to": [1.0, 0.5] }
    });
    assert_valid(
        &schema,
        &json!({
            "frames": 10,
            "noise_sigma_px": 0.5,
            "persons": [static_person, circle_person, line_person],
            "calibration": null
        }),
        "config with every path kind",
    );

    // embedded calibration exercises the cross-schema reference
    assert_valid(
        &schema,
        &json!({
            "frames": 1,
            "persons": [],
            "calibration": {
                "cameras": [{
                    "id": "flat",
                    "lens": { "kind": "rectilinear", "focal_length": 32.0 },
                    "principal_point": [32.0, 32.0],
                    "resolution": [64, 64],
                    "world_pose": [
                        [1.0, 0.0, 0.0, 0.0],
                        [0.0, 1.0, 0.0, 0.0],
                        [0.0, 0.0, 1.0, 0.0],
                        [0.0, 0.0, 0.0, 1.0]
                    ]
                }]
            }
        }),
        "config with embedded calibration",
    );

    // the serializer's own output round-trips through the schema
    assert_valid(
        &schema,
        &serde_json::to_value(sample_scene()).unwrap(),
        "serialized scene config",
    );
}

#[test]
fn malformed_documents_are_rejected() {
    let keypoints = compiled("keypoints.schema.json");
    let seventeen: Vec<Value> = vec![Value::Null; 17];
    assert!(
        !keypoints.is_valid(&json!({
            "records": [{
                "frame_index": 0, "camera_id": "cam0", "person_id": 0,
                "joints": seventeen
            }]
        })),
        "17 joints must not validate"
    );

    let calibration = compiled("calibration.schema.json");
    assert!(
        !calibration.is_valid(&json!({
            "cameras": [{
                "id": "bad",
                "lens": { "kind": "pinhole", "focal_length": 30.0 },
                "principal_point": [1.0, 1.0],
                "resolution": [2, 2],
                "world_pose": [
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0]
                ]
            }]
        })),
        "unknown lens kind must not validate"
    );

    let stats = compiled("stats.schema.json");
    let mut limbs = Vec::new();
    for limb in 0..17 {
        limbs.push(json!({
            "limb": limb, "name": "x:y", "count": 0,
            "frequency": if limb == 0 { 1.5 } else { 0.0 }
        }));
    }
    assert!(
        !stats.is_valid(&json!({
            "persons": [{ "person_id": 0, "frames": 1, "limbs": limbs }]
        })),
        "frequency above 1 must not validate"
    );

    let scene = compiled("scene.schema.json");
    assert!(
        !scene.is_valid(&json!({
            "frames": 5,
            "persons": [{
                "person_id": 0,
                "path": { "kind": "static", "position": [0.0, 0.0], "radius": 1.0 }
            }]
        })),
        "path mixing static and circle fields must not validate"
    );
    assert!(
        !scene.is_valid(&json!({ "frames": 0, "persons": [] })),
        "zero frames must not validate"
    );

    let skeleton = compiled("skeleton.schema.json");
    let mut joints: Vec<Value> = vec![Value::Null; 18];
    joints[0] = json!([1.0, 2.0, 3.0]);
    assert!(
        !skeleton.is_valid(&json!({
            "records": [{ "frame_index": 0, "person_id": 0, "joints": joints }]
        })),
        "3-component joint must not validate in a skeleton file"
    );
}
