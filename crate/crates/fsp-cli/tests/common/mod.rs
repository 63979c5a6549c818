//! Shared helpers for the integration suites: independent geometric
//! references and the acceptance reporting format.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::Rng;
use std::path::PathBuf;

/// Prints the one-line verdict for an acceptance criterion and passes the
/// flag through so the caller can assert on it after the line is out.
pub fn report(number: u32, label: &str, pass: bool, detail: &str) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    if detail.is_empty() {
        println!("criterion {number:02} [{verdict}] {label}");
    } else {
        println!("criterion {number:02} [{verdict}] {label} ({detail})");
    }
    pass
}

pub fn target_tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// Uniformly random rotation of angle at most `max_angle` radians.
pub fn small_rotation<R: Rng>(rng: &mut R, max_angle: f64) -> Matrix3<f64> {
    let axis = loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            break v / n;
        }
    };
    let angle = rng.gen_range(0.0..max_angle);
    *Rotation3::from_axis_angle(&Unit::new_unchecked(axis), angle).matrix()
}

/// Midpoint of the closest-approach segment between two rays - a
/// triangulation reference that shares no code with the least-squares path.
pub fn ray_midpoint(
    origin_a: &Vector3<f64>,
    dir_a: &Vector3<f64>,
    origin_b: &Vector3<f64>,
    dir_b: &Vector3<f64>,
) -> Vector3<f64> {
    let r = origin_b - origin_a;
    let a = dir_a.dot(dir_a);
    let b = dir_a.dot(dir_b);
    let c = dir_b.dot(dir_b);
    let d = dir_a.dot(&r);
    let e = dir_b.dot(&r);
    let denom = a * c - b * b;
    let (s, t) = if denom.abs() < 1e-12 {
        (0.0, if c > 0.0 { e / c } else { 0.0 })
    } else {
        ((c * d - b * e) / denom, (b * d - a * e) / denom)
    };
    ((origin_a + dir_a * s) + (origin_b + dir_b * t)) / 2.0
}

/// Axis-aligned pattern search from the best of `starts`; converges on the
/// local minimum of a smooth cost to step size 1e-9.
pub fn refine_point<F: Fn(&Vector3<f64>) -> f64>(
    cost: F,
    starts: &[Vector3<f64>],
) -> (Vector3<f64>, f64) {
    let mut best = starts[0];
    let mut best_cost = cost(&best);
    for s in &starts[1..] {
        let c = cost(s);
        if c < best_cost {
            best = *s;
            best_cost = c;
        }
    }
    let mut step = 0.05;
    while step > 1e-9 {
        let mut improved = false;
        for axis in 0..3 {
            for dir in [-1.0, 1.0] {
                let mut cand = best;
                cand[axis] += dir * step;
                let c = cost(&cand);
                if c < best_cost {
                    best = cand;
                    best_cost = c;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, best_cost)
}
