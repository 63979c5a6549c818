//! Radially symmetric lens models.
//!
//! Each model maps the inclination θ between an incoming ray and the optical
//! axis to a radial distance r_d from the principal point on the sensor.
//! All five classic projection functions are strictly increasing on their
//! domain, so the inverse mapping is well defined.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Rectilinear projection diverges at θ = π/2; reject inclinations closer
/// to the pole than this margin.
pub const RECTILINEAR_POLE_MARGIN: f64 = 1e-9;

/// The five radially symmetric projection functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LensKind {
    /// r_d = f·tan θ — the pinhole/perspective model.
    Rectilinear,
    /// r_d = f·θ — equal angular steps map to equal radial steps.
    Equidistant,
    /// r_d = 2f·tan(θ/2) — conformal fisheye.
    Stereographic,
    /// r_d = 2f·sin(θ/2) — equal solid angles map to equal areas.
    Equisolid,
    /// r_d = f·sin θ — orthographic fisheye, limited to a hemisphere.
    Orthographic,
}

impl LensKind {
    pub const ALL: [LensKind; 5] = [
        LensKind::Rectilinear,
        LensKind::Equidistant,
        LensKind::Stereographic,
        LensKind::Equisolid,
        LensKind::Orthographic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LensKind::Rectilinear => "rectilinear",
            LensKind::Equidistant => "equidistant",
            LensKind::Stereographic => "stereographic",
            LensKind::Equisolid => "equisolid",
            LensKind::Orthographic => "orthographic",
        }
    }
}

/// A lens model paired with a focal length in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LensModel {
    kind: LensKind,
    focal_length: f64,
}

impl LensModel {
    /// Focal length must be finite and strictly positive.
    pub fn new(kind: LensKind, focal_length: f64) -> Result<Self> {
        if !focal_length.is_finite() || focal_length <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "focal length must be finite and positive, got {focal_length}"
            )));
        }
        Ok(LensModel { kind, focal_length })
    }

    pub fn kind(&self) -> LensKind {
        self.kind
    }

    pub fn focal_length(&self) -> f64 {
        self.focal_length
    }

    /// Supremum of the valid inclination range. The bound itself is only
    /// attainable for the orthographic model.
    pub fn theta_max(&self) -> f64 {
        match self.kind {
            LensKind::Rectilinear | LensKind::Orthographic => FRAC_PI_2,
            LensKind::Equidistant | LensKind::Stereographic | LensKind::Equisolid => PI,
        }
    }

    /// Whether θ lies in the domain accepted by [`LensModel::theta_to_rd`].
    pub fn theta_in_domain(&self, theta: f64) -> bool {
        if !theta.is_finite() || theta < 0.0 {
            return false;
        }
        match self.kind {
            LensKind::Rectilinear => theta <= FRAC_PI_2 - RECTILINEAR_POLE_MARGIN,
            // sin θ is still injective at the closed end of the hemisphere.
            LensKind::Orthographic => theta <= FRAC_PI_2,
            _ => theta < PI,
        }
    }

    /// Radial distance for an inclination, without the domain check.
    #[inline]
    pub(crate) fn rd_unchecked(&self, theta: f64) -> f64 {
        let f = self.focal_length;
        match self.kind {
            LensKind::Rectilinear => f * theta.tan(),
            LensKind::Equidistant => f * theta,
            LensKind::Stereographic => 2.0 * f * (0.5 * theta).tan(),
            LensKind::Equisolid => 2.0 * f * (0.5 * theta).sin(),
            LensKind::Orthographic => f * theta.sin(),
        }
    }

    /// Maps inclination θ (radians) to radial distance on the sensor.
    pub fn theta_to_rd(&self, theta: f64) -> Result<f64> {
        if !self.theta_in_domain(theta) {
            return Err(Error::Domain(format!(
                "inclination {theta} outside [0, {}] for {} lens",
                self.theta_max(),
                self.kind.name()
            )));
        }
        Ok(self.rd_unchecked(theta))
    }

    /// Inverse of [`LensModel::theta_to_rd`]: recovers θ from a radial distance.
    pub fn rd_to_theta(&self, rd: f64) -> Result<f64> {
        if !rd.is_finite() || rd < 0.0 {
            return Err(Error::Domain(format!(
                "radial distance must be finite and non-negative, got {rd}"
            )));
        }
        let f = self.focal_length;
        let theta = match self.kind {
            LensKind::Rectilinear => (rd / f).atan(),
            LensKind::Equidistant => {
                let t = rd / f;
                if t >= PI {
                    return Err(self.radius_error(rd));
                }
                t
            }
            LensKind::Stereographic => 2.0 * (rd / (2.0 * f)).atan(),
            LensKind::Equisolid => {
                if rd >= 2.0 * f {
                    return Err(self.radius_error(rd));
                }
                2.0 * (rd / (2.0 * f)).asin()
            }
            LensKind::Orthographic => {
                if rd > f {
                    return Err(self.radius_error(rd));
                }
                (rd / f).asin()
            }
        };
        Ok(theta)
    }

    fn radius_error(&self, rd: f64) -> Error {
        Error::Domain(format!(
            "radial distance {rd} outside representable range of {} lens with f = {}",
            self.kind.name(),
            self.focal_length
        ))
    }
}
