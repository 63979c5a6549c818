use crate::lens::LensKind;

/// Errors are split into two families: input/parse problems (bad files,
/// invalid parameters) and geometry problems (out-of-domain angles,
/// degenerate configurations). Callers that need to distinguish them can
/// match on [`Error::is_input_error`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value lies outside the mathematical domain of the requested
    /// operation (e.g. an inclination past the lens field of view).
    #[error("domain error: {0}")]
    Domain(String),

    /// An input that is syntactically fine but geometrically unusable,
    /// such as a zero-length direction vector.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Two-view geometry that does not determine a unique point
    /// (coincident centers, parallel rays, rank-deficient system).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// A reconstructed or projected point has non-positive depth in the
    /// named view.
    #[error("point behind camera: {0}")]
    BehindCamera(String),

    /// A virtual view was requested with a non-perspective lens.
    #[error("virtual views require a rectilinear lens, got {0:?}")]
    NotRectilinear(LensKind),

    /// Raster or lookup-map dimensions do not agree.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// Two skeletons that should describe the same person do not.
    #[error("person id mismatch: {a} vs {b}")]
    PersonMismatch { a: u32, b: u32 },

    /// A constructor argument violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by malformed or inconsistent inputs rather
    /// than by geometry.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::SizeMismatch(_)
                | Error::PersonMismatch { .. }
                | Error::Io(_)
                | Error::Parse(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
