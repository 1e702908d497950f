use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;

use crate::preimage::CurveComponent;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pole at s = 1")]
    PoleAtOne,

    #[error("series or product does not converge absolutely at Re s = {0} (needs Re s > 1)")]
    OutsideConvergence(f64),

    #[error("character mod {modulus} is not primitive (conductor {conductor})")]
    NotPrimitive { modulus: u64, conductor: u64 },

    #[error("contour passes within {min_abs:e} of a zero near {location}")]
    BoundaryTooClose { location: Complex64, min_abs: f64 },

    #[error("Newton iteration did not converge near {start}")]
    NonConvergent { start: Complex64 },

    #[error("trace reached a branch point near {location}")]
    BranchPointEncountered {
        location: Complex64,
        partial: Box<CurveComponent>,
    },

    #[error("seed {seed} is not on the requested curve (|Im f| = {im_abs:e})")]
    SeedNotOnCurve { seed: Complex64, im_abs: f64 },

    #[error("no boundary curve mapped onto (1, +inf) crosses the window")]
    WindowTooSmall,

    #[error("strip is not fully inside the window: {0}")]
    IncompleteStrip(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
