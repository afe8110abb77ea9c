//! Weighted Morse homotopy on moment polytopes of toric Fano surfaces.
//!
//! The crate builds the moment polytope of a surface given by weighted
//! Newton polygons, enumerates intersection components of Lagrangian
//! sections, assembles graded morphism spaces with their `m₂` structure
//! constants, and compares them with holomorphic sections of line bundles.

pub mod compose;
pub mod geometry;
pub mod morse;
pub mod par;
pub mod surface;
pub mod svg;
pub mod symbolic;
pub mod verify;

pub use compose::{Composer, CompositionEntry, CompositionTable, TreeTrace};
pub use geometry::{Geometry, Level, PotentialFI};
pub use morse::{Carrier, Component, Degree, HomSpace, MorseEngine};
pub use surface::{BundleClass, LatticePolygon, PolySurface, Preset, SectionPolytope, SurfaceConfig};
pub use symbolic::{LogValue, Poly2, RatFunc2, Weight, Q};
pub use verify::{h0_basis, verify_all, SectionBasis, VerifyReport};

use thiserror::Error as ThisError;

#[derive(Debug, Clone, ThisError)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("empty factor list")]
    EmptyFactors,
    #[error("degenerate surface")]
    DegenerateSurface,
    #[error("bundle has {got} entries, expected {expected}")]
    BundleLength { expected: usize, got: usize },
    #[error("no divisor table")]
    NoDivisorTable,
    #[error("no preset collection")]
    NoPresetCollection,
    #[error("config: {0}")]
    Config(String),
    #[error("not interior")]
    NotInterior,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("not continuous on P: c={c}, I=({},{})", i.0, i.1)]
    NotContinuous { c: String, i: (i64, i64) },
    #[error("interior solve inconclusive: c={c}, I=({},{}), residuals {residuals:?}", i.0, i.1)]
    InteriorInconclusive { c: String, i: (i64, i64), residuals: Vec<f64> },
    #[error("grid certificate violated: {0}")]
    Certificate(String),
}

impl Error {
    /// Numeric failures map to a distinct exit status in the CLI.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Self::Numeric(_) | Self::InteriorInconclusive { .. } | Self::Certificate(_))
    }
}
