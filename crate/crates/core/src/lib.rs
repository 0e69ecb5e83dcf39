//! Planar point location over order-preserving quantized coordinates.
//!
//! Vertex coordinates are cut to integers at one shared bit position, the
//! subdivision is triangulated, and the line coefficients of every triangle
//! edge are packed into machine words. A query evaluates all edge functions
//! with a fixed number of word operations per packed word and confirms the
//! surviving triangles with exact arithmetic on the original coordinates.
//!
//! The index is generic over the coordinate type (`f32`, `f64`) and the
//! register word (`u64`, `u128`, or narrower words for experiments).

pub mod error;
pub mod exact;
pub mod format;
pub mod geom;
pub mod locator;
pub mod quantizer;
pub mod scalar;
pub mod subdivision;
pub mod swar;
pub mod synth;
mod triangulate;

pub use error::{BuildError, FormatError, LocateError, QuantizeError, SubdivisionError, SwarError};
pub use exact::{locate_bruteforce, orient, point_in_triangle_exact, ExactSign, TriangleHit};
pub use geom::{BoundingBox, Point};
pub use locator::{
    Candidate, EdgeStreams, Fallback, LocateResult, Location, LocationKind, PackedEdgeIndex, QueryPoint,
};
pub use quantizer::{compute_cut_bit, error_budget, msb, quantize, CutSpec};
pub use scalar::{Coord, QuantInt, Word};
pub use subdivision::{edge_coefficients, triangulate, EdgeCoeffs, Subdivision, TriangulatedSubdivision};
pub use swar::{LaneLayout, LaneMask, SwarConstants, WordOps};

/// `f64` coordinates packed into 64-bit words.
pub type Locator = PackedEdgeIndex<f64, u64>;
/// `f64` coordinates packed into 128-bit words.
pub type WideLocator = PackedEdgeIndex<f64, u128>;
/// `f32` coordinates packed into 64-bit words.
pub type Locator32 = PackedEdgeIndex<f32, u64>;
