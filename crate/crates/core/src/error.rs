use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantizeError {
    #[error("expected a finite positive value, got {0}")]
    NotPositive(f64),
    #[error("non-finite coordinate {0}")]
    NonFinite(f64),
    #[error("no coordinates given")]
    Empty,
    #[error("all coordinates equal {0}; no gap to derive a cut bit from")]
    AllEqual(f64),
    #[error("{value} does not fit in {width} bits at cut bit {cut_bit}")]
    OutOfRange { value: f64, cut_bit: i32, width: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwarError {
    #[error("lane of {lane_bits} bits does not fit a {word_bits}-bit word")]
    LaneTooWide { lane_bits: u32, word_bits: u32 },
    #[error("magnitude field must be at least one bit")]
    ZeroMagnitude,
    #[error("layout asks for {word_bits}-bit words but the register type has {register_bits}")]
    WordTooNarrow { word_bits: u32, register_bits: u32 },
    #[error("value at index {index} needs more than {magnitude_bits} magnitude bits")]
    Overflow { index: usize, magnitude_bits: u32 },
    #[error("operands have mismatched layouts or lane counts")]
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubdivisionError {
    #[error("subdivision has no faces")]
    NoFaces,
    #[error("face {face} has {len} vertices; at least 3 required")]
    ShortFace { face: usize, len: usize },
    #[error("face {face} references vertex {index}, but there are only {count}")]
    BadIndex { face: usize, index: usize, count: usize },
    #[error("face {face} repeats vertex {index}")]
    RepeatedVertex { face: usize, index: usize },
    #[error("face {face} is self-intersecting (edges {first} and {second})")]
    SelfIntersecting { face: usize, first: usize, second: usize },
    #[error("face {face} is not counterclockwise")]
    Clockwise { face: usize },
    #[error("face {face} degenerates at cut bit {cut_bit}; a finer cut is needed")]
    Degenerate { face: usize, cut_bit: i32 },
    #[error("triangle {triangle} has zero area")]
    ZeroArea { triangle: usize },
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error(transparent)]
    Swar(#[from] SwarError),
    #[error("edge {lane} coefficient needs {bits} bits, bound is {bound}")]
    CoefficientWidth { lane: usize, bits: u32, bound: u32 },
    #[error("quantized coordinates need {0} bits, more than the 61 a lane can carry")]
    CoordinateWidth(u32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocateError {
    #[error("query coordinate is not finite")]
    NonFinite,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    Version(u16),
    #[error("index stores {stored} but {expected} was requested")]
    TypeMismatch { stored: String, expected: String },
    #[error("index truncated")]
    Truncated,
    #[error("index is inconsistent: {0}")]
    Corrupt(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
