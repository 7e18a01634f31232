use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the core library.
///
/// Everything here is a contract violation by the caller; none of the
/// numerical routines fail on valid input.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A sequence element was outside the allowed alphabet.
    InvalidChip { index: usize, value: i8 },
    /// An empty sequence where at least one element is required.
    EmptySequence,
    /// Two sequences that must share a length do not.
    LengthMismatch { left: usize, right: usize },
    /// A size parameter exceeds the supported maximum.
    SizeLimit {
        what: &'static str,
        value: usize,
        max: usize,
    },
    /// A layer index beyond the tree depth.
    LayerOutOfRange { layer: usize, depth: usize },
    /// A code id that does not exist in the tree.
    UnknownCode,
    /// A numeric parameter outside its valid range.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// A waveform at the wrong point of the transmit chain.
    WrongStage {
        expected: &'static str,
        found: &'static str,
    },
    /// Waveforms that must share a sample rate do not.
    RateMismatch,
    /// Noise scaling requested for a signal with zero power.
    ZeroPower,
    /// The number of waveforms does not match the number of references.
    CountMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidChip { index, value } => {
                write!(f, "invalid chip value {value} at index {index}")
            }
            Error::EmptySequence => f.write_str("sequence must not be empty"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::SizeLimit { what, value, max } => {
                write!(f, "{what} = {value} exceeds the limit of {max}")
            }
            Error::LayerOutOfRange { layer, depth } => {
                write!(
                    f,
                    "layer {layer} is out of range for a tree of depth {depth}"
                )
            }
            Error::UnknownCode => f.write_str("code id not present in the tree"),
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::WrongStage { expected, found } => {
                write!(f, "expected a {expected} waveform, got {found}")
            }
            Error::RateMismatch => f.write_str("waveforms have different sample rates"),
            Error::ZeroPower => f.write_str("signal has zero power"),
            Error::CountMismatch { expected, found } => {
                write!(f, "expected {expected} waveforms, got {found}")
            }
        }
    }
}

impl core::error::Error for Error {}
