use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index has {got} coordinates, grid has {expected} dimensions")]
    Dimension { expected: usize, got: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid pattern support: {0}")]
    InvalidSupport(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("pattern with {r} cells exceeds the exactness budget; at most {max_r} cells fit in one transform")]
    Capacity { r: usize, max_r: usize },

    #[error("base {base} on {s} cells exceeds the exactness budget even for a single cell")]
    Infeasible { base: u64, s: usize },

    #[error("digit {digit} at position {position} is outside the code range 0..{base}")]
    DigitOutOfRange { position: usize, digit: i64, base: u64 },

    #[error("query has {got} digits, support has {expected} cells")]
    QueryLength { expected: usize, got: usize },

    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    #[error("code {code} at {coord:?} is outside the alphabet's code range")]
    CodeOutOfRange { coord: Vec<usize>, code: i64 },

    #[error("value {value} cannot be decoded with base {base} and {digits} digits")]
    Decode { value: i64, base: u64, digits: usize },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error(
        "inverse transform lost integer exactness (max |imag| = {max_imag:.3e}, \
         max rounding residual = {max_residual:.3e}, max |real| = {max_abs:.3e})"
    )]
    Precision { max_imag: f64, max_residual: f64, max_abs: f64 },

    #[error("grid of {s} cells exceeds the circulant lab limit of {limit}")]
    LabSize { s: usize, limit: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed {kind} input: {msg}")]
    Format { kind: &'static str, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
