use thiserror::Error;

/// Errors raised by the computational core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of range: {what} = {value} exceeds {limit}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("allocation of {required_bytes} bytes failed ({what})")]
    Resource {
        what: &'static str,
        required_bytes: usize,
    },

    #[error("limit exceeded: {what} = {value}, configured bound is {bound}")]
    Limit {
        what: &'static str,
        value: u64,
        bound: u64,
    },

    #[error("rule failure at (p={p}, k={k}) in `{spec}`: {message}")]
    Rule {
        spec: String,
        p: u64,
        k: u32,
        message: String,
    },

    #[error("degenerate fit: {usable} usable points (need at least 2)")]
    DegenerateFit { usable: usize },

    #[error("unit-disc violation: |{which}(p)| = {modulus} > 1 at p = {p}")]
    UnitDisc {
        which: &'static str,
        p: u64,
        modulus: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// `Vec` allocation that reports the byte count instead of aborting.
pub(crate) fn try_alloc<T: Clone>(len: usize, fill: T, what: &'static str) -> Result<Vec<T>> {
    let required_bytes = len.saturating_mul(std::mem::size_of::<T>());
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| Error::Resource {
        what,
        required_bytes,
    })?;
    v.resize(len, fill);
    Ok(v)
}
