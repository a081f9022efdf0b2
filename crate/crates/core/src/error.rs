use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rectangle: {0}")]
    InvalidRect(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("weight function violates `{condition}` at ({a2}/2, {b2}/2)")]
    WeightViolation {
        condition: &'static str,
        a2: i64,
        b2: i64,
    },
    #[error("sign field does not cover point ({0}/2, {1}/2)")]
    Coverage(i64, i64),
    #[error("window too small: {0}")]
    Window(String),
    #[error("rectangle wraps around the torus")]
    Wrapping,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("malformed data: {0}")]
    Format(String),
}
