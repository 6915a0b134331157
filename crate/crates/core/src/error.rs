use thiserror::Error;

use crate::poly::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("p-additive tensor needs p > 0, got {0}")]
    NonPositiveP(f64),

    #[error("support of size {size} exceeds the exhaustive-check cap of {cap}")]
    SupportTooLarge { size: usize, cap: usize },

    #[error("coefficient of {0} is not in the base ring")]
    NotInBaseRing(String),

    #[error("no coordinate for variable {0}")]
    MissingCoordinate(String),

    #[error("coefficients exceeded the bit budget of {0} bits")]
    BitBudgetExceeded(u64),

    #[error("the uniformization sequence increased at n = {n} for a submultiplicative norm")]
    NonMonotoneUniformization { n: u64 },

    #[error("empty search box: {0}")]
    EmptySearchBox(String),

    #[error("search box too large: {0} candidates")]
    SearchBoxTooLarge(u128),

    #[error("empty sampling density: {0}")]
    EmptyDensity(String),

    #[error("the generators do not generate the unit ideal")]
    NotUnitIdeal,

    #[error("unit-ideal certificate does not verify: {0}")]
    InvalidCertificate(String),

    #[error("unit ideal undecided over a Z-based ring without a certificate")]
    UnitIdealIndeterminate,

    #[error("no coefficient map from {from} to {to}")]
    NoCoefficientMap { from: String, to: String },

    #[error("sample point lies outside the annulus |X| = 1: {0}")]
    OutsideCharts(String),

    #[error("sampled inf of max_i |f_i|/rho_i is zero; the generators share a zero at {0}")]
    CommonZero(String),

    #[error("missing invertibility witness for generator {0}")]
    MissingUnitWitness(usize),

    #[error("unsupported for this ring: {0}")]
    Unsupported(String),

    #[error("ideal completion exceeded the {what} cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
