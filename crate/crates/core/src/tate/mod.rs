//! Čech complexes of coverings and their exactness.

mod cech;
pub mod ideal;
mod linalg;

pub use ideal::{degree_cap, IdealBasis, MonomialOrder, DEFAULT_DEGREE_CAP};
pub use cech::{
    cech_complex, check_exactness, localization_consistent, CechComplex, ExactStatus, ExactnessReport, Level,
    Stage, DEFAULT_DEGREE_BOUND,
};
