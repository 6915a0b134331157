//! Presentations `R(ρ⁻¹T)/I`, rational domains and their algebras.

mod chart;
mod domain;
mod presentation;

pub use chart::{annulus_samples, chart_isometry_check, matched_point, ChartReport, LaurentPoly};
pub use domain::{
    base_change, default_names, domain_membership, localization_check, rational_domain_algebra,
    rational_domain_algebra_named, validate_unit_ideal, BaseChangeTarget, DaggerFamily, DomainPair,
    DomainTest, RationalDomainSpec, UnitIdeal, UnitIdealCheck,
};
pub use presentation::{
    coordinate_values, AffinoidPresentation, BranchKind, DerivedVar, Fraction, PresentationEval,
    Solved, VarSpec, ARCH_SLACK,
};
