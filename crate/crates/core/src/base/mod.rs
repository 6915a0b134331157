//! Concrete base rings `(ℤ,|·|∞)`, `(ℤ,|·|₀)`, `(ℚ,|·|₀)` and seminorms on
//! polynomial rings over them.

mod axioms;
mod residue;
mod tensor;
mod uniformize;

pub use axioms::{
    module_axiom_report, seminorm_axiom_report, Axiom, AxiomReport, RingElement, Violation,
};
pub use residue::{residue_seminorm_bound, QuotientPresentation, ResidueL1Norm, SearchBudget};
pub use tensor::{projective_tensor_bound, ElementaryTensor, TensorBound};
pub use uniformize::{uniformization_estimate, UniformizationEstimate, DEFAULT_BIT_BUDGET};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::monomial_grading;
use crate::poly::Poly;
use crate::real::{Rational, Real};

/// Per-variable polyradius.
pub type Radii = BTreeMap<String, Rational>;

/// Flag attached to values that only bound the quantity they describe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundKind {
    UpperBound,
    SampledEstimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseRing {
    /// `(ℤ, |·|∞)`, the initial seminormed ring.
    #[serde(rename = "Z_arch")]
    ZArch,
    /// `(ℤ, |·|₀)`.
    #[serde(rename = "Z_triv")]
    ZTriv,
    /// `(ℚ, |·|₀)`.
    #[serde(rename = "Q_triv")]
    QTriv,
}

impl BaseRing {
    pub const ALL: [BaseRing; 3] = [BaseRing::ZArch, BaseRing::ZTriv, BaseRing::QTriv];

    pub fn tag(self) -> &'static str {
        match self {
            BaseRing::ZArch => "Z_arch",
            BaseRing::ZTriv => "Z_triv",
            BaseRing::QTriv => "Q_triv",
        }
    }

    pub fn is_integral(self) -> bool {
        matches!(self, BaseRing::ZArch | BaseRing::ZTriv)
    }

    pub fn is_trivially_valued(self) -> bool {
        matches!(self, BaseRing::ZTriv | BaseRing::QTriv)
    }

    pub fn contains(self, a: &Rational) -> bool {
        !self.is_integral() || a.is_integer()
    }

    pub fn check_poly(self, f: &Poly) -> Result<()> {
        if self.is_integral() && !f.is_integral() {
            return Err(Error::NotInBaseRing(f.to_string()));
        }
        Ok(())
    }

    /// Whether elements of `self` map to `target` by the identity on
    /// coefficients.
    pub fn maps_to(self, target: BaseRing) -> bool {
        match (self, target) {
            (a, b) if a == b => true,
            (BaseRing::ZArch, _) => true,
            (BaseRing::ZTriv, BaseRing::QTriv) => true,
            _ => false,
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BaseRing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z_arch" | "Z" => Ok(BaseRing::ZArch),
            "Z_triv" | "Z0" => Ok(BaseRing::ZTriv),
            "Q_triv" | "Q" => Ok(BaseRing::QTriv),
            _ => Err(Error::Invalid(format!("unknown base ring {s:?}"))),
        }
    }
}

/// `|a|` in the base ring.
pub fn base_norm_eval(r: BaseRing, a: &Rational) -> Result<Rational> {
    if !r.contains(a) {
        return Err(Error::NotInBaseRing(a.to_string()));
    }
    Ok(match r {
        BaseRing::ZArch => a.abs(),
        BaseRing::ZTriv | BaseRing::QTriv => {
            if a.is_zero() {
                Rational::zero()
            } else {
                Rational::one()
            }
        }
    })
}

/// A base norm raised to a positive power, `|·|^t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseNorm {
    pub ring: BaseRing,
    pub power: f64,
}

impl BaseNorm {
    pub fn new(ring: BaseRing) -> Self {
        BaseNorm { ring, power: 1.0 }
    }

    pub fn powered(ring: BaseRing, power: f64) -> Self {
        BaseNorm { ring, power }
    }

    pub fn eval(&self, a: &Rational) -> Result<Real> {
        let v = Real::Exact(base_norm_eval(self.ring, a)?);
        Ok(if self.power == 1.0 { v } else { v.powf(self.power) })
    }
}

/// A seminorm on polynomials, used as an oracle by the derived
/// constructions.
pub trait PolyNorm {
    fn norm(&self, f: &Poly) -> Result<Real>;

    fn is_submultiplicative(&self) -> bool {
        true
    }
}

/// `‖Σ a_α X^α‖₁ = Σ |a_α|·ρ^α`.
#[derive(Clone, Debug)]
pub struct L1Norm {
    pub base: BaseRing,
    pub radii: Radii,
}

/// `max |a_α|·ρ^α`; for a trivially valued base this is the Gauss norm.
#[derive(Clone, Debug)]
pub struct GaussNorm {
    pub base: BaseRing,
    pub radii: Radii,
}

impl L1Norm {
    pub fn new(base: BaseRing, radii: Radii) -> Self {
        L1Norm { base, radii }
    }
}

impl GaussNorm {
    pub fn new(base: BaseRing, radii: Radii) -> Self {
        GaussNorm { base, radii }
    }
}

pub fn l1_poly_norm(f: &Poly, radii: &Radii, base: BaseRing) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (m, c) in f.terms() {
        acc += base_norm_eval(base, c)? * monomial_grading(m, radii)?;
    }
    Ok(acc)
}

pub fn gauss_poly_norm(f: &Poly, radii: &Radii, base: BaseRing) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (m, c) in f.terms() {
        let t = base_norm_eval(base, c)? * monomial_grading(m, radii)?;
        if t > acc {
            acc = t;
        }
    }
    Ok(acc)
}

impl PolyNorm for L1Norm {
    fn norm(&self, f: &Poly) -> Result<Real> {
        Ok(Real::Exact(l1_poly_norm(f, &self.radii, self.base)?))
    }
}

impl PolyNorm for GaussNorm {
    fn norm(&self, f: &Poly) -> Result<Real> {
        Ok(Real::Exact(gauss_poly_norm(f, &self.radii, self.base)?))
    }

    fn is_submultiplicative(&self) -> bool {
        self.base.is_trivially_valued()
    }
}

pub fn radii_from<I, S>(pairs: I) -> Radii
where
    I: IntoIterator<Item = (S, Rational)>,
    S: Into<String>,
{
    pairs.into_iter().map(|(v, r)| (v.into(), r)).collect()
}
