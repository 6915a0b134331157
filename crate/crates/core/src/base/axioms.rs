use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::graded::CoeffVector;
use crate::poly::Poly;
use crate::real::{Rational, Real};

/// Minimal ring interface the axiom checker needs.
pub trait RingElement: Clone + fmt::Display {
    fn additive_identity() -> Self;
    fn multiplicative_identity() -> Self;
    fn sum(&self, other: &Self) -> Self;
    fn product(&self, other: &Self) -> Self;
}

impl RingElement for Poly {
    fn additive_identity() -> Self {
        Poly::zero()
    }
    fn multiplicative_identity() -> Self {
        Poly::one()
    }
    fn sum(&self, other: &Self) -> Self {
        self + other
    }
    fn product(&self, other: &Self) -> Self {
        self * other
    }
}

impl RingElement for Rational {
    fn additive_identity() -> Self {
        Zero::zero()
    }
    fn multiplicative_identity() -> Self {
        One::one()
    }
    fn sum(&self, other: &Self) -> Self {
        self + other
    }
    fn product(&self, other: &Self) -> Self {
        self * other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    NonNegative,
    ZeroIsZero,
    UnitBounded,
    Subadditive,
    Submultiplicative,
    /// `|r·m| <= |r|·|m|` for modules.
    ScalarBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// Index of the sample pair, `None` for the constant checks.
    pub sample: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// `lhs <= rhs`, exactly for rationals and up to relative `tol` otherwise.
fn holds_le(lhs: &Real, rhs: &Real, tol: f64) -> bool {
    match (lhs, rhs) {
        (Real::Exact(a), Real::Exact(b)) => a <= b,
        _ => {
            let (a, b) = (lhs.to_f64(), rhs.to_f64());
            a <= b + tol * a.abs().max(b.abs())
        }
    }
}

fn holds_zero(v: &Real, tol: f64) -> bool {
    match v {
        Real::Exact(q) => q.is_zero(),
        Real::Approx(x) => x.abs() <= tol,
    }
}

struct Checker {
    tol: f64,
    report: AxiomReport,
}

impl Checker {
    fn le(&mut self, axiom: Axiom, sample: Option<usize>, lhs: &Real, rhs: &Real, detail: impl FnOnce() -> String) {
        self.report.checked += 1;
        if !holds_le(lhs, rhs, self.tol) {
            self.report.violations.push(Violation {
                axiom,
                sample,
                lhs: lhs.to_f64(),
                rhs: rhs.to_f64(),
                detail: detail(),
            });
        }
    }

    fn nonneg(&mut self, sample: Option<usize>, v: &Real, what: impl FnOnce() -> String) {
        self.le(Axiom::NonNegative, sample, &Real::zero(), v, what);
    }
}

/// Check `|0| = 0`, `|1| <= 1`, nonnegativity, subadditivity and
/// submultiplicativity on every supplied pair.
pub fn seminorm_axiom_report<E, F>(norm: F, pairs: &[(E, E)], tol: f64) -> Result<AxiomReport>
where
    E: RingElement,
    F: Fn(&E) -> Result<Real>,
{
    let mut c = Checker {
        tol,
        report: AxiomReport::default(),
    };
    let z = norm(&E::additive_identity())?;
    c.report.checked += 1;
    if !holds_zero(&z, tol) {
        c.report.violations.push(Violation {
            axiom: Axiom::ZeroIsZero,
            sample: None,
            lhs: z.to_f64(),
            rhs: 0.0,
            detail: "|0|".into(),
        });
    }
    let one = norm(&E::multiplicative_identity())?;
    c.le(Axiom::UnitBounded, None, &one, &Real::one(), || "|1|".into());

    for (i, (a, b)) in pairs.iter().enumerate() {
        let na = norm(a)?;
        let nb = norm(b)?;
        let s = a.sum(b);
        let p = a.product(b);
        let ns = norm(&s)?;
        let np = norm(&p)?;
        c.nonneg(Some(i), &na, || format!("|{a}|"));
        c.nonneg(Some(i), &nb, || format!("|{b}|"));
        c.le(Axiom::Subadditive, Some(i), &ns, &na.add(&nb), || format!("a = {a}, b = {b}"));
        c.le(Axiom::Submultiplicative, Some(i), &np, &na.mul(&nb), || format!("a = {a}, b = {b}"));
    }
    Ok(c.report)
}

/// Check the seminormed-module axioms: `|0| = 0`, nonnegativity,
/// `|m+n| <= |m|+|n|` and `|r·m| <= |r|·|m|`.
pub fn module_axiom_report<F, G>(
    norm: F,
    scalar_norm: G,
    samples: &[(CoeffVector, CoeffVector, Rational)],
    tol: f64,
) -> Result<AxiomReport>
where
    F: Fn(&CoeffVector) -> Result<Real>,
    G: Fn(&Rational) -> Result<Real>,
{
    let mut c = Checker {
        tol,
        report: AxiomReport::default(),
    };
    let z = norm(&CoeffVector::default())?;
    c.report.checked += 1;
    if !holds_zero(&z, tol) {
        c.report.violations.push(Violation {
            axiom: Axiom::ZeroIsZero,
            sample: None,
            lhs: z.to_f64(),
            rhs: 0.0,
            detail: "|0|".into(),
        });
    }
    for (i, (m, n, r)) in samples.iter().enumerate() {
        let nm = norm(m)?;
        let nn = norm(n)?;
        c.nonneg(Some(i), &nm, || format!("{m:?}"));
        c.le(Axiom::Subadditive, Some(i), &norm(&m.plus(n))?, &nm.add(&nn), || {
            format!("m = {m:?}, n = {n:?}")
        });
        c.le(Axiom::ScalarBound, Some(i), &norm(&m.scale(r))?, &scalar_norm(r)?.mul(&nm), || {
            format!("r = {r}, m = {m:?}")
        });
    }
    Ok(c.report)
}
