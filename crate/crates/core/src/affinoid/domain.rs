use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{AffinoidPresentation, BranchKind, PresentationEval, VarSpec};
use crate::base::{l1_poly_norm, BaseRing, Radii};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::{rational, Rational, Real};
use crate::spectrum::FiberPoint;
use crate::tate::IdealBasis;

/// One pair `(f_i, ρ_i)` of a rational domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainPair {
    pub f: Poly,
    #[serde(with = "crate::real::rational_str")]
    pub rho: Rational,
}

/// `D(f₀,ρ₀ | f₁,ρ₁, …, fₙ,ρₙ) = {ρ₀|fᵢ(x)| ≤ ρᵢ|f₀(x)| for i ≥ 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalDomainSpec {
    pub pairs: Vec<DomainPair>,
    /// Coefficients `aᵢ` with `Σ aᵢfᵢ = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<Poly>>,
}

impl RationalDomainSpec {
    pub fn new(pairs: Vec<(Poly, Rational)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Invalid("a rational domain needs f₀".into()));
        }
        if let Some((_, r)) = pairs.iter().find(|(_, r)| *r <= Rational::zero()) {
            return Err(Error::Invalid(format!("radius {r} must be positive")));
        }
        Ok(RationalDomainSpec {
            pairs: pairs.into_iter().map(|(f, rho)| DomainPair { f, rho }).collect(),
            certificate: None,
        })
    }

    pub fn with_certificate(mut self, cert: Vec<Poly>) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn functions(&self) -> Vec<Poly> {
        self.pairs.iter().map(|p| p.f.clone()).collect()
    }

    pub fn n(&self) -> usize {
        self.pairs.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnitIdeal {
    #[serde(rename = "true")]
    True,
    #[serde(rename = "false")]
    False,
    #[serde(rename = "INDETERMINATE")]
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitIdealCheck {
    pub status: UnitIdeal,
    /// Coefficients `aᵢ` with `Σ aᵢfᵢ ≡ 1` modulo the relations, when found.
    pub certificate: Option<Vec<Poly>>,
}

fn ring_vars(parent: &AffinoidPresentation, fs: &[Poly]) -> Result<Vec<String>> {
    let vars = parent.var_names();
    for f in fs {
        if let Some(v) = f.vars().into_iter().find(|v| !vars.contains(v)) {
            return Err(Error::Invalid(format!("{f} uses {v}, which is not a variable of the algebra")));
        }
    }
    Ok(vars)
}

fn is_base_unit(base: BaseRing, f: &Poly) -> Option<Rational> {
    let c = f.as_constant()?;
    if c.is_zero() {
        return None;
    }
    if base.is_integral() && !(c.is_integer() && (c == Rational::one() || c == -Rational::one())) {
        return None;
    }
    Some(c)
}

/// Whether `fs` generate the unit ideal of `parent`.
///
/// With a certificate the identity `Σ aᵢfᵢ = 1` is checked exactly modulo
/// the relations. Without one, a Gröbner basis over ℚ decides the question
/// for `Q_triv`; over ℤ an integral ℚ-certificate proves it, a proper ideal
/// over ℚ disproves it, and anything else is indeterminate.
pub fn validate_unit_ideal(
    parent: &AffinoidPresentation,
    fs: &[Poly],
    certificate: Option<&[Poly]>,
) -> Result<UnitIdealCheck> {
    let vars = ring_vars(parent, fs)?;
    for f in fs {
        parent.base.check_poly(f)?;
    }
    if let Some(cert) = certificate {
        if cert.len() != fs.len() {
            return Err(Error::InvalidCertificate(format!(
                "{} coefficients for {} functions",
                cert.len(),
                fs.len()
            )));
        }
        if parent.base.is_integral() {
            if let Some(a) = cert.iter().find(|a| !a.is_integral()) {
                return Err(Error::InvalidCertificate(format!("{a} is not over ℤ")));
            }
        }
        ring_vars(parent, cert)?;
        let mut s = -Poly::one();
        for (a, f) in cert.iter().zip(fs) {
            s += &(a * f);
        }
        let zero = if parent.relations.is_empty() {
            s.is_zero()
        } else {
            IdealBasis::groebner(vars, &parent.relations)?.contains(&s)?
        };
        if !zero {
            return Err(Error::InvalidCertificate(format!("Σ aᵢfᵢ - 1 = {s}")));
        }
        return Ok(UnitIdealCheck {
            status: UnitIdeal::True,
            certificate: Some(cert.to_vec()),
        });
    }
    if let Some(i) = fs.iter().position(|f| is_base_unit(parent.base, f).is_some()) {
        let c = is_base_unit(parent.base, &fs[i]).expect("unit");
        let cert = (0..fs.len())
            .map(|j| if j == i { Poly::constant(c.recip()) } else { Poly::zero() })
            .collect();
        return Ok(UnitIdealCheck {
            status: UnitIdeal::True,
            certificate: Some(cert),
        });
    }
    let mut gens = fs.to_vec();
    gens.extend(parent.relations.iter().cloned());
    let mut ideal = IdealBasis::new(vars, &gens)?;
    ideal.complete_with_cofactors()?;
    let Some(cof) = ideal.express(&Poly::one())? else {
        return Ok(UnitIdealCheck {
            status: UnitIdeal::False,
            certificate: None,
        });
    };
    let cert: Vec<Poly> = cof[..fs.len()].to_vec();
    if parent.base.is_integral() && !cof.iter().all(Poly::is_integral) {
        return Ok(UnitIdealCheck {
            status: UnitIdeal::Indeterminate,
            certificate: None,
        });
    }
    Ok(UnitIdealCheck {
        status: UnitIdeal::True,
        certificate: Some(cert),
    })
}

fn fresh_name(stem: &str, taken: &[String]) -> String {
    if !taken.iter().any(|t| t == stem) {
        return stem.to_string();
    }
    (2..)
        .map(|k| format!("{stem}_{k}"))
        .find(|c| !taken.contains(c))
        .expect("unbounded")
}

/// Default names for the adjoined variables: `T` for one, `T1..Tn` for more,
/// renamed away from the parent's variables.
pub fn default_names(parent: &AffinoidPresentation, n: usize) -> Vec<String> {
    let mut taken = parent.var_names();
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let stem = if n == 1 { "T".to_string() } else { format!("T{i}") };
        let name = fresh_name(&stem, &taken);
        taken.push(name.clone());
        out.push(name);
    }
    out
}

fn require_unit(parent: &AffinoidPresentation, d: &RationalDomainSpec) -> Result<()> {
    let check = validate_unit_ideal(parent, &d.functions(), d.certificate.as_deref())?;
    match check.status {
        UnitIdeal::True => Ok(()),
        UnitIdeal::False => Err(Error::NotUnitIdeal),
        UnitIdeal::Indeterminate => Err(Error::UnitIdealIndeterminate),
    }
}

/// `A((ρ₁/ρ₀)⁻¹T₁, …)/(f₀T₁ − f₁, …)` with default variable names.
pub fn rational_domain_algebra(parent: &AffinoidPresentation, d: &RationalDomainSpec) -> Result<AffinoidPresentation> {
    rational_domain_algebra_named(parent, d, &default_names(parent, d.n()))
}

pub fn rational_domain_algebra_named(
    parent: &AffinoidPresentation,
    d: &RationalDomainSpec,
    names: &[String],
) -> Result<AffinoidPresentation> {
    if names.len() != d.n() {
        return Err(Error::Invalid(format!("{} names for {} new variables", names.len(), d.n())));
    }
    if let Some(c) = names.iter().find(|n| parent.has_var(n)) {
        return Err(Error::Invalid(format!("{c} is already a variable")));
    }
    require_unit(parent, d)?;
    let mut out = parent.clone();
    let (f0, rho0) = (&d.pairs[0].f, &d.pairs[0].rho);
    for (name, pair) in names.iter().zip(&d.pairs[1..]) {
        out.vars.push(VarSpec {
            name: name.clone(),
            rho: &pair.rho / rho0,
        });
        out.relations.push(&(f0 * &Poly::var(name)) - &pair.f);
    }
    out.validate()?;
    Ok(out)
}

/// Pointwise test of the defining inequalities on `ℳ(parent)`.
pub struct DomainTest {
    pe: PresentationEval,
}

impl DomainTest {
    pub fn new(parent: &AffinoidPresentation) -> Self {
        DomainTest {
            pe: PresentationEval::new(parent),
        }
    }

    pub fn eval(&self) -> &PresentationEval {
        &self.pe
    }

    /// `ρ₀|fᵢ(x)| ≤ ρᵢ|f₀(x)|` for every `i ≥ 1`.
    pub fn contains(&self, x: &FiberPoint, d: &RationalDomainSpec) -> Result<bool> {
        self.satisfies(x, &d.pairs)
    }

    pub fn satisfies(&self, x: &FiberPoint, pairs: &[DomainPair]) -> Result<bool> {
        let Some((first, rest)) = pairs.split_first() else {
            return Ok(true);
        };
        let f0 = self.pe.eval(&first.f, x)?;
        for p in rest {
            let lhs = self.pe.eval(&p.f, x)?.mul_rational(&first.rho);
            let rhs = f0.mul_rational(&p.rho);
            if !lhs.le(&rhs) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn domain_membership(parent: &AffinoidPresentation, x: &FiberPoint, d: &RationalDomainSpec) -> Result<bool> {
    DomainTest::new(parent).contains(x, d)
}

/// Target of a base change.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseChangeTarget {
    Ring(BaseRing),
    Branches(Vec<BranchKind>),
}

/// Reinterpret the presentation over another base ring, or restrict it to
/// some branches of its base.
pub fn base_change(a: &AffinoidPresentation, target: &BaseChangeTarget) -> Result<AffinoidPresentation> {
    match target {
        BaseChangeTarget::Ring(r) => {
            if *r == a.base {
                return Ok(a.clone());
            }
            if !a.base.maps_to(*r) {
                return Err(Error::NoCoefficientMap {
                    from: a.base.to_string(),
                    to: r.to_string(),
                });
            }
            let mut out = a.clone();
            out.base = *r;
            if let Some(bs) = &mut out.branches {
                bs.retain(|b| match b {
                    BranchKind::Trivial => true,
                    BranchKind::Archimedean => *r == BaseRing::ZArch,
                    BranchKind::Padic { .. } => r.is_integral(),
                });
            }
            out.validate()?;
            Ok(out)
        }
        BaseChangeTarget::Branches(bs) => {
            let mut out = a.clone();
            let keep: Vec<BranchKind> = match &a.branches {
                None => bs.clone(),
                Some(old) => bs.iter().filter(|b| old.contains(b)).copied().collect(),
            };
            out.branches = Some(keep);
            Ok(out)
        }
    }
}

/// Whether the strict rational domain algebra over a trivially valued base
/// agrees with the localization `A[1/f₀]`: both substitution maps are well
/// defined and mutually inverse on generators, modulo the relations.
pub fn localization_check(parent: &AffinoidPresentation, d: &RationalDomainSpec) -> Result<bool> {
    if parent.base != BaseRing::QTriv {
        return Err(Error::Unsupported("localization check needs base Q_triv".into()));
    }
    let one = Rational::one();
    if !parent.is_strict() || d.pairs.iter().any(|p| p.rho != one) {
        return Err(Error::Unsupported("localization check needs all radii equal to 1".into()));
    }
    let fs = d.functions();
    let cert = validate_unit_ideal(parent, &fs, d.certificate.as_deref())?
        .certificate
        .ok_or(Error::NotUnitIdeal)?;
    let b = rational_domain_algebra(parent, d)?;
    let names: Vec<String> = b.var_names()[parent.vars.len()..].to_vec();
    let y = fresh_name("Y", &b.var_names());
    let f0 = &fs[0];

    let mut l_vars = parent.var_names();
    l_vars.push(y.clone());
    let mut l_rel = parent.relations.clone();
    l_rel.push(&(f0 * &Poly::var(&y)) - &Poly::one());
    let l_ideal = IdealBasis::groebner(l_vars, &l_rel)?;
    let b_ideal = IdealBasis::groebner(b.var_names(), &b.relations)?;

    // φ: B → L, Tᵢ ↦ fᵢ·Y
    let phi = |g: &Poly| -> Poly {
        let mut out = g.clone();
        for (t, f) in names.iter().zip(&fs[1..]) {
            out = out.substitute(t, &(f * &Poly::var(&y)));
        }
        out
    };
    // ψ: L → B, Y ↦ a₀ + Σ aᵢTᵢ
    let inv_f0 = {
        let mut s = cert[0].clone();
        for (a, t) in cert[1..].iter().zip(&names) {
            s += &(a * &Poly::var(t));
        }
        s
    };
    let psi = |g: &Poly| -> Poly { g.substitute(&y, &inv_f0) };

    for r in &b.relations {
        if !l_ideal.contains(&phi(r))? {
            return Ok(false);
        }
    }
    for r in &l_rel {
        if !b_ideal.contains(&psi(r))? {
            return Ok(false);
        }
    }
    for t in &names {
        let back = psi(&phi(&Poly::var(t)));
        if !b_ideal.contains(&(&back - &Poly::var(t)))? {
            return Ok(false);
        }
    }
    let back = phi(&psi(&Poly::var(&y)));
    l_ideal.contains(&(&back - &Poly::var(&y)))
}

/// The radius family `ν_k = ρ·(1 + 2^{-k})`, `k = 0..=K`, standing in for
/// the overconvergent colimit.
#[derive(Clone, Debug, PartialEq)]
pub struct DaggerFamily {
    pub rho: Radii,
    pub k_max: u32,
}

impl DaggerFamily {
    pub fn new(rho: Radii, k_max: u32) -> Self {
        DaggerFamily { rho, k_max }
    }

    pub fn radii_at(&self, k: u32) -> Radii {
        let scale = Rational::one() + rational(1, 1i64 << k.min(62));
        self.rho.iter().map(|(v, r)| (v.clone(), r * &scale)).collect()
    }

    pub fn schedule(&self) -> Vec<Radii> {
        (0..=self.k_max).map(|k| self.radii_at(k)).collect()
    }

    /// `‖f‖₁` at every `ν_k`.
    pub fn l1_norms(&self, f: &Poly, base: BaseRing) -> Result<Vec<Real>> {
        self.schedule()
            .iter()
            .map(|r| Ok(Real::Exact(l1_poly_norm(f, r, base)?)))
            .collect()
    }
}
