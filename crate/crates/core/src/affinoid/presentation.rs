use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::base::{BaseRing, Radii};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::{Rational, Real};
use crate::spectrum::{eval_point, Coordinate, FiberPoint, SpectrumPoint};

/// One variable with its polyradius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSpec {
    pub name: String,
    #[serde(with = "crate::real::rational_str")]
    pub rho: Rational,
}

/// A family of branches of the base spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchKind {
    Trivial,
    Archimedean,
    /// The `p`-adic branch together with its `Residue(p)` endpoint.
    Padic { p: u64 },
}

impl BranchKind {
    pub fn contains(&self, x: &SpectrumPoint) -> bool {
        match (self, x) {
            (BranchKind::Trivial, SpectrumPoint::Trivial) => true,
            (BranchKind::Archimedean, SpectrumPoint::Archimedean { .. }) => true,
            (BranchKind::Padic { p }, SpectrumPoint::Padic { p: q, .. }) => p == q,
            (BranchKind::Padic { p }, SpectrumPoint::Residue { p: q }) => p == q,
            _ => false,
        }
    }
}

/// `A = R{ρ⁻¹T}/I`; `dagger` marks the overconvergent variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinoidPresentation {
    pub base: BaseRing,
    pub vars: Vec<VarSpec>,
    #[serde(default)]
    pub dagger: bool,
    #[serde(default)]
    pub relations: Vec<Poly>,
    /// Restriction to some branches of the base; `None` keeps all of them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<BranchKind>>,
}

/// A variable determined by the relations as `num / den` in the free
/// variables.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedVar {
    pub name: String,
    pub num: Poly,
    pub den: Poly,
}

/// The presentation solved for variables that appear linearly.
#[derive(Clone, Debug, PartialEq)]
pub struct Solved {
    pub free: Vec<String>,
    pub derived: Vec<DerivedVar>,
    /// Remaining relations in the free variables, cleared of denominators.
    pub residual: Vec<Poly>,
}

/// Relative slack for archimedean relation and radius checks.
pub const ARCH_SLACK: f64 = 1e-9;

fn cancel_common_power(num: Poly, den: Poly, d: &Poly, kn: u32, kd: u32) -> (Poly, Poly) {
    // num / d^kn divided by den / d^kd
    let m = kn.min(kd);
    (&num * &d.pow(kd - m), &den * &d.pow(kn - m))
}

impl AffinoidPresentation {
    pub fn new(base: BaseRing, vars: Vec<(String, Rational)>, relations: Vec<Poly>) -> Result<Self> {
        let a = AffinoidPresentation {
            base,
            vars: vars
                .into_iter()
                .map(|(name, rho)| VarSpec { name, rho })
                .collect(),
            dagger: false,
            relations,
            branches: None,
        };
        a.validate()?;
        Ok(a)
    }

    /// `R{ρ⁻¹T}` with no relations.
    pub fn polydisc<S: Into<String>>(base: BaseRing, vars: impl IntoIterator<Item = (S, Rational)>) -> Result<Self> {
        Self::new(base, vars.into_iter().map(|(v, r)| (v.into(), r)).collect(), vec![])
    }

    /// The base ring itself.
    pub fn point(base: BaseRing) -> Self {
        AffinoidPresentation {
            base,
            vars: vec![],
            dagger: false,
            relations: vec![],
            branches: None,
        }
    }

    pub fn with_dagger(mut self, dagger: bool) -> Self {
        self.dagger = dagger;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.vars {
            if v.rho <= Rational::zero() {
                return Err(Error::Invalid(format!("radius of {} must be positive", v.name)));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(Error::Invalid(format!("variable {} declared twice", v.name)));
            }
        }
        for r in &self.relations {
            self.base.check_poly(r)?;
            if let Some(v) = r.vars().into_iter().find(|v| !seen.contains(v.as_str())) {
                return Err(Error::Invalid(format!("relation {r} uses undeclared {v}")));
            }
        }
        Ok(())
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn radius(&self, var: &str) -> Option<&Rational> {
        self.vars.iter().find(|v| v.name == var).map(|v| &v.rho)
    }

    pub fn radii(&self) -> Radii {
        self.vars.iter().map(|v| (v.name.clone(), v.rho.clone())).collect()
    }

    pub fn has_var(&self, var: &str) -> bool {
        self.vars.iter().any(|v| v.name == var)
    }

    /// Whether every radius equals 1.
    pub fn is_strict(&self) -> bool {
        self.vars.iter().all(|v| v.rho == Rational::from_integer(1.into()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("presentation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: AffinoidPresentation = serde_json::from_str(text)?;
        a.validate()?;
        Ok(a)
    }

    pub fn allows(&self, x: &SpectrumPoint) -> bool {
        x.lies_over(self.base)
            && self
                .branches
                .as_ref()
                .map_or(true, |bs| bs.iter().any(|b| b.contains(x)))
    }

    /// Solve relations of the form `d·T - n`, with `T` absent from `d` and
    /// `n`, for `T`. Later-declared variables are preferred, so variables
    /// adjoined by rational domain constructions become the derived ones.
    pub fn solve(&self) -> Solved {
        let order = self.var_names();
        let mut derived: Vec<DerivedVar> = Vec::new();
        let mut residual: Vec<Poly> = Vec::new();
        let mut pending: Vec<Poly> = self.relations.clone();
        while !pending.is_empty() {
            let r = pending.remove(0);
            if r.is_zero() {
                continue;
            }
            let pick = order.iter().rev().find(|t| {
                !derived.iter().any(|d| &d.name == *t) && r.degree_in(t) == 1
            });
            let Some(t) = pick.cloned() else {
                residual.push(r);
                continue;
            };
            // r = d·t + c with d, c free of t
            let mut d = Poly::zero();
            let mut c = Poly::zero();
            for (m, q) in r.terms() {
                let e = m.exponent(&t);
                let rest = crate::poly::Monomial::from_pairs(
                    m.pairs().iter().filter(|(v, _)| *v != t).cloned(),
                );
                if e == 1 {
                    d.add_term(rest, q.clone());
                } else {
                    c.add_term(rest, q.clone());
                }
            }
            let mut n = -c;
            if !self.base.is_integral() {
                if let Some(k) = d.as_constant() {
                    n = n.scale(&k.recip());
                    d = Poly::one();
                }
            }
            for dv in derived.iter_mut() {
                let (nn, kn) = dv.num.substitute_fraction(&t, &n, &d);
                let (dd, kd) = dv.den.substitute_fraction(&t, &n, &d);
                let (a, b) = cancel_common_power(nn, dd, &d, kn, kd);
                dv.num = a;
                dv.den = b;
            }
            pending = pending
                .into_iter()
                .map(|p| p.substitute_fraction(&t, &n, &d).0)
                .collect();
            residual = residual
                .into_iter()
                .map(|p| p.substitute_fraction(&t, &n, &d).0)
                .collect();
            derived.push(DerivedVar { name: t, num: n, den: d });
        }
        let free = order
            .into_iter()
            .filter(|v| !derived.iter().any(|d| &d.name == v))
            .collect();
        Solved {
            free,
            derived,
            residual: residual.into_iter().filter(|p| !p.is_zero()).collect(),
        }
    }
}

/// Evaluation of elements of a presentation at points given by their free
/// coordinates.
#[derive(Clone, Debug)]
pub struct PresentationEval {
    pub alg: AffinoidPresentation,
    pub solved: Solved,
}

/// `|g|` at a point as `|N| / Π |d_i|^{k_i}`.
#[derive(Clone, Debug)]
pub struct Fraction {
    pub num: Poly,
    pub dens: Vec<(Poly, u32)>,
}

impl PresentationEval {
    pub fn new(alg: &AffinoidPresentation) -> Self {
        PresentationEval {
            alg: alg.clone(),
            solved: alg.solve(),
        }
    }

    pub fn free_vars(&self) -> &[String] {
        &self.solved.free
    }

    pub fn fraction(&self, g: &Poly) -> Fraction {
        let mut num = g.clone();
        let mut dens = Vec::new();
        for dv in &self.solved.derived {
            if !num.uses_var(&dv.name) {
                continue;
            }
            let (n, k) = num.substitute_fraction(&dv.name, &dv.num, &dv.den);
            num = n;
            if k > 0 {
                dens.push((dv.den.clone(), k));
            }
        }
        Fraction { num, dens }
    }

    pub fn eval_fraction(&self, fr: &Fraction, x: &FiberPoint) -> Result<Real> {
        let mut v = eval_point(&fr.num, x)?;
        for (d, k) in &fr.dens {
            let dv = eval_point(d, x)?;
            let dk = dv.powf(*k as f64);
            v = v
                .div(&dk)
                .ok_or_else(|| Error::Invalid(format!("denominator {d} vanishes at {x}")))?;
        }
        Ok(v)
    }

    /// `|g(x)|` for `g` in the ambient ring of the presentation.
    pub fn eval(&self, g: &Poly, x: &FiberPoint) -> Result<Real> {
        self.eval_fraction(&self.fraction(g), x)
    }

    /// Whether `x` (with coordinates for the free variables) is a point of
    /// `ℳ(A)`: branch allowed, radii respected, denominators nonzero and
    /// residual relations vanishing.
    pub fn admits(&self, x: &FiberPoint) -> Result<bool> {
        if !self.alg.allows(&x.base) {
            return Ok(false);
        }
        for v in &self.solved.free {
            let rho = self.alg.radius(v).expect("declared");
            let ok = match (x.coords.get(v), x.base) {
                (None, _) => return Err(Error::MissingCoordinate(v.clone())),
                (Some(Coordinate::Complex { re, im }), SpectrumPoint::Archimedean { eps }) => {
                    let r = (re * re + im * im).sqrt();
                    let bound = Real::Exact(rho.clone()).powf(1.0 / eps).to_f64();
                    r <= bound * (1.0 + ARCH_SLACK)
                }
                (Some(Coordinate::Gauss { center, radius }), base) => {
                    let c = base.abs(center)?;
                    radius <= rho && c.le(&Real::Exact(rho.clone()))
                }
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
        for dv in &self.solved.derived {
            let d = eval_point(&dv.den, x)?;
            if d.is_zero() || (!d.is_exact() && d.to_f64() < 1e-300) {
                return Ok(false);
            }
            let n = eval_point(&dv.num, x)?;
            let t = n.div(&d).expect("nonzero");
            let rho = Real::Exact(self.alg.radius(&dv.name).expect("declared").clone());
            let ok = match (&t, x.base.is_archimedean()) {
                (Real::Exact(_), _) | (_, false) => t.le(&rho),
                (Real::Approx(a), true) => *a <= rho.to_f64() * (1.0 + ARCH_SLACK),
            };
            if !ok {
                return Ok(false);
            }
        }
        for r in &self.solved.residual {
            let v = eval_point(r, x)?;
            let vanishes = match v {
                Real::Exact(q) => q.is_zero(),
                Real::Approx(a) => x.base.is_archimedean() && a <= ARCH_SLACK,
            };
            if !vanishes {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Coordinates of a point for every variable, derived ones included, as
/// values `|T(x)|`.
pub fn coordinate_values(pe: &PresentationEval, x: &FiberPoint) -> Result<BTreeMap<String, Real>> {
    pe.alg
        .var_names()
        .into_iter()
        .map(|v| Ok((v.clone(), pe.eval(&Poly::var(&v), x)?)))
        .collect()
}
