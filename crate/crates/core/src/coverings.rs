//! Standard and Laurent coverings, their refinements, and pointwise checks.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affinoid::{
    rational_domain_algebra_named, validate_unit_ideal, AffinoidPresentation, DomainPair, DomainTest,
    RationalDomainSpec, UnitIdeal,
};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::{rational, Rational, Real};
use crate::spectrum::{inf_max, Coordinate, Density, FiberPoint, InfMaxEstimate};
use crate::tate::IdealBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoveringKind {
    Standard,
    Laurent,
    Custom,
}

/// One rational domain with names for the variables it adjoins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub spec: RationalDomainSpec,
    pub names: Vec<String>,
}

/// An intersection of rational domains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub conditions: Vec<Condition>,
    /// `μᵢ = ±1` per generator pair, for Laurent members.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub signs: Vec<i8>,
}

impl Member {
    pub fn whole() -> Self {
        Member {
            conditions: Vec::new(),
            signs: Vec::new(),
        }
    }

    pub fn algebra(&self, parent: &AffinoidPresentation) -> Result<AffinoidPresentation> {
        let mut a = parent.clone();
        for c in &self.conditions {
            let fresh: Vec<String> = c.names.iter().filter(|n| !a.has_var(n)).cloned().collect();
            if fresh.len() == c.names.len() {
                a = rational_domain_algebra_named(&a, &c.spec, &c.names)?;
            } else if !fresh.is_empty() {
                return Err(Error::Invalid(format!("condition variables {:?} partially present", c.names)));
            }
        }
        Ok(a)
    }

    /// The algebra of the intersection with another member; conditions
    /// with the same variable names are shared.
    pub fn intersect(&self, other: &Member) -> Member {
        let mut conditions = self.conditions.clone();
        for c in &other.conditions {
            if !conditions.iter().any(|d| d.names == c.names) {
                conditions.push(c.clone());
            }
        }
        Member {
            conditions,
            signs: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub parent: AffinoidPresentation,
    pub kind: CoveringKind,
    pub members: Vec<Member>,
    pub generators: Vec<DomainPair>,
}

impl Covering {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("covering serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Covering = serde_json::from_str(text)?;
        if c.members.is_empty() {
            return Err(Error::Invalid("a covering needs a member".into()));
        }
        Ok(c)
    }

    pub fn whole(parent: &AffinoidPresentation) -> Self {
        Covering {
            parent: parent.clone(),
            kind: CoveringKind::Custom,
            members: vec![Member::whole()],
            generators: Vec::new(),
        }
    }

    pub fn member_algebras(&self) -> Result<Vec<AffinoidPresentation>> {
        self.members.iter().map(|m| m.algebra(&self.parent)).collect()
    }

    /// `membership[k][i]`: whether point `k` lies in member `i`.
    pub fn membership(&self, points: &[FiberPoint]) -> Result<Vec<Vec<bool>>> {
        let test = DomainTest::new(&self.parent);
        points
            .par_iter()
            .map(|x| {
                self.members
                    .iter()
                    .map(|m| contains(&test, m, x))
                    .collect::<Result<Vec<bool>>>()
            })
            .collect()
    }
}

fn contains(test: &DomainTest, m: &Member, x: &FiberPoint) -> Result<bool> {
    for c in &m.conditions {
        if !test.contains(x, &c.spec)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_pairs(fs: &[Poly], rhos: &[Rational]) -> Result<()> {
    if fs.len() != rhos.len() {
        return Err(Error::Invalid(format!("{} functions but {} radii", fs.len(), rhos.len())));
    }
    if let Some(r) = rhos.iter().find(|r| **r <= Rational::zero()) {
        return Err(Error::Invalid(format!("radius {r} must be positive")));
    }
    Ok(())
}

/// Members `D(fᵢ,ρᵢ | f₀,ρ₀, …, f̂ᵢ, …, fₙ,ρₙ)`; member `i` adjoins
/// `U{i}_{j} = f_j/f_i`.
pub fn standard_covering(
    parent: &AffinoidPresentation,
    fs: &[Poly],
    rhos: &[Rational],
    certificate: Option<&[Poly]>,
) -> Result<Covering> {
    check_pairs(fs, rhos)?;
    if fs.is_empty() {
        return Err(Error::Invalid("a standard covering needs a generator".into()));
    }
    match validate_unit_ideal(parent, fs, certificate)?.status {
        UnitIdeal::True => {}
        UnitIdeal::False => return Err(Error::NotUnitIdeal),
        UnitIdeal::Indeterminate => return Err(Error::UnitIdealIndeterminate),
    }
    let members = (0..fs.len())
        .map(|i| {
            let mut pairs = vec![(fs[i].clone(), rhos[i].clone())];
            let mut names = Vec::new();
            for j in (0..fs.len()).filter(|&j| j != i) {
                pairs.push((fs[j].clone(), rhos[j].clone()));
                names.push(format!("U{i}_{j}"));
            }
            let mut spec = RationalDomainSpec::new(pairs)?;
            if let Some(cert) = certificate {
                let mut c = vec![cert[i].clone()];
                c.extend((0..fs.len()).filter(|&j| j != i).map(|j| cert[j].clone()));
                spec = spec.with_certificate(c);
            }
            Ok(Member {
                conditions: vec![Condition { spec, names }],
                signs: Vec::new(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Covering {
        parent: parent.clone(),
        kind: CoveringKind::Standard,
        members,
        generators: fs
            .iter()
            .zip(rhos)
            .map(|(f, rho)| DomainPair { f: f.clone(), rho: rho.clone() })
            .collect(),
    })
}

fn laurent_names(n: usize, k: usize, taken: &[String]) -> (String, String) {
    let (x, y) = if n == 1 {
        ("X".to_string(), "Y".to_string())
    } else {
        (format!("X{}", k + 1), format!("Y{}", k + 1))
    };
    let free = |stem: String| {
        let mut name = stem.clone();
        let mut i = 1;
        while taken.contains(&name) {
            name = format!("{stem}_{i}");
            i += 1;
        }
        name
    };
    (free(x), free(y))
}

/// `{|f| ≤ ρ}` adjoining `X = f`, or `{ρ ≤ |f|}` adjoining `Y = 1/f`;
/// the names avoid `taken`.
pub fn laurent_condition(
    f: &Poly,
    rho: &Rational,
    sign: i8,
    (n, k): (usize, usize),
    taken: &[String],
) -> Result<Condition> {
    let (x, y) = laurent_names(n, k, taken);
    let one = Rational::one();
    Ok(if sign > 0 {
        Condition {
            spec: RationalDomainSpec::new(vec![(Poly::one(), one), (f.clone(), rho.clone())])?,
            names: vec![x],
        }
    } else {
        Condition {
            spec: RationalDomainSpec::new(vec![(f.clone(), one), (Poly::one(), rho.recip())])?,
            names: vec![y],
        }
    })
}

/// The `2ⁿ` members `D(1,1 | f₁^{μ₁},ρ₁^{μ₁}, …)` over sign vectors `μ`.
/// Member `s` takes `μₖ = −1` exactly when bit `k` of `s` is set.
pub fn laurent_covering(parent: &AffinoidPresentation, pairs: &[(Poly, Rational)]) -> Result<Covering> {
    let n = pairs.len();
    if n > 20 {
        return Err(Error::Invalid(format!("{n} pairs give too many members")));
    }
    if let Some((_, r)) = pairs.iter().find(|(_, r)| *r <= Rational::zero()) {
        return Err(Error::Invalid(format!("radius {r} must be positive")));
    }
    let taken = parent.var_names();
    let mut members = Vec::with_capacity(1 << n);
    for s in 0..(1usize << n) {
        let signs: Vec<i8> = (0..n).map(|k| if s >> k & 1 == 1 { -1 } else { 1 }).collect();
        let conditions = pairs
            .iter()
            .zip(&signs)
            .enumerate()
            .map(|(k, ((f, rho), &mu))| laurent_condition(f, rho, mu, (n, k), &taken))
            .collect::<Result<Vec<_>>>()?;
        members.push(Member { conditions, signs });
    }
    Ok(Covering {
        parent: parent.clone(),
        kind: CoveringKind::Laurent,
        members,
        generators: pairs
            .iter()
            .map(|(f, rho)| DomainPair { f: f.clone(), rho: rho.clone() })
            .collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverCheck {
    pub ok: bool,
    pub points: usize,
    pub witness: Option<FiberPoint>,
}

/// Whether every point lies in some member.
pub fn check_is_covering(c: &Covering, points: &[FiberPoint]) -> Result<CoverCheck> {
    let table = c.membership(points)?;
    let uncovered: Vec<usize> = (0..points.len()).filter(|&k| !table[k].iter().any(|b| *b)).collect();
    let witness = uncovered
        .iter()
        .find(|&&k| points[k].coords.values().all(is_rigid))
        .or(uncovered.first())
        .map(|&k| points[k].clone());
    Ok(CoverCheck {
        ok: witness.is_none(),
        points: points.len(),
        witness,
    })
}

fn is_rigid(c: &Coordinate) -> bool {
    match c {
        Coordinate::Complex { .. } => true,
        Coordinate::Gauss { radius, .. } => radius.is_zero(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementCheck {
    pub ok: bool,
    pub points: usize,
    /// For each fine member, a coarse member containing its sampled points.
    pub assignment: Vec<Option<usize>>,
    /// A fine member with no coarse member, and a point of it outside the
    /// coarse member that contains most of its points.
    pub witness: Option<(usize, FiberPoint)>,
}

/// Whether every fine member sits inside some coarse member on the samples.
pub fn check_refinement(fine: &Covering, coarse: &Covering, points: &[FiberPoint]) -> Result<RefinementCheck> {
    if fine.parent != coarse.parent {
        return Err(Error::Invalid("coverings of different algebras".into()));
    }
    let tf = fine.membership(points)?;
    let tc = coarse.membership(points)?;
    let mut assignment = Vec::with_capacity(fine.members.len());
    let mut witness = None;
    for v in 0..fine.members.len() {
        let inside: Vec<usize> = (0..points.len()).filter(|&k| tf[k][v]).collect();
        let hits: Vec<usize> = (0..coarse.members.len())
            .map(|u| inside.iter().filter(|&&k| tc[k][u]).count())
            .collect();
        let found = hits.iter().position(|&h| h == inside.len());
        if found.is_none() && witness.is_none() {
            let best = (0..hits.len()).max_by_key(|&u| hits[u]).unwrap_or(0);
            let k = inside.iter().copied().find(|&k| !tc[k][best]).expect("some point escapes");
            witness = Some((v, points[k].clone()));
        }
        assignment.push(found);
    }
    Ok(RefinementCheck {
        ok: witness.is_none(),
        points: points.len(),
        assignment,
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalRefinement {
    /// `c` with `c⁻¹ < inf_x max ρᵢ⁻¹|fᵢ(x)|` on the samples.
    pub c: Real,
    #[serde(with = "crate::real::rational_str")]
    pub c_inv: Rational,
    pub estimate: InfMaxEstimate,
    pub laurent: Covering,
    /// Per Laurent member, the generators with `μᵢ = −1`.
    pub surviving: Vec<Vec<usize>>,
    /// How many times `c` was doubled.
    pub retries: u32,
}

const MAX_RETRIES: u32 = 8;

fn alpha(test: &DomainTest, gens: &[DomainPair], x: &FiberPoint) -> Result<Vec<Real>> {
    gens.iter()
        .map(|g| Ok(test.eval().eval(&g.f, x)?.mul_rational(&g.rho.recip())))
        .collect()
}

/// A rational at most `v`, with a power-of-two denominator when inexact.
fn rational_below(v: &Real) -> Rational {
    match v.exact() {
        Some(q) => q.clone(),
        None => {
            let scale = 1i64 << 40;
            let n = (v.to_f64() * scale as f64).floor() as i64;
            rational(n.max(1), scale)
        }
    }
}

/// Laurent covering generated by `{(fᵢ, c⁻¹ρᵢ)}` with `c = 2 / inf_max`.
/// If a sample has `α(x) ≤ c⁻¹`, `c` is doubled, up to 8 times.
pub fn refine_rational_to_laurent(c: &Covering, points: &[FiberPoint], density: &Density) -> Result<RationalRefinement> {
    if c.kind != CoveringKind::Standard {
        return Err(Error::Invalid("refinement needs a standard covering".into()));
    }
    let fs: Vec<Poly> = c.generators.iter().map(|g| g.f.clone()).collect();
    let rhos: Vec<Rational> = c.generators.iter().map(|g| g.rho.clone()).collect();
    let estimate = inf_max(&fs, &rhos, &c.parent, density)?;
    if estimate.value.is_zero() {
        return Err(Error::CommonZero(estimate.point.to_string()));
    }
    if fs.len() == 1 {
        return Ok(RationalRefinement {
            c: Real::Exact(rational(2, 1)).div(&estimate.value).expect("nonzero"),
            c_inv: rational_below(&estimate.value) / rational(2, 1),
            estimate,
            laurent: laurent_covering(&c.parent, &[])?,
            surviving: vec![vec![]],
            retries: 0,
        });
    }
    let test = DomainTest::new(&c.parent);
    let alphas: Vec<Real> = points
        .par_iter()
        .map(|x| Ok(alpha(&test, &c.generators, x)?.into_iter().fold(Real::zero(), Real::max)))
        .collect::<Result<_>>()?;
    let mut c_inv = rational_below(&estimate.value) / rational(2, 1);
    let mut retries = 0;
    while alphas.iter().any(|a| a.le(&Real::Exact(c_inv.clone()))) {
        if retries == MAX_RETRIES {
            return Err(Error::CommonZero(format!(
                "α(x) ≤ {c_inv} on a sample after {MAX_RETRIES} retries"
            )));
        }
        c_inv /= rational(2, 1);
        retries += 1;
    }
    let pairs: Vec<(Poly, Rational)> = fs.iter().cloned().zip(rhos.iter().map(|r| r * &c_inv)).collect();
    let laurent = laurent_covering(&c.parent, &pairs)?;
    let surviving = laurent
        .members
        .iter()
        .map(|m| (0..fs.len()).filter(|&i| m.signs[i] < 0).collect())
        .collect();
    Ok(RationalRefinement {
        c: Real::Exact(c_inv.recip()),
        c_inv,
        estimate,
        laurent,
        surviving,
        retries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SurvivorCheck {
    pub ok: bool,
    pub points: usize,
    pub witness: Option<(usize, FiberPoint)>,
}

/// On each Laurent member `V` and sampled `x ∈ V`, every eliminated index
/// has `ρᵢ⁻¹|fᵢ(x)| ≤ c⁻¹ < α(x)`.
pub fn check_surviving(r: &RationalRefinement, coarse: &Covering, points: &[FiberPoint]) -> Result<SurvivorCheck> {
    let test = DomainTest::new(&coarse.parent);
    let table = r.laurent.membership(points)?;
    let c_inv = Real::Exact(r.c_inv.clone());
    for (k, x) in points.iter().enumerate() {
        let a = alpha(&test, &coarse.generators, x)?;
        let top = a.iter().cloned().fold(Real::zero(), Real::max);
        for (v, m) in r.laurent.members.iter().enumerate() {
            if !table[k][v] {
                continue;
            }
            let eliminated_ok = (0..a.len()).filter(|&i| m.signs[i] > 0).all(|i| a[i].le(&c_inv));
            if !eliminated_ok || !c_inv.lt(&top) || r.surviving[v].is_empty() {
                return Ok(SurvivorCheck {
                    ok: false,
                    points: points.len(),
                    witness: Some((v, x.clone())),
                });
            }
        }
    }
    Ok(SurvivorCheck {
        ok: true,
        points: points.len(),
        witness: None,
    })
}

/// How `fᵢ` is known to be invertible in the parent algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitWitness {
    /// `g` with `fᵢ·g ≡ 1`.
    Inverse { g: Poly },
    /// A parent variable `Y` with `fᵢ·Y ≡ 1`.
    Variable { name: String },
}

impl UnitWitness {
    fn inverse(&self) -> Poly {
        match self {
            UnitWitness::Inverse { g } => g.clone(),
            UnitWitness::Variable { name } => Poly::var(name),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitRefinement {
    pub laurent: Covering,
    /// `(i, j)` for the pair `(fᵢfⱼ⁻¹, ρᵢρⱼ⁻¹)`.
    pub ratios: Vec<(usize, usize)>,
}

/// Laurent covering generated by `{(fᵢfⱼ⁻¹, ρᵢρⱼ⁻¹)}` for `i < j`.
pub fn refine_units_to_laurent(c: &Covering, witnesses: &[Option<UnitWitness>]) -> Result<UnitRefinement> {
    if c.kind != CoveringKind::Standard {
        return Err(Error::Invalid("refinement needs a standard covering".into()));
    }
    let n = c.generators.len();
    let ideal = IdealBasis::groebner(c.parent.var_names(), &c.parent.relations)?;
    let mut inverses = Vec::with_capacity(n);
    for i in 0..n {
        let w = witnesses
            .get(i)
            .and_then(|w| w.as_ref())
            .ok_or(Error::MissingUnitWitness(i))?;
        let g = w.inverse();
        let check = &(&c.generators[i].f * &g) - &Poly::one();
        if !ideal.contains(&check)? {
            return Err(Error::InvalidCertificate(format!(
                "({}) * ({g}) is not 1 in the algebra",
                c.generators[i].f
            )));
        }
        inverses.push(g);
    }
    let mut pairs = Vec::new();
    let mut ratios = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let gi = &c.generators[i];
            let gj = &c.generators[j];
            pairs.push((&gi.f * &inverses[j], &gi.rho / &gj.rho));
            ratios.push((i, j));
        }
    }
    Ok(UnitRefinement {
        laurent: laurent_covering(&c.parent, &pairs)?,
        ratios,
    })
}
