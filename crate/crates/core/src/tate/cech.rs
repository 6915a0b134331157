use num_traits::One;
use serde::Serialize;

use super::linalg::{kernel, Coords, Echelon, SparseVec};
use super::IdealBasis;
use crate::affinoid::AffinoidPresentation;
use crate::base::BaseRing;
use crate::coverings::Covering;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::Rational;

/// Default truncation degree for exactness checks.
pub const DEFAULT_DEGREE_BOUND: u32 = 6;

/// A finitely presented ℚ-algebra with a completed ideal.
#[derive(Clone, Debug)]
pub struct Level {
    pub alg: AffinoidPresentation,
    pub ideal: IdealBasis,
}

impl Level {
    fn new(alg: AffinoidPresentation) -> Result<Self> {
        let ideal = IdealBasis::groebner(alg.var_names(), &alg.relations)?;
        Ok(Level { alg, ideal })
    }

    fn restrict(&self, f: &Poly) -> Result<Poly> {
        self.ideal.normal_form(f)
    }
}

/// `0 → A → Π O(Uᵢ) → Π_{i<j} O(Uᵢ ∩ Uⱼ)`, all maps by substitution.
#[derive(Clone, Debug)]
pub struct CechComplex {
    pub level0: Level,
    /// Member index in the covering, and its algebra.
    pub level1: Vec<(usize, Level)>,
    pub level2: Vec<((usize, usize), Level)>,
}

/// Assemble the Čech complex of a covering of a `Q_triv` algebra with all
/// radii equal to 1.
pub fn cech_complex(c: &Covering) -> Result<CechComplex> {
    if c.parent.base != BaseRing::QTriv {
        return Err(Error::Unsupported(format!("Čech complexes need base Q_triv, not {}", c.parent.base)));
    }
    let strict = |a: &AffinoidPresentation| -> Result<()> {
        if a.is_strict() {
            Ok(())
        } else {
            Err(Error::Unsupported("Čech complexes need all radii equal to 1".into()))
        }
    };
    strict(&c.parent)?;
    let level1 = c
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let a = m.algebra(&c.parent)?;
            strict(&a)?;
            Ok((i, Level::new(a)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut level2 = Vec::new();
    for i in 0..c.members.len() {
        for j in i + 1..c.members.len() {
            let a = c.members[i].intersect(&c.members[j]).algebra(&c.parent)?;
            level2.push(((i, j), Level::new(a)?));
        }
    }
    Ok(CechComplex {
        level0: Level::new(c.parent.clone())?,
        level1,
        level2,
    })
}

impl CechComplex {
    /// The complex of the family with member `k` and its intersections
    /// removed, which need not cover any more.
    pub fn without_member(&self, k: usize) -> CechComplex {
        let mut out = self.clone();
        out.level1.retain(|(i, _)| *i != k);
        out.level2.retain(|((i, j), _)| *i != k && *j != k);
        out
    }

    pub fn d0(&self, a: &Poly) -> Result<Vec<Poly>> {
        self.level1.iter().map(|(_, l)| l.restrict(a)).collect()
    }

    /// `(s_j − s_i)|Uᵢⱼ`; absent members contribute zero.
    pub fn d1(&self, s: &[Poly]) -> Result<Vec<Poly>> {
        let pick = |k: usize| self.level1.iter().position(|(i, _)| *i == k).map(|p| &s[p]);
        self.level2
            .iter()
            .map(|((i, j), l)| {
                let zero = Poly::zero();
                let d = pick(*j).unwrap_or(&zero) - pick(*i).unwrap_or(&zero);
                l.restrict(&d)
            })
            .collect()
    }

    /// Largest total degree of a member relation, at least 1.
    fn stretch(&self) -> u32 {
        self.level1
            .iter()
            .map(|(_, l)| l)
            .chain(self.level2.iter().map(|(_, l)| l))
            .flat_map(|l| l.alg.relations.iter().filter_map(Poly::degree))
            .max()
            .unwrap_or(1)
            .max(1)
    }
}

fn basis(ideal: &IdealBasis, d: u32) -> Result<Vec<Poly>> {
    Ok(ideal
        .standard_monomials(d)?
        .into_iter()
        .map(|m| Poly::term(Rational::one(), m))
        .collect())
}

fn combine(combo: &SparseVec, parts: &[Poly]) -> Poly {
    let mut out = Poly::zero();
    for (k, c) in combo {
        out += &parts[*k].scale(c);
    }
    out
}

fn tuple(ps: &[Poly]) -> String {
    format!("({})", ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Injectivity,
    Middle,
    Surjectivity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactStatus {
    Exact,
    Failure,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub status: ExactStatus,
    /// The failing stage, or the last stage checked.
    pub stage: Stage,
    pub degree_bound: u32,
    /// Degree at which the failure appeared.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.status == ExactStatus::Exact
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn fail(stage: Stage, bound: u32, degree: u32, witness: String) -> Self {
        ExactnessReport {
            status: ExactStatus::Failure,
            stage,
            degree_bound: bound,
            degree: Some(degree),
            witness: Some(witness),
        }
    }
}

/// Checks `0 → A → Π O(Uᵢ) → Π O(Uᵢⱼ) (→ 0 for two members)` on the
/// filtration by total degree of normal forms: for each `d ≤ D`, `d0` is
/// injective on `A_{≤d}`, every `d1`-cocycle of degree `≤ d` is the image
/// of some element of degree `≤ m·d`, and for two members every element of
/// degree `≤ d` of the intersection is hit from degree `≤ m·d`, where `m`
/// is the largest degree of a relation.
pub fn check_exactness(cx: &CechComplex, bound: u32) -> Result<ExactnessReport> {
    let m = cx.stretch();
    // d1 ∘ d0 = 0 on generators
    let mut gens = vec![Poly::one()];
    gens.extend(cx.level0.alg.var_names().iter().map(|v| Poly::var(v)));
    for g in &gens {
        if cx.d1(&cx.d0(g)?)?.iter().any(|p| !p.is_zero()) {
            return Ok(ExactnessReport::fail(Stage::Middle, bound, 0, g.to_string()));
        }
    }
    let n1 = cx.level1.len();
    for d in 0..=bound {
        // injectivity
        let a_basis = basis(&cx.level0.ideal, d)?;
        let mut coords = Coords::default();
        let images: Vec<SparseVec> = a_basis
            .iter()
            .map(|a| {
                let img = cx.d0(a)?;
                let parts: Vec<(usize, &Poly)> = img.iter().enumerate().collect();
                Ok(coords.vector(&parts))
            })
            .collect::<Result<_>>()?;
        if let Some(k) = kernel(images).first() {
            return Ok(ExactnessReport::fail(Stage::Injectivity, bound, d, combine(k, &a_basis).to_string()));
        }

        // middle: ker d1 ⊆ im d0
        let mut c1: Vec<(usize, Poly)> = Vec::new();
        for (p, (_, l)) in cx.level1.iter().enumerate() {
            c1.extend(basis(&l.ideal, d)?.into_iter().map(|b| (p, b)));
        }
        let embed = |p: usize, b: &Poly| -> Vec<Poly> {
            (0..n1).map(|q| if q == p { b.clone() } else { Poly::zero() }).collect()
        };
        let mut c2 = Coords::default();
        let d1_images: Vec<SparseVec> = c1
            .iter()
            .map(|(p, b)| {
                let img = cx.d1(&embed(*p, b))?;
                let parts: Vec<(usize, &Poly)> = img.iter().enumerate().collect();
                Ok(c2.vector(&parts))
            })
            .collect::<Result<_>>()?;
        let cocycles = kernel(d1_images);
        let mut c1_coords = Coords::default();
        let mut im = Echelon::default();
        for a in basis(&cx.level0.ideal, m * d)? {
            let img = cx.d0(&a)?;
            let parts: Vec<(usize, &Poly)> = img.iter().enumerate().collect();
            im.insert(c1_coords.vector(&parts));
        }
        for z in &cocycles {
            let mut s = vec![Poly::zero(); n1];
            for (k, c) in z {
                let (p, b) = &c1[*k];
                s[*p] += &b.scale(c);
            }
            let parts: Vec<(usize, &Poly)> = s.iter().enumerate().collect();
            if !im.spans(&c1_coords.vector(&parts)) {
                return Ok(ExactnessReport::fail(Stage::Middle, bound, d, tuple(&s)));
            }
        }

        // surjectivity onto the single intersection
        if let [(_, l2)] = cx.level2.as_slice() {
            let mut c2 = Coords::default();
            let mut span = Echelon::default();
            for (p, (_, l)) in cx.level1.iter().enumerate() {
                for b in basis(&l.ideal, m * d)? {
                    let img = cx.d1(&embed(p, &b))?;
                    span.insert(c2.vector(&[(0, &img[0])]));
                }
            }
            for t in basis(&l2.ideal, d)? {
                if !span.spans(&c2.vector(&[(0, &t)])) {
                    return Ok(ExactnessReport::fail(Stage::Surjectivity, bound, d, t.to_string()));
                }
            }
        }
    }
    Ok(ExactnessReport {
        status: ExactStatus::Exact,
        stage: if cx.level2.len() == 1 { Stage::Surjectivity } else { Stage::Middle },
        degree_bound: bound,
        degree: None,
        witness: None,
    })
}

/// Whether `A[Y]/(fY − 1)` and `O(D(1,1|f⁻¹,1))` agree: `Y ↦ 1/f` and back
/// are mutually inverse on generators.
pub fn localization_consistent(level: &Level, parent: &AffinoidPresentation, f: &Poly) -> Result<bool> {
    let names = level.alg.var_names();
    let new: Vec<&String> = names.iter().filter(|v| !parent.has_var(v)).collect();
    let [y] = new.as_slice() else {
        return Err(Error::Invalid("expected one adjoined variable".into()));
    };
    let mut vars = parent.var_names();
    let z = format!("{y}_loc");
    vars.push(z.clone());
    let mut rel = parent.relations.clone();
    rel.push(&(f * &Poly::var(&z)) - &Poly::one());
    let loc = IdealBasis::groebner(vars, &rel)?;
    let there = |g: &Poly| g.substitute(y, &Poly::var(&z));
    let back = |g: &Poly| g.substitute(&z, &Poly::var(y));
    for r in &level.alg.relations {
        if !loc.contains(&there(r))? {
            return Ok(false);
        }
    }
    for r in &rel {
        if !level.ideal.contains(&back(r))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverings::{laurent_covering, standard_covering};
    use crate::poly::test_poly as p;
    use crate::real::rational;

    fn qt() -> AffinoidPresentation {
        AffinoidPresentation::polydisc(BaseRing::QTriv, [("T", rational(1, 1))]).unwrap()
    }

    fn one() -> Rational {
        rational(1, 1)
    }

    #[test]
    fn two_member_sequence_shape() {
        let cx = cech_complex(&laurent_covering(&qt(), &[(p("T"), one())]).unwrap()).unwrap();
        assert_eq!(cx.level1[0].1.alg.relations, vec![p("X - T")]);
        assert_eq!(cx.level1[1].1.alg.relations, vec![p("T*Y - 1")]);
        assert_eq!(cx.level2.len(), 1);
        assert_eq!(cx.level2[0].1.alg.var_names(), vec!["T", "X", "Y"]);
        let cx = cech_complex(&standard_covering(&qt(), &[p("T"), p("1-T")], &[one(), one()], None).unwrap()).unwrap();
        assert_eq!((cx.level1.len(), cx.level2.len()), (2, 1));
        let zero = cech_complex(&laurent_covering(&qt(), &[]).unwrap()).unwrap();
        assert_eq!((zero.level1.len(), zero.level2.len()), (1, 0));
    }

    #[test]
    fn exact_examples() {
        for f in ["T", "T^2", "T-1"] {
            let cx = cech_complex(&laurent_covering(&qt(), &[(p(f), one())]).unwrap()).unwrap();
            let r = check_exactness(&cx, DEFAULT_DEGREE_BOUND).unwrap();
            assert!(r.is_exact(), "{f}: {r:?}");
        }
        let zero = cech_complex(&laurent_covering(&qt(), &[]).unwrap()).unwrap();
        assert!(check_exactness(&zero, 6).unwrap().is_exact());
        let cx = cech_complex(&standard_covering(&qt(), &[p("T"), p("1-T")], &[one(), one()], None).unwrap()).unwrap();
        assert!(check_exactness(&cx, 4).unwrap().is_exact());
    }

    #[test]
    fn broken_complex_fails() {
        let cx = cech_complex(&laurent_covering(&qt(), &[(p("T"), one())]).unwrap()).unwrap();
        let r = check_exactness(&cx.without_member(0), 6).unwrap();
        assert_eq!(r.status, ExactStatus::Failure);
        assert_eq!(r.stage, Stage::Middle);
        assert_eq!(r.witness.as_deref(), Some("(Y)"));
        // the outer member alone misses 1/T, the inner one is the whole disc
        assert!(check_exactness(&cx.without_member(1), 6).unwrap().is_exact());
        let json = r.to_json();
        assert!(json.contains("\"degree_bound\": 6"));
    }

    #[test]
    fn localization_level() {
        let cx = cech_complex(&laurent_covering(&qt(), &[(p("T^2+1"), one())]).unwrap()).unwrap();
        assert!(localization_consistent(&cx.level1[1].1, &qt(), &p("T^2+1")).unwrap());
    }

    #[test]
    fn rejects_other_bases() {
        let z = AffinoidPresentation::polydisc(BaseRing::ZTriv, [("T", rational(1, 1))]).unwrap();
        assert!(matches!(
            cech_complex(&laurent_covering(&z, &[(p("T"), one())]).unwrap()),
            Err(Error::Unsupported(_))
        ));
        let half = laurent_covering(&qt(), &[(p("T"), rational(1, 2))]).unwrap();
        assert!(matches!(cech_complex(&half), Err(Error::Unsupported(_))));
    }
}
