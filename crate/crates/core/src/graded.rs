//! Finite ℝ₊-graded sets, maps between them, tensor gradings, free-module
//! norms and the ρ-filtration membership predicate.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::base::BaseNorm;
use crate::error::{Error, Result};
use crate::poly::Monomial;
use crate::real::{parse_rational, NormValue, Rational, Real};

/// Largest support for which [`rho_filter_membership`] runs.
pub const RHO_FILTER_CAP: usize = 12;

/// A finite set of labels, each carrying a nonnegative grade.
#[derive(Clone, Debug)]
pub struct GradedSet {
    elements: Vec<(String, Real)>,
}

impl GradedSet {
    pub fn new<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Real)>,
        S: Into<String>,
    {
        let elements: Vec<(String, Real)> =
            elements.into_iter().map(|(l, g)| (l.into(), g)).collect();
        for (i, (label, grade)) in elements.iter().enumerate() {
            let x = grade.to_f64();
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Invalid(format!("grade of {label} must be finite and >= 0")));
            }
            if elements[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::Invalid(format!("duplicate label {label}")));
            }
        }
        Ok(GradedSet { elements })
    }

    /// Convenience constructor from exact rational grades.
    pub fn from_rationals<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        GradedSet::new(elements.into_iter().map(|(l, q)| (l, Real::Exact(q))))
    }

    pub fn elements(&self) -> &[(String, Real)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn grade(&self, label: &str) -> Option<&Real> {
        self.elements.iter().find(|(l, _)| l == label).map(|(_, g)| g)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.grade(label).is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GradedSetJson::from(self)).expect("graded set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GradedSetJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct GradedSetJson {
    elements: Vec<GradedElementJson>,
}

#[derive(Serialize, Deserialize)]
struct GradedElementJson {
    label: String,
    grade: String,
}

impl From<&GradedSet> for GradedSetJson {
    fn from(x: &GradedSet) -> Self {
        GradedSetJson {
            elements: x
                .elements
                .iter()
                .map(|(label, g)| GradedElementJson {
                    label: label.clone(),
                    grade: g.to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<GradedSetJson> for GradedSet {
    type Error = Error;
    fn try_from(raw: GradedSetJson) -> Result<Self> {
        let mut elements = Vec::with_capacity(raw.elements.len());
        for e in raw.elements {
            let q = parse_rational(&e.grade)
                .ok_or_else(|| Error::Invalid(format!("bad grade {:?}", e.grade)))?;
            elements.push((e.label, Real::Exact(q)));
        }
        GradedSet::new(elements)
    }
}

/// A total map of labels from `source` into `target`.
#[derive(Clone, Debug)]
pub struct GradedMap {
    source: GradedSet,
    target: GradedSet,
    assignment: BTreeMap<String, String>,
}

impl GradedMap {
    pub fn new<I, A, B>(source: GradedSet, target: GradedSet, assignment: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let assignment: BTreeMap<String, String> = assignment
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        for (x, _) in source.elements() {
            let y = assignment
                .get(x)
                .ok_or_else(|| Error::Invalid(format!("map undefined on {x}")))?;
            if !target.contains(y) {
                return Err(Error::Invalid(format!("{x} maps to {y}, not a target label")));
            }
        }
        if let Some(extra) = assignment.keys().find(|k| !source.contains(k)) {
            return Err(Error::Invalid(format!("{extra} is not a source label")));
        }
        Ok(GradedMap {
            source,
            target,
            assignment,
        })
    }

    pub fn source(&self) -> &GradedSet {
        &self.source
    }

    pub fn target(&self) -> &GradedSet {
        &self.target
    }

    pub fn apply(&self, label: &str) -> Option<&str> {
        self.assignment.get(label).map(String::as_str)
    }

    fn pairs(&self) -> impl Iterator<Item = (&Real, &Real)> {
        self.source.elements().iter().map(|(x, gx)| {
            let y = &self.assignment[x];
            (gx, self.target.grade(y).expect("validated"))
        })
    }
}

/// `inf{C : |f(x)| <= C|x|}`, i.e. the max of `|f(x)|/|x|` with `0/0 = 0`
/// and `c/0 = inf`.
pub fn operator_norm(f: &GradedMap) -> NormValue {
    let mut best = Real::zero();
    for (gx, gy) in f.pairs() {
        if gx.is_zero() {
            if gy.is_zero() {
                continue;
            }
            return NormValue::Infinite;
        }
        let ratio = gy.div(gx).expect("nonzero");
        best = best.max(ratio);
    }
    NormValue::Finite(best)
}

#[derive(Clone, Debug)]
pub enum MapClass {
    Graded,
    Contracting,
    Bounded(Real),
    Unbounded,
}

pub fn classify_map(f: &GradedMap) -> MapClass {
    if f.pairs().all(|(gx, gy)| gx.approx_eq(gy)) {
        return MapClass::Graded;
    }
    match operator_norm(f) {
        NormValue::Infinite => MapClass::Unbounded,
        NormValue::Finite(c) if c.le(&Real::one()) => MapClass::Contracting,
        NormValue::Finite(c) => MapClass::Bounded(c),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TensorMode {
    Mult,
    PAdditive(f64),
    Max,
}

/// `r +_p s = (r^p + s^p)^(1/p)`, exact when the root is rational.
pub fn p_sum(r: &Real, s: &Real, p: f64) -> Real {
    if p.fract() == 0.0 && (1.0..=64.0).contains(&p) {
        return r.powf(p).add(&s.powf(p)).root(p as u32);
    }
    let (a, b) = (r.to_f64(), s.to_f64());
    let m = a.max(b);
    if m == 0.0 {
        return Real::zero();
    }
    Real::Approx(m * ((a / m).powf(p) + (b / m).powf(p)).powf(1.0 / p))
}

pub fn tensor_graded(x: &GradedSet, y: &GradedSet, mode: TensorMode) -> Result<GradedSet> {
    if let TensorMode::PAdditive(p) = mode {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::NonPositiveP(p));
        }
    }
    let mut out = Vec::with_capacity(x.len() * y.len());
    for (a, ga) in x.elements() {
        for (b, gb) in y.elements() {
            let g = match mode {
                TensorMode::Mult => ga.mul(gb),
                TensorMode::PAdditive(p) => p_sum(ga, gb, p),
                TensorMode::Max => ga.clone().max(gb.clone()),
            };
            out.push((format!("({a},{b})"), g));
        }
    }
    GradedSet::new(out)
}

/// A finitely supported coefficient vector `Σ a_x {x}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoeffVector {
    entries: BTreeMap<String, Rational>,
}

impl CoeffVector {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut v = CoeffVector::default();
        for (l, c) in entries {
            v.add(l.into(), c);
        }
        v
    }

    pub fn from_ints<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        CoeffVector::new(entries.into_iter().map(|(l, c)| (l, Rational::from_integer(c.into()))))
    }

    fn add(&mut self, label: String, c: Rational) {
        let e = self.entries.entry(label.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.entries.remove(&label);
        }
    }

    pub fn entries(&self) -> &BTreeMap<String, Rational> {
        &self.entries
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn plus(&self, other: &CoeffVector) -> CoeffVector {
        let mut out = self.clone();
        for (l, c) in &other.entries {
            out.add(l.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> CoeffVector {
        CoeffVector::new(self.entries.iter().map(|(l, c)| (l.clone(), c * r)))
    }

    /// `(f_* a)_y = Σ_{f(x) = y} a_x`.
    pub fn pushforward(&self, f: &GradedMap) -> Result<CoeffVector> {
        let mut out = CoeffVector::default();
        for (x, c) in &self.entries {
            let y = f
                .apply(x)
                .ok_or_else(|| Error::Invalid(format!("{x} not in the source of the map")))?;
            out.add(y.to_string(), c.clone());
        }
        Ok(out)
    }
}

fn graded_terms<'a>(
    a: &'a CoeffVector,
    x: &'a GradedSet,
    norm: &'a BaseNorm,
) -> impl Iterator<Item = Result<Real>> + 'a {
    a.entries().iter().map(move |(label, c)| {
        let g = x
            .grade(label)
            .ok_or_else(|| Error::Invalid(format!("{label} not in the graded set")))?;
        Ok(norm.eval(c)?.mul(g))
    })
}

/// `‖Σ a_x {x}‖₁ = Σ |a_x|·|x|`.
pub fn l1_norm(a: &CoeffVector, x: &GradedSet, norm: &BaseNorm) -> Result<Real> {
    graded_terms(a, x, norm).try_fold(Real::zero(), |acc, t| Ok(acc.add(&t?)))
}

/// `|a|_∞ = max |a_x|·|x|`.
pub fn linf_norm(a: &CoeffVector, x: &GradedSet, norm: &BaseNorm) -> Result<Real> {
    graded_terms(a, x, norm).try_fold(Real::zero(), |acc, t| Ok(acc.max(t?)))
}

/// Whether `|Σ_Z a_z| <= ρ · max_i |Σ_{Z_i} a_z|` for every subset `Z` of the
/// support and every partition `Z = ∐ Z_i`.
///
/// For each `Z` the binding partition is the one minimising the largest block
/// value; that minimum is found exactly by a subset dynamic program over ranks
/// of the `2^k` subset sums, which visits every partition implicitly.
pub fn rho_filter_membership(a: &CoeffVector, rho: &Real, norm: &BaseNorm) -> Result<bool> {
    let coeffs: Vec<&Rational> = a.entries().values().collect();
    let k = coeffs.len();
    if k > RHO_FILTER_CAP {
        return Err(Error::SupportTooLarge {
            size: k,
            cap: RHO_FILTER_CAP,
        });
    }
    let full = 1usize << k;
    let mut values: Vec<Real> = Vec::with_capacity(full);
    let mut sums: Vec<Rational> = vec![Rational::zero(); full];
    values.push(Real::zero());
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + coeffs[low];
        values.push(norm.eval(&sums[mask])?);
    }

    // Rank subset values so the dynamic program only compares integers.
    let mut order: Vec<usize> = (1..full).collect();
    order.sort_by(|&i, &j| values[i].cmp_slack(&values[j]));
    let mut rank = vec![0u32; full];
    let mut rep: Vec<usize> = Vec::new();
    for (pos, &m) in order.iter().enumerate() {
        if pos == 0 || !values[m].approx_eq(&values[order[pos - 1]]) {
            rep.push(m);
        }
        rank[m] = (rep.len() - 1) as u32;
    }

    // best[Z] = min over partitions of Z of the max block rank.
    let mut best = vec![u32::MAX; full];
    for mask in 1..full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        let mut b = u32::MAX;
        loop {
            let block = sub | low;
            let remaining = mask ^ block;
            let cand = if remaining == 0 {
                rank[block]
            } else {
                rank[block].max(best[remaining])
            };
            b = b.min(cand);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[mask] = b;
        let bound = rho.mul(&values[rep[b as usize]]);
        if !values[mask].le(&bound) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `‖X^α‖ = Π ρ_v^{α_v}`; the empty monomial has grading 1.
pub fn monomial_grading(alpha: &Monomial, radii: &BTreeMap<String, Rational>) -> Result<Rational> {
    let mut g = Rational::from_integer(1.into());
    for (v, e) in alpha.pairs() {
        let r = radii
            .get(v)
            .ok_or_else(|| Error::Invalid(format!("no radius for variable {v}")))?;
        g *= num_traits::pow(r.clone(), *e as usize);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseRing;
    use crate::real::rational;

    fn set(elems: &[(&str, i64)]) -> GradedSet {
        GradedSet::from_rationals(elems.iter().map(|(l, g)| (*l, rational(*g, 1)))).unwrap()
    }

    fn arch() -> BaseNorm {
        BaseNorm::new(BaseRing::ZArch)
    }

    #[test]
    fn operator_norm_examples() {
        let a2 = set(&[("a", 2)]);
        let id = GradedMap::new(a2.clone(), a2, [("a", "a")]).unwrap();
        assert!(operator_norm(&id).finite().unwrap().approx_eq(&Real::one()));

        let f = GradedMap::new(set(&[("a", 1)]), set(&[("b", 3)]), [("a", "b")]).unwrap();
        assert!(operator_norm(&f).finite().unwrap().approx_eq(&Real::int(3)));

        let g = GradedMap::new(set(&[("a", 0)]), set(&[("b", 1)]), [("a", "b")]).unwrap();
        assert!(!operator_norm(&g).is_finite());

        let z = GradedMap::new(set(&[("a", 0)]), set(&[("b", 0)]), [("a", "b")]).unwrap();
        assert!(operator_norm(&z).finite().unwrap().is_zero());
    }

    #[test]
    fn classification_examples() {
        let f = GradedMap::new(set(&[("a", 2)]), set(&[("b", 2)]), [("a", "b")]).unwrap();
        assert!(matches!(classify_map(&f), MapClass::Graded));
        let f = GradedMap::new(set(&[("a", 2)]), set(&[("b", 1)]), [("a", "b")]).unwrap();
        assert!(matches!(classify_map(&f), MapClass::Contracting));
        let f = GradedMap::new(set(&[("a", 0)]), set(&[("b", 1)]), [("a", "b")]).unwrap();
        assert!(matches!(classify_map(&f), MapClass::Unbounded));
        let f = GradedMap::new(set(&[("a", 1)]), set(&[("b", 5)]), [("a", "b")]).unwrap();
        match classify_map(&f) {
            MapClass::Bounded(c) => assert!(c.approx_eq(&Real::int(5))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn map_validation() {
        assert!(GradedMap::new(set(&[("a", 1)]), set(&[("b", 1)]), [("a", "c")]).is_err());
        assert!(GradedMap::new(set(&[("a", 1), ("x", 1)]), set(&[("b", 1)]), [("a", "b")]).is_err());
        assert!(GradedSet::from_rationals([("a", rational(-1, 1))]).is_err());
        assert!(GradedSet::from_rationals([("a", rational(1, 1)), ("a", rational(2, 1))]).is_err());
    }

    #[test]
    fn tensor_examples() {
        let t = tensor_graded(&set(&[("a", 2)]), &set(&[("b", 3)]), TensorMode::Mult).unwrap();
        assert_eq!(t.grade("(a,b)").unwrap().exact(), Some(&rational(6, 1)));
        let t = tensor_graded(&set(&[("a", 3)]), &set(&[("b", 4)]), TensorMode::PAdditive(2.0))
            .unwrap();
        assert_eq!(t.grade("(a,b)").unwrap().exact(), Some(&rational(5, 1)));
        let t = tensor_graded(&set(&[("a", 2)]), &set(&[("b", 3)]), TensorMode::Max).unwrap();
        assert_eq!(t.grade("(a,b)").unwrap().exact(), Some(&rational(3, 1)));
        assert!(matches!(
            tensor_graded(&set(&[("a", 2)]), &set(&[("b", 3)]), TensorMode::PAdditive(0.0)),
            Err(Error::NonPositiveP(_))
        ));
        let t = tensor_graded(&set(&[("a", 1)]), &set(&[("b", 1)]), TensorMode::PAdditive(0.5))
            .unwrap();
        assert!(t.grade("(a,b)").unwrap().approx_eq(&Real::int(4)));
    }

    #[test]
    fn module_norm_examples() {
        let x = set(&[("x", 1), ("y", 1)]);
        let a = CoeffVector::from_ints([("x", 3), ("y", 2)]);
        assert_eq!(l1_norm(&a, &x, &arch()).unwrap().exact(), Some(&rational(5, 1)));
        let triv = BaseNorm::new(BaseRing::ZTriv);
        assert_eq!(l1_norm(&a, &x, &triv).unwrap().exact(), Some(&rational(2, 1)));
        let x2 = set(&[("x", 2)]);
        let b = CoeffVector::from_ints([("x", 3)]);
        assert_eq!(l1_norm(&b, &x2, &arch()).unwrap().exact(), Some(&rational(6, 1)));

        assert_eq!(linf_norm(&a, &x, &arch()).unwrap().exact(), Some(&rational(3, 1)));
        let zero = CoeffVector::default();
        assert!(linf_norm(&zero, &x, &arch()).unwrap().is_zero());
        let x3 = set(&[("x", 4), ("y", 1)]);
        let c = CoeffVector::from_ints([("x", 1), ("y", 5)]);
        assert_eq!(linf_norm(&c, &x3, &arch()).unwrap().exact(), Some(&rational(5, 1)));
    }

    #[test]
    fn rho_filter_counterexample_triples() {
        let two = Real::int(2);
        let v = |t: [i64; 3]| CoeffVector::from_ints([("1", t[0]), ("2", t[1]), ("3", t[2])]);
        assert!(rho_filter_membership(&v([1, 1, 2]), &two, &arch()).unwrap());
        assert!(rho_filter_membership(&v([0, 0, -1]), &two, &arch()).unwrap());
        assert!(!rho_filter_membership(&v([1, 1, 1]), &two, &arch()).unwrap());
    }

    #[test]
    fn rho_filter_cap() {
        let a = CoeffVector::from_ints((0..13).map(|i| (format!("x{i}"), 1)));
        assert!(matches!(
            rho_filter_membership(&a, &Real::int(2), &arch()),
            Err(Error::SupportTooLarge { size: 13, .. })
        ));
    }

    #[test]
    fn monomial_grading_examples() {
        let radii: BTreeMap<String, Rational> = [
            ("T".to_string(), rational(3, 1)),
            ("X".to_string(), rational(2, 1)),
            ("Y".to_string(), rational(1, 2)),
        ]
        .into_iter()
        .collect();
        let t2 = Monomial::from_pairs([("T", 2)]);
        assert_eq!(monomial_grading(&t2, &radii).unwrap(), rational(9, 1));
        assert_eq!(monomial_grading(&Monomial::one(), &radii).unwrap(), rational(1, 1));
        let xy2 = Monomial::from_pairs([("X", 1), ("Y", 2)]);
        assert_eq!(monomial_grading(&xy2, &radii).unwrap(), rational(1, 2));
    }

    #[test]
    fn json_round_trip() {
        let x = GradedSet::from_rationals([("a", rational(1, 2)), ("b", rational(3, 1))]).unwrap();
        let text = x.to_json();
        assert_eq!(text, r#"{"elements":[{"label":"a","grade":"1/2"},{"label":"b","grade":"3"}]}"#);
        let y = GradedSet::from_json(&text).unwrap();
        assert_eq!(y.grade("a").unwrap().exact(), Some(&rational(1, 2)));
    }
}
