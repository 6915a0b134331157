//! Gröbner bases over ℚ with Buchberger's algorithm.
//!
//! Polynomials are converted to a dense-exponent form over a fixed variable
//! list. The default order is graded reverse lexicographic in declaration
//! order; block orders are used for elimination.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};
use crate::real::Rational;

/// Default degree cap, overridden by `BERKRING_DEGREE_CAP`.
pub const DEFAULT_DEGREE_CAP: u32 = 48;
const BASIS_CAP: usize = 4000;
const PAIR_CAP: usize = 200_000;

pub fn degree_cap() -> u32 {
    std::env::var("BERKRING_DEGREE_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DEGREE_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    GrevLex,
    /// The first `k` variables form a block that dominates the rest; both
    /// blocks are compared by grevlex.
    Block(usize),
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match *self {
            MonomialOrder::GrevLex => grevlex(a, b),
            MonomialOrder::Block(k) => grevlex(&a[..k], &b[..k]).then_with(|| grevlex(&a[k..], &b[k..])),
        }
    }
}

type Exps = Vec<u32>;

/// Terms sorted in strictly decreasing monomial order.
#[derive(Clone, Debug, PartialEq)]
struct DPoly(Vec<(Exps, Rational)>);

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn sub_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl DPoly {
    fn zero() -> Self {
        DPoly(Vec::new())
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn lead(&self) -> &(Exps, Rational) {
        &self.0[0]
    }

    fn degree(&self) -> u32 {
        self.0.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    fn monic(mut self) -> Self {
        if let Some((_, c)) = self.0.first() {
            let inv = c.recip();
            for (_, a) in self.0.iter_mut() {
                *a *= &inv;
            }
        }
        self
    }

    /// `self - c·x^shift·other`.
    fn sub_scaled(&self, c: &Rational, shift: &[u32], other: &DPoly, order: MonomialOrder) -> DPoly {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut i = 0;
        let shifted: Vec<(Exps, Rational)> = other
            .0
            .iter()
            .map(|(e, a)| (add_exps(e, shift), a * c))
            .collect();
        let mut j = 0;
        while i < self.0.len() && j < shifted.len() {
            match order.cmp(&self.0[i].0, &shifted[j].0) {
                Ordering::Greater => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((shifted[j].0.clone(), -shifted[j].1.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = &self.0[i].1 - &shifted[j].1;
                    if !v.is_zero() {
                        out.push((self.0[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend(shifted[j..].iter().map(|(e, a)| (e.clone(), -a.clone())));
        DPoly(out)
    }

    fn add(&self, other: &DPoly, order: MonomialOrder) -> DPoly {
        let zero = vec![0u32; self.0.first().or(other.0.first()).map_or(0, |t| t.0.len())];
        self.sub_scaled(&-Rational::one(), &zero, other, order)
    }

    fn mul_term(&self, c: &Rational, shift: &[u32]) -> DPoly {
        DPoly(
            self.0
                .iter()
                .map(|(e, a)| (add_exps(e, shift), a * c))
                .collect(),
        )
    }
}

/// A generating set of an ideal in `ℚ[vars]`, optionally completed to a
/// reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct IdealBasis {
    vars: Vec<String>,
    order: MonomialOrder,
    basis: Vec<DPoly>,
    cofactors: Option<Vec<Vec<DPoly>>>,
    generators: Vec<Poly>,
    normalized: bool,
}

impl IdealBasis {
    pub fn new(vars: Vec<String>, generators: &[Poly]) -> Result<Self> {
        IdealBasis::with_order(vars, generators, MonomialOrder::GrevLex)
    }

    pub fn with_order(vars: Vec<String>, generators: &[Poly], order: MonomialOrder) -> Result<Self> {
        let mut seen = BTreeSet::new();
        if let Some(dup) = vars.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(Error::Invalid(format!("duplicate ring variable {dup}")));
        }
        let mut ideal = IdealBasis {
            vars,
            order,
            basis: Vec::new(),
            cofactors: None,
            generators: generators.to_vec(),
            normalized: false,
        };
        ideal.basis = generators
            .iter()
            .map(|g| ideal.to_dense(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(ideal)
    }

    /// Build and complete with the default caps.
    pub fn groebner(vars: Vec<String>, generators: &[Poly]) -> Result<Self> {
        let mut ideal = IdealBasis::new(vars, generators)?;
        ideal.complete()?;
        Ok(ideal)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn input_generators(&self) -> &[Poly] {
        &self.generators
    }

    fn to_dense(&self, f: &Poly) -> Result<DPoly> {
        let mut terms: Vec<(Exps, Rational)> = Vec::with_capacity(f.num_terms());
        for (m, c) in f.terms() {
            let e = m.aligned(&self.vars).ok_or_else(|| {
                Error::Invalid(format!("{f} uses a variable outside the ring {:?}", self.vars))
            })?;
            terms.push((e, c.clone()));
        }
        let order = self.order;
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Ok(DPoly(terms))
    }

    fn to_poly(&self, d: &DPoly) -> Poly {
        Poly::from_terms(d.0.iter().map(|(e, c)| (self.monomial(e), c.clone())))
    }

    fn monomial(&self, e: &[u32]) -> Monomial {
        Monomial::from_pairs(self.vars.iter().zip(e).map(|(v, k)| (v.clone(), *k)))
    }

    /// Run Buchberger's algorithm and interreduce.
    pub fn complete(&mut self) -> Result<()> {
        self.run_buchberger(false)
    }

    /// Complete while tracking how each basis element is combined from the
    /// input generators, which makes [`IdealBasis::express`] available.
    pub fn complete_with_cofactors(&mut self) -> Result<()> {
        self.run_buchberger(true)
    }

    fn run_buchberger(&mut self, track: bool) -> Result<()> {
        let order = self.order;
        let n = self.vars.len();
        let ngen = self.generators.len();
        let cap = degree_cap();
        let unit = |i: usize| -> Vec<DPoly> {
            (0..ngen)
                .map(|j| {
                    if i == j {
                        DPoly(vec![(vec![0; n], Rational::one())])
                    } else {
                        DPoly::zero()
                    }
                })
                .collect()
        };

        let mut basis: Vec<DPoly> = Vec::new();
        let mut cof: Vec<Vec<DPoly>> = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let d = self.to_dense(g)?;
            if d.is_zero() {
                continue;
            }
            if d.degree() > cap {
                return Err(Error::CapExceeded { what: "degree", cap: cap as usize });
            }
            let lc_inv = d.lead().1.recip();
            if track {
                cof.push(unit(i).iter().map(|c| c.mul_term(&lc_inv, &vec![0; n])).collect());
            }
            basis.push(d.monic());
        }

        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for j in 0..basis.len() {
            for i in 0..j {
                pairs.push((i, j));
            }
        }
        let mut processed = 0usize;
        while !pairs.is_empty() {
            // normal selection strategy: smallest lcm first
            let (idx, _) = pairs
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    let la = lcm(&basis[a.0].lead().0, &basis[a.1].lead().0);
                    let lb = lcm(&basis[b.0].lead().0, &basis[b.1].lead().0);
                    order.cmp(&la, &lb)
                })
                .expect("nonempty");
            let (i, j) = pairs.swap_remove(idx);
            processed += 1;
            if processed > PAIR_CAP {
                return Err(Error::CapExceeded { what: "pair", cap: PAIR_CAP });
            }
            let (li, lj) = (&basis[i].lead().0, &basis[j].lead().0);
            let l = lcm(li, lj);
            // product criterion
            if li.iter().zip(lj.iter()).all(|(a, b)| *a == 0 || *b == 0) {
                continue;
            }
            // chain criterion
            if (0..basis.len()).any(|k| {
                k != i
                    && k != j
                    && divides(&basis[k].lead().0, &l)
                    && !pairs.contains(&(i.min(k), i.max(k)))
                    && !pairs.contains(&(j.min(k), j.max(k)))
            }) {
                continue;
            }
            let si = sub_exps(&l, li);
            let sj = sub_exps(&l, lj);
            let one = Rational::one();
            let s = basis[i]
                .mul_term(&one, &si)
                .sub_scaled(&one, &sj, &basis[j], order);
            let mut s_cof: Option<Vec<DPoly>> = track.then(|| {
                (0..ngen)
                    .map(|g| {
                        cof[i][g]
                            .mul_term(&one, &si)
                            .sub_scaled(&one, &sj, &cof[j][g], order)
                    })
                    .collect()
            });
            let r = reduce_full(&s, &basis, order, s_cof.as_mut().map(|c| (c, &cof[..])));
            if r.is_zero() {
                continue;
            }
            if r.degree() > cap {
                return Err(Error::CapExceeded { what: "degree", cap: cap as usize });
            }
            let lc_inv = r.lead().1.recip();
            if let Some(c) = s_cof {
                cof.push(c.iter().map(|p| p.mul_term(&lc_inv, &vec![0; n])).collect());
            }
            basis.push(r.monic());
            if basis.len() > BASIS_CAP {
                return Err(Error::CapExceeded { what: "basis size", cap: BASIS_CAP });
            }
            let new = basis.len() - 1;
            for k in 0..new {
                pairs.push((k, new));
            }
        }

        // Minimalize: drop elements whose leading term is divisible by another's.
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..basis.len() {
            let lt = &basis[i].lead().0;
            let redundant = (0..basis.len()).any(|j| {
                j != i
                    && divides(&basis[j].lead().0, lt)
                    && (basis[j].lead().0 != *lt || j < i)
            });
            if !redundant {
                keep.push(i);
            }
        }
        let mut reduced: Vec<DPoly> = Vec::new();
        let mut reduced_cof: Vec<Vec<DPoly>> = Vec::new();
        for &i in &keep {
            let others: Vec<DPoly> = keep
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| basis[j].clone())
                .collect();
            let other_cof: Vec<Vec<DPoly>> = if track {
                keep.iter().filter(|&&j| j != i).map(|&j| cof[j].clone()).collect()
            } else {
                Vec::new()
            };
            let mut c = track.then(|| cof[i].clone());
            let r = reduce_full(&basis[i], &others, order, c.as_mut().map(|c| (c, &other_cof[..])));
            reduced.push(r);
            if let Some(c) = c {
                reduced_cof.push(c);
            }
        }
        let mut idx: Vec<usize> = (0..reduced.len()).collect();
        idx.sort_by(|&a, &b| order.cmp(&reduced[a].lead().0, &reduced[b].lead().0));
        self.basis = idx.iter().map(|&i| reduced[i].clone()).collect();
        self.cofactors = track.then(|| idx.iter().map(|&i| reduced_cof[i].clone()).collect());
        self.normalized = true;
        Ok(())
    }

    fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::Invalid("ideal basis is not completed".into()))
        }
    }

    /// The canonical remainder of `f`; zero iff `f` is in the ideal.
    pub fn normal_form(&self, f: &Poly) -> Result<Poly> {
        self.require_normalized()?;
        let d = self.to_dense(f)?;
        Ok(self.to_poly(&reduce_full(&d, &self.basis, self.order, None)))
    }

    pub fn contains(&self, f: &Poly) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    pub fn is_unit_ideal(&self) -> Result<bool> {
        self.require_normalized()?;
        Ok(self.basis.iter().any(|g| g.lead().0.iter().all(|e| *e == 0)))
    }

    /// The reduced Gröbner basis.
    pub fn basis(&self) -> Result<Vec<Poly>> {
        self.require_normalized()?;
        Ok(self.basis.iter().map(|d| self.to_poly(d)).collect())
    }

    pub fn leading_monomials(&self) -> Result<Vec<Monomial>> {
        self.require_normalized()?;
        Ok(self.basis.iter().map(|d| self.monomial(&d.lead().0)).collect())
    }

    /// Express `f ∈ I` as `Σ a_i g_i` over the input generators. Requires
    /// [`IdealBasis::complete_with_cofactors`]; `None` if `f ∉ I`.
    pub fn express(&self, f: &Poly) -> Result<Option<Vec<Poly>>> {
        self.require_normalized()?;
        let cof = self
            .cofactors
            .as_ref()
            .ok_or_else(|| Error::Invalid("cofactors were not tracked".into()))?;
        let n = self.vars.len();
        let ngen = self.generators.len();
        let d = self.to_dense(f)?;
        // Reduce while recording quotients by basis element.
        let mut quotients = vec![DPoly::zero(); self.basis.len()];
        let mut p = d;
        let mut rem = DPoly::zero();
        while !p.is_zero() {
            let (lt, lc) = p.lead().clone();
            match self.basis.iter().position(|g| divides(&g.lead().0, &lt)) {
                Some(k) => {
                    let shift = sub_exps(&lt, &self.basis[k].lead().0);
                    let c = &lc / &self.basis[k].lead().1;
                    p = p.sub_scaled(&c, &shift, &self.basis[k], self.order);
                    let q = DPoly(vec![(shift, c)]);
                    quotients[k] = quotients[k].add(&q, self.order);
                }
                None => {
                    rem.0.push(p.0.remove(0));
                }
            }
        }
        if !rem.is_zero() {
            return Ok(None);
        }
        let mut out = vec![DPoly::zero(); ngen];
        for (k, q) in quotients.iter().enumerate() {
            for (g, o) in out.iter_mut().enumerate() {
                let prod = mul_dense(q, &cof[k][g], self.order, n);
                *o = o.add(&prod, self.order);
            }
        }
        Ok(Some(out.iter().map(|d| self.to_poly(d)).collect()))
    }

    /// Monomials of total degree `<= max_degree` that are not divisible by
    /// any leading monomial, in increasing order.
    pub fn standard_monomials(&self, max_degree: u32) -> Result<Vec<Monomial>> {
        self.require_normalized()?;
        let leads: Vec<&Exps> = self.basis.iter().map(|g| &g.lead().0).collect();
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.vars.len()];
        enumerate_monomials(&mut cur, 0, max_degree, &mut |e| {
            if !leads.iter().any(|l| divides(l, e)) {
                out.push(e.to_vec());
            }
        });
        let order = self.order;
        out.sort_by(|a, b| order.cmp(a, b));
        Ok(out.iter().map(|e| self.monomial(e)).collect())
    }
}

fn enumerate_monomials(cur: &mut Vec<u32>, idx: usize, budget: u32, f: &mut dyn FnMut(&[u32])) {
    if idx == cur.len() {
        f(cur);
        return;
    }
    for e in 0..=budget {
        cur[idx] = e;
        enumerate_monomials(cur, idx + 1, budget - e, f);
    }
    cur[idx] = 0;
}

fn mul_dense(a: &DPoly, b: &DPoly, order: MonomialOrder, n: usize) -> DPoly {
    let mut acc = DPoly::zero();
    let _ = n;
    for (e, c) in &a.0 {
        acc = acc.add(&b.mul_term(c, e), order);
    }
    acc
}

/// Full reduction of `f` by `g`; when `track` is given, the cofactor vector
/// of `f` is updated in step with every subtraction.
fn reduce_full(
    f: &DPoly,
    g: &[DPoly],
    order: MonomialOrder,
    mut track: Option<(&mut Vec<DPoly>, &[Vec<DPoly>])>,
) -> DPoly {
    let mut p = f.clone();
    let mut rem: Vec<(Exps, Rational)> = Vec::new();
    while !p.is_zero() {
        let (lt, lc) = p.lead().clone();
        match g.iter().position(|h| !h.is_zero() && divides(&h.lead().0, &lt)) {
            Some(k) => {
                let shift = sub_exps(&lt, &g[k].lead().0);
                let c = &lc / &g[k].lead().1;
                p = p.sub_scaled(&c, &shift, &g[k], order);
                if let Some((cof, gcof)) = track.as_mut() {
                    for (slot, gc) in cof.iter_mut().zip(gcof[k].iter()) {
                        *slot = slot.sub_scaled(&c, &shift, gc, order);
                    }
                }
            }
            None => {
                rem.push(p.0.remove(0));
            }
        }
    }
    DPoly(rem)
}
