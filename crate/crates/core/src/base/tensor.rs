use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{BaseNorm, BoundKind};
use crate::error::Result;
use crate::graded::{l1_norm, CoeffVector, GradedSet};
use crate::real::{Rational, Real};

/// `coeff · (left ⊗ right)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryTensor {
    pub coeff: Rational,
    pub left: CoeffVector,
    pub right: CoeffVector,
}

impl ElementaryTensor {
    pub fn new(coeff: Rational, left: CoeffVector, right: CoeffVector) -> Self {
        ElementaryTensor { coeff, left, right }
    }

    pub fn simple(left: CoeffVector, right: CoeffVector) -> Self {
        ElementaryTensor::new(Rational::one(), left, right)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorBound {
    pub value: Real,
    /// Which rewriting attained the minimum.
    pub representation: &'static str,
    pub terms: usize,
    pub kind: BoundKind,
}

fn cost(terms: &[ElementaryTensor], m: &GradedSet, n: &GradedSet, norm: &BaseNorm) -> Result<Real> {
    let mut acc = Real::zero();
    for t in terms {
        if t.coeff.is_zero() || t.left.is_zero() || t.right.is_zero() {
            continue;
        }
        let c = norm.eval(&t.coeff)?;
        acc = acc.add(&c.mul(&l1_norm(&t.left, m, norm)?).mul(&l1_norm(&t.right, n, norm)?));
    }
    Ok(acc)
}

/// Merge terms sharing a left factor: `Σ c_i m⊗n_i = m⊗(Σ c_i n_i)`.
fn group_left(terms: &[ElementaryTensor]) -> Vec<ElementaryTensor> {
    let mut groups: Vec<(CoeffVector, CoeffVector)> = Vec::new();
    for t in terms {
        let scaled = t.right.scale(&t.coeff);
        match groups.iter_mut().find(|(l, _)| *l == t.left) {
            Some((_, r)) => *r = r.plus(&scaled),
            None => groups.push((t.left.clone(), scaled)),
        }
    }
    groups
        .into_iter()
        .map(|(l, r)| ElementaryTensor::simple(l, r))
        .collect()
}

fn swap(terms: &[ElementaryTensor]) -> Vec<ElementaryTensor> {
    terms
        .iter()
        .map(|t| ElementaryTensor::new(t.coeff.clone(), t.right.clone(), t.left.clone()))
        .collect()
}

/// Expansion in the basis `{x}⊗{y}` of `R^(M×N)`.
fn basis_expansion(terms: &[ElementaryTensor]) -> Vec<ElementaryTensor> {
    let mut coeffs: BTreeMap<(String, String), Rational> = BTreeMap::new();
    for t in terms {
        for (x, a) in t.left.entries() {
            for (y, b) in t.right.entries() {
                *coeffs.entry((x.clone(), y.clone())).or_insert_with(Rational::zero) +=
                    &t.coeff * a * b;
            }
        }
    }
    coeffs
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((x, y), c)| {
            ElementaryTensor::new(
                c,
                CoeffVector::new([(x, Rational::one())]),
                CoeffVector::new([(y, Rational::one())]),
            )
        })
        .collect()
}

/// Upper bound for the projective tensor seminorm of `Σ t_i`: the smallest
/// `Σ |c_i|·‖m_i‖·‖n_i‖` among the supplied representation and a few
/// rewritings of it.
pub fn projective_tensor_bound(
    terms: &[ElementaryTensor],
    m: &GradedSet,
    n: &GradedSet,
    norm: &BaseNorm,
) -> Result<TensorBound> {
    let candidates: [(&'static str, Vec<ElementaryTensor>); 4] = [
        ("supplied", terms.to_vec()),
        ("grouped_left", group_left(terms)),
        ("grouped_right", swap(&group_left(&swap(terms)))),
        ("basis", basis_expansion(terms)),
    ];
    let mut best: Option<TensorBound> = None;
    for (name, rep) in candidates {
        let value = cost(&rep, m, n, norm)?;
        if best.as_ref().map_or(true, |b| value.lt(&b.value)) {
            best = Some(TensorBound {
                value,
                representation: name,
                terms: rep.len(),
                kind: BoundKind::UpperBound,
            });
        }
    }
    Ok(best.expect("at least one candidate"))
}
