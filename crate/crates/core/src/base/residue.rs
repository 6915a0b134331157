use num_traits::Zero;
use serde::Serialize;

use super::{l1_poly_norm, BaseRing, BoundKind, PolyNorm, Radii};
use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};
use crate::real::{Rational, Real};
use crate::tate::IdealBasis;

/// Largest number of multiplier combinations the residue search visits.
pub const RESIDUE_SEARCH_CAP: u128 = 2_000_000;

/// `A/I` for `A` a polynomial ring with ℓ¹ grading at the given radii.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    pub base: BaseRing,
    pub radii: Radii,
    pub relations: Vec<Poly>,
}

impl QuotientPresentation {
    pub fn new(base: BaseRing, radii: Radii, relations: Vec<Poly>) -> Result<Self> {
        for r in &relations {
            base.check_poly(r)?;
            if let Some(v) = r.vars().into_iter().find(|v| !radii.contains_key(v)) {
                return Err(Error::Invalid(format!("relation {r} uses {v}, which has no radius")));
            }
        }
        Ok(QuotientPresentation {
            base,
            radii,
            relations,
        })
    }

    pub fn vars(&self) -> Vec<String> {
        self.radii.keys().cloned().collect()
    }
}

/// ℓ¹ norm of the ℚ-normal form of a class. This is one representative,
/// so it only bounds the residue seminorm from above and need not be
/// submultiplicative.
pub struct ResidueL1Norm {
    quotient: QuotientPresentation,
    ideal: IdealBasis,
}

impl ResidueL1Norm {
    pub fn new(quotient: QuotientPresentation) -> Result<Self> {
        let ideal = IdealBasis::groebner(quotient.vars(), &quotient.relations)?;
        Ok(ResidueL1Norm { quotient, ideal })
    }
}

impl PolyNorm for ResidueL1Norm {
    fn norm(&self, f: &Poly) -> Result<Real> {
        let nf = self.ideal.normal_form(f)?;
        let base = match self.quotient.base {
            BaseRing::ZArch if !nf.is_integral() => {
                return Err(Error::NotInBaseRing(nf.to_string()));
            }
            b => b,
        };
        Ok(Real::Exact(l1_poly_norm(&nf, &self.quotient.radii, base)?))
    }

    fn is_submultiplicative(&self) -> bool {
        false
    }
}

/// Size of the representative search box: multipliers of total degree
/// `<= degree` with integer coefficients in `[-height, height]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub degree: u32,
    pub height: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueBound {
    pub value: Real,
    pub representative: Poly,
    pub kind: BoundKind,
}

fn monomials_up_to(vars: &[String], degree: u32) -> Vec<Monomial> {
    fn rec(vars: &[String], idx: usize, left: u32, cur: &mut Vec<(String, u32)>, out: &mut Vec<Monomial>) {
        if idx == vars.len() {
            out.push(Monomial::from_pairs(cur.iter().cloned()));
            return;
        }
        for e in 0..=left {
            cur.push((vars[idx].clone(), e));
            rec(vars, idx + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, 0, degree, &mut Vec::new(), &mut out);
    out
}

/// Minimum ℓ¹ norm over representatives `a + Σ g_i·rel_i` with every `g_i`
/// in the search box. The result bounds the residue seminorm from above;
/// larger budgets give nested boxes and so never a larger bound.
pub fn residue_seminorm_bound(
    q: &QuotientPresentation,
    a: &Poly,
    budget: SearchBudget,
) -> Result<ResidueBound> {
    if budget.height == 0 {
        return Err(Error::EmptySearchBox(
            "height 0 admits only the zero multiplier".into(),
        ));
    }
    q.base.check_poly(a)?;
    let vars = q.vars();
    let shifts: Vec<Poly> = q
        .relations
        .iter()
        .flat_map(|r| {
            monomials_up_to(&vars, budget.degree)
                .into_iter()
                .map(move |m| r.mul_monomial(&Rational::from_integer(1.into()), &m))
        })
        .filter(|p| !p.is_zero())
        .collect();

    let width = 2 * budget.height as u128 + 1;
    let total = width
        .checked_pow(shifts.len() as u32)
        .filter(|t| *t <= RESIDUE_SEARCH_CAP)
        .ok_or(Error::SearchBoxTooLarge(
            width.saturating_pow(shifts.len().min(64) as u32),
        ))?;

    let h = budget.height as i64;
    let mut coeffs = vec![-h; shifts.len()];
    let mut best_value = l1_poly_norm(a, &q.radii, q.base)?;
    let mut best_rep = a.clone();
    for _ in 0..total {
        let mut rep = a.clone();
        for (c, s) in coeffs.iter().zip(&shifts) {
            if *c != 0 {
                rep += &s.scale(&Rational::from_integer((*c).into()));
            }
        }
        let v = l1_poly_norm(&rep, &q.radii, q.base)?;
        if v < best_value || (v == best_value && rep.num_terms() < best_rep.num_terms()) {
            best_value = v;
            best_rep = rep;
        }
        if best_value.is_zero() {
            break;
        }
        for c in coeffs.iter_mut() {
            if *c < h {
                *c += 1;
                break;
            }
            *c = -h;
        }
    }
    Ok(ResidueBound {
        value: Real::Exact(best_value),
        representative: best_rep,
        kind: BoundKind::UpperBound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::radii_from;
    use crate::poly::test_poly as p;
    use crate::real::rational;

    fn zq(rels: &[&str], base: BaseRing) -> QuotientPresentation {
        QuotientPresentation::new(
            base,
            radii_from([("T", rational(1, 1))]),
            rels.iter().map(|r| p(r)).collect(),
        )
        .unwrap()
    }

    /// Independent enumeration of `T + (c0 + c1 T)(T - 2)` for |c| <= 4.
    fn brute_force_t_mod_t_minus_2() -> Rational {
        let mut best: Option<i64> = None;
        for c0 in -4i64..=4 {
            for c1 in -4i64..=4 {
                // coefficients of 1, T, T^2
                let coeffs = [-2 * c0, 1 + c0 - 2 * c1, c1];
                let l1: i64 = coeffs.iter().map(|c| c.abs()).sum();
                best = Some(best.map_or(l1, |b| b.min(l1)));
            }
        }
        rational(best.unwrap(), 1)
    }

    #[test]
    fn zero_class() {
        let q = zq(&["T - 2"], BaseRing::ZArch);
        let b = residue_seminorm_bound(&q, &Poly::zero(), SearchBudget { degree: 1, height: 4 }).unwrap();
        assert!(b.value.is_zero());
    }

    #[test]
    fn class_of_t_modulo_t_minus_two() {
        let q = zq(&["T - 2"], BaseRing::ZArch);
        let b = residue_seminorm_bound(&q, &p("T"), SearchBudget { degree: 1, height: 4 }).unwrap();
        let expected = brute_force_t_mod_t_minus_2();
        assert_eq!(expected, rational(1, 1));
        assert_eq!(b.value.exact(), Some(&expected));
        assert!(b.value.le(&Real::int(2)));
        assert_eq!(b.kind, BoundKind::UpperBound);
    }

    #[test]
    fn class_of_t_modulo_t() {
        let q = zq(&["T"], BaseRing::QTriv);
        let b = residue_seminorm_bound(&q, &p("T"), SearchBudget { degree: 0, height: 1 }).unwrap();
        assert!(b.value.is_zero());
        assert!(b.representative.is_zero());
    }

    #[test]
    fn monotone_in_budget() {
        let q = zq(&["T^2 - 3*T + 1"], BaseRing::ZArch);
        let f = p("5*T^3 + 2");
        let mut prev: Option<Rational> = None;
        for (degree, height) in [(0, 1), (1, 1), (1, 2), (2, 2), (2, 3)] {
            let b = residue_seminorm_bound(&q, &f, SearchBudget { degree, height }).unwrap();
            let v = b.value.exact().unwrap().clone();
            if let Some(pv) = &prev {
                assert!(v <= *pv);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn empty_box() {
        let q = zq(&["T"], BaseRing::QTriv);
        assert!(matches!(
            residue_seminorm_bound(&q, &p("T"), SearchBudget { degree: 1, height: 0 }),
            Err(Error::EmptySearchBox(_))
        ));
    }
}
