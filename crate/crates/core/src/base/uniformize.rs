use serde::Serialize;

use super::PolyNorm;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::Real;

pub const DEFAULT_BIT_BUDGET: u64 = 1 << 16;

/// Estimate of `|a|_u = lim |aⁿ|^{1/n}`.
#[derive(Clone, Debug, Serialize)]
pub struct UniformizationEstimate {
    /// `|a^n|^{1/n}` at `n = n_max`.
    pub value: Real,
    pub n: u64,
    /// `(n, |a^n|^{1/n})` along `n = 1, 2, 4, …, <= n_max`.
    pub dyadic: Vec<(u64, Real)>,
}

fn nth_root(v: &Real, n: u64) -> Real {
    if n <= u32::MAX as u64 {
        v.root(n as u32)
    } else {
        Real::Approx((v.ln() / n as f64).exp())
    }
}

/// Compute `|fⁿ|^{1/n}` along powers of two up to `n_max` and at `n_max`.
///
/// For norms that declare themselves submultiplicative the dyadic sequence
/// must be non-increasing; an increase is reported as an error since it means
/// the oracle is not a seminorm.
pub fn uniformization_estimate(
    f: &Poly,
    norm: &dyn PolyNorm,
    n_max: u64,
    bit_budget: u64,
) -> Result<UniformizationEstimate> {
    if n_max < 4 {
        return Err(Error::Invalid(format!("n_max must be >= 4, got {n_max}")));
    }
    let check = |p: &Poly| -> Result<()> {
        if p.max_coeff_bits() > bit_budget {
            Err(Error::BitBudgetExceeded(bit_budget))
        } else {
            Ok(())
        }
    };

    let mut dyadic = Vec::new();
    // squares[k] = f^(2^k)
    let mut squares = vec![f.clone()];
    let mut n = 1u64;
    loop {
        let cur = squares.last().expect("nonempty");
        let v = nth_root(&norm.norm(cur)?, n);
        if let Some((_, prev)) = dyadic.last() {
            if norm.is_submultiplicative() && !v.le(prev) {
                let (a, b): (f64, f64) = (v.to_f64(), prev.to_f64());
                if a > b * (1.0 + 1e-9) {
                    return Err(Error::NonMonotoneUniformization { n });
                }
            }
        }
        dyadic.push((n, v));
        if n * 2 > n_max {
            break;
        }
        let next = cur * cur;
        check(&next)?;
        squares.push(next);
        n *= 2;
    }

    let value = if n == n_max {
        dyadic.last().expect("nonempty").1.clone()
    } else {
        let mut acc = Poly::one();
        for (k, sq) in squares.iter().enumerate() {
            if (n_max >> k) & 1 == 1 {
                acc = &acc * sq;
                check(&acc)?;
            }
        }
        nth_root(&norm.norm(&acc)?, n_max)
    };
    Ok(UniformizationEstimate {
        value,
        n: n_max,
        dyadic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{radii_from, BaseRing, L1Norm, QuotientPresentation, ResidueL1Norm};
    use crate::poly::test_poly as p;
    use crate::real::rational;

    #[test]
    fn nilpotent_class_uniformizes_to_zero() {
        let q = QuotientPresentation::new(
            BaseRing::QTriv,
            radii_from([("T", rational(1, 1))]),
            vec![p("T^2")],
        )
        .unwrap();
        let norm = ResidueL1Norm::new(q).unwrap();
        let est = uniformization_estimate(&p("T"), &norm, 8, DEFAULT_BIT_BUDGET).unwrap();
        assert!(est.value.is_zero());
        assert!(est.value.is_exact());
        assert!(est.dyadic[1].1.is_zero());
    }

    #[test]
    fn already_power_multiplicative() {
        let norm = L1Norm::new(BaseRing::ZArch, Default::default());
        let est = uniformization_estimate(&p("2"), &norm, 64, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(est.value.exact(), Some(&rational(2, 1)));
        for (_, v) in &est.dyadic {
            assert_eq!(v.exact(), Some(&rational(2, 1)));
        }
        let triv = L1Norm::new(BaseRing::ZTriv, Default::default());
        let est = uniformization_estimate(&p("-6"), &triv, 16, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(est.value.exact(), Some(&rational(1, 1)));
    }

    #[test]
    fn binomial_l1() {
        let norm = L1Norm::new(BaseRing::ZArch, radii_from([("T", rational(1, 1))]));
        let est = uniformization_estimate(&p("1+T"), &norm, 32, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(est.value.exact(), Some(&rational(2, 1)));
        let est = uniformization_estimate(&p("1+T"), &norm, 12, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(est.value.exact(), Some(&rational(2, 1)));
        assert_eq!(est.dyadic.len(), 4);
    }

    #[test]
    fn budget_and_preconditions() {
        let norm = L1Norm::new(BaseRing::ZArch, radii_from([("T", rational(1, 1))]));
        assert!(matches!(
            uniformization_estimate(&p("3+5*T"), &norm, 64, 20),
            Err(Error::BitBudgetExceeded(20))
        ));
        assert!(uniformization_estimate(&p("T"), &norm, 3, DEFAULT_BIT_BUDGET).is_err());
    }

    #[test]
    fn dyadic_sequence_non_increasing() {
        let norm = L1Norm::new(BaseRing::ZArch, radii_from([("T", rational(1, 1))]));
        let est = uniformization_estimate(&p("1 - T + 2*T^2"), &norm, 64, DEFAULT_BIT_BUDGET).unwrap();
        for w in est.dyadic.windows(2) {
            assert!(w[1].1.to_f64() <= w[0].1.to_f64() * (1.0 + 1e-12));
        }
    }
}
