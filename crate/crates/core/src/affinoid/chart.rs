use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};
use crate::real::{rational, Rational, Real};
use crate::spectrum::{eval_point, primes_up_to, Coordinate, FiberPoint, SpectrumPoint};

/// A Laurent polynomial in one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    pub var: String,
    terms: BTreeMap<i32, Rational>,
}

impl LaurentPoly {
    pub fn new<I: IntoIterator<Item = (i32, Rational)>>(var: &str, terms: I) -> Self {
        let mut out = BTreeMap::new();
        for (k, c) in terms {
            *out.entry(k).or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        LaurentPoly {
            var: var.to_string(),
            terms: out,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// `f(1/Y)` written in the variable `Y`.
    pub fn invert(&self, var: &str) -> LaurentPoly {
        LaurentPoly::new(var, self.terms.iter().map(|(k, c)| (-k, c.clone())))
    }

    /// `(g, m)` with `f = X^{-m}·g` and `g` a polynomial.
    pub fn cleared(&self) -> (Poly, u32) {
        let m = self.terms.keys().next().map_or(0, |k| (-k).max(0)) as u32;
        let g = Poly::from_terms(self.terms.iter().map(|(k, c)| {
            let e = (*k + m as i32) as u32;
            (Monomial::from_pairs([(self.var.as_str(), e)]), c.clone())
        }));
        (g, m)
    }

    pub fn eval(&self, x: &FiberPoint) -> Result<Real> {
        let (g, m) = self.cleared();
        let top = eval_point(&g, x)?;
        if m == 0 {
            return Ok(top);
        }
        let den = eval_point(&Poly::var(&self.var), x)?;
        top.div(&den.powf(m as f64))
            .ok_or_else(|| Error::Invalid(format!("{} vanishes at {x}", self.var)))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*{}", self.var)?,
                _ => write!(f, "{c}*{}^{k}", self.var)?,
            }
        }
        Ok(())
    }
}

fn on_unit_circle(x: &FiberPoint, var: &str) -> Result<bool> {
    let v = eval_point(&Poly::var(var), x)?;
    Ok(match v.exact() {
        Some(q) => q.is_one(),
        None => (v.to_f64() - 1.0).abs() <= 1e-9,
    })
}

/// The point of the second chart matching `x` under `X₁ = 1/X₀`.
pub fn matched_point(x: &FiberPoint, var0: &str, var1: &str) -> Result<FiberPoint> {
    let outside = || Error::OutsideCharts(x.to_string());
    let c = x
        .coords
        .get(var0)
        .ok_or_else(|| Error::MissingCoordinate(var0.to_string()))?;
    if !on_unit_circle(x, var0)? {
        return Err(outside());
    }
    let image = match c {
        Coordinate::Complex { .. } => {
            let Coordinate::Complex { re, im } = c else { unreachable!() };
            let z = Complex64::new(*re, *im);
            Coordinate::complex(z.inv())
        }
        Coordinate::Gauss { center, radius } => {
            if center.is_zero() {
                if !radius.is_one() {
                    return Err(outside());
                }
                Coordinate::gauss(Rational::zero(), Rational::one())
            } else {
                if *radius >= Rational::one() {
                    return Err(outside());
                }
                Coordinate::gauss(center.recip(), radius.clone())
            }
        }
    };
    let mut out = FiberPoint::new(x.base);
    for (v, c) in &x.coords {
        if v != var0 {
            out.coords.insert(v.clone(), c.clone());
        }
    }
    out.coords.insert(var1.to_string(), image);
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartReport {
    pub samples: usize,
    /// Largest `|a − b| / max(a, b)` over the samples.
    pub max_discrepancy: f64,
    pub rows: Vec<(String, f64, f64)>,
}

/// Compares `|f|` on the first chart of ℙ¹ with `|f(1/X₁)|` on the second
/// chart at matched points of the annulus `|X₀| = 1`.
pub fn chart_isometry_check(f: &LaurentPoly, var1: &str, samples: &[FiberPoint]) -> Result<ChartReport> {
    let g = f.invert(var1);
    let mut rows = Vec::with_capacity(samples.len());
    let mut worst = 0.0f64;
    for x in samples {
        let y = matched_point(x, &f.var, var1)?;
        let a = f.eval(x)?;
        let b = g.eval(&y)?;
        let d = match (a.exact(), b.exact()) {
            (Some(p), Some(q)) if p == q => 0.0,
            _ => {
                let (a, b) = (a.to_f64(), b.to_f64());
                let m = a.max(b);
                if m == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / m
                }
            }
        };
        worst = worst.max(d);
        rows.push((x.to_string(), a.to_f64(), b.to_f64()));
    }
    Ok(ChartReport {
        samples: samples.len(),
        max_discrepancy: worst,
        rows,
    })
}

/// Points of the annulus `|X| = 1`: `n` angles at each archimedean exponent
/// and the Gauss point, units and unit discs at the non-archimedean points.
pub fn annulus_samples(var: &str, n: usize) -> Vec<FiberPoint> {
    let mut out = Vec::new();
    for eps in [1.0, 0.5, 0.25] {
        for k in 0..n {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
            out.push(FiberPoint::new(SpectrumPoint::Archimedean { eps }).with(var, Coordinate::complex(z)));
        }
    }
    let mut bases = vec![SpectrumPoint::Trivial];
    for p in primes_up_to(5) {
        bases.push(SpectrumPoint::Padic { p, eps: 1.0 });
    }
    for b in bases {
        out.push(FiberPoint::new(b).with(var, Coordinate::gauss(Rational::zero(), Rational::one())));
        for c in [rational(1, 1), rational(-1, 1), rational(7, 1)] {
            if b.abs(&c).map_or(false, |v| v.exact().map_or(false, |q| q.is_one())) {
                out.push(FiberPoint::new(b).with(var, Coordinate::point(c.clone())));
                out.push(FiberPoint::new(b).with(var, Coordinate::gauss(c, rational(1, 2))));
            }
        }
    }
    out
}
