//! Points of the Berkovich spectra of `(ℤ,|·|∞)` and `(ℤ,|·|₀)`, fiber
//! points over them, sampling and sup/inf computations.

mod norm;
mod profile;
mod sample;

pub use norm::{inf_max, spectral_norm, InfMaxEstimate, SpectralNorm};
pub use profile::{emit_profile, BranchProfile, BranchSpec};
pub use sample::{sample_spectrum, Density};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::base::BaseRing;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::{ln_rational, padic_valuation, pow_rational, Rational, Real};

/// A point of `ℳ(ℤ,|·|∞)`. `Archimedean` only lies over `Z_arch`, and
/// over `Q_triv` only `Trivial` is bounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumPoint {
    Trivial,
    /// `|n|∞^ε`, `ε ∈ (0, 1]`.
    Archimedean { eps: f64 },
    /// `|n| = p^{-ε·v_p(n)}`, `ε > 0`.
    Padic { p: u64, eps: f64 },
    /// Trivial norm of `F_p`, the `ε → ∞` end of the `p`-adic branch.
    Residue { p: u64 },
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

impl SpectrumPoint {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectrumPoint::Trivial => Ok(()),
            SpectrumPoint::Archimedean { eps } if eps > 0.0 && eps <= 1.0 => Ok(()),
            SpectrumPoint::Archimedean { eps } => {
                Err(Error::Invalid(format!("archimedean exponent {eps} outside (0, 1]")))
            }
            SpectrumPoint::Padic { p, eps } if is_prime(p) && eps > 0.0 && eps.is_finite() => Ok(()),
            SpectrumPoint::Residue { p } if is_prime(p) => Ok(()),
            other => Err(Error::Invalid(format!("bad spectrum point {other}"))),
        }
    }

    pub fn lies_over(&self, base: BaseRing) -> bool {
        match self {
            SpectrumPoint::Trivial => true,
            SpectrumPoint::Archimedean { .. } => base == BaseRing::ZArch,
            SpectrumPoint::Padic { .. } | SpectrumPoint::Residue { .. } => base.is_integral(),
        }
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, SpectrumPoint::Archimedean { .. })
    }

    /// Branch label used in profiles and reports.
    pub fn branch(&self) -> String {
        match self {
            SpectrumPoint::Trivial => "trivial".into(),
            SpectrumPoint::Archimedean { .. } => "archimedean".into(),
            SpectrumPoint::Padic { p, .. } => format!("padic({p})"),
            SpectrumPoint::Residue { p } => format!("residue({p})"),
        }
    }

    /// `|q|` at this point.
    pub fn abs(&self, q: &Rational) -> Result<Real> {
        if q.is_zero() {
            return Ok(Real::zero());
        }
        Ok(match *self {
            SpectrumPoint::Trivial => Real::one(),
            SpectrumPoint::Archimedean { eps } => Real::Exact(q.abs()).powf(eps),
            SpectrumPoint::Padic { p, eps } => {
                let v = padic_valuation(q, p);
                let base = Rational::from_integer(p.into());
                let pv = if v >= 0 {
                    pow_rational(&base, v as u32).recip()
                } else {
                    pow_rational(&base, (-v) as u32)
                };
                Real::Exact(pv).powf(eps)
            }
            SpectrumPoint::Residue { p } => match padic_valuation(q, p) {
                0 => Real::one(),
                v if v > 0 => Real::zero(),
                _ => {
                    return Err(Error::NotInBaseRing(format!(
                        "{q} has {p} in its denominator"
                    )))
                }
            },
        })
    }
}

impl fmt::Display for SpectrumPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumPoint::Trivial => write!(f, "Trivial"),
            SpectrumPoint::Archimedean { eps } => write!(f, "Archimedean(eps={eps})"),
            SpectrumPoint::Padic { p, eps } => write!(f, "Padic(p={p}, eps={eps})"),
            SpectrumPoint::Residue { p } => write!(f, "Residue(p={p})"),
        }
    }
}

/// Fiber datum for one variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coordinate {
    Complex { re: f64, im: f64 },
    /// Gauss point of the disc of radius `radius` around `center`; radius 0
    /// is the type-1 point `center`.
    Gauss {
        #[serde(with = "crate::real::rational_str")]
        center: Rational,
        #[serde(with = "crate::real::rational_str")]
        radius: Rational,
    },
}

impl Coordinate {
    pub fn complex(z: Complex64) -> Self {
        Coordinate::Complex { re: z.re, im: z.im }
    }

    pub fn point(center: Rational) -> Self {
        Coordinate::Gauss {
            center,
            radius: Rational::zero(),
        }
    }

    pub fn gauss(center: Rational, radius: Rational) -> Self {
        Coordinate::Gauss { center, radius }
    }
}

/// A point of `ℳ(R[T₁..Tₙ])` over a point of the base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberPoint {
    pub base: SpectrumPoint,
    pub coords: BTreeMap<String, Coordinate>,
}

impl FiberPoint {
    pub fn new(base: SpectrumPoint) -> Self {
        FiberPoint {
            base,
            coords: BTreeMap::new(),
        }
    }

    pub fn with(mut self, var: &str, c: Coordinate) -> Self {
        self.coords.insert(var.to_string(), c);
        self
    }

    fn complex_coords(&self, vars: &[String]) -> Result<Vec<Complex64>> {
        vars.iter()
            .map(|v| match self.coords.get(v) {
                Some(Coordinate::Complex { re, im }) => Ok(Complex64::new(*re, *im)),
                Some(Coordinate::Gauss { center, radius }) if radius.is_zero() => {
                    Ok(Complex64::new(crate::real::rational_to_f64(center), 0.0))
                }
                Some(_) => Err(Error::Invalid(format!(
                    "{v} has a Gauss datum at an archimedean point"
                ))),
                None => Err(Error::MissingCoordinate(v.clone())),
            })
            .collect()
    }

    fn gauss_coords(&self, vars: &[String]) -> Result<Vec<(Rational, Rational)>> {
        vars.iter()
            .map(|v| match self.coords.get(v) {
                Some(Coordinate::Gauss { center, radius }) => Ok((center.clone(), radius.clone())),
                Some(_) => Err(Error::Invalid(format!(
                    "{v} has a complex coordinate at a non-archimedean point"
                ))),
                None => Err(Error::MissingCoordinate(v.clone())),
            })
            .collect()
    }
}

impl fmt::Display for FiberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for (v, c) in &self.coords {
            match c {
                Coordinate::Complex { re, im } => write!(f, " {v}={re}{im:+}i")?,
                Coordinate::Gauss { center, radius } if radius.is_zero() => write!(f, " {v}={center}")?,
                Coordinate::Gauss { center, radius } => write!(f, " {v}=gauss({center},{radius})")?,
            }
        }
        Ok(())
    }
}

/// Polynomial prepared for repeated floating evaluation in log space.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    pub vars: Vec<String>,
    /// `(exponents, ln|a|, sign(a))`.
    terms: Vec<(Vec<u32>, f64, f64)>,
}

impl CompiledPoly {
    pub fn new(f: &Poly) -> Self {
        let vars: Vec<String> = f.vars().into_iter().collect();
        Self::with_vars(f, vars)
    }

    pub fn with_vars(f: &Poly, vars: Vec<String>) -> Self {
        let terms = f
            .terms()
            .map(|(m, c)| {
                let e = m.aligned(&vars).expect("variables cover the polynomial");
                (e, ln_rational(&c.abs()), if c.is_negative() { -1.0 } else { 1.0 })
            })
            .collect();
        CompiledPoly { vars, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `ln |f(z)|`, `-∞` at zeros, stable for huge `|z|`.
    pub fn ln_abs(&self, z: &[Complex64]) -> f64 {
        let ln_r: Vec<f64> = z.iter().map(|w| w.norm().ln()).collect();
        let arg: Vec<f64> = z.iter().map(|w| w.arg()).collect();
        self.on_torus(&ln_r).ln_abs(&arg)
    }

    /// Restriction to the torus `|z_v| = exp(ln_r[v])`.
    pub fn on_torus(&self, ln_r: &[f64]) -> TorusSlice {
        let mut logs = Vec::with_capacity(self.terms.len());
        for (e, la, s) in &self.terms {
            let mut l = *la;
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    l += ek as f64 * ln_r[k];
                }
            }
            if l > f64::NEG_INFINITY {
                logs.push((e.clone(), l, *s));
            }
        }
        let m = logs.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        let terms: Vec<(Vec<u32>, f64)> = logs.into_iter().map(|(e, l, s)| (e, s * (l - m).exp())).collect();
        let mass = terms.iter().map(|t| t.1.abs()).sum();
        TorusSlice { m, mass, terms }
    }

    /// `max_α ln|a_α| + α·ln ρ`: log of the trivial Gauss value at radii
    /// `exp(ln_rho)` when every `|a_α|` is replaced by 1.
    pub fn ln_trivial_gauss(&self, ln_rho: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, _, _)| e.iter().zip(ln_rho).map(|(&k, l)| k as f64 * l).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A compiled polynomial on a fixed torus, as a function of the angles.
#[derive(Clone, Debug)]
pub struct TorusSlice {
    m: f64,
    mass: f64,
    /// `(exponents, signed weight)` with `f = e^m Σ w·e^{i⟨e,θ⟩}`.
    terms: Vec<(Vec<u32>, f64)>,
}

impl TorusSlice {
    /// `ln` of `|Σ w·e^{i⟨e,θ⟩}|² = ns`, shifted back by `m`.
    pub fn ln_from_norm_sqr(&self, ns: f64) -> f64 {
        if self.m == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        // cancellation down to rounding level counts as a zero
        let floor = 8.0 * f64::EPSILON * self.mass;
        if ns <= floor * floor {
            return f64::NEG_INFINITY;
        }
        self.m + 0.5 * ns.ln()
    }

    pub fn ln_abs(&self, theta: &[f64]) -> f64 {
        let units: Vec<Complex64> = theta.iter().map(|t| Complex64::from_polar(1.0, *t)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, w) in &self.terms {
            let z = e.iter().zip(&units).fold(Complex64::new(*w, 0.0), |z, (&k, u)| z * u.powu(k));
            acc += z;
        }
        self.ln_from_norm_sqr(acc.norm_sqr())
    }

    /// Largest `|Σ w·e^{i⟨e,θ⟩}|²` over the grid `θ_v = 2πk_v/N`, where
    /// `roots[j] = e^{2πij/N}` and `N` is a power of two, with its `k`.
    pub fn grid_max(&self, n: usize, roots: &[Complex64]) -> (f64, Vec<usize>) {
        let per = roots.len();
        let mask = per - 1;
        let w: Vec<f64> = self.terms.iter().map(|t| t.1).collect();
        let exps: Vec<usize> = self.terms.iter().flat_map(|t| t.0.iter().map(|&e| e as usize)).collect();
        let mut phase = vec![0usize; w.len()];
        let mut ks = vec![0usize; n];
        let (mut best, mut best_idx, mut idx) = (-1.0, 0usize, 0usize);
        loop {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in phase.iter().zip(&w) {
                acc += roots[j & mask] * *c;
            }
            let v = acc.norm_sqr();
            if v > best {
                (best, best_idx) = (v, idx);
            }
            idx += 1;
            let mut var = 0;
            loop {
                if var == n {
                    let k = (0..n).map(|v| best_idx / per.pow(v as u32) % per).collect();
                    return (best, k);
                }
                ks[var] += 1;
                for (t, ph) in phase.iter_mut().enumerate() {
                    *ph = ph.wrapping_add(exps[t * n + var]);
                }
                if ks[var] < per {
                    break;
                }
                ks[var] = 0;
                var += 1;
            }
        }
    }
}

/// Taylor coefficients of `f` at `center`: `f(center + h) = Σ b_α h^α`.
pub fn taylor_shift(f: &Poly, center: &BTreeMap<String, Rational>) -> Poly {
    let mut g = f.clone();
    for (v, a) in center {
        if !a.is_zero() && g.uses_var(v) {
            g = g.substitute(v, &(&Poly::var(v) + &Poly::constant(a.clone())));
        }
    }
    g
}

/// `|f(x)|`.
pub fn eval_point(f: &Poly, x: &FiberPoint) -> Result<Real> {
    if let Some(c) = f.as_constant() {
        return x.base.abs(&c);
    }
    let vars: Vec<String> = f.vars().into_iter().collect();
    match x.base {
        SpectrumPoint::Archimedean { eps } => {
            let z = x.complex_coords(&vars)?;
            let l = CompiledPoly::with_vars(f, vars).ln_abs(&z);
            Ok(if l == f64::NEG_INFINITY {
                Real::zero()
            } else {
                Real::Approx((eps * l).exp())
            })
        }
        _ => {
            let data = x.gauss_coords(&vars)?;
            let center: BTreeMap<String, Rational> = vars
                .iter()
                .cloned()
                .zip(data.iter().map(|(c, _)| c.clone()))
                .collect();
            let g = taylor_shift(f, &center);
            let mut best = Real::zero();
            for (m, b) in g.terms() {
                let mut w = Rational::one();
                for (v, e) in m.pairs() {
                    let k = vars.iter().position(|u| u == v).expect("variable listed");
                    w *= pow_rational(&data[k].1, *e);
                }
                if w.is_zero() {
                    continue;
                }
                let t = x.base.abs(b)?.mul_rational(&w);
                best = best.max(t);
            }
            Ok(best)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::test_poly as p;
    use crate::real::rational;

    #[test]
    fn spec_examples() {
        let x = FiberPoint::new(SpectrumPoint::Archimedean { eps: 1.0 })
            .with("T", Coordinate::complex(Complex64::new(0.0, 1.0)));
        assert!(eval_point(&p("T^2+1"), &x).unwrap().is_zero());
        let x = FiberPoint::new(SpectrumPoint::Padic { p: 2, eps: 1.0 });
        assert_eq!(eval_point(&p("6"), &x).unwrap().exact(), Some(&rational(1, 2)));
        let x = FiberPoint::new(SpectrumPoint::Trivial)
            .with("T", Coordinate::gauss(rational(0, 1), rational(1, 2)));
        assert_eq!(eval_point(&p("T"), &x).unwrap().exact(), Some(&rational(1, 2)));
    }

    #[test]
    fn gauss_point_off_center() {
        // at center 1, radius 1/3 over Q_triv: T^2 - 1 = h^2 + 2h, so max(1/9, 1/3)
        let x = FiberPoint::new(SpectrumPoint::Trivial)
            .with("T", Coordinate::gauss(rational(1, 1), rational(1, 3)));
        assert_eq!(eval_point(&p("T^2-1"), &x).unwrap().exact(), Some(&rational(1, 3)));
        // 2-adic: 2h has value 1/2 · 1/3
        let x = FiberPoint::new(SpectrumPoint::Padic { p: 2, eps: 1.0 })
            .with("T", Coordinate::gauss(rational(1, 1), rational(1, 3)));
        assert_eq!(eval_point(&p("T^2-1"), &x).unwrap().exact(), Some(&rational(1, 6)));
    }

    #[test]
    fn residue_points() {
        let x = FiberPoint::new(SpectrumPoint::Residue { p: 3 });
        assert!(eval_point(&p("6"), &x).unwrap().is_zero());
        assert_eq!(eval_point(&p("5"), &x).unwrap().exact(), Some(&rational(1, 1)));
        assert!(eval_point(&p("1/3"), &x).is_err());
    }

    #[test]
    fn missing_coordinate() {
        let x = FiberPoint::new(SpectrumPoint::Trivial);
        assert!(matches!(eval_point(&p("T"), &x), Err(Error::MissingCoordinate(_))));
    }

    #[test]
    fn huge_radius_log_space() {
        let f = CompiledPoly::new(&p("T^4 - 3*T + 1"));
        let z = [Complex64::from_polar(1e200, 0.3)];
        let l = f.ln_abs(&z);
        assert!((l - 4.0 * 1e200f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(SpectrumPoint::Padic { p: 4, eps: 1.0 }.validate().is_err());
        assert!(SpectrumPoint::Archimedean { eps: 1.5 }.validate().is_err());
    }
}
