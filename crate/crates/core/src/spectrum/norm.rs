use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{sample_spectrum, CompiledPoly, Coordinate, Density, FiberPoint, SpectrumPoint};
use crate::affinoid::{AffinoidPresentation, PresentationEval};
use crate::base::{BaseRing, BoundKind, Radii};
use crate::error::{Error, Result};
use crate::graded::monomial_grading;
use crate::poly::Poly;
use crate::real::{ln_rational, rational, Rational, Real};

/// Archimedean exponent search: grid size, bounds and tolerance in `ln ε`.
const EPS_GRID: usize = 64;
const EPS_MIN: f64 = 1e-3;
const EPS_TOL: f64 = 1e-7;
const ANGLE_GRID: usize = 256;
const TORUS_POINT_CAP: usize = 65_536;
const ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct SpectralNorm {
    pub value: Real,
    /// A point where `|f|` attains the value up to `tolerance`.
    pub witness: FiberPoint,
    pub tolerance: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximize a unimodal-ish function on `[a, b]`.
fn golden_max(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `max ln|f|` over the torus `|z_v| = exp(ln_r[v])`, with the maximizing
/// angles.
/// Roots of unity for the angle grid on an `n`-torus.
fn grid_roots(n: usize) -> Vec<Complex64> {
    let per = if n <= 1 {
        ANGLE_GRID
    } else {
        let per = (TORUS_POINT_CAP as f64).powf(1.0 / n as f64).floor() as usize;
        (1usize << per.max(2).ilog2()).min(ANGLE_GRID)
    };
    (0..per).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / per as f64)).collect()
}

/// With `refine` false only the angle grid is searched.
fn torus_max(f: &CompiledPoly, ln_r: &[f64], roots: &[Complex64], refine: bool) -> (f64, Vec<f64>) {
    let n = ln_r.len();
    let slice = f.on_torus(ln_r);
    if n == 0 {
        return (slice.ln_abs(&[]), vec![]);
    }
    let per = roots.len();
    let best = slice.grid_max(n, &roots);
    let angles: Vec<f64> = best.1.iter().map(|&k| TAU * k as f64 / per as f64).collect();
    let mut best = (slice.ln_from_norm_sqr(best.0), angles);
    let step = TAU / per as f64;
    let sweeps = match (refine, n) {
        (false, _) => 0,
        (true, 1) => 1,
        _ => 3,
    };
    for _ in 0..sweeps {
        for v in 0..n {
            let mut th = best.1.clone();
            let c = th[v];
            let (t, val) = golden_max(c - step, c + step, ANGLE_TOL, |x| {
                th[v] = x;
                slice.ln_abs(&th)
            });
            if val > best.0 {
                best.1[v] = t;
                best.0 = val;
            }
        }
    }
    best
}

/// `sup_{ε, torus} |f|^ε` on the archimedean branch, as `(ln value, ε, angles)`.
fn archimedean_sup(f: &CompiledPoly, ln_rho: &[f64]) -> (f64, f64, Vec<f64>) {
    // keep ρ^{1/ε} inside the float range
    let worst = ln_rho.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let eps_min = EPS_MIN.max(worst / 600.0).min(1.0);
    let (lo, hi) = (eps_min.ln(), 0.0f64);
    let roots = grid_roots(ln_rho.len());
    let h = |le: f64, refine: bool| -> (f64, Vec<f64>) {
        let eps = le.exp().min(1.0);
        let ln_r: Vec<f64> = ln_rho.iter().map(|l| l / eps).collect();
        let (m, th) = torus_max(f, &ln_r, &roots, refine);
        (eps * m, th)
    };
    let grid: Vec<f64> = (0..EPS_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (EPS_GRID - 1) as f64)
        .collect();
    let vals: Vec<(f64, Vec<f64>)> = grid.iter().map(|&le| h(le, false)).collect();
    let (i, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v.0 > acc.1 { (i, v.0) } else { acc });
    let (v, th) = h(grid[i], true);
    let mut best = (v, grid[i].exp().min(1.0), th);
    if lo < hi {
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(EPS_GRID - 1)];
        let (le, _) = golden_max(a, b, EPS_TOL, |le| h(le, true).0);
        let (v, th) = h(le, true);
        if v > best.0 {
            best = (v, le.exp().min(1.0), th);
        }
    }
    best
}

/// `sup |f(x)|` over the implemented branches of `ℳ(R{ρ⁻¹T})`: the trivial
/// Gauss value (which dominates every `p`-adic and residue branch) and,
/// over `Z_arch`, the archimedean supremum over `ε` and the torus.
pub fn spectral_norm(f: &Poly, radii: &Radii, base: BaseRing) -> Result<SpectralNorm> {
    base.check_poly(f)?;
    let vars: Vec<String> = f.vars().into_iter().collect();
    for v in &vars {
        match radii.get(v) {
            Some(r) if *r > Rational::zero() => {}
            _ => return Err(Error::Invalid(format!("no positive radius for {v}"))),
        }
    }
    let gauss_witness = || {
        let mut x = FiberPoint::new(SpectrumPoint::Trivial);
        for v in &vars {
            x.coords.insert(v.clone(), Coordinate::gauss(Rational::zero(), radii[v].clone()));
        }
        x
    };
    if f.is_zero() {
        return Ok(SpectralNorm {
            value: Real::zero(),
            witness: gauss_witness(),
            tolerance: 0.0,
        });
    }
    let mut trivial = Rational::zero();
    for (m, _) in f.terms() {
        let g = monomial_grading(m, radii)?;
        if g > trivial {
            trivial = g;
        }
    }
    let mut out = SpectralNorm {
        value: Real::Exact(trivial),
        witness: gauss_witness(),
        tolerance: 0.0,
    };
    if base != BaseRing::ZArch {
        return Ok(out);
    }
    let compiled = CompiledPoly::with_vars(f, vars.clone());
    let ln_rho: Vec<f64> = vars.iter().map(|v| ln_rational(&radii[v])).collect();
    let (lv, eps, theta) = archimedean_sup(&compiled, &ln_rho);
    let arch = Real::Approx(lv.exp());
    if out.value.lt(&arch) {
        let mut x = FiberPoint::new(SpectrumPoint::Archimedean { eps });
        for ((v, l), t) in vars.iter().zip(&ln_rho).zip(&theta) {
            x.coords
                .insert(v.clone(), Coordinate::complex(Complex64::from_polar((l / eps).exp(), *t)));
        }
        out = SpectralNorm {
            value: arch,
            witness: x,
            tolerance: 1e-9,
        };
    }
    Ok(out)
}

/// Sampled minimum of `α(x) = max_i ρ_i⁻¹ |f_i(x)|`.
#[derive(Clone, Debug, Serialize)]
pub struct InfMaxEstimate {
    pub value: Real,
    pub point: FiberPoint,
    pub samples: usize,
    pub kind: BoundKind,
}

fn alpha(pe: &PresentationEval, fs: &[Poly], inv_rhos: &[Rational], x: &FiberPoint) -> Result<Real> {
    let mut best = Real::zero();
    for (f, r) in fs.iter().zip(inv_rhos) {
        best = best.max(pe.eval(f, x)?.mul_rational(r));
    }
    Ok(best)
}

/// Move an archimedean point to exponent `eps`, keeping each coordinate's
/// angle and its modulus relative to the disc radius.
fn rescale(x: &FiberPoint, eps: f64, pe: &PresentationEval) -> FiberPoint {
    let SpectrumPoint::Archimedean { eps: e0 } = x.base else {
        return x.clone();
    };
    let mut y = FiberPoint::new(SpectrumPoint::Archimedean { eps });
    for (v, c) in &x.coords {
        let c = match (c, pe.alg.radius(v)) {
            (Coordinate::Complex { re, im }, Some(rho)) => {
                let z = Complex64::new(*re, *im);
                let l = ln_rational(rho);
                let rel = z.norm().ln() - l / e0;
                Coordinate::complex(Complex64::from_polar((rel + l / eps).exp(), z.arg()))
            }
            _ => c.clone(),
        };
        y.coords.insert(v.clone(), c);
    }
    y
}

/// Minimum of `max_i ρ_i⁻¹ |f_i(x)|` over sampled points of `ℳ(alg)`,
/// refined once around the best sample. An upper bound of the infimum.
pub fn inf_max(
    fs: &[Poly],
    rhos: &[Rational],
    alg: &AffinoidPresentation,
    density: &Density,
) -> Result<InfMaxEstimate> {
    if fs.is_empty() || fs.len() != rhos.len() {
        return Err(Error::Invalid("need one radius per function, at least one function".into()));
    }
    if rhos.iter().any(|r| *r <= Rational::zero()) {
        return Err(Error::Invalid("radii must be positive".into()));
    }
    let inv: Vec<Rational> = rhos.iter().map(|r| r.recip()).collect();
    let pe = PresentationEval::new(alg);
    let pts = sample_spectrum(alg, density)?;
    let mut best: Option<(Real, FiberPoint)> = None;
    for x in &pts {
        let a = alpha(&pe, fs, &inv, x)?;
        if best.as_ref().map_or(true, |(b, _)| a.lt(b)) {
            best = Some((a, x.clone()));
        }
    }
    let (mut value, mut point) =
        best.ok_or_else(|| Error::EmptyDensity("no sample lies in the spectrum".into()))?;

    // one round of local refinement
    let mut candidates: Vec<FiberPoint> = Vec::new();
    match point.base {
        SpectrumPoint::Archimedean { eps } => {
            let step = 1.0 / density.eps_grid as f64;
            for k in 1..=16 {
                let e = (eps - step + 2.0 * step * k as f64 / 17.0).clamp(1e-6, 1.0);
                candidates.push(rescale(&point, e, &pe));
            }
        }
        _ => {
            for (v, c) in &point.coords {
                if let Coordinate::Gauss { center, radius } = c {
                    if radius.is_zero() {
                        continue;
                    }
                    let rho = pe.alg.radius(v).cloned().unwrap_or_else(Rational::one);
                    let step = &rho / rational(density.radius_grid as i64, 1);
                    for k in 1..=16 {
                        let r = radius - &step + &step * rational(2 * k, 17);
                        if r > Rational::zero() && r <= rho {
                            let mut y = point.clone();
                            y.coords.insert(v.clone(), Coordinate::gauss(center.clone(), r));
                            candidates.push(y);
                        }
                    }
                }
            }
        }
    }
    for y in candidates {
        if pe.admits(&y)? {
            let a = alpha(&pe, fs, &inv, &y)?;
            if a.lt(&value) {
                value = a;
                point = y;
            }
        }
    }
    Ok(InfMaxEstimate {
        value,
        point,
        samples: pts.len(),
        kind: BoundKind::SampledEstimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{l1_poly_norm, radii_from};
    use crate::poly::test_poly as p;
    use crate::spectrum::eval_point;

    fn r1() -> Radii {
        radii_from([("T", rational(1, 1))])
    }

    /// Dense oracle on the archimedean branch of a univariate polynomial.
    fn dense_arch(f: &Poly, rho: f64) -> f64 {
        let mut best: f64 = 0.0;
        // small exponents are covered by the trivial value
        for i in 20..=400 {
            let eps = i as f64 / 400.0;
            let r = rho.powf(1.0 / eps);
            for k in 0..400 {
                let z = Complex64::from_polar(r, TAU * k as f64 / 400.0);
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, c) in f.terms() {
                    acc += z.powu(m.degree()) * crate::real::rational_to_f64(c);
                }
                best = best.max(acc.norm().powf(eps));
            }
        }
        best
    }

    #[test]
    fn one_plus_t() {
        let s = spectral_norm(&p("1+T"), &r1(), BaseRing::ZArch).unwrap();
        assert!((s.value.to_f64() - 2.0).abs() < 1e-9);
        assert!((dense_arch(&p("1+T"), 1.0) - 2.0).abs() < 1e-6);
        let w = eval_point(&p("1+T"), &s.witness).unwrap();
        assert!((w.to_f64() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn radius_bound_and_trivial_constants() {
        let s = spectral_norm(&p("T"), &radii_from([("T", rational(1, 2))]), BaseRing::ZArch).unwrap();
        assert!((s.value.to_f64() - 0.5).abs() < 1e-9);
        let s = spectral_norm(&p("2"), &Radii::new(), BaseRing::ZTriv).unwrap();
        assert_eq!(s.value.exact(), Some(&rational(1, 1)));
        let s = spectral_norm(&p("1+T"), &r1(), BaseRing::ZTriv).unwrap();
        assert_eq!(s.value.exact(), Some(&rational(1, 1)));
    }

    #[test]
    fn matches_dense_oracle_and_l1_bound() {
        for (f, rho) in [("3 - T + 2*T^2", 1.0), ("T^3 - 2*T", 2.0), ("5 + T^2", 0.5), ("-T^4 + T - 7", 2.0)] {
            let q = Rational::from_float(rho).unwrap();
            let radii = radii_from([("T", q)]);
            let s = spectral_norm(&p(f), &radii, BaseRing::ZArch).unwrap().value.to_f64();
            let o = dense_arch(&p(f), rho).max(rho.powi(p(f).degree().unwrap() as i32)).max(1.0);
            assert!((s - o).abs() <= 0.01 * o, "{f}: {s} vs {o}");
            let l1 = crate::real::rational_to_f64(&l1_poly_norm(&p(f), &radii, BaseRing::ZArch).unwrap());
            assert!(s <= l1 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn inf_max_examples() {
        let d = Density::default();
        let e = inf_max(&[p("2")], &[rational(1, 1)], &AffinoidPresentation::point(BaseRing::ZArch), &d).unwrap();
        assert!(e.value.is_zero());
        assert_eq!(e.point.base, SpectrumPoint::Residue { p: 2 });
        let e = inf_max(
            &[p("1"), p("2")],
            &[rational(1, 1), rational(1, 1)],
            &AffinoidPresentation::point(BaseRing::ZTriv),
            &d,
        )
        .unwrap();
        assert_eq!(e.value.exact(), Some(&rational(1, 1)));
        let a = AffinoidPresentation::polydisc(BaseRing::QTriv, [("T", rational(1, 1))]).unwrap();
        let e = inf_max(&[p("T"), p("1-T")], &[rational(1, 1), rational(1, 1)], &a, &d).unwrap();
        assert_eq!(e.value.exact(), Some(&rational(1, 1)));
        assert_eq!(e.kind, BoundKind::SampledEstimate);
    }
}
