use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use super::{eval_point, is_prime, Coordinate, FiberPoint, SpectrumPoint};
use crate::base::Radii;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::{rational_to_f64, Real};

/// A one-parameter family of points to profile `|f|` along.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BranchSpec {
    /// Gauss point of the full disc at `Padic(p, ε)`, parameter `ε`.
    Padic { p: u64 },
    /// Archimedean sup over the torus of radius `ρ^{1/ε}`, parameter `ε`,
    /// sampled at the angle grid of the profile.
    Archimedean,
    /// Fixed `ε`, parameter the angle `θ` on the torus `|z| = ρ^{1/ε}`.
    Torus { eps: f64 },
}

impl FromStr for BranchSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let arg = |prefix: &str| -> Option<&str> {
            s.strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
        };
        if s == "archimedean" {
            return Ok(BranchSpec::Archimedean);
        }
        if let Some(a) = arg("padic") {
            let p: u64 = a.trim().parse().map_err(|_| Error::Invalid(format!("bad prime in {s:?}")))?;
            if !is_prime(p) {
                return Err(Error::Invalid(format!("{p} is not prime")));
            }
            return Ok(BranchSpec::Padic { p });
        }
        if let Some(a) = arg("torus") {
            let eps: f64 = a.trim().parse().map_err(|_| Error::Invalid(format!("bad exponent in {s:?}")))?;
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::Invalid(format!("exponent {eps} outside (0, 1]")));
            }
            return Ok(BranchSpec::Torus { eps });
        }
        Err(Error::Invalid(format!("unknown branch {s:?}")))
    }
}

impl BranchSpec {
    pub fn label(&self) -> String {
        match self {
            BranchSpec::Padic { p } => format!("padic({p})"),
            BranchSpec::Archimedean => "archimedean".into(),
            BranchSpec::Torus { eps } => format!("torus({eps})"),
        }
    }

    /// Default grid of `n` parameters: `ε = 2k/n` on p-adic branches,
    /// `ε = k/n` on the archimedean one, angles `2πk/n` on a torus.
    pub fn default_grid(&self, n: usize) -> Vec<f64> {
        match self {
            BranchSpec::Padic { .. } => (1..=n).map(|k| 2.0 * k as f64 / n as f64).collect(),
            BranchSpec::Archimedean => (1..=n).map(|k| k as f64 / n as f64).collect(),
            BranchSpec::Torus { .. } => {
                (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect()
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchProfile {
    pub branch: String,
    pub rows: Vec<(f64, Real)>,
}

impl BranchProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("branch,param,value\n");
        for (t, v) in &self.rows {
            let _ = writeln!(out, "{},{},{}", self.branch, t, v.to_f64());
        }
        out
    }

    /// Line plot of the profile.
    pub fn to_svg(&self) -> String {
        let (w, h, m) = (480.0, 320.0, 40.0);
        let xs: Vec<f64> = self.rows.iter().map(|r| r.0).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.1.to_f64()).collect();
        let span = |v: &[f64]| {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = span(&xs);
        let (y0, y1) = span(&ys);
        let pts: Vec<String> = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let px = m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
                let py = h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#);
        let _ = writeln!(s, r#"<text x="{m}" y="20">{}</text>"#, self.branch);
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="black" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(s, r#"<text x="{m}" y="{}">{x0:.3} .. {x1:.3}</text>"#, h - 10.0);
        let _ = writeln!(s, r#"<text x="{}" y="{m}">{y1:.4}</text>"#, w - 120.0);
        s.push_str("</svg>\n");
        s
    }
}

fn torus_point(f: &Poly, radii: &Radii, eps: f64, theta: f64) -> Result<FiberPoint> {
    let mut x = FiberPoint::new(SpectrumPoint::Archimedean { eps });
    for v in f.vars() {
        let rho = radii
            .get(&v)
            .ok_or_else(|| Error::Invalid(format!("no radius for {v}")))?;
        let r = rational_to_f64(rho).powf(1.0 / eps);
        x.coords.insert(v, Coordinate::complex(Complex64::from_polar(r, theta)));
    }
    Ok(x)
}

/// `|f|` along a branch at the given parameters.
pub fn emit_profile(f: &Poly, radii: &Radii, branch: BranchSpec, grid: &[f64]) -> Result<BranchProfile> {
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid {
        let v = match branch {
            BranchSpec::Padic { p } => {
                if !(t > 0.0) {
                    return Err(Error::Invalid(format!("exponent {t} must be positive")));
                }
                let mut x = FiberPoint::new(SpectrumPoint::Padic { p, eps: t });
                for v in f.vars() {
                    let rho = radii
                        .get(&v)
                        .ok_or_else(|| Error::Invalid(format!("no radius for {v}")))?;
                    x.coords.insert(v, Coordinate::gauss(Zero::zero(), rho.clone()));
                }
                eval_point(f, &x)?
            }
            BranchSpec::Torus { eps } => eval_point(f, &torus_point(f, radii, eps, t)?)?,
            BranchSpec::Archimedean => {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::Invalid(format!("exponent {t} outside (0, 1]")));
                }
                let mut best = Real::zero();
                for k in 0..256 {
                    let th = std::f64::consts::TAU * k as f64 / 256.0;
                    best = best.max(eval_point(f, &torus_point(f, radii, t, th)?)?);
                }
                best
            }
        };
        rows.push((t, v));
    }
    Ok(BranchProfile {
        branch: branch.label(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::radii_from;
    use crate::poly::test_poly as p;
    use crate::real::rational;

    #[test]
    fn padic_constant() {
        let grid = BranchSpec::Padic { p: 2 }.default_grid(5);
        let prof = emit_profile(&p("2"), &Radii::new(), BranchSpec::Padic { p: 2 }, &grid).unwrap();
        for (t, v) in &prof.rows {
            assert!((v.to_f64() - 0.5f64.powf(*t)).abs() < 1e-12);
        }
        assert_eq!(prof.rows.len(), 5);
    }

    #[test]
    fn torus_values() {
        let spec: BranchSpec = "torus(1)".parse().unwrap();
        let grid = spec.default_grid(4);
        let prof = emit_profile(&p("1+T"), &radii_from([("T", rational(1, 1))]), spec, &grid).unwrap();
        let got: Vec<f64> = prof.rows.iter().map(|r| r.1.to_f64()).collect();
        let want = [2.0, 2f64.sqrt(), 0.0, 2f64.sqrt()];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{got:?}");
        }
    }

    #[test]
    fn empty_grid_and_unknown_branch() {
        let prof = emit_profile(&p("T"), &Radii::new(), BranchSpec::Archimedean, &[]).unwrap();
        assert_eq!(prof.to_csv(), "branch,param,value\n");
        assert!("hyperbolic".parse::<BranchSpec>().is_err());
        assert!("padic(4)".parse::<BranchSpec>().is_err());
        assert!(prof.to_svg().starts_with("<svg"));
    }
}
