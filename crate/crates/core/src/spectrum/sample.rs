use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Zero;
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{primes_up_to, Coordinate, FiberPoint, SpectrumPoint};
use crate::affinoid::{AffinoidPresentation, PresentationEval};
use crate::error::{Error, Result};
use crate::real::{rational, Rational, Real};

/// Largest number of coordinate tuples generated per base point.
pub const TUPLE_CAP: usize = 4096;

/// How densely to sample a spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    /// Number of exponents per archimedean and `p`-adic branch.
    pub eps_grid: usize,
    pub prime_cutoff: u64,
    /// Angles per circle at archimedean points.
    pub torus_grid: usize,
    /// Radii levels per disc, the boundary included.
    pub radius_grid: usize,
    /// Centers of type-1 and Gauss points, kept when inside the disc.
    #[serde(with = "rational_list")]
    pub centers: Vec<Rational>,
    pub seed: u64,
}

mod rational_list {
    use super::Rational;
    use crate::real::parse_rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| q.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}"))))
            .collect()
    }
}

impl Default for Density {
    fn default() -> Self {
        Density {
            eps_grid: 9,
            prime_cutoff: 7,
            torus_grid: 16,
            radius_grid: 3,
            centers: [(0, 1), (1, 1), (-1, 1), (2, 1), (1, 2), (-2, 1), (3, 1)]
                .iter()
                .map(|&(n, d)| rational(n, d))
                .collect(),
            seed: 0,
        }
    }
}

impl Density {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_grid", self.eps_grid),
            ("torus_grid", self.torus_grid),
            ("radius_grid", self.radius_grid),
        ] {
            if v == 0 {
                return Err(Error::EmptyDensity(format!("{name} is 0")));
            }
        }
        Ok(())
    }

    /// `k/m` for `k = 1..m`.
    pub fn archimedean_eps(&self) -> Vec<f64> {
        let m = self.eps_grid;
        (1..=m).map(|k| k as f64 / m as f64).collect()
    }

    /// `2^j` for `j` evenly spaced in `[-2, 2]`.
    pub fn padic_eps(&self) -> Vec<f64> {
        let m = self.eps_grid;
        if m == 1 {
            return vec![1.0];
        }
        (0..m)
            .map(|i| {
                let j = -2.0 + 4.0 * i as f64 / (m - 1) as f64;
                if j.abs() < 1e-12 {
                    1.0
                } else {
                    j.exp2()
                }
            })
            .collect()
    }

    fn base_points(&self) -> Vec<SpectrumPoint> {
        let mut out = vec![SpectrumPoint::Trivial];
        for p in primes_up_to(self.prime_cutoff) {
            out.extend(self.padic_eps().into_iter().map(|eps| SpectrumPoint::Padic { p, eps }));
            out.push(SpectrumPoint::Residue { p });
        }
        out.extend(self.archimedean_eps().into_iter().map(|eps| SpectrumPoint::Archimedean { eps }));
        out
    }
}

fn disc_coordinates(base: SpectrumPoint, rho: &Rational, d: &Density) -> Result<Vec<Coordinate>> {
    let g = d.radius_grid as i64;
    let mut out = Vec::new();
    match base {
        SpectrumPoint::Archimedean { eps } => {
            let r_max = Real::Exact(rho.clone()).powf(1.0 / eps).to_f64();
            out.push(Coordinate::complex(Complex64::new(0.0, 0.0)));
            for j in 1..=g {
                let r = r_max * j as f64 / g as f64;
                for k in 0..d.torus_grid {
                    let z = if j == g {
                        Complex64::from_polar(r, TAU * k as f64 / d.torus_grid as f64)
                    } else {
                        // interior circles are rotated half a step
                        Complex64::from_polar(r, TAU * (k as f64 + 0.5) / d.torus_grid as f64)
                    };
                    out.push(Coordinate::complex(z));
                }
            }
            for c in &d.centers {
                let x = crate::real::rational_to_f64(c);
                if !c.is_zero() && x.abs() <= r_max {
                    out.push(Coordinate::complex(Complex64::new(x, 0.0)));
                }
            }
        }
        _ => {
            for j in 1..=g {
                out.push(Coordinate::gauss(Rational::zero(), rho * rational(j, g)));
            }
            for c in &d.centers {
                if base.abs(c).map_or(false, |v| v.le(&Real::Exact(rho.clone()))) {
                    out.push(Coordinate::point(c.clone()));
                    if !c.is_zero() && g > 1 {
                        out.push(Coordinate::gauss(c.clone(), rho * rational(1, g)));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn points_over(
    base: SpectrumPoint,
    index: usize,
    pe: &PresentationEval,
    d: &Density,
) -> Result<Vec<FiberPoint>> {
    let free = pe.free_vars();
    let lists: Vec<Vec<Coordinate>> = free
        .iter()
        .map(|v| disc_coordinates(base, pe.alg.radius(v).expect("declared"), d))
        .collect::<Result<_>>()?;
    let total: usize = lists.iter().map(Vec::len).try_fold(1usize, |a, b| a.checked_mul(b)).unwrap_or(usize::MAX);
    let picks: Vec<usize> = if total <= TUPLE_CAP {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(d.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut v = sample_indices(&mut rng, total, TUPLE_CAP).into_vec();
        v.sort_unstable();
        v
    };
    let mut out = Vec::new();
    for mut k in picks {
        let mut x = FiberPoint::new(base);
        for (v, l) in free.iter().zip(&lists) {
            x.coords.insert(v.clone(), l[k % l.len()].clone());
            k /= l.len();
        }
        if pe.admits(&x)? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Finite sample of `ℳ(alg)`: every base point of the density lying over
/// the base (and the allowed branches) with a grid of fiber coordinates on
/// the free variables. The result depends only on `alg` and `density`.
pub fn sample_spectrum(alg: &AffinoidPresentation, density: &Density) -> Result<Vec<FiberPoint>> {
    density.validate()?;
    let pe = PresentationEval::new(alg);
    let bases: Vec<SpectrumPoint> = density
        .base_points()
        .into_iter()
        .filter(|b| alg.allows(b))
        .collect();
    let chunks: Vec<Vec<FiberPoint>> = bases
        .par_iter()
        .enumerate()
        .map(|(i, b)| points_over(*b, i, &pe, density))
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
