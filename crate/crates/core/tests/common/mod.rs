#![allow(dead_code)]

use berkring::base::Radii;
use berkring::spectrum::SpectrumPoint;
use berkring::real::rational;
use berkring::{Poly, Rational};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    rational(n, d)
}

pub fn p(text: &str) -> Poly {
    berkring::parse_expression(text).unwrap()
}

/// Nonzero polynomial in `var` of degree at most `deg` with coefficients in
/// `[-c, c]`.
pub fn random_poly(r: &mut impl Rng, var: &str, deg: u32, c: i64) -> Poly {
    loop {
        let mut f = Poly::zero();
        for k in 0..=deg {
            let a = r.gen_range(-c..=c);
            f = &f + &Poly::var(var).pow(k).scale(&q(a, 1));
        }
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn random_nonconstant(r: &mut impl Rng, var: &str, deg: u32, c: i64) -> Poly {
    loop {
        let f = random_poly(r, var, deg, c);
        if !f.is_constant() {
            return f;
        }
    }
}

pub fn random_radius(r: &mut impl Rng) -> Rational {
    [q(1, 2), q(1, 1), q(2, 1)][r.gen_range(0..3)].clone()
}

pub fn radii(pairs: &[(&str, Rational)]) -> Radii {
    pairs.iter().map(|(v, r)| (v.to_string(), r.clone())).collect()
}

/// Coefficients of a one-variable polynomial, lowest degree first.
pub fn coefficients(f: &Poly, var: &str) -> Vec<f64> {
    let d = f.degree_in(var) as usize;
    let mut out = vec![0.0; d + 1];
    for (m, c) in f.terms() {
        out[m.exponent(var) as usize] = berkring::real::rational_to_f64(c);
    }
    out
}

/// `|n|` at a base point, computed from the definitions.
pub fn abs_int(x: &SpectrumPoint, n: u64) -> f64 {
    match *x {
        SpectrumPoint::Trivial => 1.0,
        SpectrumPoint::Archimedean { eps } => (n as f64).powf(eps),
        SpectrumPoint::Padic { p, eps } => {
            let mut v = 0;
            let mut m = n;
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            (p as f64).powf(-(v as f64) * eps)
        }
        SpectrumPoint::Residue { p } => {
            if n % p == 0 {
                0.0
            } else {
                1.0
            }
        }
    }
}
