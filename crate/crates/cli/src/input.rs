use std::path::Path;

use berkring::affinoid::{AffinoidPresentation, RationalDomainSpec};
use berkring::base::{BaseRing, Radii};
use berkring::coverings::{Covering, UnitWitness};
use berkring::real::parse_rational;
use berkring::spectrum::{Density, FiberPoint};
use berkring::{parse_expression, Error, Poly, Rational, Result};
use num_traits::One;

fn bad(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub fn poly(text: &str) -> Result<Poly> {
    Ok(parse_expression(text)?)
}

pub fn rational(text: &str) -> Result<Rational> {
    parse_rational(text.trim()).ok_or_else(|| bad(format!("bad rational {text:?}")))
}

/// `VAR=RHO` pairs.
pub fn radii(items: &[String]) -> Result<Radii> {
    let mut out = Radii::new();
    for item in items {
        let (v, r) = item
            .split_once('=')
            .ok_or_else(|| bad(format!("expected VAR=RHO, got {item:?}")))?;
        let r = rational(r)?;
        if r <= Rational::from_integer(0.into()) {
            return Err(bad(format!("radius {r} must be positive")));
        }
        out.insert(v.trim().to_string(), r);
    }
    Ok(out)
}

/// `EXPR` or `EXPR:RHO`, radius 1 by default.
pub fn pair(text: &str) -> Result<(Poly, Rational)> {
    match text.rsplit_once(':') {
        Some((f, r)) => Ok((poly(f)?, rational(r)?)),
        None => Ok((poly(text)?, Rational::one())),
    }
}

pub fn pairs(items: &[String]) -> Result<Vec<(Poly, Rational)>> {
    items.iter().map(|s| pair(s)).collect()
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {path}: {e}")))
}

fn is_file(text: &str) -> bool {
    text.ends_with(".json") || Path::new(text).is_file()
}

/// A JSON file, or `Q[T,S]/(S^2-T)` style text with radii from `--rho`
/// (default 1). `Q` alone is a point.
pub fn algebra(text: Option<&str>, base: Option<BaseRing>, rho: &Radii) -> Result<AffinoidPresentation> {
    let text = text.unwrap_or("").trim();
    if !text.is_empty() && is_file(text) {
        let a = AffinoidPresentation::from_json(&read(text)?)?;
        if let Some(b) = base {
            if b != a.base {
                return Err(bad(format!("--base {b} disagrees with the file's base {}", a.base)));
            }
        }
        return Ok(a);
    }
    let (head, rels) = match text.split_once('/') {
        Some((h, r)) => (h.trim(), Some(r.trim())),
        None => (text, None),
    };
    let (letter, vars) = match head.split_once('[') {
        Some((l, rest)) => {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| bad(format!("unclosed bracket in {text:?}")))?;
            (l.trim(), inner.split(',').map(str::trim).filter(|v| !v.is_empty()).collect())
        }
        None => (head, Vec::new()),
    };
    let base = match (base, letter) {
        (Some(b), "" | "Q" | "Z") => b,
        (None, "Q") => BaseRing::QTriv,
        (None, "Z" | "") => BaseRing::ZArch,
        (_, other) => return Err(bad(format!("unknown coefficient ring {other:?}"))),
    };
    if letter == "Q" && base.is_integral() {
        return Err(bad(format!("Q[...] over the integral base {base}")));
    }
    let relations = match rels {
        None => Vec::new(),
        Some(r) => {
            let inner = r
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| bad(format!("relations must be parenthesized in {text:?}")))?;
            inner.split(',').map(poly).collect::<Result<_>>()?
        }
    };
    let vars: Vec<(String, Rational)> = vars
        .into_iter()
        .map(|v: &str| (v.to_string(), rho.get(v).cloned().unwrap_or_else(Rational::one)))
        .collect();
    if let Some(v) = rho.keys().find(|k| !vars.iter().any(|(n, _)| n == *k)) {
        return Err(bad(format!("--rho names {v}, which is not a variable")));
    }
    AffinoidPresentation::new(base, vars, relations)
}

pub fn domain(file: Option<&str>, items: &[String]) -> Result<RationalDomainSpec> {
    match file {
        Some(f) => Ok(serde_json::from_str(&read(f)?)?),
        None => RationalDomainSpec::new(pairs(items)?),
    }
}

pub fn covering(path: &str) -> Result<Covering> {
    Covering::from_json(&read(path)?)
}

pub fn point(text: &str) -> Result<FiberPoint> {
    let json = if is_file(text) { read(text)? } else { text.to_string() };
    let x: FiberPoint = serde_json::from_str(&json)?;
    x.base.validate()?;
    Ok(x)
}

pub fn density(file: Option<&str>, seed: u64) -> Result<Density> {
    let d = match file {
        Some(f) => serde_json::from_str(&read(f)?)?,
        None => Density::default(),
    };
    Ok(d.with_seed(seed))
}

/// `inverse:EXPR`, `var:NAME` or `-` for a missing witness.
pub fn witness(text: &str) -> Result<Option<UnitWitness>> {
    if text == "-" {
        return Ok(None);
    }
    match text.split_once(':') {
        Some(("inverse", g)) => Ok(Some(UnitWitness::Inverse { g: poly(g)? })),
        Some(("var", y)) => Ok(Some(UnitWitness::Variable { name: y.trim().to_string() })),
        _ => Err(bad(format!("expected inverse:EXPR or var:NAME, got {text:?}"))),
    }
}

pub fn grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("bad grid value {s:?}"))))
        .collect()
}
