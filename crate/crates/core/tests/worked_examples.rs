mod common;

use std::f64::consts::TAU;

use berkring::affinoid::{
    chart_isometry_check, domain_membership, validate_unit_ideal, AffinoidPresentation, LaurentPoly,
    RationalDomainSpec, UnitIdeal,
};
use berkring::base::{
    l1_poly_norm, residue_seminorm_bound, seminorm_axiom_report, BaseRing, BoundKind, QuotientPresentation,
    SearchBudget,
};
use berkring::coverings::{
    check_is_covering, check_refinement, laurent_covering, refine_rational_to_laurent, refine_units_to_laurent,
    standard_covering, Covering, UnitWitness,
};
use berkring::spectrum::{inf_max, sample_spectrum, spectral_norm, Coordinate, Density, FiberPoint, SpectrumPoint};
use berkring::tate::{cech_complex, check_exactness, IdealBasis, DEFAULT_DEGREE_BOUND};
use berkring::{Poly, Rational};
use common::*;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

fn line() -> AffinoidPresentation {
    AffinoidPresentation::polydisc(BaseRing::QTriv, [("T", q(1, 1))]).unwrap()
}

/// `Σ |a_k| ρ^k` from the coefficient list.
fn l1_oracle(f: &Poly, rho: &Rational) -> Rational {
    f.terms()
        .map(|(m, c)| c.abs() * berkring::real::pow_rational(rho, m.exponent("T")))
        .fold(Rational::zero(), |a, b| a + b)
}

/// `|g|` at the trivially valued Gauss point of radius `r` around `c`, from
/// the Taylor coefficients at `c`.
fn trivial_gauss_oracle(g: &Poly, c: &Rational, r: &Rational) -> Rational {
    let mut coeffs: Vec<Rational> = (0..=g.degree_in("T"))
        .map(|k| g.coeff(&berkring::Monomial::from_pairs([("T", k)])))
        .collect();
    let mut best = Rational::zero();
    let mut rk = Rational::from_integer(1.into());
    while !coeffs.is_empty() {
        // synthetic division by (T - c): the remainder is the next Taylor coefficient
        let mut acc = Rational::zero();
        let mut quotient = Vec::with_capacity(coeffs.len());
        for a in coeffs.iter().rev() {
            acc = &acc * c + a;
            quotient.push(acc.clone());
        }
        let rem = quotient.pop().unwrap();
        quotient.reverse();
        if !rem.is_zero() && rk > best {
            best = rk.clone();
        }
        rk = &rk * r;
        coeffs = quotient;
    }
    best
}

fn gauss_coordinate(x: &FiberPoint) -> (Rational, Rational) {
    match &x.coords["T"] {
        Coordinate::Gauss { center, radius } => (center.clone(), radius.clone()),
        c => panic!("unexpected coordinate {c:?}"),
    }
}

#[test]
fn residue_class_of_t_modulo_t_minus_two() {
    let quotient = QuotientPresentation::new(BaseRing::ZArch, radii(&[("T", q(1, 1))]), vec![p("T - 2")]).unwrap();
    let b = residue_seminorm_bound(&quotient, &p("T"), SearchBudget { degree: 1, height: 4 }).unwrap();
    let mut best = None::<Rational>;
    for a in -4..=4 {
        for c in -4..=4 {
            let g = p(&format!("{a} + {c}*T"));
            let rep = &p("T") + &(&g * &p("T - 2"));
            let n = l1_oracle(&rep, &q(1, 1));
            best = Some(best.map_or(n.clone(), |m: Rational| m.min(n)));
        }
    }
    assert_eq!(b.value.exact(), best.as_ref());
    assert!(best.unwrap() <= q(2, 1));
    assert_eq!(b.kind, BoundKind::UpperBound);
    let at_two = |f: &Poly| f.eval_rational(&[("T".to_string(), q(2, 1))].into_iter().collect());
    assert_eq!(at_two(&b.representative), Some(q(2, 1)));
    // the constant 2 is in the class and meets the bound
    assert_eq!(at_two(&Poly::int(2)), at_two(&p("T")));
}

#[test]
fn l1_norm_random_pairs() {
    let mut r = rng(185);
    let pairs: Vec<(Poly, Poly)> = (0..100)
        .map(|_| (random_poly(&mut r, "T", 5, 9), random_poly(&mut r, "T", 5, 9)))
        .collect();
    let rho = random_radius(&mut r);
    let radii = radii(&[("T", rho.clone())]);
    for (a, _) in &pairs {
        assert_eq!(l1_poly_norm(a, &radii, BaseRing::ZArch).unwrap(), l1_oracle(a, &rho));
    }
    let rep = seminorm_axiom_report(
        |f| Ok(berkring::Real::Exact(l1_poly_norm(f, &radii, BaseRing::ZArch)?)),
        &pairs,
        0.0,
    )
    .unwrap();
    assert!(rep.is_clean(), "{:?}", rep.first());
}

#[test]
fn spectral_norm_of_one_plus_t_against_grid() {
    let mut oracle = 1.0f64;
    for k in 1..=100 {
        let eps = k as f64 / 100.0;
        for j in 0..1000 {
            let z = Complex64::from_polar(1.0, TAU * j as f64 / 1000.0);
            oracle = oracle.max((1.0 + z).norm().powf(eps));
        }
    }
    let rho = radii(&[("T", q(1, 1))]);
    let s = spectral_norm(&p("1 + T"), &rho, BaseRing::ZArch).unwrap();
    assert!((s.value.to_f64() - oracle).abs() < 1e-9, "{} vs {oracle}", s.value);
    let t = spectral_norm(&p("1 + T"), &rho, BaseRing::ZTriv).unwrap();
    assert_eq!(t.value.exact(), Some(&q(1, 1)));
}

#[test]
fn spectral_norm_of_two_over_trivial_integers() {
    let mut oracle = 0.0f64;
    let mut bases = vec![SpectrumPoint::Trivial];
    for p in (2..=50u64).filter(|n| (2..*n).all(|d| n % d != 0)) {
        bases.push(SpectrumPoint::Residue { p });
        bases.extend((1..=40).map(|k| SpectrumPoint::Padic { p, eps: k as f64 / 10.0 }));
    }
    for x in &bases {
        oracle = oracle.max(abs_int(x, 2));
    }
    let s = spectral_norm(&Poly::int(2), &Default::default(), BaseRing::ZTriv).unwrap();
    assert_eq!(s.value.exact(), Some(&q(1, 1)));
    assert_eq!(oracle, 1.0);
}

#[test]
fn inf_max_examples() {
    let point = AffinoidPresentation::point(BaseRing::ZTriv);
    for prime in [2i64, 3, 5] {
        let est = inf_max(&[Poly::one(), Poly::int(prime)], &[q(1, 1), q(1, 1)], &point, &Density::default()).unwrap();
        let oracle = sample_spectrum(&point, &Density::default())
            .unwrap()
            .iter()
            .map(|x| abs_int(&x.base, 1).max(abs_int(&x.base, prime as u64)))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(oracle, 1.0);
        assert_eq!(est.value.exact(), Some(&q(1, 1)));
    }

    let (f, g) = (p("T"), p("1 - T"));
    let est = inf_max(&[f.clone(), g.clone()], &[q(1, 1), q(1, 1)], &line(), &Density::default()).unwrap();
    let oracle = sample_spectrum(&line(), &Density::default())
        .unwrap()
        .iter()
        .map(|x| {
            let (c, r) = gauss_coordinate(x);
            trivial_gauss_oracle(&f, &c, &r).max(trivial_gauss_oracle(&g, &c, &r))
        })
        .min()
        .unwrap();
    assert_eq!(oracle, q(1, 1));
    assert_eq!(est.value.exact(), Some(&oracle));
}

#[test]
fn integer_and_real_specs() {
    let zp = RationalDomainSpec::new(vec![(Poly::one(), q(1, 1)), (Poly::int(2), q(1, 2))]).unwrap();
    let reals = RationalDomainSpec::new(vec![(Poly::int(2), q(1, 1)), (Poly::one(), q(1, 2))]).unwrap();
    let z = AffinoidPresentation::point(BaseRing::ZArch);
    let cases = [
        SpectrumPoint::Padic { p: 2, eps: 1.0 },
        SpectrumPoint::Trivial,
        SpectrumPoint::Archimedean { eps: 1.0 },
        SpectrumPoint::Archimedean { eps: 0.5 },
    ];
    for x in cases {
        let pt = FiberPoint::new(x);
        let two = abs_int(&x, 2);
        assert_eq!(domain_membership(&z, &pt, &zp).unwrap(), two <= 0.5, "{x}");
        assert_eq!(domain_membership(&z, &pt, &reals).unwrap(), two >= 2.0, "{x}");
    }
    for k in 1..=200 {
        let x = SpectrumPoint::Padic { p: 2, eps: k as f64 / 20.0 };
        assert!(abs_int(&x, 2) < 2.0);
        assert!(!domain_membership(&z, &FiberPoint::new(x), &reals).unwrap());
    }
}

#[test]
fn unit_ideal_of_two_and_t() {
    let fs = [Poly::int(2), p("T")];
    let over_z = AffinoidPresentation::polydisc(BaseRing::ZArch, [("T", q(1, 1))]).unwrap();
    assert_eq!(validate_unit_ideal(&over_z, &fs, None).unwrap().status, UnitIdeal::Indeterminate);
    // every integral combination a·2 + b·T has an even constant term
    let mut r = rng(341);
    for _ in 0..50 {
        let (a, b) = (random_poly(&mut r, "T", 3, 9), random_poly(&mut r, "T", 3, 9));
        let c = (&(&a * &fs[0]) + &(&b * &fs[1])).constant_term();
        assert!(c.to_integer() % 2 == 0.into());
    }
    let chk = validate_unit_ideal(&line(), &fs, None).unwrap();
    assert_eq!(chk.status, UnitIdeal::True);
    let cert = chk.certificate.unwrap();
    let sum = cert.iter().zip(&fs).fold(Poly::zero(), |s, (a, f)| &s + &(a * f));
    assert_eq!(sum, Poly::one());
}

#[test]
fn chart_on_sixteen_torus_samples() {
    let f = LaurentPoly::new("X0", [(2, q(1, 1)), (-1, q(1, 1))]);
    let samples: Vec<FiberPoint> = (0..16)
        .map(|k| {
            let z = Complex64::from_polar(1.0, TAU * k as f64 / 16.0);
            FiberPoint::new(SpectrumPoint::Archimedean { eps: 1.0 }).with("X0", Coordinate::complex(z))
        })
        .collect();
    let rep = chart_isometry_check(&f, "X1", &samples).unwrap();
    assert!(rep.max_discrepancy < 1e-9);
    for (k, row) in rep.rows.iter().enumerate() {
        let z = Complex64::from_polar(1.0, TAU * k as f64 / 16.0);
        let w = z.inv();
        assert!(((z * z + z.inv()).norm() - row.1).abs() < 1e-12);
        assert!(((w.inv() * w.inv() + w).norm() - row.2).abs() < 1e-12);
    }
}

#[test]
fn rational_refinement_examples() {
    let pts = sample_spectrum(&line(), &Density::default()).unwrap();
    let c = standard_covering(&line(), &[p("T"), p("1 - T")], &[q(1, 1), q(1, 1)], None).unwrap();
    let r = refine_rational_to_laurent(&c, &pts, &Density::default()).unwrap();
    // c = 2 / inf_max with inf_max = 1
    assert_eq!(r.c.exact(), Some(&q(2, 1)));
    let gens: Vec<(Poly, Rational)> = r.laurent.generators.iter().map(|g| (g.f.clone(), g.rho.clone())).collect();
    assert_eq!(gens, vec![(p("T"), q(1, 2)), (p("1 - T"), q(1, 2))]);
    assert_eq!(r.laurent.members.len(), 4);

    let point = AffinoidPresentation::point(BaseRing::ZTriv);
    let c = standard_covering(&point, &[Poly::one(), Poly::int(3)], &[q(1, 1), q(1, 1)], None).unwrap();
    let pts = sample_spectrum(&point, &Density::default()).unwrap();
    let r = refine_rational_to_laurent(&c, &pts, &Density::default()).unwrap();
    assert_eq!(r.c.exact(), Some(&q(2, 1)));
    let gens: Vec<(Poly, Rational)> = r.laurent.generators.iter().map(|g| (g.f.clone(), g.rho.clone())).collect();
    assert_eq!(gens, vec![(Poly::one(), q(1, 2)), (Poly::int(3), q(1, 2))]);
}

#[test]
fn covering_checks() {
    let pts = sample_spectrum(&line(), &Density::default()).unwrap();
    let c = standard_covering(&line(), &[p("T"), p("1 - T")], &[q(1, 1), q(1, 1)], None).unwrap();
    assert!(pts.iter().all(|x| {
        let (cc, r) = gauss_coordinate(x);
        let (a, b) = (trivial_gauss_oracle(&p("T"), &cc, &r), trivial_gauss_oracle(&p("1 - T"), &cc, &r));
        a <= b || b <= a
    }));
    assert!(check_is_covering(&c, &pts).unwrap().ok);

    let mut outer: Covering = laurent_covering(&line(), &[(p("T"), q(1, 1))]).unwrap();
    outer.members.remove(0);
    let chk = check_is_covering(&outer, &pts).unwrap();
    assert!(!chk.ok);
    let w = chk.witness.unwrap();
    assert_eq!(w.coords["T"], Coordinate::point(q(0, 1)));
    assert_eq!(trivial_gauss_oracle(&p("T"), &q(0, 1), &q(0, 1)), q(0, 1));
}

#[test]
fn refinement_checks() {
    let parent = AffinoidPresentation::new(
        BaseRing::QTriv,
        vec![("T".into(), q(1, 1)), ("Y1".into(), q(1, 1)), ("Y2".into(), q(1, 1))],
        vec![p("(T + 2)*Y1 - 1"), p("(T - 3)*Y2 - 1")],
    )
    .unwrap();
    let c = standard_covering(&parent, &[p("T + 2"), p("T - 3")], &[q(1, 1), q(2, 1)], None).unwrap();
    let w = [Some(UnitWitness::Variable { name: "Y1".into() }), Some(UnitWitness::Variable { name: "Y2".into() })];
    let u = refine_units_to_laurent(&c, &w).unwrap();
    assert_eq!(u.ratios, vec![(0, 1)]);
    let pts = sample_spectrum(&parent, &Density::default()).unwrap();
    assert!(check_refinement(&u.laurent, &c, &pts).unwrap().ok);

    let pts = sample_spectrum(&line(), &Density::default()).unwrap();
    let fine = laurent_covering(&line(), &[(p("T"), q(1, 2))]).unwrap();
    let whole = Covering::whole(&line());
    assert!(check_refinement(&fine, &whole, &pts).unwrap().ok);
    let chk = check_refinement(&whole, &fine, &pts).unwrap();
    assert!(!chk.ok);
    let (v, x) = chk.witness.unwrap();
    assert_eq!(v, 0);
    let (cc, r) = gauss_coordinate(&x);
    let t = trivial_gauss_oracle(&p("T"), &cc, &r);
    // outside whichever half contains more of the samples
    assert!(t > q(1, 2) || t < q(1, 2));
}

#[test]
fn normal_form_modulo_t_squared_and_t_cubed() {
    let ideal = IdealBasis::groebner(vec!["T".into()], &[p("T^2"), p("T^3")]).unwrap();
    assert_eq!(ideal.basis().unwrap(), vec![p("T^2")]);
    assert_eq!(ideal.normal_form(&Poly::one()).unwrap(), Poly::one());
    assert!(!ideal.contains(&Poly::one()).unwrap());
    let mut r = rng(498);
    for _ in 0..20 {
        let f = random_poly(&mut r, "T", 6, 9);
        let low = Poly::from_terms(f.terms().filter(|(m, _)| m.degree() < 2).map(|(m, c)| (m.clone(), c.clone())));
        assert_eq!(ideal.normal_form(&f).unwrap(), low);
    }
}

#[test]
fn laurent_complexes_of_the_line() {
    for f in ["T", "T^2"] {
        let cx = cech_complex(&laurent_covering(&line(), &[(p(f), q(1, 1))]).unwrap()).unwrap();
        assert!(check_exactness(&cx, DEFAULT_DEGREE_BOUND).unwrap().is_exact());
        let broken = check_exactness(&cx.without_member(0), DEFAULT_DEGREE_BOUND).unwrap();
        assert!(!broken.is_exact());
        assert!(broken.witness.is_some());
    }
    let a = random_poly(&mut rng(514), "T", 4, 5);
    let cx = cech_complex(&laurent_covering(&line(), &[(p("T"), q(1, 1))]).unwrap()).unwrap();
    let parts = cx.d0(&a).unwrap();
    assert_eq!(parts.len(), 2);
    // on the inner member the coordinate is renamed, so undo that first
    let inner: Vec<String> = parts[0].vars().into_iter().collect();
    assert_eq!(inner.len(), 1);
    assert_eq!(parts[0].rename(&inner[0], "T"), a);
}
