mod common;

use berkring::affinoid::{
    chart_isometry_check, annulus_samples, domain_membership, rational_domain_algebra, AffinoidPresentation,
    DaggerFamily, LaurentPoly, PresentationEval, RationalDomainSpec,
};
use berkring::base::{gauss_poly_norm, l1_poly_norm, uniformization_estimate, BaseRing, L1Norm, DEFAULT_BIT_BUDGET};
use berkring::coverings::{check_is_covering, laurent_covering, standard_covering};
use berkring::graded::{l1_norm, linf_norm, CoeffVector, GradedSet};
use berkring::spectrum::{sample_spectrum, spectral_norm, Density};
use berkring::tate::{cech_complex, check_exactness, IdealBasis, DEFAULT_DEGREE_BOUND};
use berkring::{parse_expression, Error, Poly, Rational, Real};
use common::*;
use proptest::prelude::*;

fn poly_in(var: &'static str, max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-5i64..=5, 1..=max_deg + 1).prop_map(move |cs| {
        cs.iter()
            .enumerate()
            .fold(Poly::zero(), |f, (k, c)| &f + &Poly::var(var).pow(k as u32).scale(&q(*c, 1)))
    })
}

fn nonzero(var: &'static str, max_deg: usize) -> impl Strategy<Value = Poly> {
    poly_in(var, max_deg).prop_filter("nonzero", |f| !f.is_zero())
}

fn radius() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(q(1, 2)), Just(q(1, 1)), Just(q(2, 1)), Just(q(3, 4))]
}

fn two_vars() -> impl Strategy<Value = Poly> {
    (poly_in("T", 2), poly_in("S", 2), -3i64..=3).prop_map(|(a, b, c)| &(&a + &b) + &(&Poly::var("T") * &Poly::var("S")).scale(&q(c, 1)))
}

fn line() -> AffinoidPresentation {
    AffinoidPresentation::polydisc(BaseRing::QTriv, [("T", q(1, 1))]).unwrap()
}

fn parabola() -> AffinoidPresentation {
    AffinoidPresentation::new(
        BaseRing::QTriv,
        vec![("T".into(), q(1, 1)), ("S".into(), q(1, 1))],
        vec![p("S^2 - T")],
    )
    .unwrap()
}

fn density() -> Density {
    Density {
        radius_grid: 6,
        ..Density::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_polynomials_parse_back(f in two_vars()) {
        prop_assert_eq!(parse_expression(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn l1_dominates_linf(cs in prop::collection::vec(-20i64..=20, 1..6), gs in prop::collection::vec(0i64..8, 6)) {
        let labels: Vec<String> = (0..cs.len()).map(|i| format!("e{i}")).collect();
        let x = GradedSet::from_rationals(labels.iter().zip(&gs).map(|(l, g)| (l.clone(), q(*g, 2)))).unwrap();
        let a = CoeffVector::from_ints(labels.iter().map(String::as_str).zip(cs.iter().copied()));
        let norm = berkring::base::BaseNorm::new(BaseRing::ZArch);
        let (l1, linf) = (l1_norm(&a, &x, &norm).unwrap(), linf_norm(&a, &x, &norm).unwrap());
        prop_assert!(linf.le(&l1));
        prop_assert_eq!(GradedSet::from_json(&x.to_json()).unwrap().to_json(), x.to_json());
    }

    #[test]
    fn l1_is_submultiplicative(f in poly_in("T", 4), g in poly_in("T", 4), rho in radius()) {
        let r = radii(&[("T", rho)]);
        let n = |h: &Poly| l1_poly_norm(h, &r, BaseRing::ZArch).unwrap();
        prop_assert!(n(&(&f * &g)) <= n(&f) * n(&g));
    }

    #[test]
    fn gauss_below_l1_and_multiplicative_over_trivial(f in poly_in("T", 4), g in poly_in("T", 4), rho in radius()) {
        let r = radii(&[("T", rho)]);
        prop_assert!(gauss_poly_norm(&f, &r, BaseRing::ZArch).unwrap() <= l1_poly_norm(&f, &r, BaseRing::ZArch).unwrap());
        let n = |h: &Poly| gauss_poly_norm(h, &r, BaseRing::ZTriv).unwrap();
        prop_assert_eq!(n(&(&f * &g)), n(&f) * n(&g));
    }

    #[test]
    fn dagger_radii_and_norms_decrease(f in poly_in("T", 4), rho in radius(), k in 1u32..8) {
        let d = DaggerFamily::new(radii(&[("T", rho.clone())]), k);
        let rs = d.schedule();
        for w in rs.windows(2) {
            prop_assert!(w[1]["T"] < w[0]["T"]);
            prop_assert!(w[1]["T"] > rho);
        }
        let ns = d.l1_norms(&f, BaseRing::ZArch).unwrap();
        for w in ns.windows(2) {
            prop_assert!(w[1].le(&w[0]));
        }
    }

    #[test]
    fn normal_forms_are_idempotent(gens in prop::collection::vec(two_vars(), 1..3), f in two_vars()) {
        let ideal = IdealBasis::groebner(vec!["T".into(), "S".into()], &gens).unwrap();
        let nf = ideal.normal_form(&f).unwrap();
        prop_assert_eq!(ideal.normal_form(&nf).unwrap(), nf.clone());
        prop_assert!(ideal.contains(&(&f - &nf)).unwrap());
    }

    #[test]
    fn chart_isometry(terms in prop::collection::vec((-4i32..=4, -6i64..=6), 1..5)) {
        let f = LaurentPoly::new("X0", terms.into_iter().map(|(k, c)| (k, q(c, 1))));
        prop_assume!(f.terms().next().is_some());
        let rep = chart_isometry_check(&f, "X1", &annulus_samples("X0", 8)).unwrap();
        prop_assert!(rep.max_discrepancy < 1e-9, "{}", rep.max_discrepancy);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spectral_norm_is_power_multiplicative(f in nonzero("T", 3), rho in radius()) {
        let r = radii(&[("T", rho)]);
        let a = spectral_norm(&f, &r, BaseRing::ZArch).unwrap().value.to_f64();
        let b = spectral_norm(&f.pow(3), &r, BaseRing::ZArch).unwrap().value.to_f64();
        prop_assert!((b - a.powi(3)).abs() <= 1e-6 * b, "{a} {b}");
    }

    #[test]
    fn spectral_norm_between_gauss_and_l1(f in nonzero("T", 4), rho in radius()) {
        let r = radii(&[("T", rho)]);
        let s = spectral_norm(&f, &r, BaseRing::ZArch).unwrap().value;
        let l1 = Real::Exact(l1_poly_norm(&f, &r, BaseRing::ZArch).unwrap());
        let triv = spectral_norm(&f, &r, BaseRing::ZTriv).unwrap().value;
        prop_assert!(s.le(&l1));
        prop_assert!(triv.le(&s));
        prop_assert_eq!(triv.exact().cloned(), Some(gauss_poly_norm(&f, &r, BaseRing::ZTriv).unwrap()));
    }

    #[test]
    fn uniformization_is_non_increasing(f in nonzero("T", 3), rho in radius()) {
        let norm = L1Norm::new(BaseRing::ZArch, radii(&[("T", rho)]));
        let est = uniformization_estimate(&f, &norm, 16, DEFAULT_BIT_BUDGET).unwrap();
        for w in est.dyadic.windows(2) {
            prop_assert!(w[1].1.to_f64() <= w[0].1.to_f64() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn standard_coverings_cover(fs in prop::collection::vec(poly_in("T", 2), 2..4), rhos in prop::collection::vec(radius(), 3)) {
        let parent = line();
        let c = match standard_covering(&parent, &fs, &rhos[..fs.len()], None) {
            Err(Error::NotUnitIdeal) | Err(Error::InvalidCertificate(_)) => return Ok(()),
            other => other.unwrap(),
        };
        let pts = sample_spectrum(&parent, &density()).unwrap();
        prop_assert!(check_is_covering(&c, &pts).unwrap().ok);
    }

    #[test]
    fn laurent_coverings_cover(fs in prop::collection::vec(nonzero("T", 2), 1..3), rhos in prop::collection::vec(radius(), 2)) {
        let parent = line();
        let pairs: Vec<(Poly, Rational)> = fs.into_iter().zip(rhos).collect();
        let c = laurent_covering(&parent, &pairs).unwrap();
        prop_assert_eq!(c.members.len(), 1 << pairs.len());
        let pts = sample_spectrum(&parent, &density()).unwrap();
        prop_assert!(check_is_covering(&c, &pts).unwrap().ok);
    }

    #[test]
    fn rational_domains_compose(f in nonzero("T", 2), g in nonzero("T", 2), rho in radius(), sigma in radius()) {
        let parent = line();
        let d1 = RationalDomainSpec::new(vec![(Poly::one(), q(1, 1)), (f, rho)]).unwrap();
        let d2 = RationalDomainSpec::new(vec![(g, q(1, 1)), (Poly::one(), sigma)]).unwrap();
        let inner = rational_domain_algebra(&parent, &d1).unwrap();
        let nested = rational_domain_algebra(&inner, &d2).unwrap();
        let pe = PresentationEval::new(&nested);
        for x in sample_spectrum(&parent, &density()).unwrap() {
            let want = domain_membership(&parent, &x, &d1).unwrap() && domain_membership(&parent, &x, &d2).unwrap();
            prop_assert_eq!(pe.admits(&x).unwrap(), want, "{}", x);
        }
    }

    #[test]
    fn cech_differentials_compose_to_zero(f in nonzero("T", 3), a in poly_in("T", 4)) {
        let cx = cech_complex(&laurent_covering(&line(), &[(f, q(1, 1))]).unwrap()).unwrap();
        let d1 = cx.d1(&cx.d0(&a).unwrap()).unwrap();
        prop_assert!(d1.iter().all(Poly::is_zero));
    }

    #[test]
    fn laurent_coverings_of_the_line_are_acyclic(f in nonzero("T", 3)) {
        let cx = cech_complex(&laurent_covering(&line(), &[(f, q(1, 1))]).unwrap()).unwrap();
        let rep = check_exactness(&cx, DEFAULT_DEGREE_BOUND).unwrap();
        prop_assert!(rep.is_exact(), "{}", rep.to_json());
    }

    #[test]
    fn laurent_coverings_of_the_parabola_are_acyclic(f in nonzero("S", 3)) {
        let cx = cech_complex(&laurent_covering(&parabola(), &[(f, q(1, 1))]).unwrap()).unwrap();
        let rep = check_exactness(&cx, DEFAULT_DEGREE_BOUND).unwrap();
        prop_assert!(rep.is_exact(), "{}", rep.to_json());
    }
}
