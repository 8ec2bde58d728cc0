use agcal_core::gauges::{
    algebra_order, check_axioms, equivalent_gauges, exp_gauge, ideal_compatible, is_moderate, parse_gauge,
    AlgebraSpec, Gauge,
};
use agcal_core::gen_numbers::{bar_project, gn_eq, GenNumber};
use agcal_core::index_core::Net;
use agcal_core::rate_dsl::parse;

fn g(text: &str) -> Gauge {
    parse_gauge(text).unwrap()
}

#[test]
fn exponentials_of_power_gauges_satisfy_every_axiom() {
    for base in ["eps^-1", "eps^-3", "log(1/eps)", "exp(eps^-1)"] {
        let pg = Gauge::powers(parse(base).unwrap()).unwrap();
        assert!(check_axioms(&pg).all_hold(), "{base}");
        assert!(check_axioms(&exp_gauge(&pg)).all_hold(), "expof {base}");
    }
}

#[test]
fn literals_round_trip() {
    for text in [
        "powers(eps^-1)",
        "powers_nat(exp(eps^-1))",
        "gens[eps^-1, eps^-2]",
        "expof(powers(eps^-1))",
        "iterexp(eps^-1)",
    ] {
        let once = g(text);
        assert_eq!(g(&once.literal()), once, "{text}");
    }
    let err = parse_gauge("powers(eps^-1").unwrap_err();
    assert!(err.offset > 0);
}

#[test]
fn equivalence_is_symmetric_and_detects_strict_growth() {
    let pairs = [
        ("powers(eps^-1)", "powers_nat(eps^-1)", true),
        ("powers(eps^-1)", "powers(log(1/eps))", false),
        ("expof(powers(eps^-1))", "expof(powers(eps^-2))", true),
        ("powers(eps^-1)", "expof(powers(eps^-1))", false),
    ];
    for (a, b, same) in pairs {
        let ab = equivalent_gauges(&g(a), &g(b)).unwrap();
        let ba = equivalent_gauges(&g(b), &g(a)).unwrap();
        assert_eq!(ab.status, ba.status, "{a} / {b}");
        assert_eq!(ab.holds(), same, "{a} / {b}");
    }
}

#[test]
fn the_exponential_gauge_dominates_its_base() {
    let b = g("powers(eps^-1)");
    let e = exp_gauge(&b);
    assert!(ideal_compatible(&b, &e).unwrap().holds());
    assert!(!ideal_compatible(&e, &b).unwrap().holds());
    let small = AlgebraSpec::diagonal(b.clone());
    let big = AlgebraSpec::diagonal(e.clone());
    assert!(algebra_order(&small, &big).unwrap().holds());
    assert!(!algebra_order(&big, &small).unwrap().holds());
    let x = Net::parse("exp(3 * eps^-1) * eps^-5").unwrap();
    assert!(is_moderate(&x, &e).unwrap().holds());
    assert!(is_moderate(&x, &b).unwrap().fails());
}

#[test]
fn projection_to_a_coarser_algebra_identifies_negligible_differences() {
    let fine = AlgebraSpec::new(g("powers(eps^-1)"), g("expof(powers(eps^-1))")).unwrap();
    let coarse = AlgebraSpec::diagonal(g("powers(eps^-1)"));
    let a = GenNumber::parse("eps^-2 + 1", fine.clone()).unwrap();
    let b = GenNumber::parse("eps^-2 + 1 + exp(-1 * eps^-1)", fine).unwrap();
    assert!(!gn_eq(&a, &b).unwrap().holds());
    let pa = bar_project(&a, &coarse).unwrap();
    let pb = bar_project(&b, &coarse).unwrap();
    assert!(gn_eq(&pa, &pb).unwrap().holds());
}
