use cartan_adelic::analytic_bounds::{adelic_bound_height, lambda_bound_height, parse_rational, FormulaId};
use cartan_adelic::index_assembly::{
    compare_case_a, compose_case_a, compose_case_a_absorbed, compose_case_b, entanglement_ratio_bound,
    five_exceptional, full_pipeline_height, known_point_lookup, padic_index, three_adic_surjective_upper,
    two_adic_upper, Delta7, IndexRelation, Scenario, CASE_A_CONSTANT, KNOWN_INDICES_WITHOUT_J, KNOWN_POINTS,
};
use cartan_adelic::Error;
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

fn int(v: u64) -> Integer {
    Integer::from(v)
}

fn exact(r: &cartan_adelic::analytic_bounds::BoundReport) -> Rational {
    Rational::from(r.result.value().to_rational().unwrap())
}

#[test]
fn padic_index_facts() {
    let f = padic_index(7, 1).unwrap();
    assert_eq!((f.index_candidates.clone(), f.upper), (vec![21, 147], 147));
    let f = padic_index(5, 1).unwrap();
    assert_eq!((f.index_candidates.clone(), f.upper), (vec![10, 50, 30], 50));
    let f = padic_index(3, 2).unwrap();
    assert_eq!((f.index_candidates.clone(), f.upper), (vec![27], 243));
    assert!(padic_index(2, 1).is_err());
    assert_eq!((two_adic_upper(), three_adic_surjective_upper(), five_exceptional()), (32, 27, 5));
}

#[test]
fn case_a_values() {
    assert_eq!(CASE_A_CONSTANT, 2_488_320);
    let r = compose_case_a(&int(1), 0, Delta7::One).unwrap();
    assert_eq!(exact(&r), Rational::from(2_488_320));
    assert_eq!(r.formula_id, FormulaId::CaseA);
    let r = compose_case_a(&int(11), 1, Delta7::One).unwrap();
    assert_eq!(exact(&r), Rational::from(Integer::from(2_488_320u64 * 3 * 1331)));
    let r = compose_case_a(&int(2), 2, Delta7::EightThirds).unwrap();
    assert_eq!(exact(&r), Rational::from(2_488_320u64 * 9 * 8 * 8 / 3));
    assert!(matches!(compose_case_a(&int(0), 0, Delta7::One), Err(Error::DomainGuard(_))));
}

#[test]
fn absorbed_form_caps_delta7() {
    let plain = compose_case_a_absorbed(&int(5), 2, Delta7::EightThirds).unwrap();
    let capped = compose_case_a_absorbed(&int(5), 2, Delta7::Eight).unwrap();
    assert_eq!(exact(&plain), exact(&capped));
    let cmp = compare_case_a(&int(5), 2, 2, Delta7::Eight).unwrap();
    assert!(cmp.disagree);
    let cmp = compare_case_a(&int(5), 2, 2, Delta7::One).unwrap();
    assert!(!cmp.disagree);
    for s in ["1", "8/3", "8"] {
        assert_eq!(s.parse::<Delta7>().unwrap().to_string(), s);
    }
    assert!("3".parse::<Delta7>().is_err());
}

#[test]
fn case_b_and_entanglement() {
    let r = compose_case_b(&int(1)).unwrap();
    let v = r.to_f64();
    assert!((v - 4.3e12).abs() <= 4.3e12 * 1e-15);
    assert!(*r.result.value() >= 4_300_000_000_000u64);
    assert!((compose_case_b(&int(1000)).unwrap().to_f64() / 4.3e18 - 1.0).abs() < 1e-15);
    assert_eq!(entanglement_ratio_bound(0), 1536);
    assert_eq!(entanglement_ratio_bound(2), 55_296);
}

#[test]
fn known_points() {
    assert_eq!(known_point_lookup(&parse_rational("2^15*7^5").unwrap()).unwrap().adelic_index, 84);
    assert_eq!(known_point_lookup(&Rational::from(550_731_776)).unwrap().adelic_index, 84);
    let p = known_point_lookup(&parse_rational("3^3*41^3*61^3*149^3").unwrap()).unwrap();
    assert_eq!((p.adelic_index, p.relation), (108, IndexRelation::Equal));
    assert!(known_point_lookup(&Rational::from(0)).is_none());
    assert!(known_point_lookup(&Rational::from(1728)).is_none());
}

#[test]
fn known_table_is_consistent() {
    let mut seen = Vec::new();
    for k in KNOWN_POINTS {
        let j = k.j_value();
        assert!(!seen.contains(&j), "duplicate {}", k.j);
        assert_eq!(known_point_lookup(&j), Some(k));
        assert!(k.adelic_index >= 1 && !k.source.is_empty());
        seen.push(j);
    }
    // Cartan points of level 7 and 9 are integral
    for k in KNOWN_POINTS.iter().filter(|k| k.source.contains("Cartan")) {
        assert_eq!(*k.j_value().denom(), 1, "{}", k.j);
    }
    assert_eq!(KNOWN_INDICES_WITHOUT_J.iter().map(|k| k.adelic_index).collect::<Vec<_>>(), vec![224, 200, 300]);
}

#[test]
fn pipeline_case_b_is_dominated() {
    for f in [0.0, -0.75 + 1e-6, 1.0, 1e6, 1e15] {
        let r = full_pipeline_height(f, Scenario::CaseB).unwrap();
        assert!(r.dominated, "F = {f}");
        assert!(r.report.to_f64() < adelic_bound_height(f).unwrap().to_f64());
        let lam = lambda_bound_height(f).unwrap().to_f64();
        assert!((r.report.to_f64() / (4.3e12 * lam * lam) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pipeline_case_a_under_integral_j() {
    for i in 0..=60 {
        let f = -0.75 + 10f64.powf(-6.0 + 21.0 * i as f64 / 60.0);
        let r = full_pipeline_height(f, Scenario::paper_case_a()).unwrap();
        assert!(r.dominated, "F = {f}: {} vs {}", r.report.to_f64(), r.theorem_bound.to_f64());
    }
}

#[test]
fn pipeline_report_serialises_flat() {
    let r = full_pipeline_height(0.0, Scenario::CaseB).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["formula_id"], "pipeline_height");
    assert_eq!(v["dominated"], true);
    assert!(v.get("lambda_bound").is_some() && v.get("theorem_bound").is_some());
}

proptest! {
    #[test]
    fn case_a_scales_with_lambda_cubed(l in 1u64..1_000_000) {
        let r = compose_case_a(&int(l), 0, Delta7::One).unwrap();
        let cube = Integer::from(l).pow(3);
        prop_assert_eq!(exact(&r) / Rational::from(cube), Rational::from(2_488_320));
    }

    #[test]
    fn case_a_grows_with_beta(l in 1u64..10_000, beta in 0u32..20) {
        let a = exact(&compose_case_a(&int(l), beta, Delta7::One).unwrap());
        let b = exact(&compose_case_a(&int(l), beta + 1, Delta7::One).unwrap());
        prop_assert_eq!(b, a * Rational::from(3));
    }
}
