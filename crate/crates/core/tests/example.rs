mod common;

use common::{fx, word};
use shintani_core::geom::{Identity, IdentityCase};
use shintani_core::pipeline::{build_construction, check_sign_suite, classify_case, target_union, triangle_search, Case, ConstructionParams};
use shintani_core::Error;

#[test]
fn counterexample_support_leaves_the_unit_square() {
    let f = fx();
    let d = f.geo.colmez_domain(&f.g1, &f.g2).unwrap();
    assert!(d.is_disjoint());
    let s = f.geo.error_support(&d, &f.pi, &f.g1, &f.g2, 8).unwrap();
    assert_eq!(s, vec![(0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]);
    // each reported translate really meets pi^-1 D, checked on an explicit point
    let pd = d.scale_unchecked(&f.pi.inv().unwrap());
    for k in [(1, -1), (0, -1)] {
        let meet = d.scale_unchecked(&word(&f.g1, &f.g2, k)).intersect(&pd);
        let x = f.geo.sample_point(&meet).unwrap();
        assert!(pd.contains(&x));
        assert!(d.contains(&(&word(&f.g1, &f.g2, (-k.0, -k.1)) * &x)));
    }
}

#[test]
fn normalized_elements_give_both_cases() {
    let f = fx();
    let c1 = classify_case(&f.geo, &f.e1, &f.e2, &f.pi1, 6).unwrap();
    assert_eq!(c1.case, Case::Case1);
    assert_eq!(c1.cover.alpha, (1, 1));
    let c2 = classify_case(&f.geo, &f.e1, &f.e2, &f.pi2, 6).unwrap();
    assert_eq!(c2.case, Case::Case2);
    assert_eq!(c2.cover.alpha, (1, 2));
    assert!(c2.cover.support.iter().all(|k| k.0 >= 0 && k.1 >= 0));
}

#[test]
fn case_moves_with_the_unit_shift() {
    let f = fx();
    let b = f.geo.explicit_b(&f.e1, &f.e2).unwrap();
    let base = f.geo.error_support(&b, &f.pi1, &f.e1, &f.e2, 6).unwrap();
    for k in [(1, 0), (0, -1), (-1, 1)] {
        let u = word(&f.e1, &f.e2, k);
        let moved = f.geo.error_support(&b, &(&u * &f.pi1), &f.e1, &f.e2, 6).unwrap();
        let mut want: Vec<_> = base.iter().map(|s| (s.0 - k.0, s.1 - k.1)).collect();
        want.sort();
        assert_eq!(moved, want, "shift {:?}", k);
    }
    // the unnormalized element is outside the proposition's regime
    assert!(matches!(classify_case(&f.geo, &f.e1, &f.e2, &f.pi, 8), Err(Error::InclusionViolated(_)) | Err(Error::WindowExceeded(..))));
}

#[test]
fn case_one_identities_hold_exactly() {
    let f = fx();
    for id in [Identity::Id1, Identity::Id2] {
        let r = f.geo.verify_identity(IdentityCase::Case1, id, &f.e1, &f.e2, &f.pi1).unwrap();
        assert!(r.holds, "{:?}: {:?}", id, r.witness);
        assert!(r.lhs.set_equal(&r.rhs).0);
    }
}

#[test]
fn case_two_identities_hold_exactly() {
    let f = fx();
    for id in [Identity::Id1, Identity::Id2, Identity::Case2Extra] {
        let r = f.geo.verify_identity(IdentityCase::Case2, id, &f.e1, &f.e2, &f.pi2).unwrap();
        assert!(r.holds, "{:?}: {:?}", id, r.witness);
        if id == Identity::Case2Extra {
            assert_eq!(r.expected_form, Some(true));
        }
    }
}

#[test]
fn identities_detect_a_wrong_case() {
    let f = fx();
    let r = f.geo.verify_identity(IdentityCase::Case1, Identity::Id1, &f.e1, &f.e2, &f.pi2).unwrap();
    assert!(!r.holds);
    let w = r.witness.expect("a separating point");
    assert_ne!(r.lhs.contains(&w), r.rhs.contains(&w));
}

#[test]
fn sign_suite_on_the_normalized_elements() {
    let f = fx();
    for p in [&f.pi1, &f.pi2] {
        let s = check_sign_suite(&f.geo, &f.e1, &f.e2, p).unwrap();
        assert!(s.units_pass);
        assert_eq!(s.checks.iter().map(|c| c.got).collect::<Vec<_>>(), vec![1, -1, -1, 1, 1, -1]);
        assert!(s.coset_pass && !s.coset_literal);
    }
    let s = check_sign_suite(&f.geo, &f.e1, &f.e2, &f.pi).unwrap();
    assert!(!s.coset_pass);
}

#[test]
fn triangle_search_recovers_the_first_normalization() {
    let f = fx();
    let hit = triangle_search(&f.geo, (&f.e1, &f.e2), (&f.g1, &f.g2), &f.pi, 64.0, &f.cfg).unwrap();
    assert_eq!(hit.k, (-6, 2));
    assert_eq!(&hit.omega * &f.pi, f.pi1);
    assert!(target_union(&f.geo, &f.e1, &f.e2).unwrap().contains(&f.pi1.inv().unwrap()));
    assert!(matches!(triangle_search(&f.geo, (&f.e1, &f.e2), (&f.g1, &f.g2), &f.pi, 0.5, &f.cfg), Err(Error::Exhausted(_))));
}

#[test]
fn construction_with_example_overrides() {
    let f = fx();
    let params = ConstructionParams { overrides: Some((f.e1.clone(), f.e2.clone())), ..ConstructionParams::default() };
    let r = build_construction(&f.geo, &f.g1, &f.g2, &f.pi, &params).unwrap();
    assert_eq!(r.l, 1);
    assert_eq!((&r.e1, &r.e2), (&f.e1, &f.e2));
    assert_eq!(&r.omega * &f.pi, f.pi1);
    assert_eq!(r.case, Case::Case1);
    assert!(r.reverify(&f.geo, &f.pi).unwrap());
    // without overrides the generators themselves fail the unit chains
    let bare = build_construction(&f.geo, &f.g1, &f.g2, &f.pi, &ConstructionParams::default());
    assert_eq!(bare.unwrap_err(), Error::FixgiViolated(1));
    // inputs are validated first
    let two = shintani_core::Element::from_int(&f.spec, 2);
    assert!(matches!(build_construction(&f.geo, &two, &f.g2, &f.pi, &params), Err(Error::NotAUnit(_))));
    let neg = -&f.pi;
    assert!(matches!(build_construction(&f.geo, &f.g1, &f.g2, &neg, &params), Err(Error::NotTotallyPositive(_))));
}

#[test]
fn construction_short_circuits_when_already_normalized() {
    let f = fx();
    let params = ConstructionParams { overrides: Some((f.e1.clone(), f.e2.clone())), ..ConstructionParams::default() };
    let r = build_construction(&f.geo, &f.g1, &f.g2, &f.pi1, &params).unwrap();
    assert!(r.omega.is_one());
}
