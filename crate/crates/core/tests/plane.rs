mod common;

use common::{fx, log_h_f64, word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shintani_core::error::Error;
use shintani_core::plane::{check_fixgi, PlaneBasis};
use shintani_core::{rat, ratio};

#[test]
fn phi_is_additive_on_random_unit_products() {
    let f = fx();
    let basis = PlaneBasis::new(&f.emb, &f.g1, &f.g2, 96).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let ka = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
        let kb = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
        let a = word(&f.g1, &f.g2, ka);
        let b = word(&f.g1, &f.g2, kb);
        let (pa, pb, pab) = (basis.phi(&a).unwrap(), basis.phi(&b).unwrap(), basis.phi(&(&a * &b)).unwrap());
        let sum = pa.add(&pb);
        let slack = pab.err() + pa.err() + pb.err();
        assert!((pab.x_f64() - sum.x_f64()).abs() <= slack + 1e-300);
        assert!((pab.y_f64() - sum.y_f64()).abs() <= slack + 1e-300);
        assert!(pab.meets(&sum));
    }
}

#[test]
fn phi_sends_unit_words_to_their_exponents() {
    let f = fx();
    let basis = PlaneBasis::new(&f.emb, &f.e1, &f.e2, 128).unwrap();
    for a in -5..=5 {
        for b in -5..=5 {
            let p = basis.phi(&word(&f.e1, &f.e2, (a, b))).unwrap();
            assert!(p.encloses(&rat(a), &rat(b)), "({}, {}) -> ({}, {})", a, b, p.x_f64(), p.y_f64());
            assert!(p.err() < 1e-12);
        }
    }
}

#[test]
fn phi_of_a_non_unit_matches_the_f64_projection() {
    let f = fx();
    let basis = PlaneBasis::new(&f.emb, &f.g1, &f.g2, 96).unwrap();
    let p = basis.phi(&f.pi).unwrap();
    let (l1, l2, lp) = (log_h_f64(&f.g1), log_h_f64(&f.g2), log_h_f64(&f.pi));
    // least squares in the first two coordinates is exact on the plane
    let det = l1[0] * l2[1] - l1[1] * l2[0];
    let x = (lp[0] * l2[1] - lp[1] * l2[0]) / det;
    let y = (l1[0] * lp[1] - l1[1] * lp[0]) / det;
    assert!((p.x_f64() - x).abs() < 1e-9 && (p.y_f64() - y).abs() < 1e-9);
}

#[test]
fn endpoint_slopes_match_central_differences() {
    let f = fx();
    let basis = PlaneBasis::new(&f.emb, &f.e1, &f.e2, 256).unwrap();
    // the smallest embedding of these units is about 2^-37, so t = 1 + h must stay below 1 + 2^-37
    let h = ratio(1, 1 << 62);
    for i in [1u8, 2] {
        for (t, at) in [(0u8, rat(0)), (1, rat(1))] {
            let lo = basis.curve_point(i, 1, &(&at - &h)).unwrap();
            let hi = basis.curve_point(i, 1, &(&at + &h)).unwrap();
            let fd = hi.y.sub(&lo.y).div(&hi.x.sub(&lo.x)).unwrap();
            let d = basis.endpoint_derivative(i, 1, t).unwrap();
            let rel = fd.sub(&d).div(&d).unwrap();
            assert!(rel.lo.to_f64_nearest().abs().max(rel.hi.to_f64_nearest().abs()) <= 1e-6, "C{} at {}: {} vs {}", i, t, fd.mid_f64(), d.mid_f64());
        }
    }
}

#[test]
fn example_units_have_the_limit_signs() {
    let f = fx();
    let basis = PlaneBasis::new(&f.emb, &f.e1, &f.e2, 128).unwrap();
    let fix = check_fixgi(&f.emb, &f.e1, &f.e2, &f.cfg).unwrap();
    assert!(fix.chain1 && fix.chain2);
    let want = [(1u8, 0u8, 1, 0.2327), (1, 1, -1, -1.4088), (2, 0, -1, -1.4088), (2, 1, 1, 1.1990)];
    for (i, t, s, v) in want {
        let d = basis.endpoint_derivative(i, 1, t).unwrap();
        assert_eq!(d.sign(), Some(s));
        assert!((d.mid_f64() - v).abs() < 5e-4);
        let lim = basis.limit_derivative(i, t, &f.cfg).unwrap();
        assert_eq!(lim.sign(), Some(s));
        assert!((lim.mid_f64() - v).abs() < 5e-4);
    }
    let r = basis.check_direction_bounds(1, 256, &f.cfg).unwrap();
    assert!(r.pass, "{:?}", r.failures);
    assert!(r.min_margin > 0.1);
}

#[test]
fn raw_generators_fail_the_unit_chains() {
    let f = fx();
    let fix = check_fixgi(&f.emb, &f.g1, &f.g2, &f.cfg).unwrap();
    assert!(!fix.chain1);
    let basis = PlaneBasis::new(&f.emb, &f.g1, &f.g2, 64).unwrap();
    assert_eq!(basis.limit_derivative(1, 0, &f.cfg).unwrap_err(), Error::FixgiViolated(1));
    let r = basis.check_direction_bounds(1, 128, &f.cfg).unwrap();
    assert!(!r.pass && !r.failures.is_empty());
}

#[test]
fn curve_samples_are_pinned_and_convex() {
    let f = fx();
    let basis = PlaneBasis::new(&f.emb, &f.e1, &f.e2, 64).unwrap();
    for i in [1u8, 2] {
        let c = basis.curve_sample(i, 1, 65, (0, 0)).unwrap();
        let (a, z) = (c.points.first().unwrap(), c.points.last().unwrap());
        assert!(a.encloses(&rat(0), &rat(0)));
        let end = if i == 1 { (rat(1), rat(0)) } else { (rat(0), rat(1)) };
        assert!(z.encloses(&end.0, &end.1));
        assert!(c.chord_side().is_some());
        // interior samples agree with the direct evaluation
        let mid = basis.curve_point(i, 1, &ratio(1, 2)).unwrap();
        assert!(mid.meets(&c.points[32]));
    }
}
