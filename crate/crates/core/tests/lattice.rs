mod common;

use std::collections::BTreeSet;

use common::{fx, log_h_f64, word};
use num_traits::ToPrimitive;
use shintani_core::embed::l_point;
use shintani_core::pipeline::{lattice_points_in_ball, LogLattice};
use shintani_core::{rat, ratio, Rational};

// sup distance of `Log_H(g1^a g2^b)` to `c`, from f64 logs of the generators
fn dist(l1: &[f64; 3], l2: &[f64; 3], k: (i64, i64), c: &[f64; 3]) -> f64 {
    (0..3).map(|j| (k.0 as f64 * l1[j] + k.1 as f64 * l2[j] - c[j]).abs()).fold(0.0, f64::max)
}

fn check_ball(center: [Rational; 3], radius: Rational) {
    let f = fx();
    let lat = LogLattice::new(&f.geo, &f.g1, &f.g2, None, 64).unwrap();
    let got = lattice_points_in_ball(&f.geo, &lat, &center, &radius, &f.cfg).unwrap();
    assert!(got.undecided.is_empty());
    let inside: BTreeSet<_> = got.inside.iter().map(|p| p.k).collect();
    let (l1, l2) = (log_h_f64(&f.g1), log_h_f64(&f.g2));
    let c = center.clone().map(|v| v.to_f64().unwrap());
    let r = radius.to_f64().unwrap();
    for a in -40..=40 {
        for b in -40..=40 {
            let d = dist(&l1, &l2, (a, b), &c);
            if (d - r).abs() < 1e-9 {
                continue;
            }
            assert_eq!(inside.contains(&(a, b)), d < r, "({}, {}) at distance {}", a, b, d);
        }
    }
    for p in &got.inside {
        assert_eq!(p.element, word(&f.g1, &f.g2, p.k));
    }
}

#[test]
fn ball_at_the_origin_holds_only_the_identity() {
    check_ball([rat(0), rat(0), rat(0)], ratio(1, 10));
}

#[test]
fn balls_agree_with_brute_force() {
    check_ball([rat(0), rat(0), rat(0)], rat(12));
    check_ball(l_point(1, &rat(20)), rat(4));
    check_ball(l_point(2, &rat(35)), ratio(15, 2));
    check_ball([ratio(3, 2), rat(-7), ratio(11, 2)], rat(9));
}

#[test]
fn ball_output_is_a_set() {
    let f = fx();
    let c = l_point(1, &rat(20));
    let a = LogLattice::new(&f.geo, &f.g1, &f.g2, None, 64).unwrap();
    let b = LogLattice::new(&f.geo, &f.g2, &f.g1, None, 64).unwrap();
    let pa: BTreeSet<_> = lattice_points_in_ball(&f.geo, &a, &c, &rat(6), &f.cfg).unwrap().inside.iter().map(|p| p.k).collect();
    let pb: BTreeSet<_> = lattice_points_in_ball(&f.geo, &b, &c, &rat(6), &f.cfg).unwrap().inside.iter().map(|p| (p.k.1, p.k.0)).collect();
    assert!(!pa.is_empty());
    assert_eq!(pa, pb);
}
