mod common;

use autostruct::equiv::*;
use autostruct::fo::validate_equivalence;
use autostruct::{ExtendedCount, IsoVerdict, Polynomial};
use common::census::brute_census;
use common::lo::c;
use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(s: &str) -> Polynomial {
    s.parse().unwrap()
}

fn fin(n: u64) -> ExtendedCount {
    ExtendedCount::finite(n)
}

fn finite_sizes(max: u64) -> Vec<ClassSize> {
    (1..=max).map(ClassSize::Finite).collect()
}

#[test]
fn census_of_e_x1() {
    let e = equiv_from_poly(&poly("x1"), 1).unwrap();
    let mut sizes = finite_sizes(8);
    sizes.push(ClassSize::Aleph0);
    let h = census(&e, &sizes).unwrap();
    for n in 1..=8 {
        assert_eq!(h.get(ClassSize::Finite(n)), Some(&fin(1)), "h({n})");
    }
    assert_eq!(h.get(ClassSize::Aleph0), Some(&fin(0)));
    let brute = brute_census(&e, 8);
    assert_eq!(brute, (1..=8).map(|n| (n, 1)).collect());
}

#[test]
fn census_of_e_x1_squared() {
    let e = equiv_from_poly(&poly("x1*x1"), 1).unwrap();
    let h = census(&e, &finite_sizes(9)).unwrap();
    for n in 1..=9 {
        let want = if [1, 4, 9].contains(&n) { 1 } else { 0 };
        assert_eq!(h.get(ClassSize::Finite(n)), Some(&fin(want)), "h({n})");
    }
    let brute = brute_census(&e, 8);
    assert_eq!(brute, (1..=8).map(|c| (c * c, 1)).collect());
}

/// For increasing one-variable `p`, every class of size at most `p(8)` sits
/// on a word of length at most 8.
#[test]
fn census_matches_enumeration_for_sampled_polynomials() {
    for (p, at) in [
        ("2*x1+1", (|x| 2 * x + 1) as fn(u64) -> u64),
        ("x1*x1+x1", |x| x * x + x),
        ("x1+2", |x| x + 2),
    ] {
        let e = equiv_from_poly(&poly(p), 1).unwrap();
        let top = at(8).min(census_cap());
        let h = census(&e, &finite_sizes(top)).unwrap();
        let brute = brute_census(&e, 8);
        for n in 1..=top {
            let want = brute.get(&n).copied().unwrap_or(0);
            assert_eq!(h.get(ClassSize::Finite(n)), Some(&fin(want)), "{p}: h({n})");
        }
    }
    // Two variables: the classes of x1 + x2 with at most 9 elements sit on
    // points with coordinates below 9.
    let e = equiv_from_poly(&poly("x1+x2"), 2).unwrap();
    let h = census(&e, &finite_sizes(9)).unwrap();
    let brute = brute_census(&e, 8);
    for n in 1..=9 {
        assert_eq!(h.get(ClassSize::Finite(n)), Some(&fin(brute.get(&n).copied().unwrap_or(0))), "h({n})");
        assert_eq!(h.get(ClassSize::Finite(n)), Some(&fin(n.saturating_sub(1))));
    }
}

#[test]
fn sizes_present_are_the_positive_image() {
    for (p, k) in [("x1*x2", 2), ("x1+x2*x2", 2), ("x1*x1+1", 1)] {
        let pp = poly(p);
        let e = equiv_from_poly(&pp, k).unwrap();
        let h = census(&e, &finite_sizes(20)).unwrap();
        let mut image = vec![false; 21];
        let range: Vec<u64> = (1..=20).collect();
        let points: Vec<Vec<u64>> = if k == 1 {
            range.iter().map(|&x| vec![x]).collect()
        } else {
            range.iter().flat_map(|&x| range.iter().map(move |&y| vec![x, y])).collect()
        };
        for pt in points {
            let v = pp.eval_u64(&pt);
            if v <= 20 {
                image[v as usize] = true;
            }
        }
        for n in 1..=20u64 {
            let present = h.get(ClassSize::Finite(n)).unwrap() != &fin(0);
            assert_eq!(present, image[n as usize], "{p}: n = {n}");
        }
    }
}

#[test]
fn class_over_a_word_has_p_elements() {
    let e = equiv_from_poly(&poly("x1"), 1).unwrap();
    assert!(!e.presentation().domain().accepts(&[]));
    assert!(validate_equivalence(e.presentation()).unwrap());
    assert_eq!(brute_census(&e, 3).get(&3), Some(&1));
}

#[test]
fn e_good_census() {
    let g = build_e_good().unwrap();
    assert!(validate_equivalence(g.presentation()).unwrap());
    assert_eq!(class_size_count(&g, ClassSize::Finite(c(1, 2))).unwrap(), ExtendedCount::Infinite);
    assert_eq!(class_size_count(&g, ClassSize::Finite(c(2, 1))).unwrap(), ExtendedCount::Infinite);
    assert_eq!(class_size_count(&g, ClassSize::Finite(8)).unwrap(), fin(0));
    assert_eq!(class_size_count(&g, ClassSize::Finite(5)).unwrap(), fin(0));
}

#[test]
fn unsolvable_pair_matches_e_good() {
    let e = e_good_reduction(&poly("x1"), &poly("x1+1"), 2).unwrap();
    for (y, z) in [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3)] {
        assert_eq!(class_size_count(&e, ClassSize::Finite(c(y, z))).unwrap(), ExtendedCount::Infinite, "C({y},{z})");
    }
    let g = build_e_good().unwrap();
    let v = iso_check_equiv(&e, &g, 60).unwrap();
    assert!(matches!(v, IsoVerdict::ConsistentUpTo { .. }), "{v}");
}

#[test]
fn solvable_pair_is_refuted_on_a_diagonal_size() {
    let e = e_good_reduction(&poly("x1"), &poly("x2"), 2).unwrap();
    let g = build_e_good().unwrap();
    let IsoVerdict::NonIsomorphic { certificate } = iso_check_equiv(&e, &g, 60).unwrap() else {
        panic!("expected a refutation");
    };
    let diagonal: Vec<u64> = (1..6).map(|y| c(y, y)).filter(|&v| v <= 60).collect();
    let n: u64 = certificate.statistic.trim_start_matches("h(").trim_end_matches(')').parse().unwrap();
    assert!(diagonal.contains(&n), "{n}");
    assert_eq!(class_size_count(&e, ClassSize::Finite(n)).unwrap(), certificate.left);
    assert_eq!(class_size_count(&g, ClassSize::Finite(n)).unwrap(), certificate.right);
    assert_ne!(certificate.left, certificate.right);
}

#[test]
fn reduction_parameters() {
    assert!(e_good_reduction(&Polynomial::zero(2), &poly("x1"), 2).is_err());
    assert!(equiv_from_poly(&Polynomial::zero(1), 1).is_err());
    let e = equiv_from_poly(&poly("x1"), 1).unwrap();
    assert!(iso_check_equiv(&e, &e, 0).is_err());
}

#[test]
fn same_structure_is_never_refuted() {
    let e = equiv_from_poly(&poly("x1*x1"), 1).unwrap();
    assert!(!iso_check_equiv(&e, &e, 20).unwrap().is_non_isomorphic());
}

#[test]
fn finite_structures_against_bijection_search() {
    let a = finite_equiv(&[0, 1, 1, 2, 2]);
    let b = finite_equiv(&[5, 5, 3, 4, 4]);
    assert_eq!(iso_check_equiv(&a, &b, 4).unwrap(), IsoVerdict::Isomorphic);

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for round in 0..40 {
        let n = rng.gen_range(1..=10);
        let x: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let y: Vec<usize> = if round % 2 == 0 {
            let mut perm: Vec<usize> = x.iter().map(|v| v + 10).collect();
            perm.shuffle(&mut rng);
            perm
        } else {
            let m = if rng.gen_bool(0.8) { n } else { rng.gen_range(1..=10) };
            (0..m).map(|_| rng.gen_range(0..4)).collect()
        };
        let v = iso_check_equiv(&finite_equiv(&x), &finite_equiv(&y), 3).unwrap();
        if equiv_isomorphic(&x, &y) {
            assert_eq!(v, IsoVerdict::Isomorphic, "{x:?} {y:?}");
        } else {
            assert!(v.is_non_isomorphic(), "{x:?} {y:?}");
        }
    }
}

#[test]
fn census_json_uses_inf() {
    let e = equiv_from_poly(&poly("x1"), 1).unwrap();
    let h = census(&e, &[ClassSize::Finite(2), ClassSize::Aleph0]).unwrap();
    let text = serde_json::to_string(&h).unwrap();
    assert!(text.contains("\"inf\""), "{text}");
    let back: SizeCensus = serde_json::from_str(&text).unwrap();
    assert_eq!(back, h);
    assert_eq!(census(&e, &[ClassSize::Finite(2), ClassSize::Aleph0]).unwrap(), h);
}

#[test]
fn census_cap_is_enforced() {
    let e = equiv_from_poly(&poly("x1"), 1).unwrap();
    let over = census_cap() + 1;
    assert!(census(&e, &[ClassSize::Finite(over)]).is_err());
}
