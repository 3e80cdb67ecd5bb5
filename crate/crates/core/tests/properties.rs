use proptest::prelude::*;

use sturmian_hankel::partition::Parallelogram;
use sturmian_hankel::{
    classify, det_bareiss, det_crt, eval_closed, eval_oracle, family_member, family_upto,
    is_member, matrix, parallelograms_in_window, phi, AnchorKind, CellFlags, Method, Region,
    RegionKind, Window,
};

fn kind() -> impl Strategy<Value = AnchorKind> {
    prop::sample::select(AnchorKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn crt_agrees_with_bareiss(m in 0u64..5_000, n in 1u64..=40) {
        let mat = matrix(m, n).unwrap();
        prop_assert_eq!(det_crt(&mat).unwrap(), det_bareiss(&mat));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_form_matches_oracle_far_out(m in 0u64..200_000, n in 1u64..=70) {
        prop_assert_eq!(eval_closed(m, n).unwrap(), eval_oracle(m, n, Method::Crt).unwrap());
    }

    #[test]
    fn classify_is_consistent(m in 0u64..1_000_000_000, n in 1u64..100_000) {
        let c = classify(m, n).unwrap();
        match c.region {
            Region::SpecialOrigin => prop_assert_eq!((m, n), (0, 1)),
            Region::Parallelogram(p) => {
                prop_assert!(p.contains(m, n));
                prop_assert_eq!(p.flags(m, n), c.flags);
                if c.flags.contains(CellFlags::INTERIOR) {
                    prop_assert_eq!(c.flags, CellFlags::INTERIOR);
                }
                // The enumerated family agrees with the direct lookup.
                if p.index() <= 100_000 {
                    let rebuilt = Parallelogram::nth(p.kind(), p.generation(), p.index()).unwrap();
                    prop_assert_eq!(rebuilt, p);
                }
            }
        }
    }

    #[test]
    fn interior_cells_vanish_for_large_offsets(m in 0u64..1_000_000_000_000, n in 1u64..1_000_000) {
        let c = classify(m, n).unwrap();
        if c.flags == CellFlags::INTERIOR {
            prop_assert!(eval_closed(m, n).unwrap().is_zero());
        }
    }

    #[test]
    fn members_satisfy_predicate(kind in kind(), k in 0u32..=6, i in 1usize..2_000) {
        let x = family_member(kind, k, i).unwrap();
        prop_assert!(is_member(kind, k, x).unwrap());
        if i > 1 {
            let prev = family_member(kind, k, i - 1).unwrap();
            prop_assert!(prev < x);
            // Nothing in between belongs to the set.
            let between = (prev + 1..x).filter(|&y| is_member(kind, k, y).unwrap()).count();
            prop_assert_eq!(between, 0);
        }
    }

    #[test]
    fn upto_is_prefix_of_members(kind in kind(), k in 0u32..=5, bound in 0u64..300_000) {
        let list = family_upto(kind, k, bound).unwrap();
        prop_assert!(list.iter().all(|&x| x <= bound));
        let next = family_member(kind, k, list.len() + 1).unwrap();
        prop_assert!(next > bound);
    }

    #[test]
    fn e_prime_members_fix_phi(k in 0u32..=8, i in 1usize..500) {
        let x = family_member(AnchorKind::EPrime, k, i).unwrap();
        let target = sturmian_hankel::f(2 * k as usize + 3).unwrap() / 2;
        prop_assert_eq!(phi(k, x), target);
    }
}

#[test]
fn window_parallelograms_cover_classification() {
    let w = Window::with_rows(300, 2, 120);
    let listed = parallelograms_in_window(w).unwrap();
    for n in [2u64, 3, 4, 7, 10, 16, 17, 23, 24, 40, 41, 57, 58, 99, 120] {
        for m in 0..=300 {
            let c = classify(m, n).unwrap();
            let p = c.parallelogram().unwrap();
            assert!(listed.contains(p), "({m}, {n}) in unlisted {p}");
        }
    }
    let mut sorted = listed.clone();
    sorted.sort_by_key(|p| (p.generation(), p.kind(), p.index()));
    assert_eq!(sorted, listed);
}

#[test]
fn region_kinds_present_in_every_generation() {
    let w = Window::new(2_000, 600);
    let listed = parallelograms_in_window(w).unwrap();
    for k in 0..=3 {
        for kind in [RegionKind::U, RegionKind::V, RegionKind::T] {
            assert!(
                listed
                    .iter()
                    .any(|p| p.generation() == k && p.kind() == kind),
                "{kind} missing at k = {k}"
            );
        }
    }
}

#[test]
fn generation_three_edges_match_oracle() {
    // One parallelogram of each kind at k = 3, walked along both side edges.
    for kind in [RegionKind::U, RegionKind::V, RegionKind::T] {
        let p = Parallelogram::nth(kind, 3, 2).unwrap();
        let (lo, hi) = p.diagonals();
        let (bottom, top_end) = p.rows();
        for n in (bottom..top_end).step_by(5) {
            for d in [lo + 1, hi, (lo + hi) / 2] {
                if d < n {
                    continue;
                }
                let m = d - n;
                assert_eq!(
                    eval_closed(m, n).unwrap(),
                    eval_oracle(m, n, Method::Crt).unwrap(),
                    "{p} at ({m}, {n})"
                );
            }
        }
    }
}
