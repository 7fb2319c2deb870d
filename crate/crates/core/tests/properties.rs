mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use mtoric::groebner::{normal_form, Monomial};
use mtoric::matroid::validate_basis_axiom;
use mtoric::toric::{in_kernel, toric_gb};
use mtoric::{Basis, Matroid};

fn pool() -> &'static [Matroid] {
    static POOL: OnceLock<Vec<Matroid>> = OnceLock::new();
    POOL.get_or_init(|| common::small_matroid_closure(5))
}

/// A matroid from the closure, relabelled by a random permutation.
fn matroid() -> impl Strategy<Value = Matroid> {
    (0..pool().len(), any::<u64>()).prop_map(|(i, seed)| {
        let m = &pool()[i];
        let mut perm: Vec<usize> = (1..=m.ground_set_size()).collect();
        let mut s = seed;
        for k in (1..perm.len()).rev() {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            perm.swap(k, (s >> 33) as usize % (k + 1));
        }
        m.relabel(&perm)
    })
}

fn subset(n: usize) -> impl Strategy<Value = Basis> {
    any::<u64>().prop_map(move |bits| Basis::from_bits(bits & ((1u64 << n) - 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_is_an_involution(m in matroid()) {
        let d = m.dual();
        prop_assert_eq!(d.rank(), m.ground_set_size() - m.rank());
        prop_assert_eq!(d.dual(), m.clone());
        prop_assert_eq!(validate_basis_axiom(d.bases(), d.ground_set_size()).unwrap(), None);
    }

    #[test]
    fn rank_is_submodular_and_monotone(m in matroid(), seed in any::<(u64, u64)>()) {
        let n = m.ground_set_size();
        let mask = (1u64 << n) - 1;
        let (x, y) = (Basis::from_bits(seed.0 & mask), Basis::from_bits(seed.1 & mask));
        let r = |s: Basis| m.rank_of_subset(s).unwrap();
        prop_assert!(r(x.union(y)) + r(x.intersection(y)) <= r(x) + r(y));
        prop_assert!(r(x.intersection(y)) <= r(x));
        prop_assert!(r(x) <= x.len());
        prop_assert_eq!(r(m.ground_set()), m.rank());
    }

    #[test]
    fn three_connectivity_is_self_dual(m in matroid()) {
        prop_assert_eq!(m.is_3_connected(), m.dual().is_3_connected());
    }

    #[test]
    fn relabelling_preserves_isomorphism_class(m in matroid()) {
        let n = m.ground_set_size();
        let perm: Vec<usize> = (1..=n).rev().collect();
        let r = m.relabel(&perm);
        prop_assert!(m.is_isomorphic(&r));
        let iso = m.isomorphism(&r).unwrap();
        prop_assert_eq!(m.relabel(&iso), r);
    }

    #[test]
    fn direct_sum_is_a_matroid(a in matroid(), b in matroid()) {
        prop_assume!(a.ground_set_size() + b.ground_set_size() <= 8);
        let s = a.direct_sum(&b).unwrap();
        prop_assert_eq!(s.rank(), a.rank() + b.rank());
        prop_assert_eq!(s.num_bases(), a.num_bases() * b.num_bases());
        prop_assert_eq!(validate_basis_axiom(s.bases(), s.ground_set_size()).unwrap(), None);
        prop_assert!(!s.is_3_connected() || s.ground_set_size() < 4);
    }

    #[test]
    fn two_sum_is_a_matroid(a in matroid(), b in matroid(), p in any::<(usize, usize)>()) {
        prop_assume!(a.ground_set_size() + b.ground_set_size() <= 9);
        let p1 = p.0 % a.ground_set_size() + 1;
        let p2 = p.1 % b.ground_set_size() + 1;
        match a.two_sum(p1, &b, p2) {
            Ok(s) => {
                prop_assert_eq!(s.ground_set_size(), a.ground_set_size() + b.ground_set_size() - 2);
                prop_assert_eq!(s.rank(), a.rank() + b.rank() - 1);
                prop_assert_eq!(validate_basis_axiom(s.bases(), s.ground_set_size()).unwrap(), None);
            }
            Err(_) => {
                // base points must be neither loops nor coloops
                let bad = |m: &Matroid, e: usize| m.loops().contains(e) || m.coloops().contains(e);
                prop_assert!(bad(&a, p1) || bad(&b, p2));
            }
        }
    }

    #[test]
    fn text_format_round_trips(m in matroid()) {
        let back: Matroid = m.to_text().parse().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn toric_bases_lie_in_the_kernel(m in matroid(), seed in any::<u64>()) {
        prop_assume!(m.rank() > 0);
        let mut order = m.bases().to_vec();
        let shift = seed as usize % order.len();
        order.rotate_left(shift);
        let gb = toric_gb(&m, &order).unwrap().gb;
        prop_assert!(gb.reduced);
        for b in &gb.elements {
            prop_assert!(in_kernel(b, &gb.universe, m.ground_set_size()));
            prop_assert_eq!(b.lead.degree(), b.trail.degree());
        }
        // normal forms are idempotent
        let nvars = m.num_bases();
        let exps: Vec<u8> = (0..nvars).map(|i| ((seed >> (i % 60)) & 1) as u8).collect();
        let mono = Monomial::from_exponents(&exps);
        let nf = normal_form(&mono, &gb).unwrap();
        prop_assert_eq!(normal_form(&nf, &gb).unwrap(), nf);
    }

    #[test]
    fn uniform_matroids_are_base_sortable(r in 0usize..5, extra in 0usize..4) {
        prop_assert!(Matroid::uniform(r, r + extra).is_base_sortable());
    }

    #[test]
    fn rank_subsets_bounded(m in matroid(), x in subset(5)) {
        let x = x.intersection(m.ground_set());
        prop_assert!(m.rank_of_subset(x).unwrap() <= m.rank());
    }
}
