mod common;

use common::brute_force_solution_dim;
use locc_lab::linalg::int;
use locc_lab::{
    build, certify_party, dot, inner_product, kernel_basis, rank, Family, FamilyParams, Party,
    RationalMatrix, RationalVector,
};
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..6, 1usize..7).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, c), r).prop_map(|rows| {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            RationalMatrix::from_i64_rows(&refs).unwrap()
        })
    })
}

fn vector(len: usize) -> impl Strategy<Value = RationalVector> {
    prop::collection::vec(-5i64..=5, len).prop_map(|v| v.into_iter().map(int).collect())
}

proptest! {
    #[test]
    fn kernel_vectors_are_annihilated(m in small_matrix()) {
        for b in kernel_basis(&m) {
            let image = m.mul_vec(&b).unwrap();
            prop_assert!(image.iter().all(|x| *x == int(0)));
        }
    }

    #[test]
    fn rank_plus_nullity_is_column_count(m in small_matrix()) {
        prop_assert_eq!(rank(&m) + kernel_basis(&m).len(), m.cols());
    }

    #[test]
    fn kernel_basis_is_independent(m in small_matrix()) {
        let k = kernel_basis(&m);
        if !k.is_empty() {
            let stacked = RationalMatrix::from_rows(k.clone()).unwrap();
            prop_assert_eq!(rank(&stacked), k.len());
        }
    }

    #[test]
    fn dot_is_symmetric_and_bilinear(
        (u, v, w) in (1usize..8).prop_flat_map(|n| (vector(n), vector(n), vector(n))),
        a in -4i64..=4,
    ) {
        prop_assert_eq!(dot(&u, &v).unwrap(), dot(&v, &u).unwrap());
        let au_plus_w: RationalVector = u.iter().zip(&w).map(|(x, y)| int(a) * x + y).collect();
        prop_assert_eq!(
            dot(&au_plus_w, &v).unwrap(),
            int(a) * dot(&u, &v).unwrap() + dot(&w, &v).unwrap()
        );
    }

    #[test]
    fn inner_product_is_symmetric(n in 4usize..9, i in 0usize..64, j in 0usize..64) {
        let s = build(FamilyParams::new(n, 4), Family::Thm1).unwrap();
        let (x, y) = (&s.states()[i % s.len()], &s.states()[j % s.len()]);
        prop_assert_eq!(inner_product(x, y).unwrap(), inner_product(y, x).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Dropping states removes constraints, so the solution space can only grow.
    #[test]
    fn removing_states_never_shrinks_the_solution_space(
        keep in prop::collection::vec(any::<bool>(), 11),
        party in prop_oneof![Just(Party::A), Just(Party::B)],
    ) {
        let s = build(FamilyParams::new(6, 4), Family::Thm1).unwrap();
        let idx: Vec<usize> = (0..s.len()).filter(|&i| keep[i]).collect();
        let sub = s.subset(&idx);
        let full = certify_party(&s, party).unwrap().solution_dim();
        let part = certify_party(&sub, party).unwrap().solution_dim();
        prop_assert!(part >= full);
        prop_assert_eq!(part, brute_force_solution_dim(&sub, party));
    }
}
