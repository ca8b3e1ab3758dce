mod common;

use common::{brute_force_solution_dim, max_residual_is_zero};
use locc_lab::{
    build, build_thm1, certify_both, certify_party, witness_matrix, CertifyError, Family,
    FamilyParams, Ket, Party, ProductState, StateSet,
};

fn two_state() -> StateSet {
    StateSet::new(
        2,
        2,
        None,
        vec![
            ProductState::new("x", Ket::basis(2, 1).unwrap(), Ket::basis(2, 1).unwrap()),
            ProductState::new("y", Ket::basis(2, 2).unwrap(), Ket::basis(2, 2).unwrap()),
        ],
    )
    .unwrap()
}

#[test]
fn thm1_6_4_both_parties_scalar_only() {
    let (a, b) = certify_both(&build_thm1(FamilyParams::new(6, 4)).unwrap()).unwrap();
    assert!(a.scalar_only && b.scalar_only);
    assert!(witness_matrix(&a).is_none());
}

#[test]
fn thm2_7_6_both_parties_scalar_only() {
    let (a, b) = certify_both(&build(FamilyParams::new(7, 6), Family::Thm2).unwrap()).unwrap();
    assert!(a.scalar_only && b.scalar_only);
}

/// The k = 2 listing leaves a second Hermitian solution for each party; the
/// brute-force enumeration agrees, so this is a property of the set.
#[test]
fn thm3_5_5_solution_dimension_matches_brute_force() {
    let s = build(FamilyParams::new(5, 5), Family::Thm3).unwrap();
    for party in [Party::A, Party::B] {
        let c = certify_party(&s, party).unwrap();
        assert_eq!(c.solution_dim(), brute_force_solution_dim(&s, party));
        if let Some(w) = witness_matrix(&c) {
            assert!(max_residual_is_zero(&s, party, &w.re, &w.im));
        }
    }
}

#[test]
fn stopper_removed_has_non_scalar_diagonal_witness() {
    let s = build_thm1(FamilyParams::new(6, 4))
        .unwrap()
        .without("phi")
        .unwrap();
    let c = certify_party(&s, Party::A).unwrap();
    assert!(!c.scalar_only);
    assert_eq!(c.solution_dim(), brute_force_solution_dim(&s, Party::A));
    let w = witness_matrix(&c).unwrap();
    assert!(w.is_hermitian() && !w.is_scalar());
    assert!(max_residual_is_zero(&s, Party::A, &w.re, &w.im));
}

#[test]
fn distinguishable_pair_has_witnesses_for_both() {
    let s = two_state();
    let (a, b) = certify_both(&s).unwrap();
    assert!(!a.scalar_only && !b.scalar_only);
    assert_eq!(a.active_pairs, 0);
    for c in [&a, &b] {
        assert_eq!(c.solution_dim(), brute_force_solution_dim(&s, c.party));
        let w = witness_matrix(c).unwrap();
        assert!(max_residual_is_zero(&s, c.party, &w.re, &w.im));
    }
}

#[test]
fn every_basis_element_satisfies_the_constraints() {
    let s = build(FamilyParams::new(6, 4), Family::Thm1)
        .unwrap()
        .without("phi")
        .unwrap();
    for party in [Party::A, Party::B] {
        for h in certify_party(&s, party).unwrap().solution_basis {
            assert!(h.is_hermitian());
            assert!(h.preserves_orthogonality(&s, party));
            assert!(max_residual_is_zero(&s, party, &h.re, &h.im));
        }
    }
}

#[test]
fn non_orthogonal_input_is_a_precondition_error() {
    let s = StateSet::new(
        2,
        2,
        None,
        vec![
            ProductState::new("x", Ket::basis(2, 1).unwrap(), Ket::basis(2, 1).unwrap()),
            ProductState::new("y", Ket::basis(2, 1).unwrap(), Ket::sum(2, 1, 2).unwrap()),
        ],
    )
    .unwrap();
    assert!(matches!(
        certify_party(&s, Party::A),
        Err(CertifyError::NotOrthogonal { .. })
    ));
}

#[test]
fn certificate_json_names_the_party() {
    let (a, _) = certify_both(&two_state()).unwrap();
    let j = serde_json::to_value(a.to_json()).unwrap();
    assert_eq!(j["party"], "A");
    assert_eq!(j["scalar_only"], false);
    assert!(j["witness"].is_object());
}
