mod common;

use common::{grid, GRID_MAX};
use locc_lab::{
    auto_family, build, build_thm1, build_thm2, build_thm3, expected_count, verify_orthogonality,
    Family, FamilyParams, Ket, ProductState, StateSet,
};

/// Sum of line cardinalities, enumerated from the index ranges directly.
fn thm2_by_lines(n: usize, l: usize) -> usize {
    let lines = [
        l - 1,     // psi_i, i < l
        1,         // psi_l
        l - 3,     // psi_{i+l}
        l - 3,     // psi_{i+2l-3}
        3,         // psi_{3l-5..3l-3}
        n - 2 * l, // psi_{i+3l-3}
        l - 1,     // varphi_i
        l - 2,     // varphi_{i+l-1}
        2,         // varphi_{2l-2}, varphi_{2l-1}
        l - 2,     // varphi_{i+2l-1}
        l - 2,     // varphi_{i+3l-3}
        n - l - 1, // phi_i, both parities
        1,         // stopper
    ];
    lines.iter().sum()
}

#[test]
fn every_grid_family_has_the_closed_form_size() {
    for (n, m) in grid(GRID_MAX) {
        let p = FamilyParams::new(n, m);
        let f = auto_family(p);
        assert_eq!(
            build(p, f).unwrap().len(),
            expected_count(p, f).unwrap(),
            "({n},{m})"
        );
    }
}

#[test]
fn thm2_line_enumeration_matches() {
    for (n, m) in grid(GRID_MAX)
        .into_iter()
        .filter(|&(_, m)| m % 2 == 0 && m > 4)
    {
        assert_eq!(
            build_thm2(FamilyParams::new(n, m)).unwrap().len(),
            thm2_by_lines(n, m / 2)
        );
    }
    assert_eq!(build_thm2(FamilyParams::new(8, 8)).unwrap().len(), 24);
}

#[test]
fn every_grid_family_is_orthogonal_with_one_stopper() {
    for (n, m) in grid(GRID_MAX) {
        let p = FamilyParams::new(n, m);
        let s = build(p, auto_family(p)).unwrap();
        assert!(verify_orthogonality(&s).is_orthogonal(), "({n},{m})");
        let full = s
            .states()
            .iter()
            .filter(|x| x.a.is_full_support() && x.b.is_full_support())
            .count();
        assert_eq!(full, 1, "({n},{m})");
    }
}

#[test]
fn thm1_at_n4_is_the_eight_state_variant() {
    let s = build_thm1(FamilyParams::new(4, 4)).unwrap();
    assert_eq!(s.len(), 8);
    assert_eq!(s.family(), Some(Family::Thm1N4));
    assert_eq!(build(FamilyParams::new(4, 4), Family::Thm1).unwrap(), s);
}

#[test]
fn thm3_k2_counts() {
    assert_eq!(build_thm3(FamilyParams::new(5, 5)).unwrap().len(), 9);
    assert_eq!(build_thm3(FamilyParams::new(7, 5)).unwrap().len(), 13);
    assert_eq!(build_thm3(FamilyParams::new(9, 7)).unwrap().len(), 25);
}

#[test]
fn invalid_params_are_rejected_for_every_family() {
    for (n, m) in [(3, 4), (5, 6), (6, 5), (4, 3), (12, 13)] {
        for f in Family::ALL {
            if f.validate(FamilyParams::new(n, m)).is_ok() {
                continue;
            }
            let e = build(FamilyParams::new(n, m), f).unwrap_err();
            assert!(!e.bound.is_empty());
            assert!(e.to_string().contains(f.tag()));
        }
    }
    assert!(build(FamilyParams::new(6, 4), Family::Thm2).is_err());
    assert!(build(FamilyParams::new(7, 6), Family::Thm3).is_err());
}

/// The listing with `|1+(l+1)⟩_B` on `varphi_{2l−1}` breaks orthogonality.
#[test]
fn printed_varphi_2l_minus_1_is_not_orthogonal() {
    for (n, m) in [(6, 6), (7, 6), (8, 8), (12, 12)] {
        let l = m / 2;
        let s = build_thm2(FamilyParams::new(n, m)).unwrap();
        let label = format!("varphi_{}", 2 * l - 1);
        let mut states: Vec<ProductState> = s.states().to_vec();
        let slot = states.iter_mut().find(|x| x.label == label).unwrap();
        assert_eq!(slot.a, Ket::basis(n, l + 3).unwrap());
        slot.b = Ket::sum(m, 1, l + 1).unwrap();
        let printed = StateSet::new(n, m, None, states).unwrap();
        let r = verify_orthogonality(&printed);
        assert!(!r.is_orthogonal(), "({n},{m})");
    }
}

#[test]
fn json_round_trip_over_grid() {
    for (n, m) in grid(8) {
        let p = FamilyParams::new(n, m);
        let s = build(p, auto_family(p)).unwrap();
        assert_eq!(StateSet::from_json(&s.to_json()).unwrap(), s);
    }
}
