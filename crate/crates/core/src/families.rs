//! The three parameterized families of orthogonal product states and the
//! eight-state variant on `C^4 ⊗ C^4`.
//!
//! Labels follow the usual naming: `phi` is the stopper, then `varphi_i`,
//! `psi_i` and `phi_i`. States are emitted in listing order, which is also the
//! tile numbering used by the diagram module.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::states::{Ket, ProductState, StateSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `C^n ⊗ C^4`, `n > 4`: `2n − 1` states.
    Thm1,
    /// `C^4 ⊗ C^4`: 8 states.
    #[serde(rename = "thm1_n4")]
    Thm1N4,
    /// `C^n ⊗ C^{2l}`, `n ≥ 2l > 4`: `2(2l + n) − 8` states.
    Thm2,
    /// `C^n ⊗ C^{2k+1}`, `n ≥ 2k+1 ≥ 5`.
    Thm3,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Thm1, Family::Thm1N4, Family::Thm2, Family::Thm3];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Thm1 => "thm1",
            Family::Thm1N4 => "thm1_n4",
            Family::Thm2 => "thm2",
            Family::Thm3 => "thm3",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.tag() == tag)
    }

    /// Checks the parameter bounds for this family.
    pub fn validate(self, p: FamilyParams) -> Result<(), ParamError> {
        let FamilyParams { n, m } = p;
        let fail = |bound: String| {
            Err(ParamError {
                family: self,
                n,
                m,
                bound,
            })
        };
        match self {
            Family::Thm1 => {
                if m != 4 {
                    return fail(format!("m = 4 (got m = {m})"));
                }
                if n < 4 {
                    return fail(format!("n ≥ m = 4 (got n = {n})"));
                }
            }
            Family::Thm1N4 => {
                if n != 4 || m != 4 {
                    return fail("n = m = 4".to_string());
                }
            }
            Family::Thm2 => {
                if m % 2 != 0 {
                    return fail(format!("even m = 2l (got m = {m})"));
                }
                if m <= 4 {
                    return fail(format!("2l > 4 (got m = {m})"));
                }
                if n < m {
                    return fail(format!("n ≥ 2l = {m} (got n = {n})"));
                }
            }
            Family::Thm3 => {
                if m % 2 == 0 {
                    return fail(format!("odd m = 2k+1 (got m = {m})"));
                }
                if m < 5 {
                    return fail(format!("2k+1 ≥ 5 (got m = {m})"));
                }
                if n < m {
                    return fail(format!("n ≥ 2k+1 = {m} (got n = {n})"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Local dimensions: Alice has `C^n`, Bob has `C^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyParams {
    pub n: usize,
    pub m: usize,
}

impl FamilyParams {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    /// `l = m/2` for even `m`.
    pub fn l(self) -> Option<usize> {
        self.m.is_multiple_of(2).then_some(self.m / 2)
    }

    /// `k = (m−1)/2` for odd `m`.
    pub fn k(self) -> Option<usize> {
        (self.m % 2 == 1).then_some((self.m - 1) / 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid parameters for {family} (n = {n}, m = {m}): requires {bound}")]
pub struct ParamError {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    /// Human-readable statement of the violated bound, e.g. `n ≥ m = 4`.
    pub bound: String,
}

/// Default family for `(n, m)`: `m = 4` gives Thm1 (the 8-state variant at
/// `n = 4`), other even `m` give Thm2, odd `m` give Thm3.
pub fn auto_family(p: FamilyParams) -> Family {
    match p.m {
        4 if p.n == 4 => Family::Thm1N4,
        4 => Family::Thm1,
        m if m % 2 == 0 => Family::Thm2,
        _ => Family::Thm3,
    }
}

/// Closed-form family size.
pub fn expected_count(p: FamilyParams, family: Family) -> Result<usize, ParamError> {
    let family = resolve(p, family)?;
    let FamilyParams { n, m } = p;
    Ok(match family {
        Family::Thm1N4 => 8,
        Family::Thm1 => 2 * n - 1,
        Family::Thm2 => 2 * (n + m) - 8,
        Family::Thm3 if m == 5 => 2 * (n - m) + 9,
        Family::Thm3 => 2 * (n + m) - 7,
    })
}

/// Validates `p` and maps Thm1 at `n = 4` to the variant.
fn resolve(p: FamilyParams, family: Family) -> Result<Family, ParamError> {
    family.validate(p)?;
    Ok(match family {
        Family::Thm1 if p.n == 4 => Family::Thm1N4,
        f => f,
    })
}

/// Builds the family named by `family`. Thm1 at `n = 4` yields the variant.
pub fn build(p: FamilyParams, family: Family) -> Result<StateSet, ParamError> {
    match resolve(p, family)? {
        Family::Thm1 | Family::Thm1N4 => build_thm1(p),
        Family::Thm2 => build_thm2(p),
        Family::Thm3 => build_thm3(p),
    }
}

/// Index sets of a parity-split line: odd `i` use one B factor, even `i`
/// another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityRanges {
    pub odd: Vec<usize>,
    pub even: Vec<usize>,
}

impl ParityRanges {
    fn new(odd_max: i64, even_min: i64, even_max: i64) -> Self {
        Self {
            odd: (1..=odd_max).step_by(2).map(|i| i as usize).collect(),
            even: (even_min..=even_max)
                .step_by(2)
                .map(|i| i as usize)
                .collect(),
        }
    }

    /// Odd and even indices merged in ascending order, tagged `true` for odd.
    fn ascending(&self) -> Vec<(usize, bool)> {
        let mut all: Vec<(usize, bool)> = self
            .odd
            .iter()
            .map(|&i| (i, true))
            .chain(self.even.iter().map(|&i| (i, false)))
            .collect();
        all.sort_unstable();
        all
    }
}

fn floor_half(x: i64) -> i64 {
    x.div_euclid(2)
}

fn ceil_half(x: i64) -> i64 {
    -(-x).div_euclid(2)
}

/// Index ranges of the parity-split line of each family:
/// Thm1's `varphi_{i+5}`, Thm2's `phi_i`, Thm3's `phi_{i+5}`.
pub fn parity_ranges(p: FamilyParams, family: Family) -> Result<ParityRanges, ParamError> {
    let (n, m) = (p.n as i64, p.m as i64);
    Ok(match resolve(p, family)? {
        Family::Thm1 | Family::Thm1N4 => {
            ParityRanges::new(2 * floor_half(n - 4) - 1, 2, 2 * ceil_half(n - 4) - 2)
        }
        Family::Thm2 => {
            let l = m / 2;
            ParityRanges::new(2 * floor_half(n - l) - 1, 2, 2 * ceil_half(n - l) - 2)
        }
        Family::Thm3 => ParityRanges::new(2 * ceil_half(n - m) - 1, 0, 2 * floor_half(n - m) - 2),
    })
}

/// Small helper so the family listings read like the printed equations.
struct Builder {
    n: usize,
    m: usize,
    states: Vec<ProductState>,
}

impl Builder {
    fn new(n: usize, m: usize) -> Self {
        let mut b = Self {
            n,
            m,
            states: Vec::new(),
        };
        b.push(
            "phi".into(),
            Ket::alternating(n).expect("n > 0"),
            Ket::alternating(m).expect("m > 0"),
        );
        b
    }

    fn push(&mut self, label: String, a: Ket, b: Ket) {
        self.states.push(ProductState::new(label, a, b));
    }

    fn a(&self, i: usize) -> Ket {
        Ket::basis(self.n, i).expect("index in range")
    }

    fn a_sum(&self, i: usize, j: usize) -> Ket {
        Ket::sum(self.n, i, j).expect("index in range")
    }

    fn b(&self, i: usize) -> Ket {
        Ket::basis(self.m, i).expect("index in range")
    }

    fn b_sum(&self, i: usize, j: usize) -> Ket {
        Ket::sum(self.m, i, j).expect("index in range")
    }

    fn finish(self, family: Family) -> StateSet {
        StateSet::new(self.n, self.m, Some(family), self.states)
            .expect("family listing is well formed")
    }
}

/// `C^n ⊗ C^4`, `n ≥ 4`. At `n = 4` the state `|3−5⟩|2⟩` is replaced by
/// `varphi_7 = |3+4⟩|2⟩` and the set is tagged [`Family::Thm1N4`].
pub fn build_thm1(p: FamilyParams) -> Result<StateSet, ParamError> {
    Family::Thm1.validate(p)?;
    let n = p.n;
    let mut s = Builder::new(n, 4);
    s.push("varphi_1".into(), s.a(1), s.b_sum(2, 3));
    s.push("varphi_2".into(), s.a_sum(2, 3), s.b(3));
    s.push("varphi_3".into(), s.a_sum(1, 2), s.b(4));
    s.push("varphi_4".into(), s.a(2), s.b_sum(1, 2));
    s.push("varphi_5".into(), s.a_sum(3, 4), s.b(1));
    for (i, odd) in parity_ranges(p, Family::Thm1)?.ascending() {
        let b = if odd { s.b(1) } else { s.b(2) };
        s.push(format!("varphi_{}", i + 5), s.a_sum(4 + i, 5 + i), b);
    }
    let family = if n == 4 {
        s.push("varphi_7".into(), s.a_sum(3, 4), s.b(2));
        Family::Thm1N4
    } else {
        s.push(
            format!("varphi_{}", n + 1),
            Ket::diff(n, 3, 5).expect("n ≥ 5"),
            s.b(2),
        );
        Family::Thm1
    };
    for i in 0..=n - 4 {
        s.push(format!("varphi_{}", i + n + 2), s.a(4 + i), s.b_sum(3, 4));
    }
    Ok(s.finish(family))
}

/// `C^n ⊗ C^{2l}`, `n ≥ 2l > 4`.
///
/// `varphi_{2l−1}` is `|l+3⟩_A|l+(l+1)⟩_B`; the listing that puts `|1+(l+1)⟩`
/// on Bob's side is not orthogonal to the stopper for even `l`.
pub fn build_thm2(p: FamilyParams) -> Result<StateSet, ParamError> {
    Family::Thm2.validate(p)?;
    let (n, m) = (p.n, p.m);
    let l = m / 2;
    let mut s = Builder::new(n, m);
    for i in 1..l {
        s.push(format!("psi_{i}"), s.a_sum(i, i + 1), s.b(i));
    }
    s.push(format!("psi_{l}"), s.a_sum(l - 2, l - 1), s.b(l));
    for i in 1..l - 2 {
        s.push(format!("psi_{}", i + l), s.a(i), s.b_sum(l, l + 1));
    }
    for i in 1..l - 2 {
        s.push(
            format!("psi_{}", i + 2 * l - 3),
            s.a(l + 3 + i),
            s.b_sum(l, l + 1),
        );
    }
    s.push(format!("psi_{}", 3 * l - 5), s.a(l), s.b_sum(l, l + 1));
    s.push(format!("psi_{}", 3 * l - 4), s.a(l + 2), s.b_sum(l - 1, l));
    s.push(format!("psi_{}", 3 * l - 3), s.a(l + 1), s.b_sum(l - 1, l));
    for i in 1..=n - 2 * l {
        s.push(
            format!("psi_{}", i + 3 * l - 3),
            s.a(2 * l + i),
            s.b_sum(l, l + 1),
        );
    }
    for i in 1..l {
        s.push(
            format!("varphi_{i}"),
            s.a(i),
            s.b_sum(2 * l - i, 2 * l + 1 - i),
        );
    }
    for i in 1..l - 1 {
        s.push(
            format!("varphi_{}", i + l - 1),
            s.a(2 * l + 1 - i),
            s.b_sum(i, i + 1),
        );
    }
    s.push(
        format!("varphi_{}", 2 * l - 2),
        s.a_sum(l + 1, l + 2),
        s.b(l + 1),
    );
    s.push(
        format!("varphi_{}", 2 * l - 1),
        s.a(l + 3),
        s.b_sum(l, l + 1),
    );
    for i in 1..l - 1 {
        s.push(
            format!("varphi_{}", i + 2 * l - 1),
            s.a_sum(l, l + 1),
            s.b(i),
        );
    }
    for i in 1..l - 1 {
        s.push(
            format!("varphi_{}", i + 3 * l - 3),
            s.a_sum(l, l + 1),
            s.b(l + 2 + i),
        );
    }
    for (i, odd) in parity_ranges(p, Family::Thm2)?.ascending() {
        let b = if odd { s.b(l + 2) } else { s.b(l + 3) };
        s.push(format!("phi_{i}"), s.a_sum(l + i, l + 1 + i), b);
    }
    Ok(s.finish(Family::Thm2))
}

/// `C^n ⊗ C^{2k+1}`, `n ≥ 2k+1 ≥ 5`.
///
/// At `k = 2` the four states `phi_1..phi_4` would need basis label `k−2 = 0`
/// and are left out, which gives `2(n−m)+9` states.
pub fn build_thm3(p: FamilyParams) -> Result<StateSet, ParamError> {
    Family::Thm3.validate(p)?;
    let (n, m) = (p.n, p.m);
    let k = (m - 1) / 2;
    let mut s = Builder::new(n, m);
    if k > 2 {
        s.push("phi_1".into(), s.a_sum(k - 2, k - 1), s.b(k));
        s.push("phi_2".into(), s.a_sum(k + 3, k + 4), s.b(k + 2));
        s.push("phi_3".into(), s.a(k), s.b_sum(k + 3, k + 4));
        s.push("phi_4".into(), s.a(k + 2), s.b_sum(k - 2, k - 1));
    }
    for i in 1..=k {
        s.push(format!("psi_{i}"), s.a_sum(i, i + 1), s.b(i));
    }
    for i in k + 1..=2 * k {
        s.push(format!("psi_{i}"), s.a_sum(i, i + 1), s.b(i + 1));
    }
    for i in 1..k - 1 {
        s.push(format!("psi_{}", i + 2 * k), s.a(i), s.b_sum(k + 1, k + 2));
    }
    for i in k + 4..=n {
        s.push(format!("psi_{}", i + 2 * k - 5), s.a(i), s.b_sum(k, k + 1));
    }
    for i in 1..=k {
        s.push(
            format!("varphi_{i}"),
            s.a(i),
            s.b_sum(2 * k + 1 - i, 2 * k + 2 - i),
        );
    }
    for i in k + 1..=2 * k {
        s.push(
            format!("varphi_{i}"),
            s.a(i + 1),
            s.b_sum(2 * k + 1 - i, 2 * k + 2 - i),
        );
    }
    for i in 1..k - 1 {
        s.push(format!("varphi_{}", i + 2 * k), s.a_sum(k, k + 1), s.b(i));
    }
    for i in k + 4..=2 * k + 1 {
        s.push(
            format!("varphi_{}", i + 2 * k - 5),
            s.a_sum(k + 1, k + 2),
            s.b(i),
        );
    }
    for (i, odd) in parity_ranges(p, Family::Thm3)?.ascending() {
        if odd {
            s.push(
                format!("phi_{}", i + 5),
                s.a_sum(2 * k + i, 2 * k + 1 + i),
                s.b(2 * k),
            );
        } else {
            s.push(
                format!("phi_{}", i + 5),
                s.a_sum(2 * k + 2 + i, 2 * k + 3 + i),
                s.b(2 * k + 1),
            );
        }
    }
    Ok(s.finish(Family::Thm3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::verify_orthogonality;

    fn p(n: usize, m: usize) -> FamilyParams {
        FamilyParams::new(n, m)
    }

    #[test]
    fn counts_match_examples() {
        assert_eq!(build_thm1(p(6, 4)).unwrap().len(), 11);
        assert_eq!(build_thm1(p(4, 4)).unwrap().len(), 8);
        assert_eq!(build_thm1(p(5, 4)).unwrap().len(), 9);
        assert_eq!(build_thm2(p(7, 6)).unwrap().len(), 18);
        assert_eq!(build_thm2(p(6, 6)).unwrap().len(), 16);
        assert_eq!(build_thm2(p(8, 8)).unwrap().len(), 24);
        assert_eq!(build_thm3(p(9, 7)).unwrap().len(), 25);
        assert_eq!(build_thm3(p(5, 5)).unwrap().len(), 9);
        assert_eq!(build_thm3(p(7, 5)).unwrap().len(), 13);
    }

    #[test]
    fn expected_count_examples() {
        assert_eq!(expected_count(p(6, 4), Family::Thm1).unwrap(), 11);
        assert_eq!(expected_count(p(7, 6), Family::Thm2).unwrap(), 18);
        assert_eq!(expected_count(p(9, 7), Family::Thm3).unwrap(), 25);
        assert_eq!(expected_count(p(4, 4), Family::Thm1).unwrap(), 8);
    }

    #[test]
    fn n4_variant_is_tagged() {
        let s = build_thm1(p(4, 4)).unwrap();
        assert_eq!(s.family(), Some(Family::Thm1N4));
        let v7 = s.get("varphi_7").unwrap();
        assert_eq!(v7.a.to_string(), "|3+4⟩");
        assert_eq!(v7.b.to_string(), "|2⟩");
    }

    #[test]
    fn thm1_n5_has_empty_parity_ranges() {
        let r = parity_ranges(p(5, 4), Family::Thm1).unwrap();
        assert!(r.odd.is_empty() && r.even.is_empty());
    }

    #[test]
    fn thm2_n_equals_2l_has_no_tail() {
        let s = build_thm2(p(6, 6)).unwrap();
        assert!(s.get("psi_7").is_none());
        assert!(s.get("psi_6").is_some());
    }

    #[test]
    fn thm3_k2_omits_short_lines() {
        let s = build_thm3(p(7, 5)).unwrap();
        for label in ["phi_1", "phi_2", "phi_3", "phi_4", "varphi_5", "psi_7"] {
            assert!(s.get(label).is_none(), "{label}");
        }
        assert!(s.get("psi_6").is_some());
    }

    #[test]
    fn small_instances_are_orthogonal() {
        for (n, m) in [(4, 4), (5, 4), (6, 4), (6, 6), (7, 6), (5, 5), (7, 7)] {
            let s = build(p(n, m), auto_family(p(n, m))).unwrap();
            assert!(verify_orthogonality(&s).is_orthogonal(), "({n},{m})");
        }
    }

    #[test]
    fn bound_violations_name_the_bound() {
        let e = build(p(3, 4), auto_family(p(3, 4))).unwrap_err();
        assert!(e.to_string().contains("n ≥ m = 4"), "{e}");
        assert!(build_thm2(p(5, 6))
            .unwrap_err()
            .bound
            .contains("n ≥ 2l = 6"));
        assert!(build_thm2(p(6, 4)).unwrap_err().bound.contains("2l > 4"));
        assert!(build_thm3(p(5, 3)).unwrap_err().bound.contains("2k+1 ≥ 5"));
        assert!(build_thm3(p(6, 6)).is_err());
        assert!(build(p(5, 4), Family::Thm1N4).is_err());
    }

    #[test]
    fn auto_family_selection() {
        assert_eq!(auto_family(p(4, 4)), Family::Thm1N4);
        assert_eq!(auto_family(p(8, 4)), Family::Thm1);
        assert_eq!(auto_family(p(8, 6)), Family::Thm2);
        assert_eq!(auto_family(p(8, 7)), Family::Thm3);
    }
}
