//! Kets, product states, and labeled state sets.
//!
//! Amplitudes are unnormalized integers with 1-based basis labels, so
//! `|2+3⟩` is stored as `[(2, 1), (3, 1)]` and the `1/√2` is never formed.

use std::collections::HashSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::Family;
use crate::linalg::{int, Rational, RationalVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("ket must have at least one amplitude")]
    EmptyKet,
    #[error("ket dimension must be positive")]
    ZeroDim,
    #[error("basis label {index} outside 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("basis labels must be strictly increasing (saw {prev} then {next})")]
    Unsorted { prev: usize, next: usize },
    #[error("zero coefficient at basis label {0}")]
    ZeroCoefficient(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state {label:?}: {factor} factor has dimension {got}, expected {expected}")]
    WrongFactorDim {
        label: String,
        factor: Party,
        got: usize,
        expected: usize,
    },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("no state labeled {0:?}")]
    UnknownLabel(String),
}

/// One of the two parties. Alice holds the `n`-dimensional system, Bob the
/// `m`-dimensional one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
        })
    }
}

/// Unnormalized integer vector `Σ coeff·|index⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ket {
    dim: usize,
    amps: Vec<(usize, i64)>,
}

impl Ket {
    pub fn new(dim: usize, amps: Vec<(usize, i64)>) -> Result<Self, StateError> {
        if dim == 0 {
            return Err(StateError::ZeroDim);
        }
        if amps.is_empty() {
            return Err(StateError::EmptyKet);
        }
        for (k, &(index, coeff)) in amps.iter().enumerate() {
            if index == 0 || index > dim {
                return Err(StateError::IndexOutOfRange { index, dim });
            }
            if coeff == 0 {
                return Err(StateError::ZeroCoefficient(index));
            }
            if k > 0 && amps[k - 1].0 >= index {
                return Err(StateError::Unsorted {
                    prev: amps[k - 1].0,
                    next: index,
                });
            }
        }
        Ok(Self { dim, amps })
    }

    /// `|i⟩`.
    pub fn basis(dim: usize, i: usize) -> Result<Self, StateError> {
        Self::new(dim, vec![(i, 1)])
    }

    /// `|i+j⟩` for `i < j`.
    pub fn sum(dim: usize, i: usize, j: usize) -> Result<Self, StateError> {
        Self::new(dim, vec![(i, 1), (j, 1)])
    }

    /// `|i−j⟩` for `i < j`.
    pub fn diff(dim: usize, i: usize, j: usize) -> Result<Self, StateError> {
        Self::new(dim, vec![(i, 1), (j, -1)])
    }

    /// `|1−2+3−⋯⟩` over the whole space.
    pub fn alternating(dim: usize) -> Result<Self, StateError> {
        Self::new(
            dim,
            (1..=dim)
                .map(|i| (i, if i % 2 == 1 { 1 } else { -1 }))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amps(&self) -> &[(usize, i64)] {
        &self.amps
    }

    /// 1-based support, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.amps.iter().map(|&(i, _)| i).collect()
    }

    pub fn is_full_support(&self) -> bool {
        self.amps.len() == self.dim
    }

    /// Dense 0-based rational vector.
    pub fn to_vector(&self) -> RationalVector {
        let mut v = vec![Rational::zero(); self.dim];
        for &(i, c) in &self.amps {
            v[i - 1] = int(c);
        }
        v
    }

    /// Integer inner product `⟨self|other⟩`.
    pub fn dot(&self, other: &Ket) -> Result<i64, StateError> {
        if self.dim != other.dim {
            return Err(StateError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &Ket) -> i64 {
        let (mut p, mut q, mut acc) = (0, 0, 0i64);
        while p < self.amps.len() && q < other.amps.len() {
            let (i, a) = self.amps[p];
            let (j, b) = other.amps[q];
            match i.cmp(&j) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    acc += a * b;
                    p += 1;
                    q += 1;
                }
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> i64 {
        self.amps.iter().map(|&(_, c)| c * c).sum()
    }
}

impl fmt::Display for Ket {
    /// Ket notation: `|3−5⟩`, `|1⟩`, `|2·1+3⟩`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (k, &(i, c)) in self.amps.iter().enumerate() {
            let sign = if c < 0 {
                "−"
            } else if k > 0 {
                "+"
            } else {
                ""
            };
            f.write_str(sign)?;
            if c.abs() != 1 {
                write!(f, "{}·", c.abs())?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("⟩")
    }
}

/// Labeled `|a⟩_A ⊗ |b⟩_B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub label: String,
    pub a: Ket,
    pub b: Ket,
}

impl ProductState {
    pub fn new(label: impl Into<String>, a: Ket, b: Ket) -> Self {
        Self {
            label: label.into(),
            a,
            b,
        }
    }

    pub fn factor(&self, party: Party) -> &Ket {
        match party {
            Party::A => &self.a,
            Party::B => &self.b,
        }
    }
}

impl fmt::Display for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}_A{}_B", self.label, self.a, self.b)
    }
}

/// `⟨x|y⟩ = ⟨x_a|y_a⟩·⟨x_b|y_b⟩` on unnormalized amplitudes.
pub fn inner_product(x: &ProductState, y: &ProductState) -> Result<Rational, StateError> {
    Ok(int(x.a.dot(&y.a)? * x.b.dot(&y.b)?))
}

/// Ordered list of states on `C^n ⊗ C^m`.
///
/// Construction checks dimensions and label uniqueness; orthogonality is left
/// to [`verify_orthogonality`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    n: usize,
    m: usize,
    family: Option<Family>,
    states: Vec<ProductState>,
}

impl StateSet {
    pub fn new(
        n: usize,
        m: usize,
        family: Option<Family>,
        states: Vec<ProductState>,
    ) -> Result<Self, StateError> {
        let mut seen = HashSet::new();
        for s in &states {
            for (party, ket, expected) in [(Party::A, &s.a, n), (Party::B, &s.b, m)] {
                if ket.dim() != expected {
                    return Err(StateError::WrongFactorDim {
                        label: s.label.clone(),
                        factor: party,
                        got: ket.dim(),
                        expected,
                    });
                }
            }
            if !seen.insert(s.label.as_str()) {
                return Err(StateError::DuplicateLabel(s.label.clone()));
            }
        }
        Ok(Self {
            n,
            m,
            family,
            states,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self, party: Party) -> usize {
        match party {
            Party::A => self.n,
            Party::B => self.m,
        }
    }

    /// The construction that produced this set, or `None` for hand-made sets.
    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&ProductState> {
        self.states.iter().find(|s| s.label == label)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.states.iter().map(|s| s.label.as_str()).collect()
    }

    /// Copy with one state removed. The result no longer carries a family tag.
    pub fn without(&self, label: &str) -> Result<StateSet, StateError> {
        if self.get(label).is_none() {
            return Err(StateError::UnknownLabel(label.to_string()));
        }
        let states = self
            .states
            .iter()
            .filter(|s| s.label != label)
            .cloned()
            .collect();
        StateSet::new(self.n, self.m, None, states)
    }

    /// Copy keeping only the listed indices, in the given order. Untagged.
    pub fn subset(&self, indices: &[usize]) -> StateSet {
        let states = indices.iter().map(|&i| self.states[i].clone()).collect();
        StateSet {
            n: self.n,
            m: self.m,
            family: None,
            states,
        }
    }

    /// Index of the state whose supports cover both local spaces, if any.
    pub fn stopper_index(&self) -> Option<usize> {
        self.states
            .iter()
            .position(|s| s.a.is_full_support() && s.b.is_full_support())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&wire::StateSetWire::from(self)).expect("state set serializes")
    }

    pub fn from_json(text: &str) -> Result<StateSet, StateSetParseError> {
        let w: wire::StateSetWire = serde_json::from_str(text)?;
        Ok(w.try_into()?)
    }
}

#[derive(Debug, Error)]
pub enum StateSetParseError {
    #[error("malformed state-set JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid state set: {0}")]
    Invalid(#[from] StateError),
}

impl Serialize for StateSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        wire::StateSetWire::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        wire::StateSetWire::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

mod wire {
    use super::*;

    #[derive(Serialize, Deserialize)]
    pub(super) struct StateWire {
        label: String,
        a: Vec<(usize, i64)>,
        b: Vec<(usize, i64)>,
    }

    #[derive(Serialize, Deserialize)]
    pub(super) struct StateSetWire {
        n: usize,
        m: usize,
        #[serde(default = "custom")]
        family: String,
        states: Vec<StateWire>,
    }

    fn custom() -> String {
        "custom".to_string()
    }

    impl From<&StateSet> for StateSetWire {
        fn from(s: &StateSet) -> Self {
            Self {
                n: s.n,
                m: s.m,
                family: s.family.map_or_else(custom, |f| f.tag().to_string()),
                states: s
                    .states
                    .iter()
                    .map(|p| StateWire {
                        label: p.label.clone(),
                        a: p.a.amps.clone(),
                        b: p.b.amps.clone(),
                    })
                    .collect(),
            }
        }
    }

    impl TryFrom<StateSetWire> for StateSet {
        type Error = StateError;

        fn try_from(w: StateSetWire) -> Result<Self, StateError> {
            let family = Family::from_tag(&w.family);
            let states = w
                .states
                .into_iter()
                .map(|p| {
                    Ok(ProductState::new(
                        p.label,
                        Ket::new(w.n, p.a)?,
                        Ket::new(w.m, p.b)?,
                    ))
                })
                .collect::<Result<Vec<_>, StateError>>()?;
            StateSet::new(w.n, w.m, family, states)
        }
    }
}

/// One non-orthogonal pair found by [`verify_orthogonality`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub first: String,
    pub second: String,
    #[serde(with = "crate::linalg::rational_str")]
    pub overlap: Rational,
}

/// Result of a pairwise orthogonality scan. Empty means pass.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub violations: Vec<Violation>,
}

impl OrthogonalityReport {
    pub fn is_orthogonal(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every unordered pair with nonzero overlap, in set order.
pub fn verify_orthogonality(s: &StateSet) -> OrthogonalityReport {
    let mut violations = Vec::new();
    for (i, x) in s.states.iter().enumerate() {
        for y in &s.states[i + 1..] {
            let ov = x.a.dot_unchecked(&y.a) * x.b.dot_unchecked(&y.b);
            if ov != 0 {
                violations.push(Violation {
                    first: x.label.clone(),
                    second: y.label.clone(),
                    overlap: int(ov),
                });
            }
        }
    }
    OrthogonalityReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(label: &str, a: Ket, b: Ket) -> ProductState {
        ProductState::new(label, a, b)
    }

    #[test]
    fn inner_product_examples() {
        let x = ps("x", Ket::basis(4, 1).unwrap(), Ket::sum(4, 2, 3).unwrap());
        let y = ps("y", Ket::basis(4, 2).unwrap(), Ket::sum(4, 1, 2).unwrap());
        assert_eq!(inner_product(&x, &y).unwrap(), int(0));
        assert_eq!(inner_product(&x, &x).unwrap(), int(2));

        let stopper = ps(
            "phi",
            Ket::alternating(4).unwrap(),
            Ket::alternating(4).unwrap(),
        );
        let z = ps("z", Ket::sum(4, 1, 2).unwrap(), Ket::basis(4, 4).unwrap());
        assert_eq!(inner_product(&stopper, &z).unwrap(), int(0));
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let x = ps("x", Ket::basis(4, 1).unwrap(), Ket::basis(4, 1).unwrap());
        let y = ps("y", Ket::basis(5, 1).unwrap(), Ket::basis(4, 1).unwrap());
        assert!(matches!(
            inner_product(&x, &y),
            Err(StateError::DimensionMismatch { left: 4, right: 5 })
        ));
    }

    #[test]
    fn one_violation_for_overlapping_pair() {
        let s = StateSet::new(
            2,
            2,
            None,
            vec![
                ps("x", Ket::basis(2, 1).unwrap(), Ket::basis(2, 1).unwrap()),
                ps("y", Ket::basis(2, 1).unwrap(), Ket::sum(2, 1, 2).unwrap()),
            ],
        )
        .unwrap();
        let report = verify_orthogonality(&s);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].overlap, int(1));
    }

    #[test]
    fn ket_validation() {
        assert_eq!(Ket::new(3, vec![]), Err(StateError::EmptyKet));
        assert_eq!(
            Ket::new(3, vec![(4, 1)]),
            Err(StateError::IndexOutOfRange { index: 4, dim: 3 })
        );
        assert_eq!(
            Ket::new(3, vec![(2, 1), (1, 1)]),
            Err(StateError::Unsorted { prev: 2, next: 1 })
        );
        assert_eq!(
            Ket::new(3, vec![(1, 0)]),
            Err(StateError::ZeroCoefficient(1))
        );
    }

    #[test]
    fn ket_display() {
        assert_eq!(Ket::diff(6, 3, 5).unwrap().to_string(), "|3−5⟩");
        assert_eq!(Ket::alternating(4).unwrap().to_string(), "|1−2+3−4⟩");
        assert_eq!(
            Ket::new(3, vec![(1, 2), (3, -1)]).unwrap().to_string(),
            "|2·1−3⟩"
        );
    }

    #[test]
    fn duplicate_labels_rejected() {
        let k = Ket::basis(2, 1).unwrap();
        let err = StateSet::new(
            2,
            2,
            None,
            vec![ps("x", k.clone(), k.clone()), ps("x", k.clone(), k)],
        )
        .unwrap_err();
        assert_eq!(err, StateError::DuplicateLabel("x".into()));
    }

    #[test]
    fn json_wire_format() {
        let s = StateSet::new(
            6,
            4,
            Some(Family::Thm1),
            vec![ps(
                "varphi_1",
                Ket::basis(6, 1).unwrap(),
                Ket::sum(4, 2, 3).unwrap(),
            )],
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"n":6,"m":4,"family":"thm1",
                "states":[{"label":"varphi_1","a":[[1,1]],"b":[[2,1],[3,1]]}]})
        );
        let back: StateSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
