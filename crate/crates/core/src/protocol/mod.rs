//! Entanglement-assisted LOCC protocol trees and an exact simulator.
//!
//! Each input `|a⟩_A|b⟩_B` is joined with a two-qubit ancilla `|ψ⟩_ab`, Alice
//! holding `a` and Bob `b`. A joint state is kept as a `2n × 2m` matrix `Ψ`
//! whose rows index Alice's space `a ⊗ A` (row `a·n + x`) and whose columns
//! index Bob's space `b ⊗ B` (column `b·m + y`). Alice's projector `P` acts as
//! `PΨ`, Bob's as `ΨPᵀ`, so every operator is local by construction.
//!
//! States are never renormalized; a leaf's probability is
//! `‖Ψ_leaf‖² / ‖Ψ_0‖²`.

mod builders;
mod refine;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{int, rational_str, Rational, RationalMatrix};
use crate::states::{Party, ProductState, StateSet};

pub use builders::{build_thm4_tree, build_thm5_tree, build_thm6_tree, BuildError};
pub use refine::refine_leaf;

/// Two-qubit ancilla shared before the protocol starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    /// `|11⟩ + |22⟩`, unnormalized.
    MaximallyEntangled,
    /// `|11⟩`, no entanglement. Used as a negative control.
    Product,
}

impl Resource {
    /// Ancilla amplitude matrix `c[a][b]` (0-based).
    pub fn ancilla(self) -> [[i64; 2]; 2] {
        match self {
            Resource::MaximallyEntangled => [[1, 0], [0, 1]],
            Resource::Product => [[1, 0], [0, 0]],
        }
    }

    /// Schmidt rank of the ancilla across the `a | b` cut.
    pub fn schmidt_rank(self) -> usize {
        match self {
            Resource::MaximallyEntangled => 2,
            Resource::Product => 1,
        }
    }
}

/// An input state tensored with the ancilla, possibly after some projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointState {
    pub origin: String,
    psi: RationalMatrix,
    n: usize,
    m: usize,
}

impl JointState {
    pub fn initial(state: &ProductState, resource: Resource) -> Self {
        let (n, m) = (state.a.dim(), state.b.dim());
        let mut psi = RationalMatrix::zeros(2 * n, 2 * m);
        let c = resource.ancilla();
        for (a, row) in c.iter().enumerate() {
            for (b, &cab) in row.iter().enumerate() {
                if cab == 0 {
                    continue;
                }
                for &(x, ca) in state.a.amps() {
                    for &(y, cb) in state.b.amps() {
                        psi[(a * n + x - 1, b * m + y - 1)] = int(cab * ca * cb);
                    }
                }
            }
        }
        Self {
            origin: state.label.clone(),
            psi,
            n,
            m,
        }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.psi
    }

    pub fn local_dim(&self, party: Party) -> usize {
        match party {
            Party::A => 2 * self.n,
            Party::B => 2 * self.m,
        }
    }

    /// Applies a local projector of the acting party.
    pub fn apply(&self, party: Party, projector: &RationalMatrix) -> JointState {
        let psi = match party {
            Party::A => projector.mul(&self.psi),
            Party::B => self.psi.mul(&projector.transpose()),
        }
        .expect("projector matches local dimension");
        JointState {
            origin: self.origin.clone(),
            psi,
            n: self.n,
            m: self.m,
        }
    }

    pub fn norm_squared(&self) -> Rational {
        self.psi.frobenius(&self.psi).expect("same shape")
    }

    pub fn overlap(&self, other: &JointState) -> Rational {
        self.psi.frobenius(&other.psi).expect("same shape")
    }

    pub fn is_zero(&self) -> bool {
        self.psi.is_zero()
    }

    /// Schmidt rank across the `aA | bB` cut.
    pub fn schmidt_rank(&self) -> usize {
        self.psi.rank()
    }

    /// Amplitudes in `(A, B, a, b)` lexicographic order.
    pub fn to_vector(&self) -> Vec<Rational> {
        let (n, m) = (self.n, self.m);
        let mut out = Vec::with_capacity(4 * n * m);
        for x in 0..n {
            for y in 0..m {
                for a in 0..2 {
                    for b in 0..2 {
                        out.push(self.psi[(a * n + x, b * m + y)].clone());
                    }
                }
            }
        }
        out
    }
}

/// Terminal of a protocol tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Leaf {
    /// The protocol concludes the input was this state.
    Identified(String),
    /// No input should ever arrive here.
    Unreachable,
}

impl Leaf {
    pub fn label(&self) -> Option<&str> {
        match self {
            Leaf::Identified(l) => Some(l),
            Leaf::Unreachable => None,
        }
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::Identified(l) => f.write_str(l),
            Leaf::Unreachable => f.write_str("unreachable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Child {
    Node(Box<MeasurementNode>),
    Leaf(Leaf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub label: String,
    /// Projector on the acting party's `2d`-dimensional space.
    pub projector: RationalMatrix,
    pub child: Child,
}

/// Projective measurement by one party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementNode {
    pub party: Party,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node {path:?}: no outcomes")]
    Empty { path: String },
    #[error("node {path:?}: outcome {label:?} is {rows}x{cols}, expected {dim}x{dim}")]
    WrongDim {
        path: String,
        label: String,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("node {path:?}: outcome {label:?} is not a symmetric idempotent")]
    NotProjector { path: String, label: String },
    #[error("node {path:?}: outcomes {first:?} and {second:?} overlap")]
    Overlap {
        path: String,
        first: String,
        second: String,
    },
    #[error("node {path:?}: outcomes do not sum to the identity")]
    Incomplete { path: String },
    #[error("node {path:?}: duplicate outcome label {label:?}")]
    DuplicateLabel { path: String, label: String },
}

fn join(path: &str, label: &str) -> String {
    if path.is_empty() {
        label.to_string()
    } else {
        format!("{path}/{label}")
    }
}

impl MeasurementNode {
    /// Checks this node and all descendants on `C^n ⊗ C^m` (plus ancilla).
    pub fn validate(&self, n: usize, m: usize, path: &str) -> Result<(), TreeError> {
        let dim = 2 * match self.party {
            Party::A => n,
            Party::B => m,
        };
        if self.outcomes.is_empty() {
            return Err(TreeError::Empty { path: path.into() });
        }
        let mut sum = RationalMatrix::zeros(dim, dim);
        for (i, o) in self.outcomes.iter().enumerate() {
            let p = &o.projector;
            if p.rows() != dim || p.cols() != dim {
                return Err(TreeError::WrongDim {
                    path: path.into(),
                    label: o.label.clone(),
                    rows: p.rows(),
                    cols: p.cols(),
                    dim,
                });
            }
            if !p.is_symmetric() || p.mul(p).expect("square") != *p {
                return Err(TreeError::NotProjector {
                    path: path.into(),
                    label: o.label.clone(),
                });
            }
            for prev in &self.outcomes[..i] {
                if prev.label == o.label {
                    return Err(TreeError::DuplicateLabel {
                        path: path.into(),
                        label: o.label.clone(),
                    });
                }
                if !prev.projector.mul(p).expect("square").is_zero() {
                    return Err(TreeError::Overlap {
                        path: path.into(),
                        first: prev.label.clone(),
                        second: o.label.clone(),
                    });
                }
            }
            sum = sum.add(p).expect("square");
        }
        if !sum.is_identity() {
            return Err(TreeError::Incomplete { path: path.into() });
        }
        for o in &self.outcomes {
            if let Child::Node(child) = &o.child {
                child.validate(n, m, &join(path, &o.label))?;
            }
        }
        Ok(())
    }

    fn collect_leaves(&self, path: &str, out: &mut Vec<(String, Leaf)>) {
        for o in &self.outcomes {
            let p = join(path, &o.label);
            match &o.child {
                Child::Node(c) => c.collect_leaves(&p, out),
                Child::Leaf(l) => out.push((p, l.clone())),
            }
        }
    }

    fn depth(&self) -> usize {
        1 + self
            .outcomes
            .iter()
            .map(|o| match &o.child {
                Child::Node(c) => c.depth(),
                Child::Leaf(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    fn count_nodes(&self) -> usize {
        1 + self
            .outcomes
            .iter()
            .map(|o| match &o.child {
                Child::Node(c) => c.count_nodes(),
                Child::Leaf(_) => 0,
            })
            .sum::<usize>()
    }

    /// Visits every node with its path.
    pub fn for_each_node<'a>(&'a self, path: &str, f: &mut impl FnMut(&str, &'a MeasurementNode)) {
        f(path, self);
        for o in &self.outcomes {
            if let Child::Node(c) = &o.child {
                c.for_each_node(&join(path, &o.label), f);
            }
        }
    }
}

/// A complete protocol on `C^n ⊗ C^m` plus a two-qubit ancilla.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolTree {
    pub n: usize,
    pub m: usize,
    pub root: MeasurementNode,
    /// Paths where a mirrored branch was replaced by a fresh refinement.
    pub fallbacks: Vec<String>,
}

impl ProtocolTree {
    pub fn new(n: usize, m: usize, root: MeasurementNode) -> Self {
        Self {
            n,
            m,
            root,
            fallbacks: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), TreeError> {
        self.root.validate(self.n, self.m, "")
    }

    /// Every leaf with its path (outcome labels joined by `/`).
    pub fn leaves(&self) -> Vec<(String, Leaf)> {
        let mut out = Vec::new();
        self.root.collect_leaves("", &mut out);
        out
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn node_count(&self) -> usize {
        self.root.count_nodes()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }
}

/// One leaf reached by one input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafHit {
    pub path: String,
    /// Label of the leaf, `null` for an unreachable leaf.
    pub leaf: Option<String>,
    #[serde(with = "rational_str")]
    pub p: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateOutcome {
    pub label: String,
    #[serde(with = "rational_str")]
    pub total: Rational,
    pub leaves: Vec<LeafHit>,
}

/// Exact outcome distribution of every input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscriminationReport {
    pub resource: Resource,
    pub perfect: bool,
    pub states: Vec<StateOutcome>,
    /// Reasons `perfect` is false, empty otherwise.
    pub issues: Vec<String>,
}

impl DiscriminationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn state(&self, label: &str) -> Option<&StateOutcome> {
        self.states.iter().find(|s| s.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("invalid tree: {0}")]
    InvalidTree(#[from] TreeError),
    #[error("tree is for C^{tree_n} ⊗ C^{tree_m}, states live in C^{n} ⊗ C^{m}")]
    DimensionMismatch {
        tree_n: usize,
        tree_m: usize,
        n: usize,
        m: usize,
    },
}

/// Pushes `state` through `child`, collecting the unnormalized leaf states.
pub(crate) fn route<'t>(
    child: &'t Child,
    state: JointState,
    path: String,
    out: &mut Vec<(String, &'t Leaf, JointState)>,
) {
    match child {
        Child::Leaf(l) => out.push((path, l, state)),
        Child::Node(node) => {
            for o in &node.outcomes {
                let post = state.apply(node.party, &o.projector);
                if !post.is_zero() {
                    route(&o.child, post, join(&path, &o.label), out);
                }
            }
        }
    }
}

/// Simulates `tree` on every state of `s` with the maximally entangled ancilla.
pub fn run(tree: &ProtocolTree, s: &StateSet) -> Result<DiscriminationReport, RunError> {
    run_with_resource(tree, s, Resource::MaximallyEntangled)
}

pub fn run_with_resource(
    tree: &ProtocolTree,
    s: &StateSet,
    resource: Resource,
) -> Result<DiscriminationReport, RunError> {
    if (tree.n, tree.m) != (s.n(), s.m()) {
        return Err(RunError::DimensionMismatch {
            tree_n: tree.n,
            tree_m: tree.m,
            n: s.n(),
            m: s.m(),
        });
    }
    tree.validate()?;

    let root = Child::Node(Box::new(tree.root.clone()));
    let mut states = Vec::with_capacity(s.len());
    let mut issues = Vec::new();
    let mut owners: BTreeMap<String, String> = BTreeMap::new();
    for input in s.states() {
        let start = JointState::initial(input, resource);
        let norm = start.norm_squared();
        let mut hits = Vec::new();
        route(&root, start, String::new(), &mut hits);
        let mut total = Rational::zero();
        let mut leaves = Vec::with_capacity(hits.len());
        for (path, leaf, post) in hits {
            let p = post.norm_squared() / &norm;
            total += &p;
            if leaf.label() != Some(input.label.as_str()) {
                issues.push(format!(
                    "{}: mass {} at leaf {path} ({leaf})",
                    input.label, p
                ));
            }
            if let Some(prev) = owners.insert(path.clone(), input.label.clone()) {
                if prev != input.label {
                    issues.push(format!(
                        "leaf {path} reached by both {prev} and {}",
                        input.label
                    ));
                }
            }
            leaves.push(LeafHit {
                path,
                leaf: leaf.label().map(str::to_string),
                p,
            });
        }
        if !total.is_one() {
            issues.push(format!("{}: total probability {total}", input.label));
        }
        states.push(StateOutcome {
            label: input.label.clone(),
            total,
            leaves,
        });
    }
    Ok(DiscriminationReport {
        resource,
        perfect: issues.is_empty(),
        states,
        issues,
    })
}

/// Local coordinate projector `|anc⟩⟨anc| ⊗ Σ_{i∈idx} |i⟩⟨i|` on `C² ⊗ C^d`.
/// Ancilla and system labels are 1-based.
pub fn ancilla_projector(
    d: usize,
    anc: usize,
    idx: impl IntoIterator<Item = usize>,
) -> RationalMatrix {
    RationalMatrix::coordinate_projector(2 * d, idx.into_iter().map(|i| (anc - 1) * d + i - 1))
}

/// Rank-one projector `|anc⟩⟨anc| ⊗ |v⟩⟨v|/⟨v|v⟩`, `v = Σ c·|i⟩`.
pub fn ancilla_vector_projector(d: usize, anc: usize, v: &[(usize, i64)]) -> RationalMatrix {
    let mut x = vec![Rational::zero(); 2 * d];
    for &(i, c) in v {
        x[(anc - 1) * d + i - 1] = int(c);
    }
    RationalMatrix::projector_onto(&x)
}

/// Swaps ancilla labels `1 ↔ 2` in a local operator on `C² ⊗ C^d`.
pub fn swap_ancilla(p: &RationalMatrix) -> RationalMatrix {
    let dd = p.rows();
    let d = dd / 2;
    RationalMatrix::from_fn(dd, dd, |i, j| p[((i + d) % dd, (j + d) % dd)].clone())
}

mod wire {
    use super::*;

    #[derive(Serialize, Deserialize)]
    pub(super) struct TreeWire {
        n: usize,
        m: usize,
        root: NodeWire,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        fallbacks: Vec<String>,
    }

    #[derive(Serialize, Deserialize)]
    struct OutcomeWire {
        label: String,
        projector: RationalMatrix,
    }

    #[derive(Serialize, Deserialize)]
    struct NodeWire {
        party: Party,
        outcomes: Vec<OutcomeWire>,
        children: Vec<ChildWire>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum ChildWire {
        Node(NodeWire),
        Leaf { leaf: Option<String> },
    }

    impl From<&MeasurementNode> for NodeWire {
        fn from(n: &MeasurementNode) -> Self {
            NodeWire {
                party: n.party,
                outcomes: n
                    .outcomes
                    .iter()
                    .map(|o| OutcomeWire {
                        label: o.label.clone(),
                        projector: o.projector.clone(),
                    })
                    .collect(),
                children: n
                    .outcomes
                    .iter()
                    .map(|o| match &o.child {
                        Child::Node(c) => ChildWire::Node(c.as_ref().into()),
                        Child::Leaf(l) => ChildWire::Leaf {
                            leaf: l.label().map(str::to_string),
                        },
                    })
                    .collect(),
            }
        }
    }

    impl TryFrom<NodeWire> for MeasurementNode {
        type Error = String;

        fn try_from(w: NodeWire) -> Result<Self, String> {
            if w.outcomes.len() != w.children.len() {
                return Err(format!(
                    "{} outcomes but {} children",
                    w.outcomes.len(),
                    w.children.len()
                ));
            }
            let outcomes = w
                .outcomes
                .into_iter()
                .zip(w.children)
                .map(|(o, c)| {
                    let child = match c {
                        ChildWire::Node(n) => Child::Node(Box::new(n.try_into()?)),
                        ChildWire::Leaf { leaf: Some(l) } => Child::Leaf(Leaf::Identified(l)),
                        ChildWire::Leaf { leaf: None } => Child::Leaf(Leaf::Unreachable),
                    };
                    Ok(Outcome {
                        label: o.label,
                        projector: o.projector,
                        child,
                    })
                })
                .collect::<Result<_, String>>()?;
            Ok(MeasurementNode {
                party: w.party,
                outcomes,
            })
        }
    }

    impl From<&ProtocolTree> for TreeWire {
        fn from(t: &ProtocolTree) -> Self {
            TreeWire {
                n: t.n,
                m: t.m,
                root: (&t.root).into(),
                fallbacks: t.fallbacks.clone(),
            }
        }
    }

    impl TryFrom<TreeWire> for ProtocolTree {
        type Error = String;

        fn try_from(w: TreeWire) -> Result<Self, String> {
            Ok(ProtocolTree {
                n: w.n,
                m: w.m,
                root: w.root.try_into()?,
                fallbacks: w.fallbacks,
            })
        }
    }
}

impl Serialize for ProtocolTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        wire::TreeWire::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProtocolTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        wire::TreeWire::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}
