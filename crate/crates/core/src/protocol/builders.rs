//! Protocol trees for the three families.
//!
//! Each builder writes down the printed measurements as a skeleton and then
//! pushes the actual joint states through it. Outcomes not covered by the
//! listed projectors are collected in a complement outcome labelled `rest`.
//! Wherever the skeleton stops with more than one state left, the remaining
//! states are separated by [`refine_leaf`].
//!
//! Only one root branch is written out. The other is its mirror image under
//! the ancilla relabelling `1 ↔ 2`; if the mirror fails to separate its
//! survivors it is replaced by a fresh refinement and the path is recorded in
//! [`ProtocolTree::fallbacks`].

use std::collections::HashMap;

use num_traits::Zero;
use thiserror::Error;

use super::{
    ancilla_projector as proj, ancilla_vector_projector as vproj, refine_leaf, route, swap_ancilla,
    Child, JointState, Leaf, MeasurementNode, Outcome, ProtocolTree, Resource,
};
use crate::families::{self, Family, FamilyParams, ParamError};
use crate::linalg::RationalMatrix;
use crate::states::{Party, StateSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("at {path:?}: outcomes {first:?} and {second:?} overlap")]
    Overlap {
        path: String,
        first: String,
        second: String,
    },
    #[error("at {path:?}: {first} and {second} are no longer orthogonal")]
    OrthogonalityBroken {
        path: String,
        first: String,
        second: String,
    },
    #[error("at {path:?}: could not separate {survivors:?}")]
    RefineFailed {
        path: String,
        survivors: Vec<String>,
    },
}

struct SkelOutcome {
    label: String,
    projector: RationalMatrix,
    child: Option<Skel>,
    mirrored: bool,
}

struct Skel {
    party: Party,
    outcomes: Vec<SkelOutcome>,
}

impl Skel {
    fn new(party: Party) -> Self {
        Self {
            party,
            outcomes: Vec::new(),
        }
    }

    fn leaf(mut self, label: impl Into<String>, projector: RationalMatrix) -> Self {
        self.outcomes.push(SkelOutcome {
            label: label.into(),
            projector,
            child: None,
            mirrored: false,
        });
        self
    }

    fn node(mut self, label: impl Into<String>, projector: RationalMatrix, child: Skel) -> Self {
        self.outcomes.push(SkelOutcome {
            label: label.into(),
            projector,
            child: Some(child),
            mirrored: false,
        });
        self
    }

    /// Root branch built as the ancilla mirror of `child`.
    fn mirrored(
        mut self,
        label: impl Into<String>,
        projector: RationalMatrix,
        child: &Skel,
    ) -> Self {
        self.outcomes.push(SkelOutcome {
            label: label.into(),
            projector,
            child: Some(child.mirror()),
            mirrored: true,
        });
        self
    }

    fn mirror(&self) -> Skel {
        Skel {
            party: self.party,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| SkelOutcome {
                    label: format!("{}'", o.label),
                    projector: swap_ancilla(&o.projector),
                    child: o.child.as_ref().map(Skel::mirror),
                    mirrored: o.mirrored,
                })
                .collect(),
        }
    }
}

fn sum(parts: impl IntoIterator<Item = RationalMatrix>) -> RationalMatrix {
    parts
        .into_iter()
        .reduce(|a, b| a.add(&b).expect("same local dimension"))
        .expect("at least one term")
}

fn join(path: &str, label: &str) -> String {
    super::join(path, label)
}

fn check_orthogonal(path: &str, states: &[JointState]) -> Result<(), BuildError> {
    for (i, x) in states.iter().enumerate() {
        for y in &states[i + 1..] {
            if !x.overlap(y).is_zero() {
                return Err(BuildError::OrthogonalityBroken {
                    path: path.to_string(),
                    first: x.origin.clone(),
                    second: y.origin.clone(),
                });
            }
        }
    }
    Ok(())
}

fn refine_or_fail(path: &str, survivors: &[JointState], last: Party) -> Result<Child, BuildError> {
    refine_leaf(survivors, Some(last)).ok_or_else(|| BuildError::RefineFailed {
        path: path.to_string(),
        survivors: survivors.iter().map(|s| s.origin.clone()).collect(),
    })
}

/// True when every survivor lands only on leaves carrying its own label and
/// no leaf is shared.
fn separates(child: &Child, survivors: &[JointState]) -> bool {
    let mut owner: HashMap<String, &str> = HashMap::new();
    for s in survivors {
        let mut hits = Vec::new();
        route(child, s.clone(), String::new(), &mut hits);
        for (path, leaf, _) in hits {
            if *leaf != Leaf::Identified(s.origin.clone()) {
                return false;
            }
            if owner
                .insert(path, s.origin.as_str())
                .is_some_and(|o| o != s.origin)
            {
                return false;
            }
        }
    }
    true
}

struct Ctx {
    n: usize,
    m: usize,
    fallbacks: Vec<String>,
}

impl Ctx {
    fn local_dim(&self, party: Party) -> usize {
        2 * match party {
            Party::A => self.n,
            Party::B => self.m,
        }
    }
}

fn build_node(
    ctx: &mut Ctx,
    skel: Skel,
    survivors: &[JointState],
    path: &str,
) -> Result<MeasurementNode, BuildError> {
    let party = skel.party;
    let local_dim = ctx.local_dim(party);
    let mut outcomes = skel.outcomes;
    for (i, o) in outcomes.iter().enumerate() {
        for prev in &outcomes[..i] {
            if !prev.projector.mul(&o.projector).expect("square").is_zero() {
                return Err(BuildError::Overlap {
                    path: path.to_string(),
                    first: prev.label.clone(),
                    second: o.label.clone(),
                });
            }
        }
    }
    let covered = outcomes
        .iter()
        .fold(RationalMatrix::zeros(local_dim, local_dim), |acc, o| {
            acc.add(&o.projector).expect("square")
        });
    let rest = RationalMatrix::identity(local_dim)
        .sub(&covered)
        .expect("square");
    if !rest.is_zero() {
        outcomes.push(SkelOutcome {
            label: "rest".into(),
            projector: rest,
            child: None,
            mirrored: false,
        });
    }

    let mut out = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let here = join(path, &o.label);
        let post: Vec<JointState> = survivors
            .iter()
            .map(|s| s.apply(party, &o.projector))
            .filter(|s| !s.is_zero())
            .collect();
        check_orthogonal(&here, &post)?;
        let child = match o.child {
            _ if post.is_empty() => Child::Leaf(Leaf::Unreachable),
            Some(sk) if o.mirrored => match build_node(ctx, sk, &post, &here) {
                Ok(node) if separates(&Child::Node(Box::new(node.clone())), &post) => {
                    Child::Node(Box::new(node))
                }
                _ => {
                    ctx.fallbacks.push(here.clone());
                    refine_or_fail(&here, &post, party)?
                }
            },
            Some(sk) => Child::Node(Box::new(build_node(ctx, sk, &post, &here)?)),
            None => refine_or_fail(&here, &post, party)?,
        };
        out.push(Outcome {
            label: o.label,
            projector: o.projector,
            child,
        });
    }
    Ok(MeasurementNode {
        party,
        outcomes: out,
    })
}

fn build_tree(set: &StateSet, skel: Skel) -> Result<ProtocolTree, BuildError> {
    let (n, m) = (set.n(), set.m());
    let survivors: Vec<JointState> = set
        .states()
        .iter()
        .map(|s| JointState::initial(s, Resource::MaximallyEntangled))
        .collect();
    let mut ctx = Ctx {
        n,
        m,
        fallbacks: Vec::new(),
    };
    let root = build_node(&mut ctx, skel, &survivors, "")?;
    let tree = ProtocolTree {
        n,
        m,
        root,
        fallbacks: ctx.fallbacks,
    };
    debug_assert!(tree.validate().is_ok());
    Ok(tree)
}

/// Protocol for the `C^n ⊗ C^4` family (and the 8-state variant at `n = 4`).
pub fn build_thm4_tree(p: FamilyParams) -> Result<ProtocolTree, BuildError> {
    let set = families::build(p, Family::Thm1)?;
    let (n, m) = (p.n, 4);

    let after_b2 = Skel::new(Party::A)
        .leaf("A2.1", proj(n, 2, [2]))
        .leaf("A2.2", proj(n, 2, 3..=n));
    let mut after_b3 = Skel::new(Party::A).leaf("A3.1", sum([proj(n, 1, [1]), proj(n, 2, [2, 3])]));
    for i in 2..=n - 2 {
        after_b3 = after_b3.leaf(format!("A3.{i}"), proj(n, 2, [2 + i]));
    }
    let bob = Skel::new(Party::B)
        // |b₂⟩⊗(|1⟩⟨1|+|2⟩⟨2|): the rank-one |1+2⟩ form would break the
        // orthogonality of |3+4⟩|1⟩ and |3−5⟩|2⟩.
        .leaf("B1", vproj(m, 1, &[(2, 1), (3, 1)]))
        .node("B2", proj(m, 2, [1, 2]), after_b2)
        .node("B3", sum([proj(m, 1, [4]), proj(m, 2, [3, 4])]), after_b3);

    let root = Skel::new(Party::A)
        .node(
            "A1",
            sum([proj(n, 1, [1]), proj(n, 2, 2..=n)]),
            bob.mirror_source(),
        )
        .mirrored("A2", sum([proj(n, 2, [1]), proj(n, 1, 2..=n)]), &bob);
    build_tree(&set, root)
}

/// Protocol for the `C^n ⊗ C^{2l}` family.
pub fn build_thm5_tree(p: FamilyParams) -> Result<ProtocolTree, BuildError> {
    let set = families::build(p, Family::Thm2)?;
    let (n, m) = (p.n, p.m);
    let l = m / 2;

    let mut after_bl1 = Skel::new(Party::A);
    for i in 1..=l.saturating_sub(3) {
        after_bl1 = after_bl1.leaf(format!("A{}.{i}", l - 1), proj(n, 1, [i]));
    }
    // Coordinate projector: the rank-one |(l−2)+(l−1)⟩ form merges two states.
    after_bl1 = after_bl1.leaf(format!("A{}.{}", l - 1, l - 2), proj(n, 1, [l - 2, l - 1]));

    let mut after_bl = Skel::new(Party::A).leaf(
        format!("A{l}.1"),
        sum([proj(n, 1, [l - 1]), proj(n, 2, [l, l + 1, l + 2])]),
    );
    for i in 2..n - l {
        after_bl = after_bl.leaf(format!("A{l}.{i}"), proj(n, 2, [l + 1 + i]));
    }

    let mut bob = Skel::new(Party::B);
    for i in 1..=l - 2 {
        bob = bob.leaf(format!("B{i}"), proj(m, 1, [i]));
    }
    bob = bob
        .node(format!("B{}", l - 1), proj(m, 1, l..=m), after_bl1)
        .node(
            format!("B{l}"),
            sum([proj(m, 1, [l - 1]), proj(m, 2, 1..=l + 1)]),
            after_bl,
        );
    for i in 1..m - l {
        bob = bob.leaf(format!("B{}", l + i), proj(m, 2, [l + 1 + i]));
    }

    // The upper limit of Alice's second block is n, so A1 + A2 = I.
    let root = Skel::new(Party::A)
        .node(
            "A1",
            sum([proj(n, 1, 1..l), proj(n, 2, l..=n)]),
            bob.mirror_source(),
        )
        .mirrored("A2", sum([proj(n, 2, 1..l), proj(n, 1, l..=n)]), &bob);
    build_tree(&set, root)
}

/// Protocol for the `C^n ⊗ C^{2k+1}` family. Bob measures first.
pub fn build_thm6_tree(p: FamilyParams) -> Result<ProtocolTree, BuildError> {
    let set = families::build(p, Family::Thm3)?;
    let (n, m) = (p.n, p.m);
    let k = (m - 1) / 2;

    let mut after_a3 = Skel::new(Party::B);
    if k > 2 {
        after_a3 = after_a3
            .leaf("B3.1", vproj(m, 1, &[(k - 2, 1), (k - 1, 1)]))
            .leaf("B3.2", vproj(m, 1, &[(k - 2, 1), (k - 1, -1)]));
    }
    after_a3 = after_a3
        .leaf("B3.3", vproj(m, 1, &[(k, 1), (k + 1, 1)]))
        .leaf("B3.4", vproj(m, 1, &[(k, 1), (k + 1, -1)]));

    let last = n - k + 2;
    let mut after_last = Skel::new(Party::B);
    for i in 1..=k {
        after_last = after_last.leaf(format!("B{last}.{i}"), proj(m, 1, [i]));
    }
    after_last = after_last
        .leaf(
            format!("B{last}.{}", k + 1),
            sum([proj(m, 1, [k + 1]), proj(m, 2, [k + 2])]),
        )
        // Starts at k+3; including k+2 would overlap the previous outcome.
        .leaf(format!("B{last}.{}", k + 2), proj(m, 2, k + 3..=m));

    let mut alice = Skel::new(Party::A)
        .leaf("A1", proj(n, 1, [k + 3]))
        .leaf("A2", proj(n, 2, [k - 1]))
        .node("A3", proj(n, 1, [k + 2]), after_a3);
    for i in 1..=n - k - 3 {
        alice = alice.leaf(format!("A{}", i + 3), proj(n, 1, [k + 3 + i]));
    }
    let second_block: Vec<usize> = (1..=k - 2).chain([k]).collect();
    alice = alice
        .leaf(format!("A{}", n - k + 1), proj(n, 2, k + 1..=n))
        .node(
            format!("A{last}"),
            sum([proj(n, 1, 1..=k + 1), proj(n, 2, second_block)]),
            after_last,
        );

    let root = Skel::new(Party::B)
        .node(
            "B1",
            sum([proj(m, 1, 1..=k + 1), proj(m, 2, k + 2..=m)]),
            alice.mirror_source(),
        )
        .mirrored(
            "B2",
            sum([proj(m, 2, 1..=k + 1), proj(m, 1, k + 2..=m)]),
            &alice,
        );
    build_tree(&set, root)
}

impl Skel {
    /// Deep copy used for the analyzed branch, leaving `self` for the mirror.
    fn mirror_source(&self) -> Skel {
        Skel {
            party: self.party,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| SkelOutcome {
                    label: o.label.clone(),
                    projector: o.projector.clone(),
                    child: o.child.as_ref().map(Skel::mirror_source),
                    mirrored: o.mirrored,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::run;

    #[test]
    fn thm4_6_4_structure() {
        let t = build_thm4_tree(FamilyParams::new(6, 4)).unwrap();
        assert_eq!(t.root.party, Party::A);
        assert_eq!(t.root.outcomes.len(), 2);
        let Child::Node(bob) = &t.root.outcomes[0].child else {
            panic!("A1 child must be a node")
        };
        assert_eq!(bob.party, Party::B);
        assert!(bob.outcomes.len() >= 3);
        assert!(t.fallbacks.is_empty());
    }

    #[test]
    fn thm4_6_4_discriminates() {
        let p = FamilyParams::new(6, 4);
        let t = build_thm4_tree(p).unwrap();
        let s = families::build(p, Family::Thm1).unwrap();
        let r = run(&t, &s).unwrap();
        assert!(r.perfect, "{:?}", r.issues);
    }

    #[test]
    fn rejects_wrong_family_params() {
        assert!(matches!(
            build_thm4_tree(FamilyParams::new(6, 6)),
            Err(BuildError::Param(_))
        ));
        assert!(matches!(
            build_thm5_tree(FamilyParams::new(7, 5)),
            Err(BuildError::Param(_))
        ));
        assert!(matches!(
            build_thm6_tree(FamilyParams::new(6, 6)),
            Err(BuildError::Param(_))
        ));
    }
}
