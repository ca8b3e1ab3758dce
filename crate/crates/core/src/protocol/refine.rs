//! Greedy completion of a protocol once only a few states remain.
//!
//! Survivors are usually entangled across `aA | bB` after a couple of printed
//! steps, so a projector that keeps every local factor whole rarely exists.
//! Instead we pick an orthonormal family of local "atoms" (basis vectors and
//! `|s±t⟩` rotations) and group atoms so that every group projector preserves
//! pairwise orthogonality: whenever a pair of survivors picks up nonzero
//! overlap from several atoms, those atoms go in the same group. A candidate
//! is accepted only if every branch is strictly simpler, measured by
//! (number of survivors, total Schmidt rank).

use num_traits::{One, Zero};

use super::{Child, JointState, Leaf, MeasurementNode, Outcome};
use crate::linalg::{dot_unchecked, int, Rational, RationalMatrix};
use crate::states::Party;

const MAX_DEPTH: usize = 14;

/// Builds a subtree that separates `survivors`, or `None` if the greedy search
/// finds no way to do so. `last` is the party that measured most recently;
/// the search tries the other party first.
///
/// Survivors must be pairwise orthogonal.
pub fn refine_leaf(survivors: &[JointState], last: Option<Party>) -> Option<Child> {
    refine(survivors, last, 0)
}

fn refine(surv: &[JointState], last: Option<Party>, depth: usize) -> Option<Child> {
    match surv {
        [] => return Some(Child::Leaf(Leaf::Unreachable)),
        [one] => return Some(Child::Leaf(Leaf::Identified(one.origin.clone()))),
        _ => {}
    }
    if depth >= MAX_DEPTH {
        return None;
    }
    let current = complexity(surv);
    let order = match last {
        Some(Party::A) => [Party::B, Party::A],
        _ => [Party::A, Party::B],
    };
    for party in order {
        let d = surv[0].local_dim(party);
        let weights: Vec<RationalMatrix> = surv.iter().map(|s| oriented(s, party)).collect();
        for atoms in candidates(&weights, d) {
            let groups = group_atoms(&weights, &atoms);
            if groups.len() < 2 {
                continue;
            }
            let mut branches = Vec::with_capacity(groups.len());
            let mut progress = true;
            for g in &groups {
                let p = group_projector(d, &atoms, g);
                if p.is_zero() {
                    continue;
                }
                let post: Vec<JointState> = surv
                    .iter()
                    .map(|s| s.apply(party, &p))
                    .filter(|s| !s.is_zero())
                    .collect();
                if !post.is_empty() && complexity(&post) >= current {
                    progress = false;
                    break;
                }
                branches.push((p, post));
            }
            if !progress {
                continue;
            }
            let expected = branches.len();
            let mut outcomes = Vec::with_capacity(expected);
            for (idx, (p, post)) in branches.into_iter().enumerate() {
                let Some(child) = refine(&post, Some(party), depth + 1) else {
                    break;
                };
                outcomes.push(Outcome {
                    label: format!("{party}r{}", idx + 1),
                    projector: p,
                    child,
                });
            }
            if outcomes.len() == expected {
                debug_assert!(outcomes_complete(&outcomes, d));
                return Some(Child::Node(Box::new(MeasurementNode { party, outcomes })));
            }
        }
    }
    None
}

fn outcomes_complete(outcomes: &[Outcome], d: usize) -> bool {
    let mut sum = RationalMatrix::zeros(d, d);
    for o in outcomes {
        sum = sum.add(&o.projector).expect("square");
    }
    sum.is_identity()
}

fn complexity(surv: &[JointState]) -> (usize, usize) {
    (surv.len(), surv.iter().map(JointState::schmidt_rank).sum())
}

/// Survivor matrix with the acting party's local space as rows.
fn oriented(s: &JointState, party: Party) -> RationalMatrix {
    match party {
        Party::A => s.matrix().clone(),
        Party::B => s.matrix().transpose(),
    }
}

/// Sparse integer local vector.
type Atom = Vec<(usize, i64)>;

/// Candidate atom families: the computational basis on touched coordinates,
/// then one `|s+t⟩, |s−t⟩` rotation for each touched pair `s < t`. Untouched
/// coordinates form an implicit complement atom.
fn candidates(weights: &[RationalMatrix], d: usize) -> Vec<Vec<Atom>> {
    let touched: Vec<usize> = (0..d)
        .filter(|&t| {
            weights
                .iter()
                .any(|x| x.row(t).iter().any(|e| !e.is_zero()))
        })
        .collect();
    let mut out = vec![touched.iter().map(|&t| vec![(t, 1)]).collect::<Vec<Atom>>()];
    for (i, &s) in touched.iter().enumerate() {
        for &t in &touched[i + 1..] {
            let mut atoms: Vec<Atom> = touched
                .iter()
                .filter(|&&u| u != s && u != t)
                .map(|&u| vec![(u, 1)])
                .collect();
            atoms.push(vec![(s, 1), (t, 1)]);
            atoms.push(vec![(s, 1), (t, -1)]);
            out.push(atoms);
        }
    }
    out
}

fn atom_weight(x: &RationalMatrix, atom: &Atom) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); x.cols()];
    for &(t, c) in atom {
        let c = int(c);
        for (o, e) in w.iter_mut().zip(x.row(t)) {
            if !e.is_zero() {
                *o += &c * e;
            }
        }
    }
    w
}

fn atom_norm(atom: &Atom) -> Rational {
    int(atom.iter().map(|&(_, c)| c * c).sum())
}

/// Groups of atom indices; index `atoms.len()` is the complement.
fn group_atoms(weights: &[RationalMatrix], atoms: &[Atom]) -> Vec<Vec<usize>> {
    let k = atoms.len();
    let w: Vec<Vec<Vec<Rational>>> = atoms
        .iter()
        .map(|a| weights.iter().map(|x| atom_weight(x, a)).collect())
        .collect();
    let norms: Vec<Rational> = atoms.iter().map(atom_norm).collect();

    let mut parent: Vec<usize> = (0..=k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for i in 0..weights.len() {
        for j in i + 1..weights.len() {
            let mut linked = Vec::new();
            let mut total = Rational::zero();
            for a in 0..k {
                let c = dot_unchecked(&w[a][i], &w[a][j]);
                if !c.is_zero() {
                    total += c / &norms[a];
                    linked.push(a);
                }
            }
            if !total.is_zero() {
                linked.push(k);
            }
            if let Some((&first, rest)) = linked.split_first() {
                for &a in rest {
                    let (ra, rf) = (find(&mut parent, a), find(&mut parent, first));
                    parent[ra] = rf;
                }
            }
        }
    }

    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for a in 0..=k {
        let r = find(&mut parent, a);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(a),
            None => groups.push((r, vec![a])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

fn group_projector(d: usize, atoms: &[Atom], group: &[usize]) -> RationalMatrix {
    let k = atoms.len();
    let mut p = RationalMatrix::zeros(d, d);
    let add_atom = |p: &mut RationalMatrix, atom: &Atom, sign: &Rational| {
        let norm = atom_norm(atom);
        for &(s, cs) in atom {
            for &(t, ct) in atom {
                p[(s, t)] += sign * int(cs * ct) / &norm;
            }
        }
    };
    let plus = Rational::one();
    let minus = -Rational::one();
    for &g in group {
        if g < k {
            add_atom(&mut p, &atoms[g], &plus);
        }
    }
    if group.contains(&k) {
        for i in 0..d {
            p[(i, i)] += Rational::one();
        }
        for atom in atoms {
            add_atom(&mut p, atom, &minus);
        }
    }
    p
}
