//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the certifier or the simulator: both are recomputed from
//! dense tensor-product vectors.

#![allow(dead_code)]

use locc_lab::linalg::int;
use locc_lab::protocol::{Child, Leaf, MeasurementNode};
use locc_lab::{Party, ProtocolTree, Rational, RationalMatrix, Resource, StateSet};

pub const GRID_MAX: usize = 12;

/// Every `(n, m)` with `4 ≤ m ≤ n ≤ max`.
pub fn grid(max: usize) -> Vec<(usize, usize)> {
    (4..=max)
        .flat_map(|n| (4..=n).map(move |m| (n, m)))
        .collect()
}

/// Dense `|a⟩⊗|b⟩` in `A`-major order, length `n·m`.
pub fn dense_product(s: &StateSet, idx: usize) -> Vec<i64> {
    let st = &s.states()[idx];
    let (n, m) = (s.n(), s.m());
    let mut a = vec![0i64; n];
    let mut b = vec![0i64; m];
    for &(i, c) in st.a.amps() {
        a[i - 1] = c;
    }
    for &(j, c) in st.b.amps() {
        b[j - 1] = c;
    }
    let mut v = Vec::with_capacity(n * m);
    for x in &a {
        for y in &b {
            v.push(x * y);
        }
    }
    v
}

const P: u128 = (1u128 << 61) - 1;

fn modp(x: i64) -> u128 {
    (x as i128).rem_euclid(P as i128) as u128
}

fn pow(mut b: u128, mut e: u128) -> u128 {
    let mut r = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

/// Rank of an integer matrix modulo the prime `2^61 − 1`.
pub fn rank_mod_p(rows: &[Vec<i64>], cols: usize) -> usize {
    let mut basis: Vec<Option<Vec<u128>>> = vec![None; cols];
    let mut rank = 0;
    for r in rows {
        let mut v: Vec<u128> = r.iter().map(|&x| modp(x)).collect();
        for c in 0..cols {
            if v[c] == 0 {
                continue;
            }
            match &basis[c] {
                Some(b) => {
                    let f = v[c];
                    for j in c..cols {
                        v[j] = (v[j] + P - f * b[j] % P) % P;
                    }
                }
                None => {
                    let inv = pow(v[c], P - 2);
                    for x in v.iter_mut() {
                        *x = *x * inv % P;
                    }
                    basis[c] = Some(v);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Brute-force solution dimension of `⟨ξ_i|(H⊗I)|ξ_j⟩ = 0` (or `I⊗H`) for all
/// `i ≠ j`, over an unrestricted complex `d × d` matrix `H = R + iJ` together
/// with explicit Hermiticity equations. Unknowns: `R_pq, J_pq` for all `p, q`.
pub fn brute_force_solution_dim(s: &StateSet, party: Party) -> usize {
    let (n, m) = (s.n(), s.m());
    let d = s.dim(party);
    let unknowns = 2 * d * d;
    let vecs: Vec<Vec<i64>> = (0..s.len()).map(|i| dense_product(s, i)).collect();
    let mut rows = Vec::new();
    for p in 0..d {
        for q in 0..d {
            let mut herm_re = vec![0i64; unknowns];
            herm_re[p * d + q] += 1;
            herm_re[q * d + p] -= 1;
            rows.push(herm_re);
            let mut herm_im = vec![0i64; unknowns];
            herm_im[d * d + p * d + q] += 1;
            herm_im[d * d + q * d + p] += 1;
            rows.push(herm_im);
        }
    }
    for i in 0..s.len() {
        for j in 0..s.len() {
            if i == j {
                continue;
            }
            // c_pq = Σ over the other index of ξ_i(p, ·) ξ_j(q, ·).
            let mut c = vec![0i64; d * d];
            for x in 0..n {
                for y in 0..m {
                    let vi = vecs[i][x * m + y];
                    if vi == 0 {
                        continue;
                    }
                    for x2 in 0..n {
                        for y2 in 0..m {
                            let vj = vecs[j][x2 * m + y2];
                            if vj == 0 {
                                continue;
                            }
                            let (p, q, same) = match party {
                                Party::A => (x, x2, y == y2),
                                Party::B => (y, y2, x == x2),
                            };
                            if same {
                                c[p * d + q] += vi * vj;
                            }
                        }
                    }
                }
            }
            let mut re = vec![0i64; unknowns];
            let mut im = vec![0i64; unknowns];
            re[..d * d].copy_from_slice(&c);
            im[d * d..].copy_from_slice(&c);
            rows.push(re);
            rows.push(im);
        }
    }
    unknowns - rank_mod_p(&rows, unknowns)
}

/// Exact residuals of `⟨ξ_i|(H⊗I)|ξ_j⟩` over all ordered pairs, using dense
/// tensor-product vectors. `re`/`im` are the parts of `H`.
pub fn max_residual_is_zero(
    s: &StateSet,
    party: Party,
    re: &RationalMatrix,
    im: &RationalMatrix,
) -> bool {
    let (n, m) = (s.n(), s.m());
    let vecs: Vec<Vec<i64>> = (0..s.len()).map(|i| dense_product(s, i)).collect();
    let zero = int(0);
    for i in 0..s.len() {
        for j in 0..s.len() {
            if i == j {
                continue;
            }
            let mut acc_re = int(0);
            let mut acc_im = int(0);
            for x in 0..n {
                for y in 0..m {
                    let vi = vecs[i][x * m + y];
                    if vi == 0 {
                        continue;
                    }
                    for x2 in 0..n {
                        for y2 in 0..m {
                            let vj = vecs[j][x2 * m + y2];
                            if vj == 0 {
                                continue;
                            }
                            let (p, q, same) = match party {
                                Party::A => (x, x2, y == y2),
                                Party::B => (y, y2, x == x2),
                            };
                            if same {
                                let c = int(vi * vj);
                                acc_re += &c * &re[(p, q)];
                                acc_im += &c * &im[(p, q)];
                            }
                        }
                    }
                }
            }
            if acc_re != zero || acc_im != zero {
                return false;
            }
        }
    }
    true
}

/// Leaf distribution of every input recomputed with global operators
/// `P ⊗ I` / `I ⊗ P` on the full `(a, A, b, B)` vector.
pub struct OracleRun {
    /// Per input: `(leaf path, leaf label, probability)` with nonzero mass.
    pub hits: Vec<Vec<Hit>>,
}

fn global_vector(s: &StateSet, idx: usize, resource: Resource) -> Vec<Rational> {
    let st = &s.states()[idx];
    let (n, m) = (s.n(), s.m());
    let anc = resource.ancilla();
    let mut v = vec![int(0); 4 * n * m];
    for (a, row) in anc.iter().enumerate() {
        for (b, &cab) in row.iter().enumerate() {
            if cab == 0 {
                continue;
            }
            for &(x, ca) in st.a.amps() {
                for &(y, cb) in st.b.amps() {
                    let alice = a * n + x - 1;
                    let bob = b * m + y - 1;
                    v[alice * 2 * m + bob] = int(cab * ca * cb);
                }
            }
        }
    }
    v
}

fn norm2(v: &[Rational]) -> Rational {
    v.iter().fold(int(0), |acc, x| acc + x * x)
}

type Hit = (String, Option<String>, Rational);

/// Walks all inputs together so each global operator is built once.
fn walk(
    node: &MeasurementNode,
    n: usize,
    m: usize,
    vs: &[Option<Vec<Rational>>],
    path: &str,
    norms: &[Rational],
    out: &mut [Vec<Hit>],
) {
    let zero = int(0);
    for o in &node.outcomes {
        let global = match node.party {
            Party::A => o.projector.kron(&RationalMatrix::identity(2 * m)),
            Party::B => RationalMatrix::identity(2 * n).kron(&o.projector),
        };
        let mut sparse = Vec::new();
        for i in 0..global.rows() {
            for j in 0..global.cols() {
                if global[(i, j)] != zero {
                    sparse.push((i, j, global[(i, j)].clone()));
                }
            }
        }
        let posts: Vec<Option<Vec<Rational>>> = vs
            .iter()
            .map(|v| {
                let v = v.as_ref()?;
                let mut post = vec![int(0); v.len()];
                for (i, j, g) in &sparse {
                    if v[*j] != zero {
                        post[*i] += g * &v[*j];
                    }
                }
                (norm2(&post) != zero).then_some(post)
            })
            .collect();
        if posts.iter().all(Option::is_none) {
            continue;
        }
        let here = if path.is_empty() {
            o.label.clone()
        } else {
            format!("{path}/{}", o.label)
        };
        match &o.child {
            Child::Node(c) => walk(c, n, m, &posts, &here, norms, out),
            Child::Leaf(l) => {
                let label = match l {
                    Leaf::Identified(x) => Some(x.clone()),
                    Leaf::Unreachable => None,
                };
                for (k, post) in posts.iter().enumerate() {
                    if let Some(post) = post {
                        out[k].push((here.clone(), label.clone(), norm2(post) / &norms[k]));
                    }
                }
            }
        }
    }
}

pub fn oracle_run(tree: &ProtocolTree, s: &StateSet, resource: Resource) -> OracleRun {
    let vs: Vec<Option<Vec<Rational>>> = (0..s.len())
        .map(|i| Some(global_vector(s, i, resource)))
        .collect();
    let norms: Vec<Rational> = vs.iter().map(|v| norm2(v.as_ref().unwrap())).collect();
    let mut hits = vec![Vec::new(); s.len()];
    walk(&tree.root, s.n(), s.m(), &vs, "", &norms, &mut hits);
    OracleRun { hits }
}

impl OracleRun {
    /// Perfect iff each input's mass sums to one and the leaf supports of
    /// distinct inputs are pairwise disjoint.
    pub fn perfect(&self) -> bool {
        let one = int(1);
        if self
            .hits
            .iter()
            .any(|h| h.iter().fold(int(0), |acc, (_, _, p)| acc + p) != one)
        {
            return false;
        }
        for (i, a) in self.hits.iter().enumerate() {
            for b in &self.hits[i + 1..] {
                if a.iter()
                    .any(|(pa, _, _)| b.iter().any(|(pb, _, _)| pa == pb))
                {
                    return false;
                }
            }
        }
        true
    }
}
