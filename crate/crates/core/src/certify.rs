//! Orthogonality-preservation certificates.
//!
//! A first measurement by one party with operators `M` leaves the states
//! orthogonal only if `H = M†M` satisfies `⟨ξ_i|H⊗I|ξ_j⟩ = 0` for every pair.
//! For product states this reduces to `⟨a_i|H|a_j⟩ = 0` whenever the other
//! party's factors overlap. We solve that linear system over Hermitian `H`
//! written as `S + iK` with `S` symmetric and `K` antisymmetric. Since the
//! kets are real, the `S` and `K` equations decouple.
//!
//! If the only solutions are multiples of the identity the party cannot make
//! a nontrivial non-disturbing first measurement.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{int, kernel_basis, Rational, RationalMatrix};
use crate::states::{verify_orthogonality, Ket, Party, StateSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("state set is not orthogonal ({count} overlapping pairs, first {first} / {second})")]
    NotOrthogonal {
        count: usize,
        first: String,
        second: String,
    },
}

/// `re + i·im` with `re` symmetric and `im` antisymmetric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermitianMatrix {
    pub re: RationalMatrix,
    pub im: RationalMatrix,
}

impl HermitianMatrix {
    pub fn identity(dim: usize) -> Self {
        Self {
            re: RationalMatrix::identity(dim),
            im: RationalMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.rows()
    }

    /// True when `re` is symmetric and `im` antisymmetric.
    pub fn is_hermitian(&self) -> bool {
        let d = self.dim();
        self.re.is_symmetric()
            && self.im.is_square()
            && self.im.rows() == d
            && (0..d).all(|i| (i..d).all(|j| self.im[(i, j)] == -self.im[(j, i)].clone()))
    }

    /// True when the matrix is `c·I` for some rational `c`.
    pub fn is_scalar(&self) -> bool {
        let d = self.dim();
        self.im.is_zero()
            && (0..d).all(|i| {
                (0..d).all(|j| {
                    if i == j {
                        self.re[(i, i)] == self.re[(0, 0)]
                    } else {
                        self.re[(i, j)].is_zero()
                    }
                })
            })
    }

    /// `⟨u|H|v⟩` split into real and imaginary parts.
    pub fn sandwich(&self, u: &Ket, v: &Ket) -> (Rational, Rational) {
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for &(p, a) in u.amps() {
            for &(q, b) in v.amps() {
                let c = int(a * b);
                re += &c * &self.re[(p - 1, q - 1)];
                im += &c * &self.im[(p - 1, q - 1)];
            }
        }
        (re, im)
    }

    /// Checks `⟨ξ_i|H⊗I|ξ_j⟩ = 0` (or `I⊗H` for Bob) for every pair in `s`.
    pub fn preserves_orthogonality(&self, s: &StateSet, party: Party) -> bool {
        let states = s.states();
        states.iter().enumerate().all(|(i, x)| {
            states[i + 1..].iter().all(|y| {
                let other = x
                    .factor(party.other())
                    .dot_unchecked(y.factor(party.other()));
                if other == 0 {
                    return true;
                }
                let (re, im) = self.sandwich(x.factor(party), y.factor(party));
                re.is_zero() && im.is_zero()
            })
        })
    }
}

/// Solution space of the orthogonality-preservation system for one party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndistCertificate {
    pub party: Party,
    pub local_dim: usize,
    /// Basis of all Hermitian solutions. Symmetric-part solutions come first.
    pub solution_basis: Vec<HermitianMatrix>,
    pub scalar_only: bool,
    /// Pairs whose other-party factors overlap.
    pub active_pairs: usize,
}

impl IndistCertificate {
    pub fn solution_dim(&self) -> usize {
        self.solution_basis.len()
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            party: self.party,
            dim: self.local_dim,
            solution_dim: self.solution_dim(),
            scalar_only: self.scalar_only,
            active_pairs: self.active_pairs,
            witness: witness_matrix(self),
        }
    }
}

/// Wire form of a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub party: Party,
    pub dim: usize,
    pub solution_dim: usize,
    pub scalar_only: bool,
    pub active_pairs: usize,
    pub witness: Option<HermitianMatrix>,
}

/// Upper-triangle index pairs `(p, q)`, `p ≤ q` (or `p < q` when `strict`).
fn triangle(d: usize, strict: bool) -> Vec<(usize, usize)> {
    (0..d)
        .flat_map(|p| ((if strict { p + 1 } else { p })..d).map(move |q| (p, q)))
        .collect()
}

fn dense(k: &Ket) -> Vec<i64> {
    let mut v = vec![0; k.dim()];
    for &(i, c) in k.amps() {
        v[i - 1] = c;
    }
    v
}

pub fn certify_party(s: &StateSet, party: Party) -> Result<IndistCertificate, CertifyError> {
    let report = verify_orthogonality(s);
    if let Some(v) = report.violations.first() {
        return Err(CertifyError::NotOrthogonal {
            count: report.violations.len(),
            first: v.first.clone(),
            second: v.second.clone(),
        });
    }
    let d = s.dim(party);
    let sym = triangle(d, false);
    let asym = triangle(d, true);

    let states = s.states();
    let mut re_rows: Vec<Vec<Rational>> = Vec::new();
    let mut im_rows: Vec<Vec<Rational>> = Vec::new();
    let mut active_pairs = 0;
    for (i, x) in states.iter().enumerate() {
        for y in &states[i + 1..] {
            if x.factor(party.other())
                .dot_unchecked(y.factor(party.other()))
                == 0
            {
                continue;
            }
            active_pairs += 1;
            let u = dense(x.factor(party));
            let v = dense(y.factor(party));
            let re: Vec<Rational> = sym
                .iter()
                .map(|&(p, q)| {
                    if p == q {
                        int(u[p] * v[p])
                    } else {
                        int(u[p] * v[q] + u[q] * v[p])
                    }
                })
                .collect();
            let im: Vec<Rational> = asym
                .iter()
                .map(|&(p, q)| int(u[p] * v[q] - u[q] * v[p]))
                .collect();
            if re.iter().any(|c| !c.is_zero()) {
                re_rows.push(re);
            }
            if im.iter().any(|c| !c.is_zero()) {
                im_rows.push(im);
            }
        }
    }

    let system = |rows: Vec<Vec<Rational>>, cols: usize| {
        if rows.is_empty() {
            RationalMatrix::zeros(0, cols)
        } else {
            RationalMatrix::from_rows(rows).expect("rows have equal length")
        }
    };
    let re_kernel = kernel_basis(&system(re_rows, sym.len()));
    let im_kernel = kernel_basis(&system(im_rows, asym.len()));

    let mut solution_basis = Vec::with_capacity(re_kernel.len() + im_kernel.len());
    for x in re_kernel {
        let mut h = HermitianMatrix {
            re: RationalMatrix::zeros(d, d),
            im: RationalMatrix::zeros(d, d),
        };
        for (c, &(p, q)) in x.into_iter().zip(&sym) {
            h.re[(p, q)] = c.clone();
            h.re[(q, p)] = c;
        }
        solution_basis.push(h);
    }
    for x in im_kernel {
        let mut h = HermitianMatrix {
            re: RationalMatrix::zeros(d, d),
            im: RationalMatrix::zeros(d, d),
        };
        for (c, &(p, q)) in x.into_iter().zip(&asym) {
            h.im[(q, p)] = -c.clone();
            h.im[(p, q)] = c;
        }
        solution_basis.push(h);
    }

    assert!(
        HermitianMatrix::identity(d).preserves_orthogonality(s, party),
        "identity must satisfy the constraints of an orthogonal set"
    );

    let scalar_only = solution_basis.len() == 1;
    Ok(IndistCertificate {
        party,
        local_dim: d,
        solution_basis,
        scalar_only,
        active_pairs,
    })
}

/// Certificates for Alice and Bob. The set is locally indistinguishable at the
/// first round when both are scalar-only.
pub fn certify_both(s: &StateSet) -> Result<(IndistCertificate, IndistCertificate), CertifyError> {
    Ok((certify_party(s, Party::A)?, certify_party(s, Party::B)?))
}

/// A non-scalar solution, shifted to be traceless, or `None` if the
/// certificate is scalar-only.
pub fn witness_matrix(c: &IndistCertificate) -> Option<HermitianMatrix> {
    if c.scalar_only {
        return None;
    }
    let h = c.solution_basis.iter().find(|h| !h.is_scalar())?;
    let d = c.local_dim;
    let shift = h.re.trace() / int(d as i64);
    let re =
        h.re.sub(&RationalMatrix::identity(d).scale(&shift))
            .expect("same shape");
    let w = HermitianMatrix {
        re,
        im: h.im.clone(),
    };
    debug_assert!(!w.is_scalar());
    Some(w)
}
