//! Orthogonal product state families that are locally indistinguishable,
//! exact certificates of that fact, and LOCC protocols that distinguish them
//! once a single two-qubit maximally entangled state is shared.
//!
//! Everything is computed over the rationals. Kets carry integer amplitudes
//! and are never normalized.

pub mod certify;
pub mod diagram;
pub mod families;
pub mod linalg;
pub mod protocol;
pub mod states;

pub use certify::{
    certify_both, certify_party, witness_matrix, CertificateJson, CertifyError, HermitianMatrix,
    IndistCertificate,
};
pub use diagram::{layout, render, Diagram, Format, Tile};
pub use families::{
    auto_family, build, build_thm1, build_thm2, build_thm3, expected_count, Family, FamilyParams,
    ParamError,
};
pub use linalg::{dot, kernel_basis, rank, LinalgError, Rational, RationalMatrix, RationalVector};
pub use protocol::{
    build_thm4_tree, build_thm5_tree, build_thm6_tree, refine_leaf, run, run_with_resource,
    BuildError, DiscriminationReport, JointState, Leaf, MeasurementNode, ProtocolTree, Resource,
    RunError, TreeError,
};
pub use states::{
    inner_product, verify_orthogonality, Ket, OrthogonalityReport, Party, ProductState, StateError,
    StateSet,
};
