//! Noncommutative rational expressions and their Fornasini–Marchesini
//! realizations centred at matrix points.
//!
//! The crate covers synthesis of realizations from expressions, evaluation at
//! every matrix level and over matrix-based algebras, Kalman reduction to a
//! minimal realization, the similarity between two minimal realizations,
//! equivalence of expressions, McMillan degree, hermitian and descriptor forms,
//! and a JSON interchange format.

pub mod algebra;
pub mod error;
pub mod expr;
pub mod field;
pub mod functions;
pub mod hermitian;
pub mod io;
pub mod kron;
pub mod linalg;
pub mod linmap;
pub mod matrix;
pub mod parse;
pub mod realization;
pub mod reduction;
pub mod sampling;
pub mod subspace;
pub mod taylor;

pub use error::{NcError, Result};
pub use expr::Expr;
pub use field::{Field, Q};
pub use linmap::BlockLinearMap;
pub use matrix::Matrix;
pub use parse::parse;
pub use realization::{synthesize, FmRealization};
pub use taylor::{taylor_table, TaylorTable};
pub use reduction::{kalman_reduce, similarity_between, KalmanReport, Similarity};
pub use functions::{equivalent, mcmillan_degree, minimal_realization, EquivalenceVerdict, SearchOptions, Verdict};
pub use hermitian::{descriptor_form, structure_matrix, symmetric_form, DescriptorRealization, HermitianStructure};
pub use algebra::{MatrixAlg, UnitalAlgebra, UpperTriangularAlg};
pub use io::{FromJson, ToJson};
