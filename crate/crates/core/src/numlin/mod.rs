//! Dense linear algebra for small matrices.

mod cmat;
mod eigh;
mod hermitian;
mod sym;

pub use cmat::{inner, vec_norm, CMat};
pub use eigh::{eigh, eigvalsh, psd_residual, EigenSystem};
pub use hermitian::HermitianMatrix;
pub use sym::{det_dense, sym_det_adj_inv, AntisymMatrix, DetAdjInv, RMat, SymMatrix};
