//! Numerical kernels shared by the solvers: complex determinants and null
//! vectors, bracketed and complex root finding, quadrature with endpoint
//! singularities, and complete elliptic integrals.

mod elliptic;
mod linalg;
mod quadrature;
mod roots;

pub use elliptic::elliptic_k;
pub use linalg::{det_complex, kernel_basis, kernel_basis_abs, null_vector, CMatrix, CVector, NullVector};
pub use quadrature::{gauss_legendre, singular_quadrature, singular_quadrature_offsets, Endpoints, Quadrature};
pub use roots::{bracketed_root, newton_complex, NewtonOptions, RootReport};
