//! Complex dense kernels: core transformations, Hessenberg storage, RQ
//! factorization, properness tests and reference eigensolvers.

pub mod core;
pub mod hessenberg;
pub mod mat;
pub mod reference;
pub mod rq;
pub mod tol;
pub mod transform;

pub use self::core::{
    apply_core_left, apply_core_right, assemble, make_core, make_core_top, CoreTransformation,
};
pub use hessenberg::{HessenbergPencil, Pole, UpperHessenberg};
pub use mat::Mat;
pub use reference::{norm2, reference_eigen, reference_eigen_pencil};
pub use rq::{is_proper, is_proper_pencil, rq_factorize_shifted, RqFactors};
pub use tol::{ToleranceConfig, EPS};
