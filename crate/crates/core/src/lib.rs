//! Stable cohomology of moduli of hyperelliptic curves on Hirzebruch
//! surfaces, assembled exactly from `S_n`-characters of `M_{0,n}`, together
//! with the spectral-sequence bookkeeping behind it and finite-field checks.

pub mod ffcount;
pub mod fp;
pub mod linalg;
pub mod m0n;
pub mod qpoly;
pub mod series;
pub mod spectral;
pub mod stable;
pub mod symfunc;

pub use m0n::{equivariant_poincare_m0n, EquivariantPoincare};
pub use qpoly::QPolynomial;
pub use symfunc::{CharacterVector, CycleType, Partition};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
