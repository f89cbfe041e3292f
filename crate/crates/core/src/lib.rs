//! Harmonic analysis of the horocyclic Radon transform on homogeneous trees.
//!
//! The tree is modelled as reduced words ([`tree`]), boundary functions as
//! tables over cylinders ([`boundary`]), horocycle functions as tables over
//! cylinders and horocyclic indices ([`horocycle`]). The [`transforms`] module
//! provides the Radon, Abel and Helgason-Fourier transforms, the c-function
//! multiplier and the unitary operator `Q = ΛR`; [`range`] checks the symmetry
//! and range conditions, and [`witness`] builds the reducibility witness.

pub mod boundary;
pub mod error;
pub mod horocycle;
pub mod io;
pub mod isometry;
pub mod quadrature;
pub mod random;
pub mod range;
pub mod scalar;
pub mod suite;
pub mod transforms;
pub mod tree;
pub mod witness;

pub use boundary::{act_boundary, integrate_boundary, CylindricalFunction};
pub use error::{Error, Result};
pub use horocycle::{AbelTable, HoroFunction};
pub use isometry::{Atom, Isometry, RootedPerm};
pub use quadrature::{CFunction, Quadrature};
pub use range::ConditionReport;
pub use scalar::Scalar;
pub use transforms::{FreqFunction, VertexFunction};
pub use tree::{horocyclic_index, Cylinder, Rational, Tree, Vertex};
