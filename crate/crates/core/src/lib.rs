//! Exact-arithmetic toolkit for checking polynomial descriptions of the
//! orbit closures of low-dimensional Lie algebra structure tensors.
//!
//! A Lie bracket on an n-dimensional space is recorded as its structure
//! vector in F^(n^3); the general linear group acts on these vectors by
//! change of basis.  For n = 3 this crate ships a catalogue of distinguished
//! vectors, parametric families, polynomial systems and witness matrices
//! ([`atlas`]), and a verifier ([`verify`]) that certifies the classical
//! closure descriptions both symbolically (coefficient-level polynomial
//! identities over Q) and exhaustively (point enumeration over small prime
//! fields).  All arithmetic is exact: prime fields F_p or arbitrary-precision
//! rationals, never floats.

pub mod atlas;
pub mod field;
pub mod poly;
pub mod structure;
pub mod verify;

pub use atlas::{Atlas, BaseVector, FamilyName, Mutation, ParamFamily, SystemName, TableRow};
pub use field::{FieldDescriptor, FieldError, Scalar};
pub use poly::{Assignment, MultiPoly, PolyError, VarTable};
pub use structure::{
    act, coordinate_table, gl_enumerate, gl_generators, index_of, is_lie, jacobi_generators,
    orbit, triple_of, PolySystem, ReducedVector3, SquareMatrix, StructureError, StructureVector,
};
pub use verify::report::{ClaimRecord, Status, VerificationReport};
pub use verify::{run_all, run_suite, SuiteConfig, VerifyError};

