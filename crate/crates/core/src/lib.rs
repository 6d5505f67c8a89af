//! Exact-arithmetic toolkit for toric varieties with arithmetic structure:
//! Weyl-chamber fans of type A, divisor-class cohomology, exceptional
//! collections, Galois descent, and Tate-Shafarevich-type computations for
//! norm-one tori of biquadratic fields.

pub mod arith;
pub mod descent;
pub mod divclass;
pub mod excol;
pub mod fan;
pub mod formats;
pub mod gmodule;
pub mod zlattice;
