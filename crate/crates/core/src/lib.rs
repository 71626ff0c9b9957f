//! Exact symbolic computation for the integrable-systems side of GUE map
//! enumeration: arbitrary-precision rationals, log/zeta-extended Laurent
//! series, the Wick-pairing oracle for GUE correlators, the Toda lattice
//! matrix resolvent, the Volterra reduction, the KdV pseudodifferential
//! calculus, Witten intersection numbers, and the combinatorial identities
//! tying them together.
//!
//! The crate is `no_std` + `alloc`; everything is exact (no floating point).
//! Floating-point evaluation of scaling limits lives in the companion CLI
//! crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(any(feature = "std", test))]
extern crate std;

pub mod error;
pub mod rat;
pub mod xlog;
pub mod homog;
pub mod sseries;
pub mod wick;
pub mod store;
pub mod toda;
pub mod gue_resolvent;
pub mod volterra;
pub mod witten;
pub mod kdv;
pub mod identities;
pub mod report;

pub use error::ExactError;
pub use rat::Rat;
