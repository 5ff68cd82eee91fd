//! Composite-index evaluation engine.
//!
//! Turns an objects × indicators data matrix into objectively weighted,
//! graded and ranked scores:
//!
//! * [`preprocess`]: direction-aware min-max scaling, z-scores, 0/1 quantization
//! * [`entropy`]: corrected-proportion entropy weights
//! * [`components`]: correlation PCA, retention, loadings, varimax, composite scores
//! * [`scoring`]: weighted totals, 0–100 scaling, grade bands, dense ranks
//!
//! Everything here is pure computation over owned values. The crate is
//! `no_std` and only needs `alloc`; file formats and the command line live in
//! the `cindex` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod components;
pub mod entropy;
mod error;
pub mod numkit;
pub mod preprocess;
pub mod scoring;

pub use error::{Error, Result};
pub use numkit::{jacobi_eigh, matmul, EigenDecomposition, Matrix};
