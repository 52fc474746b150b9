//! Vertex couplings for Airy and Schrödinger operators on looping-edge,
//! tadpole and T-shaped metric graphs.
//!
//! Boundary conditions are finite linear constraints on trace vectors.
//! Classification reduces to indefinite-form matrix tests; the evolution
//! module integrates the constrained dynamics and tracks the L² norm.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod airy;
pub mod boundary;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod krein;
pub mod linalg;
pub mod report;
pub mod schrodinger;

pub use error::Error;
pub use graph::{GridFunction, MetricGraph, OperatorOrder, Topology, TraceVector};
pub use krein::{FramedOperator, IndefiniteForm};
pub use report::{ClassificationReport, DeficiencyReport, Verdict};

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;
pub type RMat = nalgebra::DMatrix<f64>;

pub type Result<T> = core::result::Result<T, Error>;
