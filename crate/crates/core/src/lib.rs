//! Spectra of Schrödinger operators on compact metric graphs with general
//! self-adjoint vertex couplings, and numerical verification of the regularized
//! trace formula that pairs eigenvalues with the zeros of `prod_i sin(k l_i)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds the problem data (edges, potentials, couplings) and the
//!   Hermitian coupling matrix `H` with its named block entries;
//! * [`basis`] evaluates the fundamental solutions on one edge;
//! * [`secular`] builds `phi(k) = det(H M1 + M2)` and its asymptotic expansions;
//! * [`contour`] provides adaptive contour quadrature and the residue table;
//! * [`spectrum`] counts and locates eigenvalues and partitions them per edge;
//! * [`trace`] evaluates both sides of the trace formula and the eigenvalue
//!   asymptotics.

pub mod basis;
pub mod contour;
pub mod error;
pub mod graph;
pub mod io;
pub mod ode;
pub mod secular;
pub mod spectrum;
pub mod trace;

pub use error::{Error, Result};
pub use graph::{
    CMatrix, CouplingSpec, Edge, HermitianCoupling, MetricGraph, Potential, VertexCoupling,
};
