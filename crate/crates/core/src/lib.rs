//! Convergence theory and numerical experiments for one-level parallel and
//! optimized Schwarz methods on a chain of fixed-size rectangular
//! subdomains.
//!
//! * [`geometry`]: the chain of subdomains and boundary-condition pairs.
//! * [`spectral`]: eigenpairs of the 1D Laplacian in `y` for each pair.
//! * [`bounds`]: closed-form contraction bounds and their orderings.
//! * [`fourier1d`]: exact per-mode iteration matrices and their radii.
//! * [`discretize`]: finite-difference subdomain operators.
//! * [`schwarz`]: the 2D iteration and weak-scalability sweeps.
//! * [`cli`]: command-line front end.

pub mod bounds;
pub mod cli;
pub mod discretize;
pub mod error;
pub mod fourier1d;
pub mod geometry;
pub mod linalg;
pub mod output;
pub mod quadrature;
pub mod schwarz;
pub mod spectral;

pub use bounds::{Convention, ContractionBound, OrderingReport};
pub use discretize::{GridSpec, SubdomainGrid, SubdomainOperator};
pub use error::{Error, Result};
pub use fourier1d::{ModeIteration, TransmissionKind};
pub use geometry::{BcKind, BcPair, DomainChain, PairLabel};
pub use schwarz::{IterationReport, RunConfig};
pub use spectral::EigenMode;
