//! Numerical toolkit for finite-dimensional convex state spaces (ordered
//! vector spaces with a distinguished cone and order unit).
//!
//! The crate provides:
//!
//! - a model catalog (classical simplex, quantum, Lorentz ball, square bit,
//!   triangular bipyramid, strictly convex "egg") with closed-form
//!   primitives: pure-state samplers, spectral decomposers, filters and
//!   reversible dynamics ([`system`], [`catalog`]);
//! - a small exact engine for polytopal state spaces: facet/vertex
//!   enumeration, face lattices and internal dual cones ([`polyhedral`]);
//! - spectra, spectral entropy and Schur-concave functionals, together with
//!   a uniqueness checker for decomposition probabilities ([`spectral`]);
//! - majorization relations, doubly-substochastic matrix tests, transition
//!   matrices and measurement-entropy estimation ([`majorization`]);
//! - filters/compressions, hat/tilde maps, transition-probability symmetry
//!   and orthomodularity checks ([`projective`]);
//! - the self-dualizing inner-product construction and per-face self-duality
//!   reports ([`perfection`]);
//! - spectral expansion of dual-space elements with step-function spectral
//!   families and Riemann-sum stabilization ([`observables`]);
//! - a work-ledger simulation of the entropy-to-work protocol on a
//!   classical/internal composite ([`thermo`]).
//!
//! All randomized routines take explicit seeds and are deterministic; the
//! `parallel` feature (on by default) runs the embarrassingly parallel
//! sample sweeps on a rayon pool without changing any result.

pub mod catalog;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod majorization;
pub mod observables;
pub mod par;
pub mod perfection;
pub mod polyhedral;
pub mod projective;
pub mod rng;
pub mod serialize;
pub mod spectral;
pub mod system;
pub mod thermo;
pub mod tol;

pub use error::{GptError, Result};
pub use system::{EffectVec, LinearMapA, Measurement, ModelKind, StateVec, System};
pub use tol::Tolerances;
