//! Bell-inequality certification of the quantum no-cloning theorem.
//!
//! A hypothetical machine that copies the computational basis states
//! (`U_N |0>|0..0> -> |0..0>`, `U_N |1>|0..0> -> |1..1>`) does not clone a
//! general superposition: it entangles the copies instead. This crate makes
//! that failure *observable*. It builds the noisy cloned states, proves the
//! classical bound of a family of Bell inequalities by exhaustive enumeration
//! of deterministic local-hidden-variable strategies, and evaluates the
//! quantum side two independent ways (closed forms and a density-matrix
//! trace oracle). Whenever the input has any signal at all (visibility
//! `V > 0` and a genuine superposition `0 < xi < pi`), the cloned output
//! violates the inequality, certifying that no perfect cloner exists.
//!
//! Layout:
//! - [`qstate`] — cat states, cloned states, colored noise, density matrices.
//! - [`correlators`] — measurement directions and correlation functions
//!   (trace oracle and closed forms).
//! - [`bell`] — inequality coefficient tensors, exact LHV bounds by
//!   enumeration, quantum values.
//! - [`certify`] — the theorem setting families, thresholds, violation
//!   reports, and derivative-free angle optimization.
//! - [`cli`] — the `bellclone` command-line front end.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod bell;
pub mod certify;
pub mod cli;
pub mod correlators;
pub mod error;
pub mod qstate;

pub use error::{Error, Result};
