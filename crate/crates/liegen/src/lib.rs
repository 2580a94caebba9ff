//! Exact Lie-algebra computations for polynomial vector fields on affine
//! n-space.
//!
//! The crate centers on one fact made executable: the Lie algebra of all
//! polynomial vector fields in `n` variables is generated by the two fields
//! returned by [`standard_generators`],
//!
//! ```text
//! U = dn,
//! V = zn^{4n} d(n-1) + (zn z(n-1))^{4n-4} d(n-2) + ... + (zn...z2)^8 d1
//!     + (zn...z1)^4 dn.
//! ```
//!
//! A [`CertStore`] produces, for any target field, a [`Certificate`]: a
//! hash-consed DAG of brackets and rational linear combinations over `U`
//! and `V` whose evaluation equals the target with exact rational
//! arithmetic. Certificates serialize to a stable JSON form and carry size
//! metrics. The [`flow`] module complements the exact side with numeric
//! flow maps (adaptive Runge-Kutta with blow-up detection) and a sound
//! local-nilpotency checker.
//!
//! ```
//! use liegen::{parse_field, CertStore};
//!
//! let target = parse_field("z1*z2 d1 + -3 d2", 2).unwrap();
//! let mut store = CertStore::new(2);
//! let cert = store.field_certificate(&target);
//! assert_eq!(cert.eval(), target);
//! ```
//!
//! Runnable examples live under `examples/`; the `liegen` binary exposes
//! the same functionality as subcommands.

pub mod algebra;
pub mod certificate;
pub mod cli;
pub mod flow;
pub mod generator;
pub mod parse;
pub mod vectorfield;

pub use algebra::{rat, rat_int, Monomial, Polynomial, Rational};
pub use certificate::{CertDag, CertMetrics, CertNode, Certificate, CertificateError, NodeId};
pub use flow::{
    check_locally_nilpotent, integrate, v_flow_closed_form, write_trajectory_csv, FlowError,
    FlowRequest, FlowResult, FlowStatus, NilpotencyVerdict,
};
pub use generator::CertStore;
pub use parse::{format_field, parse_field, ParseError};
pub use vectorfield::{standard_generators, VectorField};
