//! Construction of infinite sequences of irreducible polynomials over finite
//! fields by iterating the transform attached to an odd-prime-degree
//! elliptic-curve endomorphism, together with the brute-force machinery
//! (point counting, functional graphs, quadratic-order valuations) that
//! checks the structural guarantees behind the construction at desk scale.

pub mod error;
pub(crate) mod fppoly;

pub mod curve;
pub mod ff;
pub mod graph;
pub mod io;
pub mod poly;
pub mod quadorder;
pub mod ratmap;
pub mod repro;
pub mod sequence;

pub use curve::{Curve, CurveOrderData, CurvePoint, EndoCheckReport};
pub use error::{Error, Result};
pub use ff::{FieldCtx, FieldElem};
pub use graph::{FunctionalGraph, TreeProfile, TreeProfileReport};
pub use io::{CurveDesc, FieldDesc, Fixture, FixtureDesc, MapDesc, QuadIntDesc};
pub use poly::{Factorization, Poly};
pub use quadorder::{QuadInt, QuadOrder, ValLemmaReport};
pub use ratmap::{ProjPoint, RationalMap};
pub use repro::{ReproCheck, ReproReport};
pub use sequence::{
    IterationStep, SelectionStrategy, SequenceParams, SequenceRun, VerifyPolicy,
};
