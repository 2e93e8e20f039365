//! A symbolic calculator for bigraded multiplicative spectral sequences over
//! the prime field F_p, at an odd prime.
//!
//! The library provides, bottom up:
//!
//! * [`fp`] — exact linear algebra over F_p (row reduction, kernels,
//!   subquotients with representative sections);
//! * [`algebra`] — graded-commutative algebra presentations built from
//!   exterior, polynomial, truncated and divided-power generators, plus
//!   structure-constant tables for non-free answers, monomial bases and
//!   Poincaré series;
//! * [`hochschild`] — Hochschild homology of free graded algebras by closed
//!   form, cross-checked by a degreewise normalized bar-complex oracle;
//! * [`steenrod`] — the dual Steenrod algebra at odd p as a Hopf algebra,
//!   comodule algebras with generator-level coactions, and degreewise
//!   computation of comodule primitives;
//! * [`sseq`] — the spectral-sequence engine: pages, generator-level
//!   differential rule families extended by the Leibniz rule, page turning by
//!   homology, bidegree obstruction reports, and hidden multiplicative
//!   extensions;
//! * [`scenarios`] — the full computation pipeline at a chosen odd prime and
//!   degree cutoff, with verdicts comparing every stage against its target;
//! * [`chart`] / [`report`] — chart models with ASCII and SVG renderers, and
//!   machine-readable JSON/CSV reports.
//!
//! The `thhmay` binary drives the scenarios from the command line; the
//! `examples/` directory has one runnable example per capability.

pub mod algebra;
pub mod chart;
pub mod fp;
pub mod hochschild;
pub mod report;
pub mod scenarios;
pub mod sseq;
pub mod steenrod;

pub use algebra::{
    binom_mod_p, gamma_repack, gamma_unpack, repacked_presentation, AlgebraError, Element,
    GeneratorKind, GeneratorSpec, Monomial, PoincareSeries, Presentation, StructureTable,
};
pub use fp::{subquotient_basis, FpError, FpMatrix, Prime, Subquotient};
