//! A workbench for finite residuated algebra and modal Kripke forcing.
//!
//! The crate builds small finite structures and machine-checks the laws that
//! tie them together:
//!
//! * [`algebra`] — commutative integral quantales (complete residuated
//!   lattices) with precomputed operation tables and an exhaustive law
//!   verifier.
//! * [`nuclei`] — closure operators and quantic nuclei, filters, and the
//!   quotient algebra `Q/F` including the Heyting collapse.
//! * [`frames`] — order-dual frames (complete SO-commutative monoids),
//!   conuclei, and the lattice `P*` of strongly hereditary sets.
//! * [`logic`] — the modal residuated formula language: AST, parser,
//!   desugaring, and a bounded sentence enumerator.
//! * [`forcing`] — Kripke models over a frame with a conucleus, with two
//!   independent evaluators (pointwise clauses vs. `P*` algebra) and their
//!   cross-check.
//! * [`hierarchy`] — the cumulative set-theoretic hierarchy over a frame,
//!   its companion Heyting-valued model over `H = P*/F`, the level-wise
//!   bijection between them, and the translation / diamond-validity
//!   verifiers.
//!
//! Everything is immutable after construction and safe to share across
//! threads; all checks are deterministic given an explicit seed.

pub mod algebra;
pub mod forcing;
pub mod frames;
pub mod hierarchy;
pub mod logic;
pub mod nuclei;
pub mod report;
