//! Preference-aware SPARQL query processing.
//!
//! The library implements the SPREFQL extension of SPARQL 1.1: a `PREFER`
//! solution modifier that declares a binary preference relation between
//! solutions of the query base. The preferred result set is computed either
//! by winnowing (Nested Loops or Blocked Nested Loops over the full result
//! set) or by rewriting the query into standard SPARQL with `FILTER NOT
//! EXISTS` and delegating to any SPARQL engine.
//!
//! Module map:
//! - [`rdf`]: terms, triples, mappings, the in-memory dataset, Turtle I/O.
//! - [`sparql`]: parser, evaluator and serializer for the SPARQL subset used
//!   as query base, ASK probe and rewriting target.
//! - [`sprefql`]: the `PREFER` grammar layered on top of [`sparql`].
//! - [`pref`]: the preference relation itself (Rename / ConstructMapping /
//!   ConstructQuery, Pareto and prioritized composition).
//! - [`winnow`]: NL and BNL winnow implementations plus an extensional
//!   strict-partial-order checker.
//! - [`rewrite`]: unfolding of preference compositions and the NOT EXISTS
//!   rewriting.
//! - [`backend`]: local (in-memory) and remote (SPARQL protocol) evaluation
//!   targets.
//! - [`synth`]: deterministic synthetic movie data for tests and benchmarks.

pub mod backend;
mod lexer;
pub mod pref;
pub mod rdf;
pub mod rewrite;
pub mod sparql;
pub mod sprefql;
pub mod synth;
pub mod winnow;
