//! RDF data model: terms, triples, solution mappings and an in-memory
//! triple store with Turtle input and N-Triples output.

mod dataset;
mod mapping;
mod term;
mod triple;
mod turtle;

pub use dataset::Dataset;
pub use mapping::{mapping_compatible, Mapping, SolutionSeq, Variable};
pub(crate) use term::escape_literal;
pub use term::{Literal, Numeric, Term, RDF_LANG_STRING, RDF_TYPE};
pub use triple::{TermPattern, Triple, TriplePattern};
pub(crate) use turtle::DEFAULT_PREFIX;
pub use turtle::{load_turtle, TurtleError};

pub mod xsd {
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
}
