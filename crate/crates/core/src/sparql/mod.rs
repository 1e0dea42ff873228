//! SPARQL 1.1 subset: abstract syntax, parser, serializer and a local
//! evaluator over in-memory datasets.
//!
//! The subset covers what preference evaluation needs: SELECT and ASK,
//! basic graph patterns, FILTER with EXISTS/NOT EXISTS, VALUES, DISTINCT,
//! ORDER BY, LIMIT and OFFSET. GROUP BY and HAVING parse and serialize but
//! are rejected by the local evaluator. Everything else is reported as an
//! unsupported feature by name.

mod ast;
mod eval;
mod expr;
pub(crate) mod parser;
pub(crate) mod serialize;

pub use ast::{
    ArithOp, CompareOp, Element, Expression, Function, GroupPattern, OrderKey, Projection,
    Query, QueryForm, ValuesBlock,
};
pub use eval::{eval_ask, eval_select, evaluate, EvalError};
pub use expr::{effective_boolean_value, eval_ebv, eval_expression, ExprError};
pub use parser::{parse_query, ParseError};
pub use serialize::query_to_string;
