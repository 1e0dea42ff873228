//! Expression evaluation with SPARQL error semantics: an expression either
//! yields an RDF term or a type error, and filters drop rows that error.

use std::cmp::Ordering;

use crate::rdf::{xsd, Dataset, Mapping, Numeric, Term, RDF_LANG_STRING};

use super::ast::{ArithOp, CompareOp, Expression, Function};
use super::eval::eval_group;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("expression error: {0}")]
pub struct ExprError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError(msg.into()))
}

/// Evaluates an expression under a mapping. EXISTS subpatterns are matched
/// against `dataset` after substituting the mapping into them.
pub fn eval_expression(
    expr: &Expression,
    binding: &Mapping,
    dataset: &Dataset,
) -> Result<Term, ExprError> {
    match expr {
        Expression::Or(a, b) => {
            // three-valued logic: an error on one side is masked by a true
            // on the other
            let left = eval_ebv(a, binding, dataset);
            if left == Ok(true) {
                return Ok(Term::boolean(true));
            }
            let right = eval_ebv(b, binding, dataset);
            match (left, right) {
                (_, Ok(true)) => Ok(Term::boolean(true)),
                (Ok(false), Ok(false)) => Ok(Term::boolean(false)),
                (Err(e), _) | (_, Err(e)) => Err(e),
                _ => unreachable!(),
            }
        }
        Expression::And(a, b) => {
            let left = eval_ebv(a, binding, dataset);
            if left == Ok(false) {
                return Ok(Term::boolean(false));
            }
            let right = eval_ebv(b, binding, dataset);
            match (left, right) {
                (_, Ok(false)) => Ok(Term::boolean(false)),
                (Ok(true), Ok(true)) => Ok(Term::boolean(true)),
                (Err(e), _) | (_, Err(e)) => Err(e),
                _ => unreachable!(),
            }
        }
        Expression::Not(e) => Ok(Term::boolean(!eval_ebv(e, binding, dataset)?)),
        Expression::Compare(op, a, b) => {
            let left = eval_expression(a, binding, dataset)?;
            let right = eval_expression(b, binding, dataset)?;
            Ok(Term::boolean(compare(*op, &left, &right)?))
        }
        Expression::Arith(op, a, b) => {
            let left = numeric_operand(a, binding, dataset)?;
            let right = numeric_operand(b, binding, dataset)?;
            let value = match op {
                ArithOp::Add => Numeric::add(left, right),
                ArithOp::Sub => Numeric::sub(left, right),
                ArithOp::Mul => Numeric::mul(left, right),
                ArithOp::Div => Numeric::div(left, right),
            };
            match value {
                Some(n) => Ok(n.into_term()),
                None => err("arithmetic failed (division by zero or overflow)"),
            }
        }
        Expression::Neg(e) => {
            let value = match numeric_operand(e, binding, dataset)? {
                Numeric::Integer(i) => i.checked_neg().map(Numeric::Integer),
                Numeric::Decimal(d) => Some(Numeric::Decimal(-d)),
                Numeric::Double(d) => Some(Numeric::Double(-d)),
            };
            match value {
                Some(n) => Ok(n.into_term()),
                None => err("negation overflow"),
            }
        }
        Expression::Exists(g) => {
            let rows = eval_group(&g.substitute(binding), dataset);
            Ok(Term::boolean(!rows.is_empty()))
        }
        Expression::NotExists(g) => {
            let rows = eval_group(&g.substitute(binding), dataset);
            Ok(Term::boolean(rows.is_empty()))
        }
        Expression::Call(f, args) => eval_call(*f, args, binding, dataset),
        Expression::Var(v) => match binding.get(v) {
            Some(t) => Ok(t.clone()),
            None => err(format!("unbound variable ?{}", v.name())),
        },
        Expression::Const(t) => Ok(t.clone()),
    }
}

/// Evaluates an expression and reduces it to its effective boolean value.
pub fn eval_ebv(
    expr: &Expression,
    binding: &Mapping,
    dataset: &Dataset,
) -> Result<bool, ExprError> {
    effective_boolean_value(&eval_expression(expr, binding, dataset)?)
}

/// SPARQL effective boolean value. Malformed boolean and numeric literals
/// coerce to false rather than erroring.
pub fn effective_boolean_value(term: &Term) -> Result<bool, ExprError> {
    let lit = match term {
        Term::Literal(lit) => lit,
        _ => return err("effective boolean value of a non-literal"),
    };
    if lit.datatype == xsd::BOOLEAN {
        return Ok(lit.is_boolean().unwrap_or(false));
    }
    if lit.is_string() || lit.lang.is_some() {
        return Ok(!lit.lexical.is_empty());
    }
    match lit.datatype.as_str() {
        xsd::INTEGER | xsd::DECIMAL | xsd::DOUBLE => Ok(match lit.numeric() {
            Some(n) => {
                let v = n.as_f64();
                v != 0.0 && !v.is_nan()
            }
            None => false,
        }),
        _ => err(format!("no effective boolean value for datatype <{}>", lit.datatype)),
    }
}

fn numeric_operand(
    expr: &Expression,
    binding: &Mapping,
    dataset: &Dataset,
) -> Result<Numeric, ExprError> {
    let term = eval_expression(expr, binding, dataset)?;
    match term.numeric() {
        Some(n) => Ok(n),
        None => err(format!("expected a numeric operand, got {}", term)),
    }
}

fn compare(op: CompareOp, left: &Term, right: &Term) -> Result<bool, ExprError> {
    match op {
        CompareOp::Eq => equal_terms(left, right),
        CompareOp::Ne => equal_terms(left, right).map(|b| !b),
        _ => {
            let ord = order_between(left, right)?;
            Ok(match op {
                CompareOp::Lt => ord == Ordering::Less,
                CompareOp::Le => ord != Ordering::Greater,
                CompareOp::Gt => ord == Ordering::Greater,
                CompareOp::Ge => ord != Ordering::Less,
                CompareOp::Eq | CompareOp::Ne => unreachable!(),
            })
        }
    }
}

/// RDFterm-equal: values are compared where a value space is known; terms
/// of different kinds are unequal; literals of unrelated datatypes are a
/// type error unless they are the identical term.
fn equal_terms(left: &Term, right: &Term) -> Result<bool, ExprError> {
    // numeric comparison first: it is value-based and, unlike term
    // identity, makes NaN unequal to itself
    if let (Term::Literal(a), Term::Literal(b)) = (left, right) {
        if let (Some(x), Some(y)) = (a.numeric(), b.numeric()) {
            if x.as_f64().is_nan() || y.as_f64().is_nan() {
                return Ok(false);
            }
            return Ok(Numeric::compare(x, y) == Some(Ordering::Equal));
        }
    }
    if left == right {
        return Ok(true);
    }
    let (a, b) = match (left, right) {
        (Term::Literal(a), Term::Literal(b)) => (a, b),
        _ => return Ok(false),
    };
    if let (Some(x), Some(y)) = (a.is_boolean(), b.is_boolean()) {
        return Ok(x == y);
    }
    if a.is_string() && b.is_string() {
        return Ok(a.lexical == b.lexical);
    }
    if let (Some(la), Some(lb)) = (&a.lang, &b.lang) {
        return Ok(la.eq_ignore_ascii_case(lb) && a.lexical == b.lexical);
    }
    // identical datatype with identical lexical form was the fast path
    // above; anything else cannot be decided without the value space
    err(format!(
        "cannot compare literals of datatypes <{}> and <{}>",
        a.datatype, b.datatype
    ))
}

fn order_between(left: &Term, right: &Term) -> Result<Ordering, ExprError> {
    let (a, b) = match (left, right) {
        (Term::Literal(a), Term::Literal(b)) => (a, b),
        _ => return err("ordering comparison on non-literals"),
    };
    if let (Some(x), Some(y)) = (a.numeric(), b.numeric()) {
        return match Numeric::compare(x, y) {
            Some(ord) => Ok(ord),
            None => err("ordering comparison with NaN"),
        };
    }
    if a.is_string() && b.is_string() {
        return Ok(a.lexical.cmp(&b.lexical));
    }
    if let (Some(x), Some(y)) = (a.is_boolean(), b.is_boolean()) {
        return Ok(x.cmp(&y));
    }
    err(format!(
        "no ordering between datatypes <{}> and <{}>",
        a.datatype, b.datatype
    ))
}

fn eval_call(
    f: Function,
    args: &[Expression],
    binding: &Mapping,
    dataset: &Dataset,
) -> Result<Term, ExprError> {
    match f {
        Function::Bound => match args {
            [Expression::Var(v)] => Ok(Term::boolean(binding.contains(v))),
            [Expression::Const(Term::Literal(lit))] if lit.datatype == xsd::BOOLEAN => {
                // produced by EXISTS substitution of a bound variable
                Ok(Term::Literal(lit.clone()))
            }
            _ => err("bound() takes a single variable"),
        },
        Function::Str => match eval_expression(&args[0], binding, dataset)? {
            Term::Iri(iri) => Ok(Term::string(iri)),
            Term::Literal(lit) => Ok(Term::string(lit.lexical)),
            Term::BlankNode(_) => err("str() is undefined for blank nodes"),
        },
        Function::Datatype => match eval_expression(&args[0], binding, dataset)? {
            Term::Literal(lit) => {
                if lit.lang.is_some() {
                    Ok(Term::iri(RDF_LANG_STRING))
                } else {
                    Ok(Term::iri(lit.datatype))
                }
            }
            other => err(format!("datatype() needs a literal, got {}", other)),
        },
        Function::Regex => {
            let text = string_value(&eval_expression(&args[0], binding, dataset)?)?;
            let pattern = string_value(&eval_expression(&args[1], binding, dataset)?)?;
            let flags = match args.get(2) {
                Some(e) => string_value(&eval_expression(e, binding, dataset)?)?,
                None => String::new(),
            };
            // only the `i` flag changes matching; the rest are accepted
            // and ignored
            let re = regex::RegexBuilder::new(&pattern)
                .case_insensitive(flags.contains('i'))
                .build()
                .map_err(|e| ExprError(format!("invalid regex: {}", e)))?;
            Ok(Term::boolean(re.is_match(&text)))
        }
    }
}

fn string_value(term: &Term) -> Result<String, ExprError> {
    match term {
        Term::Literal(lit) if lit.is_string() || lit.lang.is_some() => Ok(lit.lexical.clone()),
        other => err(format!("expected a string literal, got {}", other)),
    }
}
