use std::cmp::Ordering;
use std::fmt;

use super::xsd;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

/// An RDF term: IRI, blank node, or literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
}

/// A literal with its lexical form and datatype. `lang` is set only for
/// language-tagged strings, whose datatype is always `rdf:langString`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub lexical: String,
    pub datatype: String,
    pub lang: Option<String>,
}

/// Numeric value of a literal in the XSD promotion tower
/// integer → decimal → double.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Numeric {
    Integer(i64),
    Decimal(f64),
    Double(f64),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Term {
        Term::Iri(value.into())
    }

    pub fn bnode(label: impl Into<String>) -> Term {
        Term::BlankNode(label.into())
    }

    pub fn string(value: impl Into<String>) -> Term {
        Term::typed(value, xsd::STRING)
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Term {
        Term::Literal(Literal {
            lexical: lexical.into(),
            datatype: datatype.into(),
            lang: None,
        })
    }

    pub fn lang_string(lexical: impl Into<String>, lang: impl Into<String>) -> Term {
        Term::Literal(Literal {
            lexical: lexical.into(),
            datatype: RDF_LANG_STRING.to_string(),
            lang: Some(lang.into()),
        })
    }

    pub fn integer(value: i64) -> Term {
        Term::typed(value.to_string(), xsd::INTEGER)
    }

    pub fn decimal(value: f64) -> Term {
        // Keep the lexical form inside the xsd:decimal lexical space
        // (no exponent); fall back to a plain digits form for round values.
        let lexical = if value == value.trunc() && value.abs() < 1e15 {
            format!("{:.1}", value)
        } else {
            format!("{}", value)
        };
        Term::typed(lexical, xsd::DECIMAL)
    }

    pub fn double(value: f64) -> Term {
        let lexical = if value.is_nan() {
            "NaN".to_string()
        } else if value.is_infinite() {
            if value > 0.0 { "INF".to_string() } else { "-INF".to_string() }
        } else {
            format!("{:e}", value)
        };
        Term::typed(lexical, xsd::DOUBLE)
    }

    pub fn boolean(value: bool) -> Term {
        Term::typed(if value { "true" } else { "false" }, xsd::BOOLEAN)
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn numeric(&self) -> Option<Numeric> {
        self.as_literal().and_then(Literal::numeric)
    }

    /// Total order used by ORDER BY: unbound sorts lowest at the caller,
    /// then blank nodes, IRIs, and literals (numerics by value).
    pub fn order_cmp(&self, other: &Term) -> Ordering {
        fn rank(t: &Term) -> u8 {
            match t {
                Term::BlankNode(_) => 0,
                Term::Iri(_) => 1,
                Term::Literal(_) => 2,
            }
        }
        match (self, other) {
            (Term::BlankNode(a), Term::BlankNode(b)) => a.cmp(b),
            (Term::Iri(a), Term::Iri(b)) => a.cmp(b),
            (Term::Literal(a), Term::Literal(b)) => a.order_cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl Literal {
    pub fn is_string(&self) -> bool {
        self.lang.is_none() && self.datatype == xsd::STRING
    }

    pub fn is_boolean(&self) -> Option<bool> {
        if self.datatype != xsd::BOOLEAN {
            return None;
        }
        match self.lexical.as_str() {
            "true" | "1" => Some(true),
            "false" | "0" => Some(false),
            _ => None,
        }
    }

    pub fn numeric(&self) -> Option<Numeric> {
        if self.lang.is_some() {
            return None;
        }
        match self.datatype.as_str() {
            xsd::INTEGER => self.lexical.trim().parse::<i64>().ok().map(Numeric::Integer),
            xsd::DECIMAL => self.lexical.trim().parse::<f64>().ok().map(Numeric::Decimal),
            xsd::DOUBLE => {
                let value = match self.lexical.trim() {
                    "INF" | "+INF" => f64::INFINITY,
                    "-INF" => f64::NEG_INFINITY,
                    "NaN" => f64::NAN,
                    s => s.parse::<f64>().ok()?,
                };
                Some(Numeric::Double(value))
            }
            _ => None,
        }
    }

    fn order_cmp(&self, other: &Literal) -> Ordering {
        fn class(l: &Literal) -> u8 {
            if l.numeric().is_some() {
                0
            } else if l.is_boolean().is_some() {
                1
            } else if l.is_string() {
                2
            } else if l.lang.is_some() {
                3
            } else {
                4
            }
        }
        let (ca, cb) = (class(self), class(other));
        if ca != cb {
            return ca.cmp(&cb);
        }
        let by_form = || {
            (&self.datatype, &self.lexical, &self.lang).cmp(&(
                &other.datatype,
                &other.lexical,
                &other.lang,
            ))
        };
        match ca {
            0 => {
                let a = self.numeric().unwrap().as_f64();
                let b = other.numeric().unwrap().as_f64();
                a.total_cmp(&b).then_with(by_form)
            }
            1 => self
                .is_boolean()
                .cmp(&other.is_boolean())
                .then_with(by_form),
            2 => self.lexical.cmp(&other.lexical),
            _ => by_form(),
        }
    }
}

// add/sub/mul/div are checked two-argument constructors, not operator
// implementations; None signals a SPARQL evaluation error.
#[allow(clippy::should_implement_trait)]
impl Numeric {
    pub fn as_f64(self) -> f64 {
        match self {
            Numeric::Integer(i) => i as f64,
            Numeric::Decimal(d) | Numeric::Double(d) => d,
        }
    }

    /// Promotes a pair of numerics to their least common type.
    fn promote(a: Numeric, b: Numeric) -> (Numeric, Numeric) {
        use Numeric::*;
        match (a, b) {
            (Double(_), _) | (_, Double(_)) => (Double(a.as_f64()), Double(b.as_f64())),
            (Decimal(_), _) | (_, Decimal(_)) => (Decimal(a.as_f64()), Decimal(b.as_f64())),
            _ => (a, b),
        }
    }

    pub fn compare(a: Numeric, b: Numeric) -> Option<Ordering> {
        match Numeric::promote(a, b) {
            (Numeric::Integer(x), Numeric::Integer(y)) => Some(x.cmp(&y)),
            (x, y) => x.as_f64().partial_cmp(&y.as_f64()),
        }
    }

    pub fn add(a: Numeric, b: Numeric) -> Option<Numeric> {
        match Numeric::promote(a, b) {
            (Numeric::Integer(x), Numeric::Integer(y)) => {
                x.checked_add(y).map(Numeric::Integer)
            }
            (Numeric::Decimal(x), Numeric::Decimal(y)) => Some(Numeric::Decimal(x + y)),
            (x, y) => Some(Numeric::Double(x.as_f64() + y.as_f64())),
        }
    }

    pub fn sub(a: Numeric, b: Numeric) -> Option<Numeric> {
        match Numeric::promote(a, b) {
            (Numeric::Integer(x), Numeric::Integer(y)) => {
                x.checked_sub(y).map(Numeric::Integer)
            }
            (Numeric::Decimal(x), Numeric::Decimal(y)) => Some(Numeric::Decimal(x - y)),
            (x, y) => Some(Numeric::Double(x.as_f64() - y.as_f64())),
        }
    }

    pub fn mul(a: Numeric, b: Numeric) -> Option<Numeric> {
        match Numeric::promote(a, b) {
            (Numeric::Integer(x), Numeric::Integer(y)) => {
                x.checked_mul(y).map(Numeric::Integer)
            }
            (Numeric::Decimal(x), Numeric::Decimal(y)) => Some(Numeric::Decimal(x * y)),
            (x, y) => Some(Numeric::Double(x.as_f64() * y.as_f64())),
        }
    }

    /// Division: integer ÷ integer yields a decimal per the SPARQL operator
    /// table; division by zero is an error except between doubles.
    pub fn div(a: Numeric, b: Numeric) -> Option<Numeric> {
        match Numeric::promote(a, b) {
            (Numeric::Double(x), Numeric::Double(y)) => Some(Numeric::Double(x / y)),
            (x, y) => {
                let divisor = y.as_f64();
                if divisor == 0.0 {
                    None
                } else {
                    Some(Numeric::Decimal(x.as_f64() / divisor))
                }
            }
        }
    }

    pub fn into_term(self) -> Term {
        match self {
            Numeric::Integer(i) => Term::integer(i),
            Numeric::Decimal(d) => Term::decimal(d),
            Numeric::Double(d) => Term::double(d),
        }
    }
}

/// N-Triples-style rendering; doubles as the display form in CLI tables.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{}>", iri),
            Term::BlankNode(label) => write!(f, "_:{}", label),
            Term::Literal(lit) => {
                write!(f, "\"{}\"", escape_literal(&lit.lexical))?;
                if let Some(lang) = &lit.lang {
                    write!(f, "@{}", lang)
                } else if lit.datatype != xsd::STRING {
                    write!(f, "^^<{}>", lit.datatype)
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}
