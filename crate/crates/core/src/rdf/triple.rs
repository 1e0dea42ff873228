use std::fmt;

use super::{Mapping, Term, Variable};

/// An asserted triple. Subjects are IRIs or blank nodes and predicates are
/// IRIs; the constructor enforces this.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Triple {
        debug_assert!(!matches!(subject, Term::Literal(_)), "literal subject");
        debug_assert!(matches!(predicate, Term::Iri(_)), "non-IRI predicate");
        Triple { subject, predicate, object }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A position in a triple pattern: a variable or a ground term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermPattern {
    Var(Variable),
    Term(Term),
}

impl TermPattern {
    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            TermPattern::Var(v) => Some(v),
            TermPattern::Term(_) => None,
        }
    }

    /// Resolves the pattern under a mapping: bound variables become terms.
    pub fn bind(&self, m: &Mapping) -> TermPattern {
        match self {
            TermPattern::Var(v) => match m.get(v) {
                Some(t) => TermPattern::Term(t.clone()),
                None => self.clone(),
            },
            TermPattern::Term(_) => self.clone(),
        }
    }
}

impl From<Term> for TermPattern {
    fn from(t: Term) -> TermPattern {
        TermPattern::Term(t)
    }
}

impl From<Variable> for TermPattern {
    fn from(v: Variable) -> TermPattern {
        TermPattern::Var(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<TermPattern>,
        predicate: impl Into<TermPattern>,
        object: impl Into<TermPattern>,
    ) -> TriplePattern {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn positions(&self) -> [&TermPattern; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    /// Variables in subject/predicate/object order, duplicates kept.
    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.positions().into_iter().filter_map(TermPattern::as_var)
    }

    pub fn bind(&self, m: &Mapping) -> TriplePattern {
        TriplePattern {
            subject: self.subject.bind(m),
            predicate: self.predicate.bind(m),
            object: self.object.bind(m),
        }
    }
}
