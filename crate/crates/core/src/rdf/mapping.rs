use std::fmt;
use std::hash::{Hash, Hasher};

use indexmap::IndexMap;

use super::Term;

/// A SPARQL variable; the name is stored without the `?`/`$` sigil.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Variable {
        let name = name.into();
        debug_assert!(!name.is_empty(), "empty variable name");
        Variable(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl From<&str> for Variable {
    fn from(name: &str) -> Variable {
        Variable::new(name)
    }
}

/// A solution row μ: a finite partial function from variables to terms.
///
/// Insertion order is preserved because it drives serialization (the VALUES
/// clause of constructed ASK probes lists variables in L then L′ order), but
/// equality and hashing are extensional: two mappings are equal iff they bind
/// the same variables to the same terms.
#[derive(Clone, Debug, Default, Eq)]
pub struct Mapping {
    bindings: IndexMap<Variable, Term>,
}

impl Mapping {
    pub fn new() -> Mapping {
        Mapping::default()
    }

    pub fn bind(&mut self, var: Variable, term: Term) {
        self.bindings.insert(var, term);
    }

    pub fn with(mut self, var: impl Into<Variable>, term: Term) -> Mapping {
        self.bind(var.into(), term);
        self
    }

    /// Lookup; `None` is the distinguishable "unbound" outcome.
    pub fn get(&self, var: &Variable) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn contains(&self, var: &Variable) -> bool {
        self.bindings.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Bound variables in insertion order.
    pub fn vars(&self) -> impl Iterator<Item = &Variable> {
        self.bindings.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.bindings.iter()
    }

    /// Union of two compatible mappings, `None` on conflict. Bindings of
    /// `self` come first in the result's insertion order.
    pub fn merge(&self, other: &Mapping) -> Option<Mapping> {
        let mut merged = self.clone();
        for (var, term) in other.iter() {
            match merged.get(var) {
                Some(existing) if existing != term => return None,
                Some(_) => {}
                None => merged.bind(var.clone(), term.clone()),
            }
        }
        Some(merged)
    }

    /// Restriction of the mapping to the given variables (projection);
    /// unbound variables are simply absent from the result.
    pub fn project(&self, vars: &[Variable]) -> Mapping {
        let mut out = Mapping::new();
        for var in vars {
            if let Some(term) = self.get(var) {
                out.bind(var.clone(), term.clone());
            }
        }
        out
    }
}

impl PartialEq for Mapping {
    fn eq(&self, other: &Mapping) -> bool {
        // IndexMap equality is order-independent, which is exactly the
        // extensional equality mappings need.
        self.bindings == other.bindings
    }
}

impl Hash for Mapping {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let mut entries: Vec<_> = self.bindings.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        for (var, term) in entries {
            var.hash(state);
            term.hash(state);
        }
    }
}

impl FromIterator<(Variable, Term)> for Mapping {
    fn from_iter<I: IntoIterator<Item = (Variable, Term)>>(iter: I) -> Mapping {
        Mapping { bindings: iter.into_iter().collect() }
    }
}

/// True iff the mappings agree on every shared variable.
pub fn mapping_compatible(a: &Mapping, b: &Mapping) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .all(|(var, term)| large.get(var).is_none_or(|other| other == term))
}

/// An ordered multiset of solutions sharing one projection domain. Order is
/// significant only for reproducing BNL input sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSeq {
    pub vars: Vec<Variable>,
    pub rows: Vec<Mapping>,
}

impl SolutionSeq {
    pub fn new(vars: Vec<Variable>, rows: Vec<Mapping>) -> SolutionSeq {
        debug_assert!(rows.iter().all(|row| row.vars().all(|v| vars.contains(v))));
        SolutionSeq { vars, rows }
    }

    pub fn empty(vars: Vec<Variable>) -> SolutionSeq {
        SolutionSeq { vars, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
