use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use super::{Mapping, SolutionSeq, Term, TermPattern, Triple, TriplePattern, Variable};

/// An immutable-after-load in-memory triple store with set semantics.
///
/// Triples are kept in insertion order (which makes BGP evaluation
/// deterministic and BNL traces reproducible) alongside per-position hash
/// indexes used to narrow pattern matching.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    triples: Vec<Triple>,
    seen: HashSet<Triple>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
    prefixes: IndexMap<String, String>,
}

impl Dataset {
    pub fn new() -> Dataset {
        Dataset::default()
    }

    /// Inserts a triple, returning false if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if !self.seen.insert(triple.clone()) {
            return false;
        }
        let idx = self.triples.len();
        self.by_subject.entry(triple.subject.clone()).or_default().push(idx);
        self.by_predicate.entry(triple.predicate.clone()).or_default().push(idx);
        self.by_object.entry(triple.object.clone()).or_default().push(idx);
        self.triples.push(triple);
        true
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.seen.contains(triple)
    }

    /// Prefixes declared by the Turtle source this dataset was loaded from;
    /// redefinition is last-wins.
    pub fn prefixes(&self) -> &IndexMap<String, String> {
        &self.prefixes
    }

    pub(crate) fn set_prefix(&mut self, prefix: String, iri: String) {
        self.prefixes.insert(prefix, iri);
    }

    /// All mappings matching the pattern; dom = the pattern's variables.
    /// A variable repeated within the pattern unifies (both occurrences must
    /// match the same term).
    pub fn match_pattern(&self, pattern: &TriplePattern) -> SolutionSeq {
        let mut vars: Vec<Variable> = Vec::new();
        for var in pattern.variables() {
            if !vars.contains(var) {
                vars.push(var.clone());
            }
        }
        let rows = self
            .candidates(pattern)
            .filter_map(|triple| unify(pattern, triple))
            .collect();
        SolutionSeq::new(vars, rows)
    }

    /// Index-narrowed candidate triples, in insertion order.
    fn candidates<'a>(
        &'a self,
        pattern: &TriplePattern,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        let lookups = [
            (&pattern.subject, &self.by_subject),
            (&pattern.predicate, &self.by_predicate),
            (&pattern.object, &self.by_object),
        ];
        let mut best: Option<&Vec<usize>> = None;
        for (position, index) in lookups {
            if let TermPattern::Term(term) = position {
                match index.get(term) {
                    None => return Box::new(std::iter::empty()),
                    Some(ids) => {
                        if best.is_none_or(|b| ids.len() < b.len()) {
                            best = Some(ids);
                        }
                    }
                }
            }
        }
        match best {
            Some(ids) => Box::new(ids.iter().map(|&i| &self.triples[i])),
            None => Box::new(self.triples.iter()),
        }
    }

    /// Canonical N-Triples dump: one line per triple, sorted bytewise.
    pub fn to_ntriples(&self) -> String {
        let mut lines: Vec<String> = self.triples.iter().map(Triple::to_string).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

fn unify(pattern: &TriplePattern, triple: &Triple) -> Option<Mapping> {
    let mut m = Mapping::new();
    let positions = [
        (&pattern.subject, &triple.subject),
        (&pattern.predicate, &triple.predicate),
        (&pattern.object, &triple.object),
    ];
    for (position, term) in positions {
        match position {
            TermPattern::Term(expected) => {
                if expected != term {
                    return None;
                }
            }
            TermPattern::Var(var) => match m.get(var) {
                Some(bound) if bound != term => return None,
                Some(_) => {}
                None => m.bind(var.clone(), term.clone()),
            },
        }
    }
    Some(m)
}
