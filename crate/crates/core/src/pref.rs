//! The preference relation between solution rows.
//!
//! Whether one row is preferred to another is decided by a SPARQL ASK
//! query: rename the first row onto the left variable list and the second
//! onto the right, feed the union of both into a VALUES block and test the
//! constraint with FILTER. Constraints without EXISTS do not depend on the
//! queried dataset, so they are evaluated directly against the combined
//! row without a round trip.
//!
//! Pareto and prioritized compositions are evaluated recursively: a swap
//! of the two rows plays the role of reading the constraint with the
//! variable lists exchanged.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::backend::{Backend, BackendError};
use crate::rdf::{Dataset, Mapping, Term, Variable};
use crate::sparql::{
    eval_ebv, Element, Expression, GroupPattern, Projection, Query, QueryForm, ValuesBlock,
};
use crate::sprefql::{IllFormedPrefer, PrefQuery, PreferClause, PreferenceExpr};

/// Positional rename: the binding of `from[i]` moves to `to[i]`; unbound
/// positions are skipped.
pub fn rename(row: &Mapping, from: &[Variable], to: &[Variable]) -> Mapping {
    let mut out = Mapping::new();
    for (f, t) in from.iter().zip(to) {
        if let Some(term) = row.get(f) {
            out.bind(t.clone(), term.clone());
        }
    }
    out
}

/// The combined row a constraint is evaluated on: `left_row` renamed onto
/// the left list, then `right_row` renamed onto the right list. The lists
/// are disjoint for a well-formed clause, so the union is a mapping.
pub fn construct_mapping(
    left_row: &Mapping,
    right_row: &Mapping,
    base: &[Variable],
    left: &[Variable],
    right: &[Variable],
) -> Mapping {
    let mut out = rename(left_row, base, left);
    for (v, t) in rename(right_row, base, right).iter() {
        out.bind(v.clone(), t.clone());
    }
    out
}

/// The ASK probe for one constraint and one combined row:
/// `ASK { FILTER constraint VALUES (dom row) { (row values) } }`.
pub fn construct_query(constraint: &Expression, row: &Mapping) -> Query {
    let vars: Vec<Variable> = row.vars().cloned().collect();
    let values: Vec<Option<Term>> = row.iter().map(|(_, t)| Some(t.clone())).collect();
    Query {
        form: QueryForm::Ask,
        distinct: false,
        projection: Projection::Star,
        pattern: GroupPattern {
            elements: vec![
                Element::Filter(constraint.clone()),
                Element::Values(ValuesBlock { vars, rows: vec![values] }),
            ],
        },
        group_by: vec![],
        having: vec![],
        order_by: vec![],
        limit: None,
        offset: None,
    }
}

// Compiled form of the preference body: leaves get stable ids so probe
// results can be cached per (leaf, combined row).
enum CompiledPref {
    Simple { id: usize, constraint: Expression, intrinsic: bool },
    Pareto(Box<CompiledPref>, Box<CompiledPref>),
    Prioritized(Box<CompiledPref>, Box<CompiledPref>),
}

fn compile(body: &PreferenceExpr, next_id: &mut usize) -> CompiledPref {
    match body {
        PreferenceExpr::Simple(e) => {
            let id = *next_id;
            *next_id += 1;
            CompiledPref::Simple {
                id,
                constraint: e.clone(),
                intrinsic: crate::sprefql::expression_is_intrinsic(e),
            }
        }
        PreferenceExpr::Pareto(a, b) => CompiledPref::Pareto(
            Box::new(compile(a, next_id)),
            Box::new(compile(b, next_id)),
        ),
        PreferenceExpr::Prioritized(a, b) => CompiledPref::Prioritized(
            Box::new(compile(a, next_id)),
            Box::new(compile(b, next_id)),
        ),
    }
}

/// Decides `left_row` is preferred to `right_row` for one query's PREFER
/// clause against one backend.
pub struct PreferenceRelation<'a> {
    base: Vec<Variable>,
    left: Vec<Variable>,
    right: Vec<Variable>,
    body: CompiledPref,
    backend: &'a Backend,
    cache: Option<Mutex<HashMap<(usize, Mapping), bool>>>,
    probes: AtomicU64,
}

impl<'a> PreferenceRelation<'a> {
    /// `projection` is the variable list the solution rows are keyed by,
    /// in clause order. The clause is assumed well-formed.
    pub fn new(
        clause: &PreferClause,
        projection: Vec<Variable>,
        backend: &'a Backend,
    ) -> PreferenceRelation<'a> {
        let mut next_id = 0;
        PreferenceRelation {
            base: projection,
            left: clause.left.clone(),
            right: clause.right.clone(),
            body: compile(&clause.body, &mut next_id),
            backend,
            cache: Some(Mutex::new(HashMap::new())),
            probes: AtomicU64::new(0),
        }
    }

    /// Validates the query and builds the relation; `Ok(None)` when the
    /// query has no PREFER clause.
    pub fn for_query(
        query: &PrefQuery,
        backend: &'a Backend,
    ) -> Result<Option<PreferenceRelation<'a>>, IllFormedPrefer> {
        crate::sprefql::validate(query)?;
        let clause = match &query.prefer {
            Some(c) => c,
            None => return Ok(None),
        };
        let projection = match &query.base.projection {
            Projection::Vars(vars) => vars.clone(),
            Projection::Star => return Err(IllFormedPrefer::StarProjection),
        };
        Ok(Some(PreferenceRelation::new(clause, projection, backend)))
    }

    /// Disables or re-enables memoization of ASK probe results.
    pub fn with_probe_cache(mut self, enabled: bool) -> PreferenceRelation<'a> {
        self.cache = enabled.then(|| Mutex::new(HashMap::new()));
        self
    }

    /// Number of ASK queries sent to the backend so far. Intrinsic
    /// constraints and cache hits do not probe.
    pub fn ask_probes(&self) -> u64 {
        self.probes.load(Ordering::Relaxed)
    }

    pub fn reset_probes(&self) {
        self.probes.store(0, Ordering::Relaxed);
    }

    pub fn prefers(&self, left_row: &Mapping, right_row: &Mapping) -> Result<bool, BackendError> {
        let fwd = construct_mapping(left_row, right_row, &self.base, &self.left, &self.right);
        let rev = construct_mapping(right_row, left_row, &self.base, &self.left, &self.right);
        self.eval(&self.body, &fwd, &rev)
    }

    /// Neither row is preferred to the other.
    pub fn incomparable(
        &self,
        left_row: &Mapping,
        right_row: &Mapping,
    ) -> Result<bool, BackendError> {
        Ok(!self.prefers(left_row, right_row)? && !self.prefers(right_row, left_row)?)
    }

    // Swapping the forward and reverse rows reads a subexpression with the
    // two variable lists exchanged, which is how composition refers to the
    // opposite direction of a member preference.
    fn eval(&self, p: &CompiledPref, fwd: &Mapping, rev: &Mapping) -> Result<bool, BackendError> {
        match p {
            CompiledPref::Simple { id, constraint, intrinsic } => {
                self.leaf(*id, constraint, *intrinsic, fwd)
            }
            CompiledPref::Pareto(a, b) => {
                if self.eval(a, fwd, rev)? && !self.eval(b, rev, fwd)? {
                    return Ok(true);
                }
                Ok(self.eval(b, fwd, rev)? && !self.eval(a, rev, fwd)?)
            }
            CompiledPref::Prioritized(a, b) => {
                if self.eval(a, fwd, rev)? {
                    return Ok(true);
                }
                if self.eval(a, rev, fwd)? {
                    return Ok(false);
                }
                self.eval(b, fwd, rev)
            }
        }
    }

    fn leaf(
        &self,
        id: usize,
        constraint: &Expression,
        intrinsic: bool,
        row: &Mapping,
    ) -> Result<bool, BackendError> {
        if intrinsic {
            // same outcome as the ASK probe on any dataset; an expression
            // error means "not preferred", exactly like a failing FILTER
            let empty = Dataset::new();
            return Ok(eval_ebv(constraint, row, &empty).unwrap_or(false));
        }
        let key = (id, row.clone());
        if let Some(cache) = &self.cache {
            if let Some(&hit) = cache.lock().unwrap().get(&key) {
                return Ok(hit);
            }
        }
        let query = construct_query(constraint, row);
        self.probes.fetch_add(1, Ordering::Relaxed);
        let result = self.backend.ask(&query)?;
        if let Some(cache) = &self.cache {
            cache.lock().unwrap().insert(key, result);
        }
        Ok(result)
    }
}
