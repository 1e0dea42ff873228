//! Query syntax trees shared by the evaluator, the serializer and the
//! preference rewriter.

use std::collections::HashMap;

use indexmap::IndexSet;

use crate::rdf::{Mapping, Term, TermPattern, TriplePattern, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryForm {
    Select,
    Ask,
}

/// A parsed query. `group_by` and `having` are carried through so they can
/// be forwarded to a remote endpoint; the local evaluator rejects them.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub form: QueryForm,
    pub distinct: bool,
    pub projection: Projection,
    pub pattern: GroupPattern,
    pub group_by: Vec<Expression>,
    pub having: Vec<Expression>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Projection {
    Star,
    Vars(Vec<Variable>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderKey {
    pub expr: Expression,
    pub descending: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct GroupPattern {
    pub elements: Vec<Element>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Triple(TriplePattern),
    Filter(Expression),
    Values(ValuesBlock),
    Group(GroupPattern),
}

/// Inline data. A row entry of `None` is UNDEF.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuesBlock {
    pub vars: Vec<Variable>,
    pub rows: Vec<Vec<Option<Term>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expression {
    Or(Box<Expression>, Box<Expression>),
    And(Box<Expression>, Box<Expression>),
    Not(Box<Expression>),
    Compare(CompareOp, Box<Expression>, Box<Expression>),
    Arith(ArithOp, Box<Expression>, Box<Expression>),
    Neg(Box<Expression>),
    Exists(GroupPattern),
    NotExists(GroupPattern),
    Call(Function, Vec<Expression>),
    Var(Variable),
    Const(Term),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Function {
    Regex,
    Bound,
    Str,
    Datatype,
}

impl Query {
    /// Every variable mentioned anywhere in the query, in first-appearance
    /// order. Used when minting fresh variable names.
    pub fn all_variables(&self) -> IndexSet<Variable> {
        let mut out = IndexSet::new();
        if let Projection::Vars(vars) = &self.projection {
            out.extend(vars.iter().cloned());
        }
        self.pattern.collect_variables(&mut out);
        for e in self.group_by.iter().chain(&self.having) {
            e.collect_variables(true, &mut out);
        }
        for key in &self.order_by {
            key.expr.collect_variables(true, &mut out);
        }
        out
    }
}

impl GroupPattern {
    pub fn new(elements: Vec<Element>) -> GroupPattern {
        GroupPattern { elements }
    }

    /// All variables in the group, including those inside filter
    /// expressions and EXISTS bodies.
    pub fn variables(&self) -> IndexSet<Variable> {
        let mut out = IndexSet::new();
        self.collect_variables(&mut out);
        out
    }

    /// Variables the group can bind: triple patterns, VALUES and nested
    /// groups. Filters never bind, so their variables are excluded.
    pub fn binding_variables(&self) -> IndexSet<Variable> {
        let mut out = IndexSet::new();
        self.collect_binding_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut IndexSet<Variable>) {
        for el in &self.elements {
            match el {
                Element::Triple(tp) => out.extend(tp.variables().cloned()),
                Element::Filter(e) => e.collect_variables(true, out),
                Element::Values(vb) => out.extend(vb.vars.iter().cloned()),
                Element::Group(g) => g.collect_variables(out),
            }
        }
    }

    fn collect_binding_variables(&self, out: &mut IndexSet<Variable>) {
        for el in &self.elements {
            match el {
                Element::Triple(tp) => out.extend(tp.variables().cloned()),
                Element::Filter(_) => {}
                Element::Values(vb) => out.extend(vb.vars.iter().cloned()),
                Element::Group(g) => g.collect_binding_variables(out),
            }
        }
    }

    /// Simultaneous variable renaming, applied everywhere including filter
    /// expressions and EXISTS bodies.
    pub fn rename(&self, map: &HashMap<Variable, Variable>) -> GroupPattern {
        let elements = self
            .elements
            .iter()
            .map(|el| match el {
                Element::Triple(tp) => Element::Triple(rename_triple(tp, map)),
                Element::Filter(e) => Element::Filter(e.rename(map)),
                Element::Values(vb) => Element::Values(ValuesBlock {
                    vars: vb.vars.iter().map(|v| rename_var(v, map)).collect(),
                    rows: vb.rows.clone(),
                }),
                Element::Group(g) => Element::Group(g.rename(map)),
            })
            .collect();
        GroupPattern { elements }
    }

    /// Substitutes the bound variables of `binding` into the pattern, the
    /// substitute-then-evaluate step of EXISTS. VALUES keeps its variables
    /// but drops rows that contradict the binding.
    pub(crate) fn substitute(&self, binding: &Mapping) -> GroupPattern {
        let elements = self
            .elements
            .iter()
            .map(|el| match el {
                Element::Triple(tp) => Element::Triple(tp.bind(binding)),
                Element::Filter(e) => Element::Filter(e.substitute(binding)),
                Element::Values(vb) => {
                    let rows = vb
                        .rows
                        .iter()
                        .filter(|row| {
                            vb.vars.iter().zip(row.iter()).all(|(v, val)| {
                                match (binding.get(v), val) {
                                    (Some(bound), Some(t)) => bound == t,
                                    _ => true,
                                }
                            })
                        })
                        .cloned()
                        .collect();
                    Element::Values(ValuesBlock { vars: vb.vars.clone(), rows })
                }
                Element::Group(g) => Element::Group(g.substitute(binding)),
            })
            .collect();
        GroupPattern { elements }
    }
}

impl Expression {
    pub fn and(a: Expression, b: Expression) -> Expression {
        Expression::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expression, b: Expression) -> Expression {
        Expression::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expression) -> Expression {
        Expression::Not(Box::new(e))
    }

    /// All variables, including those inside EXISTS bodies.
    pub fn variables(&self) -> IndexSet<Variable> {
        let mut out = IndexSet::new();
        self.collect_variables(true, &mut out);
        out
    }

    /// Variables occurring outside EXISTS and NOT EXISTS bodies. These are
    /// the ones a preference body must draw from its variable lists.
    pub fn outer_variables(&self) -> IndexSet<Variable> {
        let mut out = IndexSet::new();
        self.collect_variables(false, &mut out);
        out
    }

    pub(crate) fn collect_variables(&self, include_exists: bool, out: &mut IndexSet<Variable>) {
        match self {
            Expression::Or(a, b)
            | Expression::And(a, b)
            | Expression::Compare(_, a, b)
            | Expression::Arith(_, a, b) => {
                a.collect_variables(include_exists, out);
                b.collect_variables(include_exists, out);
            }
            Expression::Not(e) | Expression::Neg(e) => e.collect_variables(include_exists, out),
            Expression::Exists(g) | Expression::NotExists(g) => {
                if include_exists {
                    g.collect_variables(out);
                }
            }
            Expression::Call(_, args) => {
                for a in args {
                    a.collect_variables(include_exists, out);
                }
            }
            Expression::Var(v) => {
                out.insert(v.clone());
            }
            Expression::Const(_) => {}
        }
    }

    /// Simultaneous variable renaming, descending into EXISTS bodies.
    pub fn rename(&self, map: &HashMap<Variable, Variable>) -> Expression {
        match self {
            Expression::Or(a, b) => Expression::or(a.rename(map), b.rename(map)),
            Expression::And(a, b) => Expression::and(a.rename(map), b.rename(map)),
            Expression::Not(e) => Expression::not(e.rename(map)),
            Expression::Compare(op, a, b) => {
                Expression::Compare(*op, Box::new(a.rename(map)), Box::new(b.rename(map)))
            }
            Expression::Arith(op, a, b) => {
                Expression::Arith(*op, Box::new(a.rename(map)), Box::new(b.rename(map)))
            }
            Expression::Neg(e) => Expression::Neg(Box::new(e.rename(map))),
            Expression::Exists(g) => Expression::Exists(g.rename(map)),
            Expression::NotExists(g) => Expression::NotExists(g.rename(map)),
            Expression::Call(f, args) => {
                Expression::Call(*f, args.iter().map(|a| a.rename(map)).collect())
            }
            Expression::Var(v) => Expression::Var(rename_var(v, map)),
            Expression::Const(t) => Expression::Const(t.clone()),
        }
    }

    /// Replaces bound variables by constants; part of EXISTS substitution.
    pub(crate) fn substitute(&self, binding: &Mapping) -> Expression {
        match self {
            Expression::Or(a, b) => Expression::or(a.substitute(binding), b.substitute(binding)),
            Expression::And(a, b) => {
                Expression::and(a.substitute(binding), b.substitute(binding))
            }
            Expression::Not(e) => Expression::not(e.substitute(binding)),
            Expression::Compare(op, a, b) => Expression::Compare(
                *op,
                Box::new(a.substitute(binding)),
                Box::new(b.substitute(binding)),
            ),
            Expression::Arith(op, a, b) => Expression::Arith(
                *op,
                Box::new(a.substitute(binding)),
                Box::new(b.substitute(binding)),
            ),
            Expression::Neg(e) => Expression::Neg(Box::new(e.substitute(binding))),
            Expression::Exists(g) => Expression::Exists(g.substitute(binding)),
            Expression::NotExists(g) => Expression::NotExists(g.substitute(binding)),
            // bound(?v) cannot take a constant argument; a substituted
            // variable is by definition bound.
            Expression::Call(Function::Bound, args) => match args.as_slice() {
                [Expression::Var(v)] if binding.contains(v) => {
                    Expression::Const(Term::boolean(true))
                }
                _ => self.clone(),
            },
            Expression::Call(f, args) => Expression::Call(
                *f,
                args.iter().map(|a| a.substitute(binding)).collect(),
            ),
            Expression::Var(v) => match binding.get(v) {
                Some(t) => Expression::Const(t.clone()),
                None => self.clone(),
            },
            Expression::Const(t) => Expression::Const(t.clone()),
        }
    }
}

fn rename_var(v: &Variable, map: &HashMap<Variable, Variable>) -> Variable {
    map.get(v).cloned().unwrap_or_else(|| v.clone())
}

fn rename_triple(tp: &TriplePattern, map: &HashMap<Variable, Variable>) -> TriplePattern {
    let rename_pos = |p: &TermPattern| match p {
        TermPattern::Var(v) => TermPattern::Var(rename_var(v, map)),
        TermPattern::Term(t) => TermPattern::Term(t.clone()),
    };
    TriplePattern {
        subject: rename_pos(&tp.subject),
        predicate: rename_pos(&tp.predicate),
        object: rename_pos(&tp.object),
    }
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Regex => "regex",
            Function::Bound => "bound",
            Function::Str => "str",
            Function::Datatype => "datatype",
        }
    }
}
