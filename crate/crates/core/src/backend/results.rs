//! SPARQL 1.1 Query Results JSON Format.
//!
//! Reading accepts the legacy `typed-literal` type and treats a plain
//! literal as an `xsd:string`. Writing always uses `uri`, `literal` and
//! `bnode`, omits the datatype for plain strings, and keeps bindings in
//! the order of `head.vars`, so equal solution sequences serialize to
//! identical bytes.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::rdf::{xsd, Mapping, SolutionSeq, Term, Variable};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultsDoc {
    pub head: Head,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<ResultsBody>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boolean: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Head {
    #[serde(default)]
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultsBody {
    pub bindings: Vec<IndexMap<String, JsonTerm>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonTerm {
    #[serde(rename = "type")]
    pub kind: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    #[serde(rename = "xml:lang", skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

pub fn solutions_to_json(solutions: &SolutionSeq) -> String {
    let doc = ResultsDoc {
        head: Head { vars: solutions.vars.iter().map(|v| v.name().to_string()).collect() },
        results: Some(ResultsBody {
            bindings: solutions
                .rows
                .iter()
                .map(|row| {
                    solutions
                        .vars
                        .iter()
                        .filter_map(|v| row.get(v).map(|t| (v.name().to_string(), term_to_json(t))))
                        .collect()
                })
                .collect(),
        }),
        boolean: None,
    };
    serde_json::to_string(&doc).expect("results serialization cannot fail")
}

pub fn solutions_from_json(text: &str) -> Result<SolutionSeq, String> {
    let doc: ResultsDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let body = doc.results.ok_or("response has no `results` member")?;
    let vars: Vec<Variable> = doc.head.vars.iter().map(Variable::new).collect();
    let mut rows = Vec::with_capacity(body.bindings.len());
    for binding in &body.bindings {
        let mut row = Mapping::new();
        for v in &vars {
            if let Some(jt) = binding.get(v.name()) {
                row.bind(v.clone(), term_from_json(jt)?);
            }
        }
        rows.push(row);
    }
    Ok(SolutionSeq { vars, rows })
}

pub fn ask_to_json(value: bool) -> String {
    let doc = ResultsDoc { head: Head::default(), results: None, boolean: Some(value) };
    serde_json::to_string(&doc).expect("results serialization cannot fail")
}

pub fn ask_from_json(text: &str) -> Result<bool, String> {
    let doc: ResultsDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
    doc.boolean.ok_or_else(|| "response has no `boolean` member".to_string())
}

pub fn term_to_json(term: &Term) -> JsonTerm {
    match term {
        Term::Iri(iri) => JsonTerm {
            kind: "uri".to_string(),
            value: iri.clone(),
            datatype: None,
            lang: None,
        },
        Term::BlankNode(label) => JsonTerm {
            kind: "bnode".to_string(),
            value: label.clone(),
            datatype: None,
            lang: None,
        },
        Term::Literal(lit) => JsonTerm {
            kind: "literal".to_string(),
            value: lit.lexical.clone(),
            datatype: (lit.lang.is_none() && lit.datatype != xsd::STRING)
                .then(|| lit.datatype.clone()),
            lang: lit.lang.clone(),
        },
    }
}

pub fn term_from_json(jt: &JsonTerm) -> Result<Term, String> {
    match jt.kind.as_str() {
        "uri" => Ok(Term::iri(jt.value.clone())),
        "bnode" => Ok(Term::bnode(jt.value.clone())),
        "literal" | "typed-literal" => Ok(match (&jt.lang, &jt.datatype) {
            (Some(lang), _) => Term::lang_string(jt.value.clone(), lang.clone()),
            (None, Some(dt)) => Term::typed(jt.value.clone(), dt.clone()),
            (None, None) => Term::string(jt.value.clone()),
        }),
        other => Err(format!("unknown term type {:?} in results", other)),
    }
}
