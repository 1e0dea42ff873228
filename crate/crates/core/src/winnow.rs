//! Winnowing: keep the rows no other row is preferred to.
//!
//! Nested Loops compares every candidate against the whole input and is
//! correct for any preference relation. Blocked Nested Loops keeps a
//! window of undominated rows and discards dominated ones on sight, which
//! is correct only when the relation is a strict partial order; under a
//! non-SPO relation its output can depend on input order and window size.
//! `check_spo` tests the order axioms extensionally over the input rows.

use crate::backend::BackendError;
use crate::pref::PreferenceRelation;
use crate::rdf::{Mapping, SolutionSeq};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Nl,
    Bnl,
}

#[derive(Clone, Copy, Debug)]
pub struct WinnowConfig {
    pub algorithm: Algorithm,
    /// Window slots for BNL; `None` is unbounded. Ignored by NL.
    pub window_capacity: Option<usize>,
    /// NL compares each row against itself too, which costs one probe per
    /// row under an extrinsic preference. Disable to skip those.
    pub count_self_comparisons: bool,
}

impl Default for WinnowConfig {
    fn default() -> WinnowConfig {
        WinnowConfig {
            algorithm: Algorithm::Nl,
            window_capacity: None,
            count_self_comparisons: true,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WinnowStats {
    /// Directed `prefers` questions asked, one per direction.
    pub pair_comparisons: u64,
    /// Backend ASK probes issued while winnowing.
    pub ask_probes: u64,
    /// Largest number of rows held in the BNL window.
    pub max_window_bindsets: usize,
    /// Largest total number of variable bindings held in the BNL window.
    pub max_window_bindings: usize,
    /// Scans over the (shrinking) input.
    pub passes: u32,
}

pub fn winnow(
    solutions: &SolutionSeq,
    relation: &PreferenceRelation,
    config: &WinnowConfig,
) -> Result<(SolutionSeq, WinnowStats), BackendError> {
    let probes_before = relation.ask_probes();
    let (rows, mut stats) = match config.algorithm {
        Algorithm::Nl => winnow_nl(&solutions.rows, relation, config.count_self_comparisons)?,
        Algorithm::Bnl => winnow_bnl(&solutions.rows, relation, config.window_capacity)?,
    };
    stats.ask_probes = relation.ask_probes() - probes_before;
    Ok((SolutionSeq { vars: solutions.vars.clone(), rows }, stats))
}

// Definition: a row wins iff no input row is preferred to it. Scans stop
// at the first dominator. Output keeps input order.
fn winnow_nl(
    rows: &[Mapping],
    relation: &PreferenceRelation,
    count_self: bool,
) -> Result<(Vec<Mapping>, WinnowStats), BackendError> {
    let mut stats = WinnowStats { passes: 1, ..WinnowStats::default() };
    let mut out = Vec::new();
    for (i, candidate) in rows.iter().enumerate() {
        let mut dominated = false;
        for (j, other) in rows.iter().enumerate() {
            if i == j && !count_self {
                continue;
            }
            stats.pair_comparisons += 1;
            if relation.prefers(other, candidate)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            out.push(candidate.clone());
        }
    }
    Ok((out, stats))
}

struct Entry {
    ts: u64,
    row: Mapping,
}

// Timestamps come from one monotone counter, assigned whenever a row
// enters the window or the overflow file. A window row older than the
// current candidate's timestamp has already been compared with the
// candidate and with everything after it in the input, so it is a winner.
fn winnow_bnl(
    rows: &[Mapping],
    relation: &PreferenceRelation,
    capacity: Option<usize>,
) -> Result<(Vec<Mapping>, WinnowStats), BackendError> {
    let mut stats = WinnowStats::default();
    let mut out = Vec::new();
    let mut window: Vec<Entry> = Vec::new();
    let mut next_ts: u64 = 1;
    // fresh input carries timestamp 0: it predates every window entry
    let mut input: Vec<Entry> =
        rows.iter().map(|r| Entry { ts: 0, row: r.clone() }).collect();

    loop {
        stats.passes += 1;
        let mut overflow: Vec<Entry> = Vec::new();
        let mut first_overflow_ts: Option<u64> = None;
        for candidate in input {
            let mut k = 0;
            while k < window.len() {
                if window[k].ts < candidate.ts {
                    out.push(window.remove(k).row);
                } else {
                    k += 1;
                }
            }
            let mut dominated = false;
            let mut k = 0;
            while k < window.len() {
                stats.pair_comparisons += 1;
                if relation.prefers(&window[k].row, &candidate.row)? {
                    dominated = true;
                    break;
                }
                stats.pair_comparisons += 1;
                if relation.prefers(&candidate.row, &window[k].row)? {
                    window.remove(k);
                } else {
                    k += 1;
                }
            }
            if dominated {
                continue;
            }
            let entry = Entry { ts: next_ts, row: candidate.row };
            next_ts += 1;
            if capacity.is_none_or(|cap| window.len() < cap) {
                window.push(entry);
                stats.max_window_bindsets = stats.max_window_bindsets.max(window.len());
                let held: usize = window.iter().map(|e| e.row.len()).sum();
                stats.max_window_bindings = stats.max_window_bindings.max(held);
            } else {
                first_overflow_ts.get_or_insert(entry.ts);
                overflow.push(entry);
            }
        }
        // window rows older than every overflow row faced the whole rest
        let cutoff = first_overflow_ts.unwrap_or(u64::MAX);
        let mut k = 0;
        while k < window.len() {
            if window[k].ts < cutoff {
                out.push(window.remove(k).row);
            } else {
                k += 1;
            }
        }
        if overflow.is_empty() {
            break;
        }
        input = overflow;
    }
    Ok((out, stats))
}

pub const DEFAULT_SPO_CAP: usize = 1000;

/// A witness that the preference relation over the given rows is not a
/// strict partial order. Indices point into the checked row prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpoViolation {
    /// Row `index` is preferred to itself.
    Reflexive { index: usize },
    /// Each of the two rows is preferred to the other.
    Asymmetric { first: usize, second: usize },
    /// `first` beats `second` and `second` beats `third`, but `first`
    /// does not beat `third`.
    Intransitive { first: usize, second: usize, third: usize },
}

impl std::fmt::Display for SpoViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpoViolation::Reflexive { index } => {
                write!(f, "row {} is preferred to itself", index)
            }
            SpoViolation::Asymmetric { first, second } => {
                write!(f, "rows {} and {} are each preferred to the other", first, second)
            }
            SpoViolation::Intransitive { first, second, third } => write!(
                f,
                "row {} beats row {} and row {} beats row {}, but row {} does not beat row {}",
                first, second, second, third, first, third
            ),
        }
    }
}

/// Evaluates the relation over the first `cap` rows and checks
/// irreflexivity, asymmetry and transitivity, in that order. Returns the
/// first violation found, `None` when the sampled relation is an SPO.
#[allow(clippy::needless_range_loop)] // i/j/k index a square matrix
pub fn check_spo(
    solutions: &SolutionSeq,
    relation: &PreferenceRelation,
    cap: usize,
) -> Result<Option<SpoViolation>, BackendError> {
    let n = solutions.rows.len().min(cap);
    let rows = &solutions.rows[..n];
    let mut prefers = vec![vec![false; n]; n];
    for (i, row) in rows.iter().enumerate() {
        for (j, other) in rows.iter().enumerate() {
            prefers[i][j] = relation.prefers(row, other)?;
        }
    }
    for (i, p) in prefers.iter().enumerate() {
        if p[i] {
            return Ok(Some(SpoViolation::Reflexive { index: i }));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if prefers[i][j] && prefers[j][i] {
                return Ok(Some(SpoViolation::Asymmetric { first: i, second: j }));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !prefers[i][j] {
                continue;
            }
            for k in 0..n {
                if prefers[j][k] && !prefers[i][k] {
                    return Ok(Some(SpoViolation::Intransitive {
                        first: i,
                        second: j,
                        third: k,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::Backend;
    use crate::rdf::{load_turtle, Dataset, Term, Variable};
    use crate::sprefql::parse_pref_query;

    fn film_rows(films: &[(&str, &str, i64)]) -> SolutionSeq {
        let title = Variable::new("title");
        let genre = Variable::new("genre");
        let runtime = Variable::new("runtime");
        let rows = films
            .iter()
            .map(|(t, g, r)| {
                Mapping::new()
                    .with(title.clone(), Term::string(*t))
                    .with(genre.clone(), Term::string(*g))
                    .with(runtime.clone(), Term::integer(*r))
            })
            .collect();
        SolutionSeq { vars: vec![title, genre, runtime], rows }
    }

    fn five_films() -> SolutionSeq {
        film_rows(&[
            ("Star Wars Ep.IV: A New Hope", "Sci-fi", 121),
            ("Star Wars Ep.V: The Empire Strikes Back", "Sci-fi", 124),
            ("Star Wars Ep.VI: Return of the Jedi", "Sci-fi", 130),
            ("Die Hard", "Action", 131),
            ("Die Hard with a Vengeance", "Action", 128),
        ])
    }

    fn longer_same_genre_clause() -> crate::sprefql::PreferClause {
        parse_pref_query(
            "SELECT ?title ?genre ?runtime WHERE { ?s :title ?title. ?s :genre ?genre. ?s :runtime ?runtime }\n\
             PREFER (?title1 ?genre1 ?runtime1) TO (?title2 ?genre2 ?runtime2)\n\
             IF (?genre1 = ?genre2 && ?runtime1 > ?runtime2)",
        )
        .unwrap()
        .prefer
        .unwrap()
    }

    fn titles(seq: &SolutionSeq) -> Vec<String> {
        let title = Variable::new("title");
        let mut out: Vec<String> = seq
            .rows
            .iter()
            .map(|r| r.get(&title).unwrap().as_literal().unwrap().lexical.clone())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn both_algorithms_keep_the_longest_film_per_genre() {
        let backend = Backend::Local(Dataset::new());
        let clause = longer_same_genre_clause();
        let input = five_films();
        let relation = PreferenceRelation::new(&clause, input.vars.clone(), &backend);

        let (nl, nl_stats) =
            winnow(&input, &relation, &WinnowConfig::default()).unwrap();
        assert_eq!(titles(&nl), vec!["Die Hard", "Star Wars Ep.VI: Return of the Jedi"]);
        assert_eq!(nl_stats.passes, 1);
        assert_eq!(nl_stats.max_window_bindsets, 0);
        assert_eq!(nl_stats.ask_probes, 0);

        for capacity in [None, Some(1), Some(2), Some(10)] {
            let config = WinnowConfig {
                algorithm: Algorithm::Bnl,
                window_capacity: capacity,
                ..WinnowConfig::default()
            };
            let (bnl, stats) = winnow(&input, &relation, &config).unwrap();
            assert_eq!(titles(&bnl), titles(&nl), "window capacity {:?}", capacity);
            assert!(stats.max_window_bindsets <= capacity.unwrap_or(usize::MAX));
        }
    }

    #[test]
    fn nl_keeps_input_order_and_bnl_never_self_compares() {
        let backend = Backend::Local(Dataset::new());
        let clause = longer_same_genre_clause();
        let input = five_films();
        let relation = PreferenceRelation::new(&clause, input.vars.clone(), &backend);

        let (nl, _) = winnow(&input, &relation, &WinnowConfig::default()).unwrap();
        // input order: Jedi (position 3) before Die Hard (position 4)
        assert_eq!(
            nl.rows,
            vec![input.rows[2].clone(), input.rows[3].clone()]
        );

        // a single incomparable pair: BNL compares it twice (both
        // directions), never a row with itself
        let pair = film_rows(&[("A", "Sci-fi", 100), ("B", "Action", 100)]);
        let config = WinnowConfig { algorithm: Algorithm::Bnl, ..WinnowConfig::default() };
        let (winners, stats) = winnow(&pair, &relation, &config).unwrap();
        assert_eq!(winners.len(), 2);
        assert_eq!(stats.pair_comparisons, 2);
    }

    #[test]
    fn ascending_chain_cost_model() {
        let backend = Backend::Local(Dataset::new());
        let clause = longer_same_genre_clause();
        let n = 5;
        let films: Vec<(String, &str, i64)> = (1..=n)
            .map(|i| (format!("Movie {}", i), "Sci-fi", 100 + i as i64))
            .collect();
        let films_ref: Vec<(&str, &str, i64)> =
            films.iter().map(|(t, g, r)| (t.as_str(), *g, *r)).collect();
        let input = film_rows(&films_ref);
        let relation = PreferenceRelation::new(&clause, input.vars.clone(), &backend);

        let (nl, nl_stats) = winnow(&input, &relation, &WinnowConfig::default()).unwrap();
        assert_eq!(nl.rows.len(), 1);
        // candidate i is dominated at its (i+1)-th comparison, the last
        // row survives all n
        assert_eq!(nl_stats.pair_comparisons, (n * (n + 1) / 2 - 1 + n) as u64);

        let config = WinnowConfig { algorithm: Algorithm::Bnl, ..WinnowConfig::default() };
        let (bnl, bnl_stats) = winnow(&input, &relation, &config).unwrap();
        assert_eq!(bnl.rows.len(), 1);
        assert_eq!(bnl_stats.pair_comparisons, 2 * (n as u64 - 1));
        assert_eq!(bnl_stats.max_window_bindsets, 1);
        assert_eq!(bnl_stats.max_window_bindings, 3);
    }

    fn sequel_setup() -> (Backend, crate::sprefql::PreferClause) {
        let ds = load_turtle(
            "@prefix : <http://example.org/movies#> .\n\
             :m1 :sequel :m2 .\n:m2 :sequel :m3 .\n:m4 :sequel :m5 .",
        )
        .unwrap();
        let clause = parse_pref_query(
            "SELECT ?film WHERE { ?film a :film }\n\
             PREFER ?film1 TO ?film2 IF EXISTS { ?film1 :sequel ?film2 }",
        )
        .unwrap()
        .prefer
        .unwrap();
        (Backend::Local(ds), clause)
    }

    fn film_iris(names: &[&str]) -> SolutionSeq {
        let film = Variable::new("film");
        let rows = names
            .iter()
            .map(|n| {
                Mapping::new().with(
                    film.clone(),
                    Term::iri(format!("http://example.org/movies#{}", n)),
                )
            })
            .collect();
        SolutionSeq { vars: vec![film], rows }
    }

    fn iris(seq: &SolutionSeq) -> Vec<String> {
        let film = Variable::new("film");
        let mut out: Vec<String> = seq
            .rows
            .iter()
            .map(|r| match r.get(&film).unwrap() {
                Term::Iri(iri) => iri.rsplit('#').next().unwrap().to_string(),
                other => panic!("unexpected term {:?}", other),
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn bnl_depends_on_input_order_when_the_relation_is_not_transitive() {
        let (backend, clause) = sequel_setup();
        let vars = vec![Variable::new("film")];
        let relation = PreferenceRelation::new(&clause, vars, &backend);
        let config = WinnowConfig { algorithm: Algorithm::Bnl, ..WinnowConfig::default() };

        let forward = film_iris(&["m1", "m2", "m3", "m4", "m5"]);
        let (winners, _) = winnow(&forward, &relation, &config).unwrap();
        assert_eq!(iris(&winners), vec!["m1", "m3", "m4"]);

        let shuffled = film_iris(&["m2", "m3", "m1", "m4", "m5"]);
        let (winners, _) = winnow(&shuffled, &relation, &config).unwrap();
        assert_eq!(iris(&winners), vec!["m1", "m4"]);

        // NL sees the dominated m2 while scanning, so m3 always loses
        for input in [&forward, &shuffled] {
            let (winners, _) = winnow(input, &relation, &WinnowConfig::default()).unwrap();
            assert_eq!(iris(&winners), vec!["m1", "m4"]);
        }
    }

    #[test]
    fn spo_checker_finds_the_violation_kind() {
        let (backend, clause) = sequel_setup();
        let vars = vec![Variable::new("film")];
        let relation = PreferenceRelation::new(&clause, vars, &backend);
        let rows = film_iris(&["m1", "m2", "m3"]);
        assert_eq!(
            check_spo(&rows, &relation, DEFAULT_SPO_CAP).unwrap(),
            Some(SpoViolation::Intransitive { first: 0, second: 1, third: 2 })
        );

        let backend = Backend::Local(Dataset::new());
        let reflexive = parse_pref_query(
            "SELECT ?r WHERE { ?s :runtime ?r }\nPREFER ?r1 TO ?r2 IF (?r1 = ?r2)",
        )
        .unwrap()
        .prefer
        .unwrap();
        let relation =
            PreferenceRelation::new(&reflexive, vec![Variable::new("r")], &backend);
        let rows = SolutionSeq {
            vars: vec![Variable::new("r")],
            rows: vec![Mapping::new().with(Variable::new("r"), Term::integer(1))],
        };
        assert_eq!(
            check_spo(&rows, &relation, DEFAULT_SPO_CAP).unwrap(),
            Some(SpoViolation::Reflexive { index: 0 })
        );

        let symmetric = parse_pref_query(
            "SELECT ?r WHERE { ?s :runtime ?r }\nPREFER ?r1 TO ?r2 IF (?r1 != ?r2)",
        )
        .unwrap()
        .prefer
        .unwrap();
        let relation =
            PreferenceRelation::new(&symmetric, vec![Variable::new("r")], &backend);
        let rows = SolutionSeq {
            vars: vec![Variable::new("r")],
            rows: vec![
                Mapping::new().with(Variable::new("r"), Term::integer(1)),
                Mapping::new().with(Variable::new("r"), Term::integer(2)),
            ],
        };
        assert_eq!(
            check_spo(&rows, &relation, DEFAULT_SPO_CAP).unwrap(),
            Some(SpoViolation::Asymmetric { first: 0, second: 1 })
        );

        let strict = parse_pref_query(
            "SELECT ?r WHERE { ?s :runtime ?r }\nPREFER ?r1 TO ?r2 IF (?r1 > ?r2)",
        )
        .unwrap()
        .prefer
        .unwrap();
        let relation = PreferenceRelation::new(&strict, vec![Variable::new("r")], &backend);
        assert_eq!(check_spo(&rows, &relation, DEFAULT_SPO_CAP).unwrap(), None);
    }

    #[test]
    fn extrinsic_probe_counting_matches_comparisons_without_the_cache() {
        let (backend, clause) = sequel_setup();
        let vars = vec![Variable::new("film")];
        let relation =
            PreferenceRelation::new(&clause, vars, &backend).with_probe_cache(false);
        let input = film_iris(&["m1", "m2", "m3"]);
        let config = WinnowConfig { algorithm: Algorithm::Bnl, ..WinnowConfig::default() };
        let (winners, stats) = winnow(&input, &relation, &config).unwrap();
        assert_eq!(iris(&winners), vec!["m1", "m3"]);
        assert_eq!(stats.pair_comparisons, 3);
        assert_eq!(stats.ask_probes, stats.pair_comparisons);
    }
}
