//! End-to-end checks over the fixture corpus: every evaluation strategy,
//! the cost models, probe accounting and the remote protocol path.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sprefql::backend::results::solutions_to_json;
use sprefql::backend::{Backend, RemoteEndpoint};
use sprefql::pref::PreferenceRelation;
use sprefql::rdf::{Dataset, Mapping, SolutionSeq, Term, Variable};
use sprefql::rewrite::{rewrite, unfold};
use sprefql::sparql::{eval_select, parse_query, CompareOp, Expression};
use sprefql::sprefql::{
    parse_pref_query, pref_query_to_string, PrefQuery, PreferClause, PreferenceExpr,
};
use sprefql::synth::{movies, runtime_chain, MovieConfig};
use sprefql::winnow::{
    check_spo, winnow, Algorithm, SpoViolation, WinnowConfig, WinnowStats, DEFAULT_SPO_CAP,
};

fn winnow_once(
    query: &PrefQuery,
    dataset: &Dataset,
    algorithm: Algorithm,
    window: Option<usize>,
) -> (SolutionSeq, WinnowStats) {
    let backend = Backend::Local(dataset.clone());
    let relation = PreferenceRelation::for_query(query, &backend).unwrap().unwrap();
    let rows = eval_select(&query.base, dataset).unwrap();
    let config = WinnowConfig { algorithm, window_capacity: window, ..WinnowConfig::default() };
    winnow(&rows, &relation, &config).unwrap()
}

fn rewrite_rows(query: &PrefQuery, dataset: &Dataset) -> SolutionSeq {
    eval_select(&rewrite(query).unwrap().query, dataset).unwrap()
}

fn row_set(seq: &SolutionSeq) -> HashSet<Mapping> {
    seq.rows.iter().cloned().collect()
}

fn titles_of(seq: &SolutionSeq) -> Vec<String> {
    let title = Variable::new("title");
    let mut out: Vec<String> = seq
        .rows
        .iter()
        .map(|r| r.get(&title).unwrap().as_literal().unwrap().lexical.clone())
        .collect();
    out.sort();
    out
}

/// Local names of the `?film` IRIs, in row order.
fn films_of(seq: &SolutionSeq) -> Vec<String> {
    let film = Variable::new("film");
    seq.rows
        .iter()
        .map(|r| match r.get(&film).unwrap() {
            Term::Iri(iri) => iri.rsplit('#').next().unwrap().to_string(),
            other => panic!("expected an IRI, got {:?}", other),
        })
        .collect()
}

fn sorted(mut names: Vec<String>) -> Vec<String> {
    names.sort();
    names
}

#[test]
fn every_strategy_finds_the_longest_film_per_genre_quickly() {
    let started = Instant::now();
    let dataset = common::films();
    let query =
        parse_pref_query(&common::fixture("queries/films_longer_same_genre.rq")).unwrap();
    let expected =
        vec!["Die Hard".to_string(), "Star Wars Ep.VI: Return of the Jedi".to_string()];

    let (nl, _) = winnow_once(&query, &dataset, Algorithm::Nl, None);
    let (bnl, _) = winnow_once(&query, &dataset, Algorithm::Bnl, None);
    let rewritten = rewrite_rows(&query, &dataset);
    assert_eq!(titles_of(&nl), expected);
    assert_eq!(titles_of(&bnl), expected);
    assert_eq!(titles_of(&rewritten), expected);
    assert_eq!(row_set(&nl), row_set(&rewritten));

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {:?}", elapsed);
    println!("nl, bnl and rewriting all kept the longest film per genre in {:?}", elapsed);
}

#[test]
fn bnl_output_depends_on_input_order_under_a_non_spo_preference() {
    let dataset = common::films();
    let query = parse_pref_query(&common::fixture("queries/film_sequel_pref.rq")).unwrap();
    let backend = Backend::Local(dataset.clone());
    let relation = PreferenceRelation::for_query(&query, &backend).unwrap().unwrap();
    let rows = eval_select(&query.base, &dataset).unwrap();
    assert_eq!(films_of(&rows), ["m1", "m2", "m3", "m4", "m5"]);

    let config = WinnowConfig { algorithm: Algorithm::Bnl, ..WinnowConfig::default() };
    let (in_dataset_order, _) = winnow(&rows, &relation, &config).unwrap();
    // m3's dominator m2 is discarded before m3 arrives, so m3 sneaks in
    assert_eq!(sorted(films_of(&in_dataset_order)), ["m1", "m3", "m4"]);

    let reordered = SolutionSeq {
        vars: rows.vars.clone(),
        rows: [1, 2, 0, 3, 4].iter().map(|&i| rows.rows[i].clone()).collect(),
    };
    let (in_other_order, _) = winnow(&reordered, &relation, &config).unwrap();
    assert_eq!(sorted(films_of(&in_other_order)), ["m1", "m4"]);

    for input in [&rows, &reordered] {
        let (nl, _) = winnow(input, &relation, &WinnowConfig::default()).unwrap();
        assert_eq!(sorted(films_of(&nl)), ["m1", "m4"]);
    }
    println!("bnl answered {{m1, m3, m4}} or {{m1, m4}} depending on input order; nl is stable");
}

#[test]
fn rewriting_reproduces_the_handwritten_not_exists_query_and_its_answers() {
    let query =
        parse_pref_query(&common::fixture("queries/films_longer_same_genre.rq")).unwrap();
    let produced = rewrite(&query).unwrap().query;
    let handwritten =
        parse_query(&common::fixture("queries/films_longer_same_genre_rewritten.rq")).unwrap();
    assert_eq!(produced, handwritten);

    let dataset = common::films();
    let from_rewriting = eval_select(&produced, &dataset).unwrap();
    let (nl, _) = winnow_once(&query, &dataset, Algorithm::Nl, None);
    assert_eq!(row_set(&from_rewriting), row_set(&nl));
    println!("the generated rewriting matches the handwritten query tree and its answers");
}

const SYNTH_BASE: &str = "\
PREFIX : <http://example.org/movies#>
SELECT ?title ?genre ?runtime ?year
WHERE {
  ?s a :film .
  ?s :title ?title .
  ?s :genre ?genre .
  ?s :runtime ?runtime .
  ?s :year ?year .
}";

#[test]
fn unfolded_compositions_match_composed_evaluation_on_every_pair() {
    let dataset = movies(&MovieConfig::default());
    let pareto = parse_pref_query(&format!(
        "{}\nPREFER (?title1 ?genre1 ?runtime1 ?year1) TO (?title2 ?genre2 ?runtime2 ?year2)\n\
         IF (?runtime1 > ?runtime2) AND (?year1 > ?year2)",
        SYNTH_BASE
    ))
    .unwrap();
    let prioritized = parse_pref_query(&format!(
        "{}\nPREFER (?title1 ?genre1 ?runtime1 ?year1) TO (?title2 ?genre2 ?runtime2 ?year2)\n\
         IF (?runtime1 > ?runtime2) PRIOR TO (?year1 >= 2005 && ?year2 < 2005)",
        SYNTH_BASE
    ))
    .unwrap();

    // intrinsic bodies never consult the backend
    let backend = Backend::Local(Dataset::new());
    let rows = eval_select(&pareto.base, &dataset).unwrap();
    assert_eq!(rows.len(), 50);

    for query in [&pareto, &prioritized] {
        let clause = query.prefer.clone().unwrap();
        let composed = PreferenceRelation::for_query(query, &backend).unwrap().unwrap();
        let flattened_clause = PreferClause {
            left: clause.left.clone(),
            right: clause.right.clone(),
            body: PreferenceExpr::Simple(unfold(&clause.body, &clause.left, &clause.right)),
        };
        let flattened =
            PreferenceRelation::new(&flattened_clause, rows.vars.clone(), &backend);
        let mut pairs = 0;
        for a in &rows.rows {
            for b in &rows.rows {
                assert_eq!(
                    composed.prefers(a, b).unwrap(),
                    flattened.prefers(a, b).unwrap()
                );
                pairs += 1;
            }
        }
        assert_eq!(pairs, 2500);
        assert_eq!(composed.ask_probes(), 0);
    }
    println!("composed and unfolded bodies agree on all 2500 ordered pairs, twice over");
}

const RANDOM_BASE: &str = "\
PREFIX : <http://example.org/movies#>
SELECT ?title ?runtime ?year ?rating
WHERE {
  ?s a :film .
  ?s :title ?title .
  ?s :runtime ?runtime .
  ?s :year ?year .
  ?s :rating ?rating .
}";

fn list(suffix: &str) -> Vec<Variable> {
    ["title", "runtime", "year", "rating"]
        .iter()
        .map(|attr| Variable::new(format!("{}{}", attr, suffix)))
        .collect()
}

fn comparison(attr: &str, op: CompareOp) -> PreferenceExpr {
    PreferenceExpr::Simple(Expression::Compare(
        op,
        Box::new(Expression::Var(Variable::new(format!("{}1", attr)))),
        Box::new(Expression::Var(Variable::new(format!("{}2", attr)))),
    ))
}

fn strict_leaf(rng: &mut ChaCha8Rng) -> PreferenceExpr {
    let attr = ["runtime", "year", "rating"][rng.gen_range(0..3)];
    let op = if rng.gen_bool(0.5) { CompareOp::Gt } else { CompareOp::Lt };
    comparison(attr, op)
}

// A lexicographic chain of single-attribute strict comparisons is a strict
// weak order.
fn weak_order(rng: &mut ChaCha8Rng, depth: usize) -> PreferenceExpr {
    if depth == 0 || rng.gen_bool(0.5) {
        strict_leaf(rng)
    } else {
        PreferenceExpr::Prioritized(
            Box::new(strict_leaf(rng)),
            Box::new(weak_order(rng, depth - 1)),
        )
    }
}

// Shapes that provably stay strict partial orders: Pareto needs both
// members weak, prioritized composition needs a weak first member.
fn spo_preference(rng: &mut ChaCha8Rng, depth: usize) -> PreferenceExpr {
    match if depth == 0 { 0 } else { rng.gen_range(0..3) } {
        0 => weak_order(rng, 2),
        1 => PreferenceExpr::Pareto(
            Box::new(weak_order(rng, 1)),
            Box::new(weak_order(rng, 1)),
        ),
        _ => PreferenceExpr::Prioritized(
            Box::new(weak_order(rng, 1)),
            Box::new(spo_preference(rng, depth - 1)),
        ),
    }
}

#[test]
fn randomized_spo_instances_agree_across_all_strategies() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2026);
    let base = parse_query(RANDOM_BASE).unwrap();

    for case in 0u64..100 {
        let films = rng.gen_range(5..=200);
        let dataset = movies(&MovieConfig { films, genres: 4, seed: 1000 + case });
        let query = PrefQuery {
            base: base.clone(),
            prefer: Some(PreferClause {
                left: list("1"),
                right: list("2"),
                body: spo_preference(&mut rng, 2),
            }),
        };
        assert_eq!(parse_pref_query(&pref_query_to_string(&query)).unwrap(), query);

        let backend = Backend::Local(dataset.clone());
        let relation = PreferenceRelation::for_query(&query, &backend).unwrap().unwrap();
        let rows = eval_select(&query.base, &dataset).unwrap();
        assert!(rows.len() <= 200);
        assert_eq!(check_spo(&rows, &relation, DEFAULT_SPO_CAP).unwrap(), None, "case {}", case);

        let (nl, _) = winnow(&rows, &relation, &WinnowConfig::default()).unwrap();
        let mut shuffled_rows = rows.rows.clone();
        shuffled_rows.shuffle(&mut rng);
        let shuffled = SolutionSeq { vars: rows.vars.clone(), rows: shuffled_rows };
        let window =
            if rng.gen_bool(0.25) { None } else { Some(rng.gen_range(1..=rows.len())) };
        let config = WinnowConfig {
            algorithm: Algorithm::Bnl,
            window_capacity: window,
            ..WinnowConfig::default()
        };
        let (bnl, _) = winnow(&shuffled, &relation, &config).unwrap();
        let rewritten = rewrite_rows(&query, &dataset);

        let winners = row_set(&nl);
        assert_eq!(winners, row_set(&bnl), "case {} (window {:?})", case, window);
        assert_eq!(winners, row_set(&rewritten), "case {}", case);
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {:?}", elapsed);
    println!(
        "100 randomized strict-partial-order instances agreed across nl, bnl and rewriting in {:?}",
        elapsed
    );
}

fn arbitrary_leaf(rng: &mut ChaCha8Rng) -> PreferenceExpr {
    let attr = ["runtime", "year", "rating"][rng.gen_range(0..3)];
    let op = [
        CompareOp::Gt,
        CompareOp::Lt,
        CompareOp::Ge,
        CompareOp::Le,
        CompareOp::Eq,
        CompareOp::Ne,
    ][rng.gen_range(0..6)];
    comparison(attr, op)
}

// Unrestricted shapes: non-strict leaves break irreflexivity, arbitrary
// compositions break transitivity.
fn arbitrary_preference(rng: &mut ChaCha8Rng, depth: usize) -> PreferenceExpr {
    if depth == 0 || rng.gen_bool(0.4) {
        return arbitrary_leaf(rng);
    }
    let a = Box::new(arbitrary_preference(rng, depth - 1));
    let b = Box::new(arbitrary_preference(rng, depth - 1));
    if rng.gen_bool(0.5) {
        PreferenceExpr::Pareto(a, b)
    } else {
        PreferenceExpr::Prioritized(a, b)
    }
}

#[test]
fn nl_and_rewriting_agree_under_any_preference_and_bnl_divergence_is_explained() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd15a_64ee);
    let base = parse_query(RANDOM_BASE).unwrap();
    let mut divergences = 0;

    for case in 0u64..40 {
        let films = rng.gen_range(5..=60);
        let dataset = movies(&MovieConfig { films, genres: 3, seed: 9000 + case });
        let query = PrefQuery {
            base: base.clone(),
            prefer: Some(PreferClause {
                left: list("1"),
                right: list("2"),
                body: arbitrary_preference(&mut rng, 2),
            }),
        };
        let backend = Backend::Local(dataset.clone());
        let relation = PreferenceRelation::for_query(&query, &backend).unwrap().unwrap();
        let rows = eval_select(&query.base, &dataset).unwrap();

        let (nl, _) = winnow(&rows, &relation, &WinnowConfig::default()).unwrap();
        assert_eq!(row_set(&nl), row_set(&rewrite_rows(&query, &dataset)), "case {}", case);

        let config = WinnowConfig {
            algorithm: Algorithm::Bnl,
            window_capacity: Some(rng.gen_range(1..=rows.len())),
            ..WinnowConfig::default()
        };
        let (bnl, _) = winnow(&rows, &relation, &config).unwrap();
        if row_set(&bnl) != row_set(&nl) {
            divergences += 1;
            assert!(
                check_spo(&rows, &relation, DEFAULT_SPO_CAP).unwrap().is_some(),
                "case {} diverged without a violation",
                case
            );
        }
    }

    // the sequel preference is intransitive, so it must diverge and the
    // checker must say why
    let dataset = common::films();
    let query = parse_pref_query(&common::fixture("queries/film_sequel_pref.rq")).unwrap();
    let backend = Backend::Local(dataset.clone());
    let relation = PreferenceRelation::for_query(&query, &backend).unwrap().unwrap();
    let rows = eval_select(&query.base, &dataset).unwrap();
    let (nl, _) = winnow(&rows, &relation, &WinnowConfig::default()).unwrap();
    assert_eq!(row_set(&nl), row_set(&rewrite_rows(&query, &dataset)));
    let config = WinnowConfig { algorithm: Algorithm::Bnl, ..WinnowConfig::default() };
    let (bnl, _) = winnow(&rows, &relation, &config).unwrap();
    assert_ne!(row_set(&bnl), row_set(&nl));
    divergences += 1;
    assert!(matches!(
        check_spo(&rows, &relation, DEFAULT_SPO_CAP).unwrap(),
        Some(SpoViolation::Intransitive { .. })
    ));

    assert!(divergences > 0);
    println!(
        "nl and rewriting agreed on every instance; {} bnl divergences, each with a flagged violation",
        divergences
    );
}

#[test]
fn ascending_chains_cost_nl_quadratic_and_bnl_linear() {
    let query = parse_pref_query(&common::fixture(
        "queries/films_longer_same_genre_by_runtime.rq",
    ))
    .unwrap();
    let mut nl_counts = Vec::new();
    for n in [100usize, 400, 1600] {
        let dataset = runtime_chain(n);
        let (nl, nl_stats) = winnow_once(&query, &dataset, Algorithm::Nl, None);
        assert_eq!(nl.len(), 1, "only the longest film survives");
        // candidate i meets its dominator at comparison i + 1; the winner
        // scans all n rows
        assert_eq!(nl_stats.pair_comparisons, (n * (n - 1) / 2 + 2 * n - 1) as u64);
        nl_counts.push(nl_stats.pair_comparisons);

        let (bnl, bnl_stats) = winnow_once(&query, &dataset, Algorithm::Bnl, None);
        assert_eq!(bnl.len(), 1);
        assert_eq!(bnl_stats.pair_comparisons, 2 * (n as u64 - 1));
        assert!(bnl_stats.pair_comparisons <= 4 * n as u64);
        assert_eq!(bnl_stats.max_window_bindsets, 1);
        assert_eq!(bnl_stats.max_window_bindings, 3);
    }
    assert_eq!(nl_counts, [5149, 80599, 1282399]);
    // quadrupling the input grows NL work at least twelvefold
    assert!(nl_counts[1] as f64 / nl_counts[0] as f64 >= 12.0);
    assert!(nl_counts[2] as f64 / nl_counts[1] as f64 >= 12.0);
    println!(
        "nl comparisons {:?} grow quadratically; bnl stays within 4n with a one-row window",
        nl_counts
    );
}

#[test]
fn extrinsic_probe_counts_follow_comparisons_and_caching_removes_repeats() {
    let dataset = common::films();
    let query =
        parse_pref_query(&common::fixture("queries/star_wars_sequel_pref.rq")).unwrap();
    let backend = Backend::Local(dataset.clone());
    let rows = eval_select(&query.base, &dataset).unwrap();
    assert_eq!(films_of(&rows), ["m1", "m2", "m3"]);

    // without the cache every directed comparison costs one ASK probe
    let uncached = PreferenceRelation::for_query(&query, &backend)
        .unwrap()
        .unwrap()
        .with_probe_cache(false);
    let config = WinnowConfig { algorithm: Algorithm::Bnl, ..WinnowConfig::default() };
    let (winners, stats) = winnow(&rows, &uncached, &config).unwrap();
    assert_eq!(sorted(films_of(&winners)), ["m1", "m3"]);
    assert_eq!(stats.pair_comparisons, 3);
    assert_eq!(stats.ask_probes, 3);

    let (nl_winners, nl_stats) = winnow(&rows, &uncached, &WinnowConfig::default()).unwrap();
    assert_eq!(films_of(&nl_winners), ["m1"]);
    assert_eq!(nl_stats.pair_comparisons, 6);
    assert_eq!(nl_stats.ask_probes, 6);

    // with the cache, repeated runs pay only for distinct directed pairs
    let cached = PreferenceRelation::for_query(&query, &backend).unwrap().unwrap();
    let (_, first) = winnow(&rows, &cached, &config).unwrap();
    assert_eq!(first.ask_probes, 3);
    let (again, second) = winnow(&rows, &cached, &config).unwrap();
    assert_eq!(sorted(films_of(&again)), ["m1", "m3"]);
    assert_eq!(second.ask_probes, 0);
    println!("probe counts: bnl 3 of 3 comparisons, nl 6 of 6; a second cached run probes 0");
}

fn winnow_json(query: &PrefQuery, backend: &Backend, algorithm: Algorithm) -> String {
    let relation = PreferenceRelation::for_query(query, backend).unwrap().unwrap();
    let rows = backend.select(&query.base).unwrap();
    let config = WinnowConfig { algorithm, ..WinnowConfig::default() };
    let (winners, _) = winnow(&rows, &relation, &config).unwrap();
    solutions_to_json(&winners)
}

#[test]
fn a_remote_endpoint_reproduces_local_answers_byte_for_byte() {
    let dataset = common::films();
    let server = common::StubServer::serving(dataset.clone());
    let local = Backend::Local(dataset.clone());
    let remote = Backend::Remote(RemoteEndpoint::new(server.url()));

    let longest =
        parse_pref_query(&common::fixture("queries/films_longer_same_genre.rq")).unwrap();
    for algorithm in [Algorithm::Nl, Algorithm::Bnl] {
        assert_eq!(
            winnow_json(&longest, &local, algorithm),
            winnow_json(&longest, &remote, algorithm)
        );
    }

    // rewriting runs entirely on the endpoint
    let produced = rewrite(&longest).unwrap().query;
    assert_eq!(
        solutions_to_json(&local.select(&produced).unwrap()),
        solutions_to_json(&remote.select(&produced).unwrap())
    );
    let handwritten =
        parse_query(&common::fixture("queries/films_longer_same_genre_rewritten.rq")).unwrap();
    assert_eq!(
        solutions_to_json(&local.select(&handwritten).unwrap()),
        solutions_to_json(&remote.select(&handwritten).unwrap())
    );

    // extrinsic preference: the ASK probes travel over the wire as well
    let sequels =
        parse_pref_query(&common::fixture("queries/film_sequel_pref.rq")).unwrap();
    for algorithm in [Algorithm::Nl, Algorithm::Bnl] {
        assert_eq!(
            winnow_json(&sequels, &local, algorithm),
            winnow_json(&sequels, &remote, algorithm)
        );
    }
    println!("local and remote evaluation produced identical result bytes for every strategy");
}
