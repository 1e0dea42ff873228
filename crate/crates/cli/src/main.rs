//! Command-line runner: evaluate a query with an optional PREFER clause
//! against a Turtle file or a SPARQL endpoint, choosing how the preferred
//! results are computed.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sprefql::backend::results::{ask_to_json, solutions_to_json};
use sprefql::backend::{Backend, BackendError, RemoteEndpoint};
use sprefql::pref::PreferenceRelation;
use sprefql::rdf::{load_turtle, Dataset, SolutionSeq};
use sprefql::rewrite::{rewrite, RewriteError};
use sprefql::sparql::{
    Element, GroupPattern, OrderKey, Projection, Query, QueryForm, ValuesBlock,
};
use sprefql::sprefql::{parse_pref_query, validate, PrefQuery};
use sprefql::winnow::{check_spo, winnow, Algorithm, WinnowConfig, WinnowStats, DEFAULT_SPO_CAP};

/// Evaluate SPARQL queries extended with a PREFER solution modifier.
#[derive(Parser)]
#[command(name = "sprefql", version, arg_required_else_help = true)]
struct Cli {
    /// Query file; `-` reads standard input.
    #[arg(long, value_name = "FILE")]
    query: PathBuf,

    /// Turtle file to load and query in memory.
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,

    /// SPARQL endpoint URL to query over HTTP.
    #[arg(long, value_name = "URL", env = "SPREFQL_ENDPOINT")]
    endpoint: Option<String>,

    /// How to compute the preferred results.
    #[arg(long, value_enum, default_value_t = Strategy::Nl)]
    strategy: Strategy,

    /// BNL window capacity in rows; unbounded when omitted.
    #[arg(long, value_name = "ROWS")]
    window: Option<usize>,

    /// Output format for results and measurements.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Shuffle the base solutions with this seed before winnowing, to
    /// explore the order sensitivity of bnl.
    #[arg(long, value_name = "SEED")]
    seed_order: Option<u64>,

    /// Measure instead of printing results: one warmup run, then the
    /// median of five.
    #[arg(long, conflicts_with = "lint_spo")]
    bench: bool,

    /// Check whether the preference relation is a strict partial order
    /// over the base solutions; exits 1 with a witness when it is not.
    #[arg(long)]
    lint_spo: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    /// Winnow by Nested Loops.
    Nl,
    /// Winnow by Blocked Nested Loops.
    Bnl,
    /// Rewrite to a plain query with FILTER NOT EXISTS and run that.
    Rewrite,
    /// Ignore the preference and answer the base query.
    BaseOnly,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

// 2 usage or parse, 3 ill-formed PREFER, 4 unsupported feature,
// 5 backend, 1 anything else
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }

    fn other(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }
}

impl From<BackendError> for Failure {
    fn from(e: BackendError) -> Failure {
        let code = match &e {
            BackendError::Eval(_) => 4,
            _ => 5,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<RewriteError> for Failure {
    fn from(e: RewriteError) -> Failure {
        let code = match &e {
            RewriteError::IllFormed(_) => 3,
            _ => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    if cli.window.is_some() && cli.strategy != Strategy::Bnl {
        return Err(Failure::usage("--window only applies to the bnl strategy"));
    }
    if cli.seed_order.is_some()
        && !matches!(cli.strategy, Strategy::Nl | Strategy::Bnl)
        && !cli.lint_spo
    {
        return Err(Failure::usage("--seed-order only applies to the nl and bnl strategies"));
    }

    let query_text = read_query(&cli.query)?;
    let query = parse_pref_query(&query_text)
        .map_err(|e| Failure { code: 2, message: e.to_string() })?;
    validate(&query).map_err(|e| Failure { code: 3, message: e.to_string() })?;

    let backend = build_backend(cli)?;
    if cli.lint_spo {
        return lint(&query, &backend);
    }
    if cli.bench {
        bench(cli, &query, &backend)?;
        return Ok(ExitCode::SUCCESS);
    }

    let outcome = execute(cli, &query, &backend, true)?;
    match &outcome.output {
        Output::Rows(seq) => print_rows(cli.format, seq),
        Output::Boolean(value) => print_boolean(cli.format, *value),
    }
    Ok(ExitCode::SUCCESS)
}

fn read_query(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::other(format!("cannot read standard input: {}", e)))?;
        return Ok(text);
    }
    std::fs::read_to_string(path)
        .map_err(|e| Failure::other(format!("cannot read {}: {}", path.display(), e)))
}

fn build_backend(cli: &Cli) -> Result<Backend, Failure> {
    match (&cli.data, &cli.endpoint) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::other(format!("cannot read {}: {}", path.display(), e)))?;
            let dataset = load_turtle(&text)
                .map_err(|e| Failure { code: 2, message: e.to_string() })?;
            Ok(Backend::Local(dataset))
        }
        (None, Some(url)) => Ok(Backend::Remote(RemoteEndpoint::new(url))),
        (Some(_), Some(_)) => {
            Err(Failure::usage("choose either --data or --endpoint, not both"))
        }
        (None, None) => Err(Failure::usage(
            "one of --data or --endpoint (or SPREFQL_ENDPOINT) is required",
        )),
    }
}

enum Output {
    Rows(SolutionSeq),
    Boolean(bool),
}

struct RunOutcome {
    output: Output,
    stats: WinnowStats,
}

fn execute(
    cli: &Cli,
    query: &PrefQuery,
    backend: &Backend,
    warn: bool,
) -> Result<RunOutcome, Failure> {
    if query.base.form == QueryForm::Ask {
        // a PREFER clause on ASK is rejected by validation, so this is a
        // plain passthrough
        let value = backend.ask(&query.base)?;
        return Ok(RunOutcome { output: Output::Boolean(value), stats: WinnowStats::default() });
    }
    match cli.strategy {
        Strategy::BaseOnly => Ok(RunOutcome {
            output: Output::Rows(backend.select(&query.base)?),
            stats: WinnowStats::default(),
        }),
        Strategy::Rewrite => {
            let rewritten = rewrite(query)?;
            Ok(RunOutcome {
                output: Output::Rows(backend.select(&rewritten.query)?),
                stats: WinnowStats::default(),
            })
        }
        Strategy::Nl | Strategy::Bnl => {
            let Some(relation) = PreferenceRelation::for_query(query, backend)
                .map_err(|e| Failure { code: 3, message: e.to_string() })?
            else {
                return Ok(RunOutcome {
                    output: Output::Rows(backend.select(&query.base)?),
                    stats: WinnowStats::default(),
                });
            };
            // winnowing needs the full base result: hold the row-limiting
            // modifiers back and reapply them to the winners
            let (stripped, modifiers) = split_modifiers(&query.base);
            let mut rows = backend.select(&stripped)?;
            if let Some(seed) = cli.seed_order {
                rows.rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            }
            let algorithm =
                if cli.strategy == Strategy::Nl { Algorithm::Nl } else { Algorithm::Bnl };
            if warn
                && algorithm == Algorithm::Bnl
                && query.prefer.as_ref().is_some_and(|c| c.body.is_intrinsic())
                && rows.len() <= DEFAULT_SPO_CAP
            {
                if let Some(violation) = check_spo(&rows, &relation, DEFAULT_SPO_CAP)? {
                    eprintln!(
                        "warning: the preference relation is not a strict partial order \
                         over the input ({}); bnl output may depend on input order and \
                         window size",
                        violation
                    );
                }
            }
            let config = WinnowConfig {
                algorithm,
                window_capacity: cli.window,
                ..WinnowConfig::default()
            };
            let (winners, stats) = winnow(&rows, &relation, &config)?;
            let output = apply_modifiers(winners, &modifiers)?;
            Ok(RunOutcome { output: Output::Rows(output), stats })
        }
    }
}

struct Modifiers {
    order_by: Vec<OrderKey>,
    limit: Option<usize>,
    offset: Option<usize>,
}

fn split_modifiers(base: &Query) -> (Query, Modifiers) {
    let mut stripped = base.clone();
    let modifiers = Modifiers {
        order_by: std::mem::take(&mut stripped.order_by),
        limit: stripped.limit.take(),
        offset: stripped.offset.take(),
    };
    (stripped, modifiers)
}

/// Reapplies ORDER BY, LIMIT and OFFSET by evaluating a VALUES query over
/// the winners, so the ordering semantics stay those of the evaluator.
/// Order keys can only see projected variables at this point.
fn apply_modifiers(seq: SolutionSeq, modifiers: &Modifiers) -> Result<SolutionSeq, Failure> {
    if modifiers.order_by.is_empty() && modifiers.limit.is_none() && modifiers.offset.is_none()
    {
        return Ok(seq);
    }
    let values = ValuesBlock {
        vars: seq.vars.clone(),
        rows: seq
            .rows
            .iter()
            .map(|row| seq.vars.iter().map(|v| row.get(v).cloned()).collect())
            .collect(),
    };
    let query = Query {
        form: QueryForm::Select,
        distinct: false,
        projection: Projection::Vars(seq.vars.clone()),
        pattern: GroupPattern::new(vec![Element::Values(values)]),
        group_by: vec![],
        having: vec![],
        order_by: modifiers.order_by.clone(),
        limit: modifiers.limit,
        offset: modifiers.offset,
    };
    Ok(Backend::Local(Dataset::new()).select(&query)?)
}

fn lint(query: &PrefQuery, backend: &Backend) -> Result<ExitCode, Failure> {
    let Some(relation) = PreferenceRelation::for_query(query, backend)
        .map_err(|e| Failure { code: 3, message: e.to_string() })?
    else {
        println!("the query has no PREFER clause; nothing to check");
        return Ok(ExitCode::SUCCESS);
    };
    let (stripped, _) = split_modifiers(&query.base);
    let rows = backend.select(&stripped)?;
    let checked = rows.len().min(DEFAULT_SPO_CAP);
    match check_spo(&rows, &relation, DEFAULT_SPO_CAP)? {
        None => {
            println!(
                "strict partial order over the {} checked solution(s)",
                checked
            );
            Ok(ExitCode::SUCCESS)
        }
        Some(violation) => {
            println!("not a strict partial order: {}", violation);
            Ok(ExitCode::FAILURE)
        }
    }
}

const BENCH_COLUMNS: [&str; 6] = [
    "exec_ms",
    "num_res",
    "pair_comparisons",
    "ask_probes",
    "max_window_bindsets",
    "max_window_bindings",
];

fn bench(cli: &Cli, query: &PrefQuery, backend: &Backend) -> Result<(), Failure> {
    execute(cli, query, backend, false)?;
    let mut runs = Vec::new();
    for _ in 0..5 {
        let started = Instant::now();
        let outcome = execute(cli, query, backend, false)?;
        let exec_ms = started.elapsed().as_secs_f64() * 1e3;
        let num_res = match &outcome.output {
            Output::Rows(seq) => seq.len(),
            Output::Boolean(_) => 1,
        };
        runs.push((exec_ms, num_res, outcome.stats));
    }
    runs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (exec_ms, num_res, stats) = runs[2];

    let cells = [
        format!("{:.3}", exec_ms),
        num_res.to_string(),
        stats.pair_comparisons.to_string(),
        stats.ask_probes.to_string(),
        stats.max_window_bindsets.to_string(),
        stats.max_window_bindings.to_string(),
    ];
    match cli.format {
        Format::Table => {
            let headers: Vec<String> = BENCH_COLUMNS.iter().map(|c| c.to_string()).collect();
            print_aligned(&headers, &[cells.to_vec()]);
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(std::io::stdout());
            writer.write_record(BENCH_COLUMNS).and_then(|_| writer.write_record(&cells))
                .and_then(|_| writer.flush().map_err(csv::Error::from))
                .map_err(|e| Failure::other(e.to_string()))?;
        }
        Format::Json => {
            let doc = serde_json::json!({
                "exec_ms": exec_ms,
                "num_res": num_res,
                "pair_comparisons": stats.pair_comparisons,
                "ask_probes": stats.ask_probes,
                "max_window_bindsets": stats.max_window_bindsets,
                "max_window_bindings": stats.max_window_bindings,
            });
            println!("{}", doc);
        }
    }
    Ok(())
}

fn print_rows(format: Format, seq: &SolutionSeq) {
    match format {
        Format::Table => {
            let headers: Vec<String> =
                seq.vars.iter().map(|v| format!("?{}", v.name())).collect();
            let rows: Vec<Vec<String>> = seq
                .rows
                .iter()
                .map(|row| {
                    seq.vars
                        .iter()
                        .map(|v| row.get(v).map(|t| t.to_string()).unwrap_or_default())
                        .collect()
                })
                .collect();
            print_aligned(&headers, &rows);
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(std::io::stdout());
            let _ = writer.write_record(seq.vars.iter().map(|v| v.name()));
            for row in &seq.rows {
                let _ = writer.write_record(
                    seq.vars
                        .iter()
                        .map(|v| row.get(v).map(|t| t.to_string()).unwrap_or_default()),
                );
            }
            let _ = writer.flush();
        }
        Format::Json => println!("{}", solutions_to_json(seq)),
    }
}

fn print_boolean(format: Format, value: bool) {
    match format {
        Format::Table | Format::Csv => println!("{}", value),
        Format::Json => println!("{}", ask_to_json(value)),
    }
}

fn print_aligned(headers: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut out = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(cell);
            let pad = widths[i].saturating_sub(cell.chars().count());
            if i + 1 < cells.len() {
                out.extend(std::iter::repeat_n(' ', pad));
            }
        }
        out
    };
    println!("{}", line(headers));
    println!("{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("--"));
    for row in rows {
        println!("{}", line(row));
    }
}
