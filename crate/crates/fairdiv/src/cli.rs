//! Command-line front end.
//!
//! Five subcommands cover the library surface: `eval` scores a given
//! allocation, `solve` runs a constructive algorithm, `audit` checks the
//! implication rules against brute force, `gallery` exports the built-in
//! catalog, and `oracle` answers exact ground-truth queries.
//!
//! Contract: stdout always carries exactly one JSON document (even on
//! failure, where it is `{"error": ...}`); human-readable commentary goes to
//! stderr. Exit codes: 0 success, 1 a domain verdict is negative (an
//! assertion failed, a rule was violated, no allocation exists, a
//! precondition does not hold), 2 the invocation itself was bad.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algorithms::{detect_common_order, ordered_efx, round_robin, AlgorithmError};
use crate::gallery::{self, GalleryItem};
use crate::instance::{Allocation, Instance};
use crate::measures::{full_report, maximin_share, MmsQuery};
use crate::oracle::{
    audit_all, audit_implication, best_alpha, check_monotonicity, default_budget,
    exact_fair_search, find_rule, rule_catalog, AuditReport, AuditSpace, OracleError,
};
use crate::value::DECIMAL_SIG_DIGITS;
use crate::{FairnessReport, MeasureConfig, Notion, Ratio, Value};

/// Exact fairness ratios for indivisible goods: evaluation, construction,
/// and brute-force verification.
#[derive(Parser)]
#[command(name = "fairdiv", version, color = clap::ColorChoice::Never)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every fairness ratio of an allocation, exactly
    Eval(EvalArgs),
    /// Run a constructive algorithm and evaluate what it builds
    Solve(SolveArgs),
    /// Check implication rules between fairness notions against brute force
    Audit(AuditArgs),
    /// Inspect or export the built-in instance catalog
    Gallery {
        #[command(subcommand)]
        command: GalleryCommand,
    },
    /// Exact ground truth: shares, best ratios, witnesses, monotonicity
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Args)]
struct EvalArgs {
    /// Instance JSON file, or the id of a gallery entry
    instance: String,
    /// Allocation JSON file (defaults to the gallery entry's allocation)
    allocation: Option<PathBuf>,
    /// Override a gallery parameter (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Exit 1 unless the aggregate meets the bound, e.g. mms>=2/3 (repeatable)
    #[arg(long = "assert", value_name = "NOTION>=ALPHA")]
    asserts: Vec<String>,
    /// Let zero-valued goods count as removable when checking EFX
    #[arg(long)]
    strict_efx: bool,
    /// Render the stderr summary as decimals instead of exact rationals
    #[arg(long)]
    decimal: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file, or the id of a gallery entry
    instance: String,
    /// Which constructive procedure to run
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Override a gallery parameter (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Exit 1 unless the aggregate meets the bound, e.g. ef1>=1 (repeatable)
    #[arg(long = "assert", value_name = "NOTION>=ALPHA")]
    asserts: Vec<String>,
    /// Render the stderr summary as decimals instead of exact rationals
    #[arg(long)]
    decimal: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    /// Agents take turns picking their best remaining good
    RoundRobin,
    /// Envy-cycle elimination along a shared ranking of the goods
    OrderedEfx,
}

#[derive(Args)]
struct AuditArgs {
    /// Audit a single rule by id
    #[arg(long, conflicts_with = "all")]
    rule: Option<String>,
    /// Audit every rule that applies to the requested agent counts
    #[arg(long)]
    all: bool,
    /// Enumerate the whole space instead of sampling it
    #[arg(long, conflicts_with = "trials")]
    exhaustive: bool,
    /// Number of random instances to sample per rule
    #[arg(long, value_name = "T")]
    trials: Option<usize>,
    /// Agent counts to audit, comma-separated
    #[arg(long, value_name = "LIST", default_value = "2,3")]
    n: String,
    /// Maximum number of goods per instance
    #[arg(long, value_name = "M", default_value_t = 4)]
    m: usize,
    /// Inclusive integer range lo..hi the good values are drawn from
    #[arg(long, value_name = "LO..HI", default_value = "0..2")]
    values: String,
    /// Premise thresholds to sweep, comma-separated rationals in (0, 1]
    #[arg(long, value_name = "LIST", default_value = "1/4,1/2,3/4,1")]
    alphas: String,
    /// Seed for the sampled space
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// List every entry with its parameters and defaults
    List,
    /// Build one entry and write instance.json, allocation.json, expected.json
    Emit {
        /// Entry id
        id: String,
        /// Override a gallery parameter (repeatable)
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Directory to write the three files into
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact maximin share of one agent, splitting all goods into k parts
    Mms {
        /// Instance JSON file, or the id of a gallery entry
        instance: String,
        /// Override a gallery parameter (repeatable)
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Agent, 1-based
        #[arg(long)]
        agent: usize,
        /// Number of parts (defaults to the number of agents)
        #[arg(long)]
        k: Option<usize>,
    },
    /// Largest aggregate a notion can reach on any allocation of the instance
    BestAlpha {
        /// Instance JSON file, or the id of a gallery entry
        instance: String,
        /// Override a gallery parameter (repeatable)
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Fairness notion: ef, ef1, efx, mms, or pmms
        #[arg(long)]
        notion: String,
    },
    /// Search for an allocation meeting a threshold; exit 1 if none exists
    Exists {
        /// Instance JSON file, or the id of a gallery entry
        instance: String,
        /// Override a gallery parameter (repeatable)
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Fairness notion: ef, ef1, efx, mms, or pmms
        #[arg(long)]
        notion: String,
        /// Threshold to meet, a rational like 2/3
        #[arg(long)]
        alpha: String,
    },
    /// Spot-check that granting extra goods never lowers a maximin share
    Monotonicity {
        /// Instance JSON file, or the id of a gallery entry
        instance: String,
        /// Override a gallery parameter (repeatable)
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Agent, 1-based
        #[arg(long)]
        agent: usize,
        /// Number of random supersets to try
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Seed for the random supersets
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Entry point for the `fairdiv` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            // Help and version are explicit requests for human-readable text.
            let _ = err.print();
            return 0;
        }
        Err(err) => {
            let message = err.to_string();
            eprint!("{message}");
            emit(&json!({ "error": message.trim_end() }));
            return 2;
        }
    };
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Gallery { command } => cmd_gallery(command),
        Command::Oracle { command } => cmd_oracle(command),
    };
    match result {
        Ok(outcome) => {
            emit(&outcome.document);
            outcome.code
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            emit(&json!({ "error": failure.message }));
            failure.code
        }
    }
}

fn emit(document: &serde_json::Value) {
    let text = serde_json::to_string_pretty(document).expect("JSON documents serialize");
    println!("{text}");
}

/// A command's JSON document plus the exit code it earned.
struct Outcome {
    document: serde_json::Value,
    code: i32,
}

impl Outcome {
    fn ok(document: serde_json::Value) -> Self {
        Outcome { document, code: 0 }
    }
}

/// An error that ends the run: `code` 2 for bad invocations, 1 for negative
/// domain verdicts.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn verdict(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

fn oracle_failure(err: OracleError) -> Failure {
    Failure::usage(err.to_string())
}

/// An instance plus, when it came from the gallery, the full catalog item.
struct Source {
    instance: Instance,
    gallery: Option<GalleryItem>,
}

/// Treat `spec` as a file if one exists at that path, otherwise as a gallery
/// entry id. `--param` overrides only make sense for gallery entries.
fn load_instance(spec: &str, params: &[String]) -> Result<Source, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        if !params.is_empty() {
            return Err(Failure::usage(format!(
                "`{spec}` is a file; --param only applies to gallery entries"
            )));
        }
        let text = fs::read_to_string(path)
            .map_err(|err| Failure::usage(format!("cannot read `{spec}`: {err}")))?;
        let instance = Instance::parse_json(&text)
            .map_err(|err| Failure::usage(format!("`{spec}`: {err}")))?;
        return Ok(Source {
            instance,
            gallery: None,
        });
    }
    if gallery::find_entry(spec).is_some() {
        let overrides = parse_param_overrides(params)?;
        let item =
            gallery::build(spec, &overrides).map_err(|err| Failure::usage(err.to_string()))?;
        return Ok(Source {
            instance: item.instance.clone(),
            gallery: Some(item),
        });
    }
    Err(Failure::usage(format!(
        "`{spec}` is neither a readable file nor a gallery entry (see `fairdiv gallery list`)"
    )))
}

fn parse_param_overrides(params: &[String]) -> Result<BTreeMap<String, Value>, Failure> {
    let mut overrides = BTreeMap::new();
    for raw in params {
        let Some((name, text)) = raw.split_once('=') else {
            return Err(Failure::usage(format!(
                "malformed --param `{raw}` (expected NAME=VALUE)"
            )));
        };
        let value = Value::from_str(text.trim())
            .map_err(|err| Failure::usage(format!("--param {name}: {err}")))?;
        overrides.insert(name.trim().to_string(), value);
    }
    Ok(overrides)
}

struct Assertion {
    notion: Notion,
    alpha: Value,
}

fn parse_assertions(raw: &[String]) -> Result<Vec<Assertion>, Failure> {
    raw.iter()
        .map(|spec| {
            let Some((notion, alpha)) = spec.split_once(">=") else {
                return Err(Failure::usage(format!(
                    "malformed --assert `{spec}` (expected NOTION>=ALPHA)"
                )));
            };
            let notion = notion.trim().parse::<Notion>().map_err(Failure::usage)?;
            let alpha = Value::from_str(alpha.trim())
                .map_err(|err| Failure::usage(format!("--assert {spec}: {err}")))?;
            Ok(Assertion { notion, alpha })
        })
        .collect()
}

/// Print each assertion's verdict to stderr; return 1 if any failed.
fn apply_assertions(report: &FairnessReport, asserts: &[Assertion], decimal: bool) -> i32 {
    let mut code = 0;
    for assertion in asserts {
        let actual = report.aggregate(assertion.notion);
        let ok = actual.at_least(&assertion.alpha);
        eprintln!(
            "assert {} >= {}: {} (actual {})",
            assertion.notion.as_str(),
            render_value(&assertion.alpha, decimal),
            if ok { "ok" } else { "FAILED" },
            render_ratio(actual, decimal),
        );
        if !ok {
            code = 1;
        }
    }
    code
}

fn render_value(value: &Value, decimal: bool) -> String {
    if decimal {
        value.to_decimal(DECIMAL_SIG_DIGITS)
    } else {
        value.to_string()
    }
}

fn render_ratio(ratio: &Ratio, decimal: bool) -> String {
    match ratio.as_finite() {
        Some(value) => render_value(value, decimal),
        None => "unbounded".to_string(),
    }
}

fn summarize_report(report: &FairnessReport, decimal: bool) {
    let line = Notion::ALL
        .iter()
        .map(|&notion| {
            format!(
                "{} = {}",
                notion.as_str(),
                render_ratio(report.aggregate(notion), decimal)
            )
        })
        .collect::<Vec<_>>()
        .join("  ");
    eprintln!("{line}");
}

fn cmd_eval(args: EvalArgs) -> Result<Outcome, Failure> {
    let asserts = parse_assertions(&args.asserts)?;
    let source = load_instance(&args.instance, &args.params)?;
    let allocation = match (&args.allocation, &source.gallery) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|err| {
                Failure::usage(format!("cannot read `{}`: {err}", path.display()))
            })?;
            Allocation::parse_json(&text, &source.instance)
                .map_err(|err| Failure::usage(format!("`{}`: {err}", path.display())))?
        }
        (None, Some(item)) => item.allocation.clone(),
        (None, None) => {
            return Err(Failure::usage(
                "an allocation file is required when the instance comes from a file",
            ))
        }
    };
    let config = MeasureConfig {
        strict_efx: args.strict_efx,
        ..MeasureConfig::default()
    };
    let report = full_report(&source.instance, &allocation, &config)
        .map_err(|err| Failure::usage(err.to_string()))?;
    summarize_report(&report, args.decimal);
    let code = apply_assertions(&report, &asserts, args.decimal);
    let document = serde_json::to_value(&report).expect("reports serialize");
    Ok(Outcome { document, code })
}

fn cmd_solve(args: SolveArgs) -> Result<Outcome, Failure> {
    let asserts = parse_assertions(&args.asserts)?;
    let source = load_instance(&args.instance, &args.params)?;
    let inst = &source.instance;
    let (name, allocation) = match args.algorithm {
        Algorithm::RoundRobin => {
            let order: Vec<usize> = (0..inst.agent_count()).collect();
            let allocation =
                round_robin(inst, &order).map_err(|err| Failure::usage(err.to_string()))?;
            ("round-robin", allocation)
        }
        Algorithm::OrderedEfx => {
            let order = detect_common_order(inst);
            let allocation = ordered_efx(inst, &order).map_err(|err| match err {
                AlgorithmError::NoCommonOrder => Failure::verdict(
                    "the agents do not rank the goods in a common order, \
                     so the ordered EFX routine does not apply",
                ),
                other => Failure::usage(other.to_string()),
            })?;
            ("ordered-efx", allocation)
        }
    };
    let report = full_report(inst, &allocation, &MeasureConfig::default())
        .map_err(|err| Failure::usage(err.to_string()))?;
    summarize_report(&report, args.decimal);
    let code = apply_assertions(&report, &asserts, args.decimal);
    let document = json!({
        "algorithm": name,
        "allocation": allocation,
        "report": report,
    });
    Ok(Outcome { document, code })
}

fn cmd_audit(args: AuditArgs) -> Result<Outcome, Failure> {
    if args.rule.is_none() && !args.all {
        return Err(Failure::usage("pass --rule <ID> or --all"));
    }
    let agents = parse_agent_list(&args.n)?;
    let (lo, hi) = parse_value_range(&args.values)?;
    let alphas = parse_alpha_list(&args.alphas)?;
    let space = if args.exhaustive {
        AuditSpace::Exhaustive {
            agents,
            max_goods: args.m,
            values: (lo..=hi).collect(),
        }
    } else {
        AuditSpace::Random {
            trials: args.trials.unwrap_or(100),
            agents,
            max_goods: args.m,
            values: (lo, hi),
            seed: args.seed,
        }
    };
    let config = MeasureConfig::default();
    let budget = default_budget();
    let reports: Vec<AuditReport> = match &args.rule {
        Some(id) => {
            let rule = find_rule(id).ok_or_else(|| {
                let known: Vec<&str> = rule_catalog().iter().map(|rule| rule.id).collect();
                Failure::usage(format!(
                    "unknown rule `{id}` (known rules: {})",
                    known.join(", ")
                ))
            })?;
            vec![audit_implication(rule, &space, &alphas, &config, budget)
                .map_err(oracle_failure)?]
        }
        None => audit_all(&space, &alphas, &config, budget).map_err(oracle_failure)?,
    };
    let mut all_passed = true;
    for report in &reports {
        let status = if report.passed() { "ok" } else { "VIOLATED" };
        eprintln!(
            "rule {}: {} ({} instances, {} allocations, {:.2?})",
            report.rule, status, report.instances_checked, report.allocations_checked,
            report.elapsed,
        );
        all_passed &= report.passed();
    }
    let document = if args.rule.is_some() {
        serde_json::to_value(&reports[0]).expect("reports serialize")
    } else {
        serde_json::to_value(&reports).expect("reports serialize")
    };
    Ok(Outcome {
        document,
        code: if all_passed { 0 } else { 1 },
    })
}

fn parse_agent_list(raw: &str) -> Result<Vec<usize>, Failure> {
    let agents: Vec<usize> = raw
        .split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse::<usize>()
                .map_err(|_| Failure::usage(format!("--n: `{part}` is not an agent count")))
        })
        .collect::<Result<_, _>>()?;
    if agents.is_empty() {
        return Err(Failure::usage("--n needs at least one agent count"));
    }
    Ok(agents)
}

fn parse_value_range(raw: &str) -> Result<(u64, u64), Failure> {
    let parsed = raw.split_once("..").and_then(|(lo, hi)| {
        let lo = lo.trim().parse::<u64>().ok()?;
        let hi = hi.trim().parse::<u64>().ok()?;
        Some((lo, hi))
    });
    match parsed {
        Some((lo, hi)) if lo <= hi => Ok((lo, hi)),
        _ => Err(Failure::usage(format!(
            "--values: `{raw}` is not an integer range LO..HI with LO <= HI"
        ))),
    }
}

fn parse_alpha_list(raw: &str) -> Result<Vec<Value>, Failure> {
    let alphas: Vec<Value> = raw
        .split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            Value::from_str(part)
                .map_err(|err| Failure::usage(format!("--alphas: {err}")))
        })
        .collect::<Result<_, _>>()?;
    if alphas.is_empty() {
        return Err(Failure::usage("--alphas needs at least one threshold"));
    }
    Ok(alphas)
}

fn cmd_gallery(command: GalleryCommand) -> Result<Outcome, Failure> {
    match command {
        GalleryCommand::List => {
            let entries: Vec<serde_json::Value> = gallery::list_entries()
                .iter()
                .map(|entry| {
                    let params: Vec<serde_json::Value> = entry
                        .params
                        .iter()
                        .map(|(name, default)| json!({ "name": name, "default": default }))
                        .collect();
                    json!({ "id": entry.id, "summary": entry.summary, "params": params })
                })
                .collect();
            Ok(Outcome::ok(serde_json::Value::Array(entries)))
        }
        GalleryCommand::Emit { id, params, out } => {
            let overrides = parse_param_overrides(&params)?;
            let item =
                gallery::build(&id, &overrides).map_err(|err| Failure::usage(err.to_string()))?;
            fs::create_dir_all(&out).map_err(|err| {
                Failure::usage(format!("cannot create `{}`: {err}", out.display()))
            })?;
            let expected = serde_json::to_value(&item.expected).expect("ratios serialize");
            let expected_doc = json!({
                "id": id,
                "expected": expected,
                "note": item.note,
            });
            let files = [
                ("instance.json", item.instance.to_json()),
                ("allocation.json", item.allocation.to_json()),
                (
                    "expected.json",
                    serde_json::to_string_pretty(&expected_doc).expect("JSON serializes"),
                ),
            ];
            for (name, text) in &files {
                let path = out.join(name);
                fs::write(&path, format!("{text}\n")).map_err(|err| {
                    Failure::usage(format!("cannot write `{}`: {err}", path.display()))
                })?;
            }
            eprintln!(
                "wrote instance.json, allocation.json, expected.json to {}",
                out.display()
            );
            Ok(Outcome::ok(json!({
                "id": id,
                "dir": out.display().to_string(),
                "files": ["instance.json", "allocation.json", "expected.json"],
                "expected": expected,
                "note": item.note,
            })))
        }
    }
}

fn cmd_oracle(command: OracleCommand) -> Result<Outcome, Failure> {
    let config = MeasureConfig::default();
    let budget = default_budget();
    match command {
        OracleCommand::Mms {
            instance,
            params,
            agent,
            k,
        } => {
            let source = load_instance(&instance, &params)?;
            let inst = &source.instance;
            let agent = resolve_agent(agent, inst)?;
            let parts = k.unwrap_or(inst.agent_count());
            if parts == 0 {
                return Err(Failure::usage("--k must be at least 1"));
            }
            let query = MmsQuery::whole(inst, agent, parts);
            let share = maximin_share(inst, &query, &config)
                .map_err(|err| Failure::usage(err.to_string()))?;
            eprintln!("agent {} splitting all goods {parts} ways: {share}", agent + 1);
            Ok(Outcome::ok(serde_json::Value::String(share.to_string())))
        }
        OracleCommand::BestAlpha {
            instance,
            params,
            notion,
        } => {
            let source = load_instance(&instance, &params)?;
            let notion = notion.parse::<Notion>().map_err(Failure::usage)?;
            let (best, witness) = best_alpha(&source.instance, notion, &config, budget)
                .map_err(oracle_failure)?;
            eprintln!("best {} = {}", notion.as_str(), render_ratio(&best, false));
            Ok(Outcome::ok(json!({
                "notion": notion.as_str(),
                "best": best,
                "witness": witness,
            })))
        }
        OracleCommand::Exists {
            instance,
            params,
            notion,
            alpha,
        } => {
            let source = load_instance(&instance, &params)?;
            let notion = notion.parse::<Notion>().map_err(Failure::usage)?;
            let alpha = Value::from_str(&alpha)
                .map_err(|err| Failure::usage(format!("--alpha: {err}")))?;
            let witness = exact_fair_search(&source.instance, notion, &alpha, &config, budget)
                .map_err(oracle_failure)?;
            let exists = witness.is_some();
            eprintln!(
                "{}-{} allocation: {}",
                alpha,
                notion.as_str(),
                if exists { "found" } else { "none exists" }
            );
            let document = json!({
                "notion": notion.as_str(),
                "alpha": alpha.to_string(),
                "exists": exists,
                "witness": witness,
            });
            Ok(Outcome {
                document,
                code: if exists { 0 } else { 1 },
            })
        }
        OracleCommand::Monotonicity {
            instance,
            params,
            agent,
            trials,
            seed,
        } => {
            let source = load_instance(&instance, &params)?;
            let agent = resolve_agent(agent, &source.instance)?;
            let report = check_monotonicity(&source.instance, agent, trials, seed, &config)
                .map_err(oracle_failure)?;
            let passed = report.passed();
            eprintln!(
                "monotonicity over {} supersets: {}",
                report.trials,
                if passed { "ok" } else { "VIOLATED" }
            );
            let document = serde_json::to_value(&report).expect("reports serialize");
            Ok(Outcome {
                document,
                code: if passed { 0 } else { 1 },
            })
        }
    }
}

/// Convert a 1-based agent index from the command line to 0-based.
fn resolve_agent(agent: usize, inst: &Instance) -> Result<usize, Failure> {
    let n = inst.agent_count();
    if agent == 0 || agent > n {
        return Err(Failure::usage(format!(
            "--agent {agent} is out of range (this instance has agents 1..={n})"
        )));
    }
    Ok(agent - 1)
}
