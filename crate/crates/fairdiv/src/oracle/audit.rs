//! The implication-rule catalog and its brute-force audits.
//!
//! Each rule states that every allocation satisfying a premise notion at
//! threshold `alpha` also satisfies a conclusion notion at a guaranteed
//! bound. The audit enumerates every allocation of every instance in a
//! space, checks the implication, collects any violations with full
//! reproduction data, and tracks the premise-satisfying case with the
//! smallest conclusion ratio as the rule's tightness witness.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::instance::{Allocation, Instance};
use crate::measures::{MeasureConfig, Notion};
use crate::oracle::evaluate::{masks_from_assignment, Evaluator, Frac};
use crate::oracle::{
    advance_assignment, allocation_from_assignment, check_enumerable, space_size, OracleError,
};
use crate::value::{Ratio, Value, DECIMAL_SIG_DIGITS};

/// Violations stored in full per sweep; the total keeps counting past it.
const STORED_VIOLATIONS: usize = 25;

/// How a rule's premise threshold is chosen.
#[derive(Clone, Debug)]
pub enum AlphaMode {
    /// The implication is only claimed at this exact threshold.
    Fixed(Value),
    /// The implication holds for every threshold in (0, 1]; audits sweep
    /// the requested values.
    Swept,
}

/// One entry of the audit catalog: premise at `alpha` implies conclusion
/// at `guarantee(alpha, n)` whenever the agent count is applicable.
#[derive(Clone, Debug)]
pub struct ImplicationRule {
    pub id: &'static str,
    pub premise: Notion,
    pub conclusion: Notion,
    pub alpha_mode: AlphaMode,
    guarantee: fn(&Value, usize) -> Value,
    applicable: fn(usize) -> bool,
    /// Human-readable agent-count requirement, e.g. "n >= 3".
    pub requirement: &'static str,
}

impl ImplicationRule {
    pub fn applicable_to(&self, agents: usize) -> bool {
        (self.applicable)(agents)
    }

    /// The conclusion bound guaranteed with `agents` agents when the
    /// premise holds at `alpha`.
    pub fn guarantee(&self, alpha: &Value, agents: usize) -> Value {
        (self.guarantee)(alpha, agents)
    }

    /// The thresholds this rule is audited at, given the requested sweep.
    pub fn audit_alphas(&self, requested: &[Value]) -> Vec<Value> {
        match &self.alpha_mode {
            AlphaMode::Fixed(alpha) => vec![alpha.clone()],
            AlphaMode::Swept => requested.to_vec(),
        }
    }
}

fn frac_val(num: u64, den: u64) -> Value {
    Value::from_fraction(num, den)
}

/// The full catalog, in stable order.
pub fn rule_catalog() -> &'static [ImplicationRule] {
    static CATALOG: OnceLock<Vec<ImplicationRule>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        vec![
            ImplicationRule {
                id: "prop1",
                premise: Notion::Efx,
                conclusion: Notion::Ef1,
                alpha_mode: AlphaMode::Swept,
                guarantee: |alpha, _| alpha.clone(),
                applicable: |n| n >= 2,
                requirement: "n >= 2",
            },
            ImplicationRule {
                id: "prop2",
                premise: Notion::Efx,
                conclusion: Notion::Mms,
                alpha_mode: AlphaMode::Fixed(Value::one()),
                guarantee: |_, _| frac_val(2, 3),
                applicable: |n| n == 2 || n == 3,
                requirement: "n in {2, 3}",
            },
            ImplicationRule {
                id: "prop3",
                premise: Notion::Efx,
                conclusion: Notion::Mms,
                alpha_mode: AlphaMode::Fixed(Value::one()),
                guarantee: |_, _| frac_val(4, 7),
                applicable: |n| n >= 4,
                requirement: "n >= 4",
            },
            ImplicationRule {
                id: "prop4",
                premise: Notion::Efx,
                conclusion: Notion::Mms,
                alpha_mode: AlphaMode::Swept,
                guarantee: |alpha, n| {
                    let n_val = Value::from_int(n as u64);
                    &(alpha * &n_val) / &(alpha + &Value::from_int(2 * n as u64 - 2))
                },
                applicable: |n| n >= 2,
                requirement: "n >= 2",
            },
            ImplicationRule {
                id: "prop5",
                premise: Notion::Ef1,
                conclusion: Notion::Mms,
                alpha_mode: AlphaMode::Swept,
                guarantee: |alpha, n| alpha / &(&Value::from_int(n as u64 - 1) + alpha),
                applicable: |n| n >= 2,
                requirement: "n >= 2",
            },
            ImplicationRule {
                id: "prop6",
                premise: Notion::Efx,
                conclusion: Notion::Pmms,
                alpha_mode: AlphaMode::Swept,
                guarantee: |alpha, _| {
                    let two = Value::from_int(2);
                    &(&two * alpha) / &(&two + alpha)
                },
                applicable: |n| n >= 2,
                requirement: "n >= 2",
            },
            ImplicationRule {
                id: "prop7",
                premise: Notion::Ef1,
                conclusion: Notion::Pmms,
                alpha_mode: AlphaMode::Swept,
                guarantee: |alpha, _| alpha / &(&Value::one() + alpha),
                applicable: |n| n >= 3,
                requirement: "n >= 3",
            },
            ImplicationRule {
                id: "prop8",
                premise: Notion::Pmms,
                conclusion: Notion::Efx,
                alpha_mode: AlphaMode::Fixed(Value::one()),
                guarantee: |_, _| Value::one(),
                applicable: |n| n >= 2,
                requirement: "n >= 2",
            },
            ImplicationRule {
                id: "cor9",
                premise: Notion::Pmms,
                conclusion: Notion::Mms,
                alpha_mode: AlphaMode::Fixed(Value::one()),
                guarantee: |_, n| if n == 3 { frac_val(2, 3) } else { frac_val(4, 7) },
                applicable: |n| n >= 3,
                requirement: "n >= 3",
            },
            ImplicationRule {
                id: "prop10",
                premise: Notion::Pmms,
                conclusion: Notion::Mms,
                alpha_mode: AlphaMode::Swept,
                guarantee: |alpha, n| {
                    let spread = Value::from_int(2 * n as u64 - 2);
                    let shrink = alpha * &Value::from_int(n as u64 - 2);
                    alpha / &(&spread - &shrink)
                },
                applicable: |n| n >= 3,
                requirement: "n >= 3",
            },
            ImplicationRule {
                id: "prop12",
                premise: Notion::Pmms,
                conclusion: Notion::Ef1,
                alpha_mode: AlphaMode::Swept,
                guarantee: |alpha, _| alpha / &(&Value::from_int(2) - alpha),
                applicable: |n| n >= 2,
                requirement: "n >= 2",
            },
        ]
    })
}

/// Looks a rule up by its id.
pub fn find_rule(id: &str) -> Option<&'static ImplicationRule> {
    rule_catalog().iter().find(|rule| rule.id == id)
}

/// Where audit instances come from.
#[derive(Clone, Debug)]
pub enum AuditSpace {
    /// Every instance — up to relabeling of goods — with the given agent
    /// counts, at most `max_goods` goods, and entries drawn from `values`.
    Exhaustive {
        agents: Vec<usize>,
        max_goods: usize,
        values: Vec<u64>,
    },
    /// Seeded random integer instances, `values` inclusive on both ends.
    Random {
        trials: usize,
        agents: Vec<usize>,
        max_goods: usize,
        values: (u64, u64),
        seed: u64,
    },
    /// A fixed list of instances.
    Instances(Vec<Instance>),
}

impl AuditSpace {
    fn requested_agents(&self) -> Vec<usize> {
        let mut agents = match self {
            AuditSpace::Exhaustive { agents, .. } | AuditSpace::Random { agents, .. } => {
                agents.clone()
            }
            AuditSpace::Instances(list) => list.iter().map(Instance::agent_count).collect(),
        };
        agents.sort_unstable();
        agents.dedup();
        agents
    }

    fn describe(&self, audited_agents: &[usize], stream_seed: Option<u64>) -> serde_json::Value {
        match self {
            AuditSpace::Exhaustive {
                agents,
                max_goods,
                values,
            } => serde_json::json!({
                "kind": "exhaustive",
                "agents_requested": agents,
                "agents_audited": audited_agents,
                "max_goods": max_goods,
                "values": values,
            }),
            AuditSpace::Random {
                trials,
                agents,
                max_goods,
                values,
                seed,
            } => serde_json::json!({
                "kind": "random",
                "trials": trials,
                "agents_requested": agents,
                "agents_audited": audited_agents,
                "max_goods": max_goods,
                "values": [values.0, values.1],
                "seed": seed,
                "stream_seed": stream_seed,
            }),
            AuditSpace::Instances(list) => serde_json::json!({
                "kind": "instances",
                "count": list.len(),
                "agents_audited": audited_agents,
            }),
        }
    }
}

/// One audited (instance, allocation) pair with its ratios and bound.
#[derive(Clone, Debug)]
pub struct AuditCase {
    pub instance: Instance,
    pub allocation: Allocation,
    pub premise_ratio: Ratio,
    pub conclusion_ratio: Ratio,
    pub guarantee: Value,
    /// Conclusion ratio divided by the guarantee: 1 means exactly tight.
    pub margin: Ratio,
}

/// One premise threshold's audit outcome.
#[derive(Clone, Debug)]
pub struct AlphaSweep {
    pub alpha: Value,
    pub premise_satisfied: u64,
    pub violations_total: u64,
    pub violations: Vec<AuditCase>,
    pub tight_witness: Option<AuditCase>,
}

/// Outcome of auditing one rule over one space.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub rule: &'static str,
    pub premise: Notion,
    pub conclusion: Notion,
    pub requirement: &'static str,
    pub space: serde_json::Value,
    pub instances_checked: u64,
    pub allocations_checked: u64,
    pub sweeps: Vec<AlphaSweep>,
    /// Wall-clock time; kept out of the JSON so reports stay reproducible.
    pub elapsed: Duration,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.sweeps.iter().all(|sweep| sweep.violations_total == 0)
    }
}

fn value_json(v: &Value) -> serde_json::Value {
    serde_json::json!({
        "exact": v.to_string(),
        "decimal": v.to_decimal(DECIMAL_SIG_DIGITS),
    })
}

impl Serialize for AuditCase {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let instance: serde_json::Value = serde_json::from_str(&self.instance.to_json())
            .map_err(serde::ser::Error::custom)?;
        let mut s = serializer.serialize_struct("AuditCase", 6)?;
        s.serialize_field("instance", &instance)?;
        s.serialize_field("allocation", &self.allocation)?;
        s.serialize_field("premise_ratio", &self.premise_ratio)?;
        s.serialize_field("conclusion_ratio", &self.conclusion_ratio)?;
        s.serialize_field("guarantee", &value_json(&self.guarantee))?;
        s.serialize_field("margin", &self.margin)?;
        s.end()
    }
}

impl Serialize for AlphaSweep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("AlphaSweep", 5)?;
        s.serialize_field("alpha", &value_json(&self.alpha))?;
        s.serialize_field("premise_satisfied", &self.premise_satisfied)?;
        s.serialize_field("violations_total", &self.violations_total)?;
        s.serialize_field("violations", &self.violations)?;
        s.serialize_field("tight_witness", &self.tight_witness)?;
        s.end()
    }
}

impl Serialize for AuditReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("AuditReport", 9)?;
        s.serialize_field("rule", &self.rule)?;
        s.serialize_field("premise", &self.premise)?;
        s.serialize_field("conclusion", &self.conclusion)?;
        s.serialize_field("requirement", &self.requirement)?;
        s.serialize_field("space", &self.space)?;
        s.serialize_field("instances_checked", &self.instances_checked)?;
        s.serialize_field("allocations_checked", &self.allocations_checked)?;
        s.serialize_field("passed", &self.passed())?;
        s.serialize_field("sweeps", &self.sweeps)?;
        s.end()
    }
}

/// Stable per-rule stream seed (FNV-1a over the user seed and rule id), so
/// every rule draws an independent, reproducible instance stream.
fn rule_stream_seed(seed: u64, id: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in seed.to_le_bytes().iter().copied().chain(id.bytes()) {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

struct TightTrack {
    premise: Frac,
    conclusion: Frac,
    guarantee: Value,
    instance: Instance,
    assign: Vec<usize>,
}

impl TightTrack {
    fn into_case(self) -> AuditCase {
        build_case(
            self.instance,
            &self.assign,
            self.premise,
            self.conclusion,
            self.guarantee,
        )
    }
}

fn build_case(
    instance: Instance,
    assign: &[usize],
    premise: Frac,
    conclusion: Frac,
    guarantee: Value,
) -> AuditCase {
    let allocation = allocation_from_assignment(&instance, assign);
    let conclusion_ratio = conclusion.to_ratio();
    let margin = match &conclusion_ratio {
        Ratio::Finite(c) => Ratio::Finite(c / &guarantee),
        Ratio::Unbounded => Ratio::Unbounded,
    };
    AuditCase {
        instance,
        allocation,
        premise_ratio: premise.to_ratio(),
        conclusion_ratio,
        guarantee,
        margin,
    }
}

struct SweepAccum {
    alpha: Value,
    alpha_frac: Frac,
    premise_satisfied: u64,
    violations_total: u64,
    violations: Vec<AuditCase>,
    tight: BTreeMap<usize, TightTrack>,
}

struct RuleAccum<'r> {
    rule: &'r ImplicationRule,
    sweeps: Vec<SweepAccum>,
    instances_checked: u64,
    allocations_checked: u64,
}

struct RuleResult<'r> {
    rule: &'r ImplicationRule,
    instances_checked: u64,
    allocations_checked: u64,
    sweeps: Vec<AlphaSweep>,
}

/// Accumulates audit state for several rules over a stream of instances.
struct Engine<'r> {
    accs: Vec<RuleAccum<'r>>,
    /// n -> per rule -> per sweep: the guarantee and its integer mirror.
    guarantees: BTreeMap<usize, Vec<Vec<(Value, Frac)>>>,
    budget: u64,
}

fn notion_index(notion: Notion) -> usize {
    match notion {
        Notion::Ef => 0,
        Notion::Ef1 => 1,
        Notion::Efx => 2,
        Notion::Mms => 3,
        Notion::Pmms => 4,
    }
}

fn get_aggregate(
    evaluator: &mut Evaluator,
    cache: &mut [Option<Frac>; 5],
    notion: Notion,
    masks: &[u32],
) -> Result<Frac, OracleError> {
    let slot = notion_index(notion);
    if let Some(frac) = cache[slot] {
        return Ok(frac);
    }
    let frac = evaluator.aggregate(notion, masks)?;
    cache[slot] = Some(frac);
    Ok(frac)
}

impl<'r> Engine<'r> {
    fn new(
        rules: &[&'r ImplicationRule],
        requested_alphas: &[Value],
        agent_counts: &[usize],
        budget: u64,
    ) -> Result<Self, OracleError> {
        for alpha in requested_alphas {
            if *alpha <= Value::zero() || *alpha > Value::one() {
                return Err(OracleError::AlphaOutOfRange {
                    alpha: alpha.to_string(),
                });
            }
        }
        let mut accs = Vec::with_capacity(rules.len());
        for &rule in rules {
            let sweeps = rule
                .audit_alphas(requested_alphas)
                .into_iter()
                .map(|alpha| {
                    let alpha_frac =
                        Frac::from_value(&alpha).ok_or(OracleError::ValuesTooLarge)?;
                    Ok(SweepAccum {
                        alpha,
                        alpha_frac,
                        premise_satisfied: 0,
                        violations_total: 0,
                        violations: Vec::new(),
                        tight: BTreeMap::new(),
                    })
                })
                .collect::<Result<Vec<_>, OracleError>>()?;
            accs.push(RuleAccum {
                rule,
                sweeps,
                instances_checked: 0,
                allocations_checked: 0,
            });
        }
        let mut guarantees = BTreeMap::new();
        for &n in agent_counts {
            let per_rule = accs
                .iter()
                .map(|acc| {
                    if !acc.rule.applicable_to(n) {
                        return Ok(Vec::new());
                    }
                    acc.sweeps
                        .iter()
                        .map(|sweep| {
                            let bound = acc.rule.guarantee(&sweep.alpha, n);
                            let frac =
                                Frac::from_value(&bound).ok_or(OracleError::ValuesTooLarge)?;
                            Ok((bound, frac))
                        })
                        .collect()
                })
                .collect::<Result<Vec<_>, OracleError>>()?;
            guarantees.insert(n, per_rule);
        }
        Ok(Engine {
            accs,
            guarantees,
            budget,
        })
    }

    fn feed(&mut self, inst: &Instance, config: &MeasureConfig) -> Result<(), OracleError> {
        let n = inst.agent_count();
        let active: Vec<usize> = (0..self.accs.len())
            .filter(|&ri| self.accs[ri].rule.applicable_to(n))
            .collect();
        if active.is_empty() {
            return Ok(());
        }
        check_enumerable(inst, self.budget)?;
        let guarantees = &self.guarantees[&n];
        let accs = &mut self.accs;
        let mut evaluator = Evaluator::new(inst, config)?;
        let mut assign = vec![0usize; inst.good_count()];
        loop {
            let masks = masks_from_assignment(&assign, n);
            let mut cache: [Option<Frac>; 5] = [None; 5];
            for &ri in &active {
                let premise_notion = accs[ri].rule.premise;
                let conclusion_notion = accs[ri].rule.conclusion;
                let premise = get_aggregate(&mut evaluator, &mut cache, premise_notion, &masks)?;
                for (si, sweep) in accs[ri].sweeps.iter_mut().enumerate() {
                    if !premise.ge(sweep.alpha_frac) {
                        continue;
                    }
                    sweep.premise_satisfied += 1;
                    let conclusion =
                        get_aggregate(&mut evaluator, &mut cache, conclusion_notion, &masks)?;
                    let (bound, bound_frac) = &guarantees[ri][si];
                    if !conclusion.ge(*bound_frac) {
                        sweep.violations_total += 1;
                        if sweep.violations.len() < STORED_VIOLATIONS {
                            sweep.violations.push(build_case(
                                inst.clone(),
                                &assign,
                                premise,
                                conclusion,
                                bound.clone(),
                            ));
                        }
                    }
                    let improves = match sweep.tight.get(&n) {
                        None => true,
                        Some(track) => {
                            conclusion.cmp(track.conclusion) == std::cmp::Ordering::Less
                        }
                    };
                    if improves {
                        sweep.tight.insert(
                            n,
                            TightTrack {
                                premise,
                                conclusion,
                                guarantee: bound.clone(),
                                instance: inst.clone(),
                                assign: assign.clone(),
                            },
                        );
                    }
                }
            }
            if !advance_assignment(&mut assign, n) {
                break;
            }
        }
        let allocations = space_size(n, inst.good_count()) as u64;
        for &ri in &active {
            accs[ri].instances_checked += 1;
            accs[ri].allocations_checked += allocations;
        }
        Ok(())
    }

    fn finish(self) -> Vec<RuleResult<'r>> {
        self.accs
            .into_iter()
            .map(|acc| RuleResult {
                rule: acc.rule,
                instances_checked: acc.instances_checked,
                allocations_checked: acc.allocations_checked,
                sweeps: acc
                    .sweeps
                    .into_iter()
                    .map(|sweep| AlphaSweep {
                        alpha: sweep.alpha,
                        premise_satisfied: sweep.premise_satisfied,
                        violations_total: sweep.violations_total,
                        violations: sweep.violations,
                        tight_witness: select_tight(sweep.tight),
                    })
                    .collect(),
            })
            .collect()
    }
}

/// Picks the witness with the smallest margin across agent counts, so the
/// reported case is the scale-free closest call.
fn select_tight(tight: BTreeMap<usize, TightTrack>) -> Option<AuditCase> {
    let mut best: Option<AuditCase> = None;
    for (_, track) in tight {
        let case = track.into_case();
        let better = match &best {
            None => true,
            Some(current) => case.margin < current.margin,
        };
        if better {
            best = Some(case);
        }
    }
    best
}

/// Non-decreasing index sequences of length `goods` over `count` columns;
/// one representative per multiset.
struct ColumnMultisets {
    count: usize,
    next: Option<Vec<usize>>,
}

impl ColumnMultisets {
    fn new(count: usize, goods: usize) -> Self {
        ColumnMultisets {
            count,
            next: (count > 0 || goods == 0).then(|| vec![0; goods]),
        }
    }
}

impl Iterator for ColumnMultisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.clone()?;
        let mut follower = current.clone();
        let mut advanced = false;
        for pos in (0..follower.len()).rev() {
            if follower[pos] + 1 < self.count {
                let bumped = follower[pos] + 1;
                for slot in follower.iter_mut().skip(pos) {
                    *slot = bumped;
                }
                advanced = true;
                break;
            }
        }
        self.next = advanced.then_some(follower);
        Some(current)
    }
}

/// All value columns (one entry per agent) over the given alphabet.
fn value_columns(agents: usize, values: &[u64]) -> Vec<Vec<u64>> {
    let mut columns = vec![Vec::new()];
    for _ in 0..agents {
        columns = columns
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut col = prefix.clone();
                    col.push(v);
                    col
                })
            })
            .collect();
    }
    columns
}

fn instance_from_columns(agents: usize, columns: &[Vec<u64>], picks: &[usize]) -> Instance {
    let rows: Vec<Vec<u64>> = (0..agents)
        .map(|agent| picks.iter().map(|&c| columns[c][agent]).collect())
        .collect();
    let refs: Vec<&[u64]> = rows.iter().map(Vec::as_slice).collect();
    Instance::from_ints(&refs)
}

fn feed_exhaustive(
    engine: &mut Engine,
    agents: &[usize],
    max_goods: usize,
    values: &[u64],
    config: &MeasureConfig,
) -> Result<(), OracleError> {
    for &n in agents {
        let columns = value_columns(n, values);
        for goods in 0..=max_goods {
            for picks in ColumnMultisets::new(columns.len(), goods) {
                let inst = instance_from_columns(n, &columns, &picks);
                engine.feed(&inst, config)?;
            }
        }
    }
    Ok(())
}

fn feed_random(
    engine: &mut Engine,
    trials: usize,
    agents: &[usize],
    max_goods: usize,
    values: (u64, u64),
    stream_seed: u64,
    config: &MeasureConfig,
) -> Result<(), OracleError> {
    let (lo, hi) = values;
    let mut rng = ChaCha20Rng::seed_from_u64(stream_seed);
    for _ in 0..trials {
        let n = agents[rng.gen_range(0..agents.len())];
        let m = rng.gen_range(1..=max_goods.max(1));
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen_range(lo..=hi)).collect())
            .collect();
        let refs: Vec<&[u64]> = rows.iter().map(Vec::as_slice).collect();
        engine.feed(&Instance::from_ints(&refs), config)?;
    }
    Ok(())
}

/// Audits one rule over a space, sweeping the requested thresholds (rules
/// claimed at a single fixed threshold audit only that one).
pub fn audit_implication(
    rule: &ImplicationRule,
    space: &AuditSpace,
    requested_alphas: &[Value],
    config: &MeasureConfig,
    budget: u64,
) -> Result<AuditReport, OracleError> {
    let start = Instant::now();
    let audited: Vec<usize> = space
        .requested_agents()
        .into_iter()
        .filter(|&n| rule.applicable_to(n))
        .collect();
    if audited.is_empty() {
        return Err(OracleError::RuleInapplicable {
            id: rule.id.to_string(),
            requirement: rule.requirement,
        });
    }
    let rules = [rule];
    let mut engine = Engine::new(&rules, requested_alphas, &audited, budget)?;
    let mut stream_seed = None;
    match space {
        AuditSpace::Exhaustive {
            max_goods, values, ..
        } => feed_exhaustive(&mut engine, &audited, *max_goods, values, config)?,
        AuditSpace::Random {
            trials,
            max_goods,
            values,
            seed,
            ..
        } => {
            let derived = rule_stream_seed(*seed, rule.id);
            stream_seed = Some(derived);
            feed_random(
                &mut engine,
                *trials,
                &audited,
                *max_goods,
                *values,
                derived,
                config,
            )?;
        }
        AuditSpace::Instances(list) => {
            for inst in list {
                if rule.applicable_to(inst.agent_count()) {
                    engine.feed(inst, config)?;
                }
            }
        }
    }
    let result = engine
        .finish()
        .pop()
        .expect("engine was built with exactly one rule");
    Ok(assemble_report(
        result,
        space.describe(&audited, stream_seed),
        start.elapsed(),
    ))
}

/// Audits every catalog rule that applies to the space, skipping the rest.
/// Exhaustive spaces are walked once with all rules checked side by side;
/// random spaces give each rule its own seeded stream.
pub fn audit_all(
    space: &AuditSpace,
    requested_alphas: &[Value],
    config: &MeasureConfig,
    budget: u64,
) -> Result<Vec<AuditReport>, OracleError> {
    let requested = space.requested_agents();
    let applicable: Vec<&'static ImplicationRule> = rule_catalog()
        .iter()
        .filter(|rule| requested.iter().any(|&n| rule.applicable_to(n)))
        .collect();
    if let AuditSpace::Exhaustive {
        max_goods, values, ..
    } = space
    {
        let start = Instant::now();
        let audited: Vec<usize> = requested
            .iter()
            .copied()
            .filter(|&n| applicable.iter().any(|rule| rule.applicable_to(n)))
            .collect();
        let mut engine = Engine::new(&applicable, requested_alphas, &audited, budget)?;
        feed_exhaustive(&mut engine, &audited, *max_goods, values, config)?;
        let elapsed = start.elapsed();
        return Ok(engine
            .finish()
            .into_iter()
            .map(|result| {
                let rule_agents: Vec<usize> = requested
                    .iter()
                    .copied()
                    .filter(|&n| result.rule.applicable_to(n))
                    .collect();
                let space_desc = space.describe(&rule_agents, None);
                assemble_report(result, space_desc, elapsed)
            })
            .collect());
    }
    applicable
        .into_iter()
        .map(|rule| audit_implication(rule, space, requested_alphas, config, budget))
        .collect()
}

fn assemble_report(
    result: RuleResult,
    space: serde_json::Value,
    elapsed: Duration,
) -> AuditReport {
    AuditReport {
        rule: result.rule.id,
        premise: result.rule.premise,
        conclusion: result.rule.conclusion,
        requirement: result.rule.requirement,
        space,
        instances_checked: result.instances_checked,
        allocations_checked: result.allocations_checked,
        sweeps: result.sweeps,
        elapsed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{best_alpha, DEFAULT_BUDGET};

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    fn cfg() -> MeasureConfig {
        MeasureConfig::default()
    }

    fn sweep_alphas() -> Vec<Value> {
        vec![v("1/4"), v("1/2"), v("3/4"), v("1")]
    }

    #[test]
    fn catalog_is_stable() {
        let ids: Vec<&str> = rule_catalog().iter().map(|r| r.id).collect();
        assert_eq!(
            ids,
            [
                "prop1", "prop2", "prop3", "prop4", "prop5", "prop6", "prop7", "prop8", "cor9",
                "prop10", "prop12"
            ]
        );
        assert!(find_rule("prop6").is_some());
        assert!(find_rule("prop11").is_none());
        for rule in rule_catalog() {
            let fixed = matches!(rule.alpha_mode, AlphaMode::Fixed(_));
            let expect_fixed = matches!(rule.id, "prop2" | "prop3" | "prop8" | "cor9");
            assert_eq!(fixed, expect_fixed, "{}", rule.id);
        }
    }

    #[test]
    fn guarantee_formulas_match_known_points() {
        let one = v("1");
        let half = v("1/2");
        let at = |id: &str, alpha: &Value, n: usize| find_rule(id).unwrap().guarantee(alpha, n);
        assert_eq!(at("prop1", &half, 2), v("1/2"));
        assert_eq!(at("prop2", &one, 3), v("2/3"));
        assert_eq!(at("prop3", &one, 5), v("4/7"));
        assert_eq!(at("prop4", &one, 2), v("2/3"));
        assert_eq!(at("prop4", &half, 3), v("3/9"));
        assert_eq!(at("prop5", &one, 2), v("1/2"));
        assert_eq!(at("prop5", &half, 3), v("1/5"));
        assert_eq!(at("prop6", &half, 2), v("2/5"));
        assert_eq!(at("prop7", &one, 3), v("1/2"));
        assert_eq!(at("prop8", &one, 2), v("1"));
        assert_eq!(at("cor9", &one, 3), v("2/3"));
        assert_eq!(at("cor9", &one, 4), v("4/7"));
        assert_eq!(at("prop10", &half, 3), v("1/7"));
        assert_eq!(at("prop12", &half, 2), v("1/3"));
        // Bounds stay within (0, 1] across the sweep and small n.
        for rule in rule_catalog() {
            for alpha in sweep_alphas() {
                for n in 2..=6 {
                    if rule.applicable_to(n) {
                        let bound = rule.guarantee(&alpha, n);
                        assert!(bound > v("0") && bound <= v("1"), "{} at n={n}", rule.id);
                    }
                }
            }
        }
    }

    #[test]
    fn exhaustive_audit_finds_no_violations_for_drop_one_rule() {
        let rule = find_rule("prop1").unwrap();
        let space = AuditSpace::Exhaustive {
            agents: vec![2],
            max_goods: 4,
            values: vec![0, 1, 2, 3],
        };
        let report =
            audit_implication(rule, &space, &sweep_alphas(), &cfg(), DEFAULT_BUDGET).unwrap();
        assert!(report.passed());
        assert_eq!(report.instances_checked, 1 + 16 + 136 + 816 + 3876);
        assert_eq!(report.sweeps.len(), 4);
        for sweep in &report.sweeps {
            assert_eq!(sweep.violations_total, 0);
            assert!(sweep.premise_satisfied > 0);
            let witness = sweep.tight_witness.as_ref().unwrap();
            assert!(witness.premise_ratio.at_least(&sweep.alpha));
            assert!(witness.margin.at_least(&v("1")));
        }
    }

    #[test]
    fn exhaustive_audit_passes_for_pair_split_rule() {
        let rule = find_rule("prop8").unwrap();
        let space = AuditSpace::Exhaustive {
            agents: vec![3],
            max_goods: 3,
            values: vec![0, 1, 2],
        };
        let report =
            audit_implication(rule, &space, &sweep_alphas(), &cfg(), DEFAULT_BUDGET).unwrap();
        assert!(report.passed());
        // Fixed-threshold rule: one sweep at exactly 1.
        assert_eq!(report.sweeps.len(), 1);
        assert_eq!(report.sweeps[0].alpha, v("1"));
    }

    #[test]
    fn tight_witness_is_exact_on_the_known_instance() {
        let rule = find_rule("prop2").unwrap();
        let inst = Instance::from_ints(&[&[2, 2, 1, 1], &[2, 2, 1, 1]]);
        let space = AuditSpace::Instances(vec![inst]);
        let report =
            audit_implication(rule, &space, &sweep_alphas(), &cfg(), DEFAULT_BUDGET).unwrap();
        assert!(report.passed());
        assert_eq!(report.instances_checked, 1);
        assert_eq!(report.allocations_checked, 16);
        let witness = report.sweeps[0].tight_witness.as_ref().unwrap();
        assert_eq!(witness.conclusion_ratio, Ratio::Finite(v("2/3")));
        assert_eq!(witness.guarantee, v("2/3"));
        assert_eq!(witness.margin, Ratio::Finite(v("1")));
    }

    #[test]
    fn inapplicable_agent_counts_are_rejected() {
        let space = AuditSpace::Exhaustive {
            agents: vec![4],
            max_goods: 2,
            values: vec![0, 1],
        };
        let err = audit_implication(
            find_rule("prop2").unwrap(),
            &space,
            &sweep_alphas(),
            &cfg(),
            DEFAULT_BUDGET,
        )
        .unwrap_err();
        assert!(matches!(err, OracleError::RuleInapplicable { .. }));
        assert!(err.to_string().contains("n in {2, 3}"));

        let two_only = AuditSpace::Exhaustive {
            agents: vec![2],
            max_goods: 2,
            values: vec![0, 1],
        };
        assert!(matches!(
            audit_implication(
                find_rule("cor9").unwrap(),
                &two_only,
                &sweep_alphas(),
                &cfg(),
                DEFAULT_BUDGET
            ),
            Err(OracleError::RuleInapplicable { .. })
        ));
    }

    #[test]
    fn thresholds_outside_the_unit_interval_are_rejected() {
        let space = AuditSpace::Exhaustive {
            agents: vec![2],
            max_goods: 2,
            values: vec![0, 1],
        };
        for bad in ["0", "3/2"] {
            let err = audit_implication(
                find_rule("prop1").unwrap(),
                &space,
                &[v(bad)],
                &cfg(),
                DEFAULT_BUDGET,
            )
            .unwrap_err();
            assert!(matches!(err, OracleError::AlphaOutOfRange { .. }), "{bad}");
        }
    }

    #[test]
    fn random_audits_are_deterministic_and_pass() {
        let rule = find_rule("prop6").unwrap();
        let space = AuditSpace::Random {
            trials: 40,
            agents: vec![2, 3],
            max_goods: 5,
            values: (0, 5),
            seed: 11,
        };
        let first =
            audit_implication(rule, &space, &sweep_alphas(), &cfg(), DEFAULT_BUDGET).unwrap();
        let second =
            audit_implication(rule, &space, &sweep_alphas(), &cfg(), DEFAULT_BUDGET).unwrap();
        assert!(first.passed());
        assert_eq!(first.instances_checked, 40);
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap()
        );
    }

    #[test]
    fn audit_all_skips_inapplicable_rules_and_shares_the_pass() {
        let space = AuditSpace::Exhaustive {
            agents: vec![2, 3],
            max_goods: 2,
            values: vec![0, 1, 2],
        };
        let reports = audit_all(&space, &sweep_alphas(), &cfg(), DEFAULT_BUDGET).unwrap();
        let ids: Vec<&str> = reports.iter().map(|r| r.rule).collect();
        assert!(!ids.contains(&"prop3"), "not applicable below n=4");
        assert_eq!(ids.len(), rule_catalog().len() - 1);
        for report in &reports {
            assert!(report.passed(), "{} failed", report.rule);
            // Rules limited to n >= 3 must not count the n=2 instances.
            let n3_only = ["prop7", "cor9", "prop10"].contains(&report.rule);
            let columns3 = 27u64; // 3 values ^ 3 agents
            let n3_instances = 1 + columns3 + columns3 * (columns3 + 1) / 2;
            if n3_only {
                assert_eq!(report.instances_checked, n3_instances);
            } else {
                assert!(report.instances_checked > n3_instances);
            }
        }
    }

    #[test]
    fn reports_serialize_without_wall_time() {
        let rule = find_rule("prop12").unwrap();
        let space = AuditSpace::Random {
            trials: 5,
            agents: vec![2],
            max_goods: 3,
            values: (0, 3),
            seed: 3,
        };
        let report =
            audit_implication(rule, &space, &sweep_alphas(), &cfg(), DEFAULT_BUDGET).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
        assert_eq!(json["rule"], "prop12");
        assert_eq!(json["premise"], "pmms");
        assert_eq!(json["conclusion"], "ef1");
        assert_eq!(json["passed"], true);
        assert!(json.get("elapsed").is_none());
        assert_eq!(json["space"]["kind"], "random");
        assert!(json["space"]["stream_seed"].is_u64());
        assert_eq!(json["sweeps"].as_array().unwrap().len(), 4);
    }

    /// A deliberately false "rule" must produce violations with full
    /// reproduction data, proving the engine can actually catch lies.
    #[test]
    fn fabricated_falsehood_is_caught() {
        let lie = ImplicationRule {
            id: "prop1",
            premise: Notion::Ef1,
            conclusion: Notion::Efx,
            alpha_mode: AlphaMode::Swept,
            guarantee: |alpha, _| alpha.clone(),
            applicable: |n| n >= 2,
            requirement: "n >= 2",
        };
        let space = AuditSpace::Exhaustive {
            agents: vec![2],
            max_goods: 3,
            values: vec![0, 1, 2],
        };
        let report = audit_implication(&lie, &space, &[v("1")], &cfg(), DEFAULT_BUDGET).unwrap();
        assert!(!report.passed());
        let sweep = &report.sweeps[0];
        assert!(sweep.violations_total > 0);
        let case = &sweep.violations[0];
        assert!(case.premise_ratio.at_least(&v("1")));
        assert!(!case.conclusion_ratio.at_least(&v("1")));
        // The stored instance and allocation reproduce the reported ratios.
        let report2 = crate::measures::full_report(&case.instance, &case.allocation, &cfg()).unwrap();
        assert_eq!(*report2.aggregate(Notion::Efx), case.conclusion_ratio);
        assert_eq!(*report2.aggregate(Notion::Ef1), case.premise_ratio);
    }

    /// Spec'd cross-check: the best achievable share ratio is never below
    /// what the drop-worst-item rule's formula promises from the best EFX.
    #[test]
    fn best_share_ratio_dominates_the_transfer_formula() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x70726f70);
        let rule = find_rule("prop4").unwrap();
        let config = cfg();
        for _ in 0..25 {
            let n = rng.gen_range(2..=3usize);
            let m = rng.gen_range(1..=5usize);
            let rows: Vec<Vec<u64>> = (0..n)
                .map(|_| (0..m).map(|_| rng.gen_range(0..6)).collect())
                .collect();
            let refs: Vec<&[u64]> = rows.iter().map(Vec::as_slice).collect();
            let inst = Instance::from_ints(&refs);
            let (best_efx, _) = best_alpha(&inst, Notion::Efx, &config, DEFAULT_BUDGET).unwrap();
            let (best_mms, _) = best_alpha(&inst, Notion::Mms, &config, DEFAULT_BUDGET).unwrap();
            let alpha = match &best_efx {
                Ratio::Unbounded => v("1"),
                Ratio::Finite(a) => a.clone().min(v("1")),
            };
            if alpha == v("0") {
                continue;
            }
            let promised = rule.guarantee(&alpha, n);
            assert!(
                best_mms.at_least(&promised),
                "inst={inst:?} efx={best_efx:?} mms={best_mms:?} promised={promised}"
            );
        }
    }
}
