//! Brute-force ground truth for small instances.
//!
//! Everything in this module is deliberately exhaustive: allocations are
//! enumerated one by one, ratios are evaluated with integer arithmetic, and
//! the implication rules from the audit catalog are checked against every
//! enumerated case. The point is not speed in the large but certainty at
//! desk scale, where n^m stays within a configurable budget.

mod audit;
mod evaluate;

pub use audit::{
    audit_all, audit_implication, find_rule, rule_catalog, AlphaMode, AlphaSweep, AuditCase,
    AuditReport, AuditSpace, ImplicationRule,
};
pub use evaluate::{best_alpha, exact_fair_search};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::instance::{Allocation, Instance};
use crate::measures::{maximin_share, maximin_share_solution, MeasureConfig, MeasureError, MmsQuery};
use crate::value::{Value, DECIMAL_SIG_DIGITS};

/// Default cap on the number of enumerated allocations (n^m).
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Hard cap on goods for enumeration; masks are kept in 32 bits and the
/// budget would be blown long before this anyway for n >= 2.
pub const MAX_ENUMERATION_GOODS: usize = 20;

/// Enumeration budget, honoring the `FAIRDIV_BUDGET` environment variable.
pub fn default_budget() -> u64 {
    std::env::var("FAIRDIV_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Failure modes of the brute-force searches and audits.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error("search space of {required} allocations exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("{goods} goods exceed the enumeration cap of {max}")]
    TooManyGoods { goods: usize, max: usize },
    #[error("scaled values overflow the search engine's integer range")]
    ValuesTooLarge,
    #[error("operation needs at least two agents, instance has {agents}")]
    TooFewAgents { agents: usize },
    #[error("alpha {alpha} is outside (0, 1]")]
    AlphaOutOfRange { alpha: String },
    #[error("rule `{id}` does not apply to any requested agent count ({requirement})")]
    RuleInapplicable { id: String, requirement: &'static str },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub(crate) fn space_size(agents: usize, goods: usize) -> u128 {
    (agents as u128)
        .checked_pow(goods as u32)
        .unwrap_or(u128::MAX)
}

pub(crate) fn check_enumerable(inst: &Instance, budget: u64) -> Result<(), OracleError> {
    let goods = inst.good_count();
    if goods > MAX_ENUMERATION_GOODS {
        return Err(OracleError::TooManyGoods {
            goods,
            max: MAX_ENUMERATION_GOODS,
        });
    }
    let required = space_size(inst.agent_count(), goods);
    if required > budget as u128 {
        return Err(OracleError::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Advance an assignment vector (good -> agent) to its lexicographic
/// successor; false once the last assignment has been consumed.
pub(crate) fn advance_assignment(assign: &mut [usize], agents: usize) -> bool {
    for digit in assign.iter_mut().rev() {
        if *digit + 1 < agents {
            *digit += 1;
            return true;
        }
        *digit = 0;
    }
    false
}

pub(crate) fn allocation_from_assignment(inst: &Instance, assign: &[usize]) -> Allocation {
    let mut bundles = vec![Vec::new(); inst.agent_count()];
    for (good, &agent) in assign.iter().enumerate() {
        bundles[agent].push(good);
    }
    Allocation::new(bundles, inst).expect("an assignment vector is always a partition")
}

/// All allocations of the instance, in lexicographic order of the
/// assignment vector (so the first gives every good to agent 1).
pub fn enumerate_allocations<'a>(
    inst: &'a Instance,
    budget: u64,
) -> Result<Allocations<'a>, OracleError> {
    check_enumerable(inst, budget)?;
    Ok(Allocations {
        inst,
        next: Some(vec![0; inst.good_count()]),
    })
}

/// Iterator behind [`enumerate_allocations`]; yields exactly n^m items.
pub struct Allocations<'a> {
    inst: &'a Instance,
    next: Option<Vec<usize>>,
}

impl Iterator for Allocations<'_> {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        let assign = self.next.as_mut()?;
        let alloc = allocation_from_assignment(self.inst, assign);
        if !advance_assignment(assign, self.inst.agent_count()) {
            self.next = None;
        }
        Some(alloc)
    }
}

/// One failed share-monotonicity check: removing `removed` (a subset of one
/// defining-partition bundle) and one part lowered the maximin share.
#[derive(Clone, Debug)]
pub struct MonotonicityFailure {
    pub bundle_index: usize,
    pub removed: Vec<usize>,
    pub mu_full: Value,
    pub mu_reduced: Value,
}

/// Outcome of randomized share-monotonicity checks for one agent.
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub agent: usize,
    pub parts: usize,
    pub mu: Value,
    pub trials: usize,
    pub seed: u64,
    pub failures: Vec<MonotonicityFailure>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn exact_field<S: Serializer>(
    state: &mut S::SerializeStruct,
    key: &'static str,
    value: &Value,
) -> Result<(), S::Error> {
    state.serialize_field(
        key,
        &serde_json::json!({
            "exact": value.to_string(),
            "decimal": value.to_decimal(DECIMAL_SIG_DIGITS),
        }),
    )
}

impl Serialize for MonotonicityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // Agents are 1-based on the wire, as everywhere in the JSON output.
        let mut state = serializer.serialize_struct("MonotonicityReport", 7)?;
        state.serialize_field("agent", &(self.agent + 1))?;
        state.serialize_field("parts", &self.parts)?;
        exact_field::<S>(&mut state, "mu", &self.mu)?;
        state.serialize_field("trials", &self.trials)?;
        state.serialize_field("seed", &self.seed)?;
        state.serialize_field("passed", &self.passed())?;
        let failures: Vec<serde_json::Value> = self
            .failures
            .iter()
            .map(|f| {
                serde_json::json!({
                    "bundle_index": f.bundle_index,
                    "removed": f.removed,
                    "mu_full": {
                        "exact": f.mu_full.to_string(),
                        "decimal": f.mu_full.to_decimal(DECIMAL_SIG_DIGITS),
                    },
                    "mu_reduced": {
                        "exact": f.mu_reduced.to_string(),
                        "decimal": f.mu_reduced.to_decimal(DECIMAL_SIG_DIGITS),
                    },
                })
            })
            .collect();
        state.serialize_field("failures", &failures)?;
        state.end()
    }
}

/// Randomized check that removing a subset of one defining-partition bundle
/// together with one part never lowers the agent's maximin share.
///
/// Each trial picks a bundle of the defining partition and removes either a
/// single random item, a random subset, or the whole bundle, then re-solves
/// with one part fewer over the remaining goods.
pub fn check_monotonicity(
    inst: &Instance,
    agent: usize,
    trials: usize,
    seed: u64,
    config: &MeasureConfig,
) -> Result<MonotonicityReport, OracleError> {
    let parts = inst.agent_count();
    if parts < 2 {
        return Err(OracleError::TooFewAgents { agents: parts });
    }
    let solution = maximin_share_solution(inst, &MmsQuery::whole(inst, agent, parts), config)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for trial in 0..trials {
        let bundle_index = rng.gen_range(0..parts);
        let bundle = &solution.partition[bundle_index];
        let removed: Vec<usize> = match trial % 3 {
            0 if !bundle.is_empty() => vec![bundle[rng.gen_range(0..bundle.len())]],
            1 => bundle.iter().copied().filter(|_| rng.gen()).collect(),
            _ => bundle.clone(),
        };
        let goods: Vec<usize> = (0..inst.good_count())
            .filter(|g| !removed.contains(g))
            .collect();
        let query = MmsQuery {
            agent,
            parts: parts - 1,
            goods,
        };
        let mu_reduced = maximin_share(inst, &query, config)?;
        if mu_reduced < solution.value {
            failures.push(MonotonicityFailure {
                bundle_index,
                removed,
                mu_full: solution.value.clone(),
                mu_reduced,
            });
        }
    }
    Ok(MonotonicityReport {
        agent,
        parts,
        mu: solution.value,
        trials,
        seed,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::abc_instance;
    use crate::measures::{full_report, Notion};
    use crate::value::Ratio;

    fn fin(s: &str) -> Ratio {
        Ratio::Finite(s.parse().unwrap())
    }

    #[test]
    fn enumeration_counts_match_the_power() {
        let cases = [(2, 3, 8usize), (3, 0, 1), (2, 0, 1), (4, 3, 64)];
        for (agents, goods, expected) in cases {
            let rows: Vec<Vec<u64>> = vec![vec![1; goods]; agents];
            let refs: Vec<&[u64]> = rows.iter().map(Vec::as_slice).collect();
            let inst = Instance::from_ints(&refs);
            let count = enumerate_allocations(&inst, DEFAULT_BUDGET).unwrap().count();
            assert_eq!(count, expected, "n={agents} m={goods}");
        }
        let count = enumerate_allocations(&abc_instance(), DEFAULT_BUDGET)
            .unwrap()
            .count();
        assert_eq!(count, 243);
    }

    #[test]
    fn enumeration_is_lexicographic_and_exhaustive() {
        let inst = Instance::from_ints(&[&[1, 2], &[2, 1]]);
        let all: Vec<Allocation> = enumerate_allocations(&inst, DEFAULT_BUDGET)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 4);
        // First assignment hands everything to agent 1, last to agent 2.
        assert_eq!(all[0].bundles(), &[vec![0, 1], vec![]]);
        assert_eq!(all[1].bundles(), &[vec![0], vec![1]]);
        assert_eq!(all[2].bundles(), &[vec![1], vec![0]]);
        assert_eq!(all[3].bundles(), &[vec![], vec![0, 1]]);
    }

    #[test]
    fn enumeration_respects_budget_and_good_cap() {
        let row = vec![1u64; 15];
        let rows: Vec<&[u64]> = vec![&row, &row, &row];
        let inst = Instance::from_ints(&rows);
        // 3^15 > 10^7.
        match enumerate_allocations(&inst, DEFAULT_BUDGET) {
            Err(OracleError::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 14_348_907);
                assert_eq!(budget, DEFAULT_BUDGET);
            }
            other => panic!("expected budget error, got {:?}", other.map(|_| ())),
        }
        let wide = vec![1u64; 21];
        let inst = Instance::from_ints(&[&wide[..], &wide[..]]);
        assert!(matches!(
            enumerate_allocations(&inst, u64::MAX),
            Err(OracleError::TooManyGoods { goods: 21, max: 20 })
        ));
    }

    #[test]
    fn monotonicity_holds_on_the_worked_instance() {
        let inst = abc_instance();
        let config = MeasureConfig::default();
        // Dropping any single good (and one part) never lowers agent 1's
        // share of 3.
        for good in 0..5 {
            let goods: Vec<usize> = (0..5).filter(|&g| g != good).collect();
            let query = MmsQuery {
                agent: 0,
                parts: 2,
                goods,
            };
            let mu = maximin_share(&inst, &query, &config).unwrap();
            assert!(mu >= "3".parse().unwrap(), "dropping good {good} gave {mu}");
        }
        for agent in 0..3 {
            let report = check_monotonicity(&inst, agent, 60, 7, &config).unwrap();
            assert!(report.passed(), "agent {agent}: {:?}", report.failures);
            assert_eq!(report.trials, 60);
        }
    }

    #[test]
    fn monotonicity_is_deterministic_and_serializable() {
        let inst = abc_instance();
        let config = MeasureConfig::default();
        let a = check_monotonicity(&inst, 1, 12, 99, &config).unwrap();
        let b = check_monotonicity(&inst, 1, 12, 99, &config).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        assert_eq!(ja, serde_json::to_string(&b).unwrap());
        let parsed: serde_json::Value = serde_json::from_str(&ja).unwrap();
        assert_eq!(parsed["agent"], 2);
        assert_eq!(parsed["mu"]["exact"], "4");
        assert_eq!(parsed["passed"], true);
    }

    #[test]
    fn monotonicity_needs_two_agents() {
        let inst = Instance::from_ints(&[&[1, 2, 3]]);
        assert!(matches!(
            check_monotonicity(&inst, 0, 5, 1, &MeasureConfig::default()),
            Err(OracleError::TooFewAgents { agents: 1 })
        ));
    }

    #[test]
    fn random_instances_stay_monotone() {
        let mut rng = ChaCha20Rng::seed_from_u64(0x6d6f6e6f);
        let config = MeasureConfig::default();
        for _ in 0..40 {
            let agents = rng.gen_range(2..=4usize);
            let goods = rng.gen_range(1..=7usize);
            let rows: Vec<Vec<u64>> = (0..agents)
                .map(|_| (0..goods).map(|_| rng.gen_range(0..=9)).collect())
                .collect();
            let refs: Vec<&[u64]> = rows.iter().map(Vec::as_slice).collect();
            let inst = Instance::from_ints(&refs);
            let agent = rng.gen_range(0..agents);
            let report = check_monotonicity(&inst, agent, 9, rng.gen(), &config).unwrap();
            assert!(report.passed(), "{:?}", report.failures);
        }
    }

    #[test]
    fn best_alpha_matches_the_worked_instance() {
        let inst = abc_instance();
        let config = MeasureConfig::default();
        let (best_ef, witness) = best_alpha(&inst, Notion::Ef, &config, DEFAULT_BUDGET).unwrap();
        assert!(best_ef.at_least(&Value::one()));
        // The witness must actually achieve the reported ratio.
        let report = full_report(&inst, &witness, &config).unwrap();
        assert_eq!(*report.aggregate(Notion::Ef), best_ef);
    }

    #[test]
    fn best_alpha_handles_rivalry_for_a_single_good() {
        let inst = Instance::from_ints(&[&[1], &[1]]);
        let config = MeasureConfig::default();
        let (best_ef, _) = best_alpha(&inst, Notion::Ef, &config, DEFAULT_BUDGET).unwrap();
        assert_eq!(best_ef, fin("0"));
        let (best_mms, _) = best_alpha(&inst, Notion::Mms, &config, DEFAULT_BUDGET).unwrap();
        // mu is zero for both agents, so every allocation is vacuously fine.
        assert_eq!(best_mms, Ratio::Unbounded);
    }

    #[test]
    fn best_alpha_mms_on_two_two_one_one() {
        let inst = Instance::from_ints(&[&[2, 2, 1, 1], &[2, 2, 1, 1]]);
        let config = MeasureConfig::default();
        let (best, witness) = best_alpha(&inst, Notion::Mms, &config, DEFAULT_BUDGET).unwrap();
        assert_eq!(best, fin("1"));
        let report = full_report(&inst, &witness, &config).unwrap();
        assert_eq!(*report.aggregate(Notion::Mms), fin("1"));
    }

    #[test]
    fn exact_search_finds_the_known_witnesses() {
        let inst = abc_instance();
        let config = MeasureConfig::default();
        let one: Value = "1".parse().unwrap();
        let found = exact_fair_search(&inst, Notion::Efx, &one, &config, DEFAULT_BUDGET)
            .unwrap()
            .expect("an exact allocation exists");
        let report = full_report(&inst, &found, &config).unwrap();
        assert!(report.aggregate(Notion::Efx).at_least(&one));

        // A single agent takes everything, for every notion.
        let solo = Instance::from_ints(&[&[3, 1]]);
        for notion in Notion::ALL {
            let found = exact_fair_search(&solo, notion, &one, &config, DEFAULT_BUDGET)
                .unwrap()
                .expect("solo allocation");
            assert_eq!(found.bundles(), &[vec![0, 1]]);
        }

        // Two identical agents, one positive good: nobody can be envy-free.
        let rivals = Instance::from_ints(&[&[1], &[1]]);
        assert!(exact_fair_search(&rivals, Notion::Ef, &one, &config, DEFAULT_BUDGET)
            .unwrap()
            .is_none());
    }

    #[test]
    fn search_ties_break_lexicographically() {
        // All-zero values: every allocation is vacuously unbounded, so the
        // winner must be the very first assignment (everything to agent 1).
        let inst = Instance::from_ints(&[&[0, 0], &[0, 0]]);
        let config = MeasureConfig::default();
        let (best, witness) = best_alpha(&inst, Notion::Ef1, &config, DEFAULT_BUDGET).unwrap();
        assert_eq!(best, Ratio::Unbounded);
        assert_eq!(witness.bundles(), &[vec![0, 1], vec![]]);
    }
}
