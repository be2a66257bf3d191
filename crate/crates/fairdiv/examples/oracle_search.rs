//! Exact ground-truth queries: shares, best ratios, and witnesses.
//!
//! For desk-sized instances the oracle settles questions outright. It
//! computes maximin shares with the optimal partition attached, finds the
//! best aggregate any allocation can reach for a notion, searches for an
//! allocation meeting a threshold, and spot-checks that a share never drops
//! when the goods on offer grow.
//!
//! Run with: cargo run --example oracle_search

use fairdiv::measures::{maximin_share_solution, MmsQuery};
use fairdiv::oracle::{best_alpha, check_monotonicity, default_budget, exact_fair_search};
use fairdiv::{Instance, MeasureConfig, Notion, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // All searches are bounded by a budget on n^m, the number of
    // allocations; FAIRDIV_BUDGET overrides the default.
    let config = MeasureConfig::default();
    let budget = default_budget();

    let instance = Instance::from_ints(&[
        &[7, 5, 4, 3, 1],
        &[6, 6, 3, 3, 2],
        &[9, 2, 2, 4, 3],
    ])
    .with_name("desk-sized");

    // Maximin shares: the value each agent could lock in by partitioning
    // the goods into n bundles and keeping the worst one.
    println!("--- maximin shares, goods split 3 ways");
    for agent in 0..instance.agent_count() {
        let solution =
            maximin_share_solution(&instance, &MmsQuery::whole(&instance, agent, 3), &config)?;
        println!(
            "  agent {}: mu = {} via partition {:?}",
            agent + 1,
            solution.value,
            solution.partition
        );
    }
    println!();

    // The best aggregate any allocation reaches, with a witness. 3^5 = 243
    // candidate allocations, enumerated exactly.
    println!("--- best achievable aggregate per notion");
    for notion in [Notion::Ef, Notion::Efx, Notion::Mms] {
        let (best, witness) = best_alpha(&instance, notion, &config, budget)?;
        println!(
            "  {:3}: {} with bundles {:?}",
            notion.as_str(),
            best,
            witness.bundles()
        );
    }
    println!();

    // Threshold searches: the first allocation meeting the bound, if any.
    println!("--- does an allocation meet the threshold?");
    for (notion, alpha) in [
        (Notion::Efx, Value::one()),
        (Notion::Ef, Value::one()),
        (Notion::Mms, Value::from_fraction(9, 10)),
    ] {
        match exact_fair_search(&instance, notion, &alpha, &config, budget)? {
            Some(witness) => println!(
                "  {}-{}: yes, e.g. {:?}",
                alpha,
                notion.as_str(),
                witness.bundles()
            ),
            None => println!("  {}-{}: no allocation achieves it", alpha, notion.as_str()),
        }
    }
    println!();

    // Monotonicity: dropping one part together with a slice of one bundle
    // of the optimal partition never lowers the share. 300 seeded trials.
    let report = check_monotonicity(&instance, 0, 300, 42, &config)?;
    println!(
        "--- share monotonicity for agent 1: {} trials, {} failures (mu over all goods = {})",
        report.trials,
        report.failures.len(),
        report.mu
    );
    assert!(report.passed());

    Ok(())
}
