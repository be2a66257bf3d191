//! Score a fixed allocation under all five fairness notions.
//!
//! Builds a small instance by hand, evaluates two competing allocations of
//! the same goods, and walks through the report: exact aggregate ratios,
//! the per-pair detail behind them, and threshold checks.
//!
//! Run with: cargo run --example evaluate

use fairdiv::measures::full_report;
use fairdiv::{Allocation, Instance, MeasureConfig, Notion, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Three housemates splitting five items. Values are additive and each
    // row is one agent's view of the goods; they need not agree.
    let instance = Instance::new(
        Some("housemates".to_string()),
        ["espresso-machine", "monitor", "armchair", "bookshelf", "rug"]
            .map(String::from)
            .to_vec(),
        vec![
            [8, 3, 2, 2, 1].map(Value::from_int).to_vec(),
            [2, 7, 4, 1, 1].map(Value::from_int).to_vec(),
            [1, 2, 5, 4, 3].map(Value::from_int).to_vec(),
        ],
    )?;
    let config = MeasureConfig::default();

    // A deliberate split: each agent gets the goods they value most.
    let matched = Allocation::new(vec![vec![0], vec![1, 2], vec![3, 4]], &instance)?;
    // A skewed split: agent 1 takes two big-ticket items.
    let skewed = Allocation::new(vec![vec![0, 1], vec![2], vec![3, 4]], &instance)?;

    for (label, allocation) in [("matched", &matched), ("skewed", &skewed)] {
        let report = full_report(&instance, allocation, &config)?;
        println!("--- {label} allocation: {:?}", allocation.bundles());
        for notion in Notion::ALL {
            let ratio = report.aggregate(notion);
            println!(
                "  {:4} = {ratio}  ({})",
                notion.as_str(),
                if ratio.at_least(&Value::one()) {
                    "holds exactly"
                } else {
                    "approximate only"
                }
            );
        }
        println!();
    }

    // The aggregates are minima over agents (and pairs); the report keeps
    // the full detail. Here is who envies whom under the skewed split.
    let report = full_report(&instance, &skewed, &config)?;
    println!("--- pairwise envy ratios under the skewed split");
    for pair in &report.pairs {
        println!(
            "  agent {} vs agent {}: ef = {}, ef1 = {}, efx = {}, pmms = {}",
            pair.i + 1,
            pair.j + 1,
            pair.ef,
            pair.ef1,
            pair.efx,
            pair.pmms
        );
    }
    println!();

    // Threshold checks: `satisfies` compares an aggregate against a bound.
    println!("--- threshold checks for the skewed split");
    println!(
        "  2/3-MMS: {}",
        report.satisfies(Notion::Mms, &Value::from_fraction(2, 3))
    );
    println!(
        "  1/2-PMMS: {}",
        report.satisfies(Notion::Pmms, &Value::from_fraction(1, 2))
    );
    println!();

    // EFX has a strict variant that also lets zero-valued goods count as
    // the removed good. The two can disagree when a bundle mixes zeros in.
    let with_zero = Instance::from_ints(&[&[4, 1, 0], &[4, 1, 0]]);
    let allocation = Allocation::new(vec![vec![0], vec![1, 2]], &with_zero)?;
    let lenient = full_report(&with_zero, &allocation, &config)?;
    let strict = full_report(
        &with_zero,
        &allocation,
        &MeasureConfig {
            strict_efx: true,
            ..MeasureConfig::default()
        },
    )?;
    println!("--- EFX on a bundle holding a zero-valued good");
    println!("  default (drop a positively-valued good): {}", lenient.efx);
    println!("  strict (any good may be dropped):        {}", strict.efx);

    Ok(())
}
