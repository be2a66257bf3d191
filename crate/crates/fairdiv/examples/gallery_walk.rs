//! Tour the built-in catalog of worked instances.
//!
//! Every entry builds an instance plus an allocation engineered to land on
//! specific ratios — most sit exactly on the bound of one implication rule,
//! showing it cannot be improved. Entries are parameterized; overriding a
//! parameter rebuilds the construction and its expected ratios together.
//!
//! Run with: cargo run --example gallery_walk

use std::collections::BTreeMap;

use fairdiv::gallery::{build, list_entries};
use fairdiv::measures::full_report;
use fairdiv::{MeasureConfig, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = MeasureConfig::default();

    println!("--- the catalog");
    for entry in list_entries() {
        let params: Vec<String> = entry
            .params
            .iter()
            .map(|(name, default)| format!("{name}={default}"))
            .collect();
        println!(
            "  {:22} {}  [{}]",
            entry.id,
            entry.summary,
            params.join(", ")
        );
    }
    println!();

    // Build one entry at its defaults and confirm the advertised ratios by
    // measuring them. Every entry carries its expectations with it.
    let item = build("prop2-tight", &BTreeMap::new())?;
    println!("--- prop2-tight at defaults");
    println!("  note: {}", item.note);
    let report = full_report(&item.instance, &item.allocation, &config)?;
    for (notion, expected) in &item.expected {
        let measured = report.aggregate(*notion);
        println!("  {:4} expected {expected}, measured {measured}", notion.as_str());
        assert_eq!(measured, expected);
    }
    println!();

    // Sweep a parameter: the same construction at other thresholds. The
    // expected ratios move with it.
    println!("--- prop6-tight swept over alpha");
    for (num, den) in [(1u64, 4u64), (1, 2), (3, 4), (1, 1)] {
        let alpha = Value::from_fraction(num, den);
        let overrides = BTreeMap::from([("alpha".to_string(), alpha.clone())]);
        let item = build("prop6-tight", &overrides)?;
        let report = full_report(&item.instance, &item.allocation, &config)?;
        println!(
            "  alpha = {alpha}: efx = {}, pmms = {} (the rule's floor exactly)",
            report.efx, report.pmms
        );
        for (notion, expected) in &item.expected {
            assert_eq!(report.aggregate(*notion), expected);
        }
    }
    println!();

    // Parameters are validated against the construction's domain, with the
    // violated constraint in the error.
    let too_big = BTreeMap::from([("alpha".to_string(), Value::from_int(2))]);
    match build("prop6-tight", &too_big) {
        Err(err) => println!("out-of-domain parameter rejected: {err}"),
        Ok(_) => unreachable!("alpha = 2 is outside every threshold domain"),
    }

    Ok(())
}
