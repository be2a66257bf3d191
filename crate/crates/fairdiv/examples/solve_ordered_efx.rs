//! Exact EFX allocations for instances whose agents rank goods alike.
//!
//! When every agent sorts the goods in the same descending order (their
//! values may still differ), envy-cycle elimination yields an allocation
//! that is exactly EFX, and along the way 2/3-MMS and 2/3-PMMS. The example
//! detects the shared order, runs the routine, and shows what happens when
//! no shared order exists.
//!
//! Run with: cargo run --example solve_ordered_efx

use fairdiv::algorithms::{detect_common_order, ordered_efx, AlgorithmError};
use fairdiv::measures::full_report;
use fairdiv::{Instance, MeasureConfig, Notion, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Same ranking for everyone — good 1 first, then 2, and so on — with
    // different magnitudes per agent.
    let instance = Instance::from_ints(&[
        &[12, 9, 7, 4, 2, 1],
        &[30, 11, 8, 8, 3, 0],
        &[10, 10, 6, 5, 5, 2],
    ])
    .with_name("shared-ranking");
    let config = MeasureConfig::default();

    let order = detect_common_order(&instance);
    assert!(order.is_valid(), "these agents do rank the goods alike");
    let ranked: Vec<String> = order.order().iter().map(|&g| format!("g{}", g + 1)).collect();
    println!("shared descending order: {}", ranked.join(" > "));

    let allocation = ordered_efx(&instance, &order)?;
    let report = full_report(&instance, &allocation, &config)?;
    println!("bundles: {:?}", allocation.bundles());
    println!(
        "ef = {}, ef1 = {}, efx = {}, mms = {}, pmms = {}",
        report.ef, report.ef1, report.efx, report.mms, report.pmms
    );

    // The three guarantees the routine carries on ordered instances.
    assert!(report.satisfies(Notion::Efx, &Value::one()));
    assert!(report.satisfies(Notion::Mms, &Value::from_fraction(2, 3)));
    assert!(report.satisfies(Notion::Pmms, &Value::from_fraction(2, 3)));
    println!("guarantees confirmed: exact EFX, 2/3-MMS, 2/3-PMMS");
    println!();

    // Without a shared ranking the routine refuses to run rather than
    // silently dropping its guarantees.
    let disagreeing = Instance::from_ints(&[&[5, 1], &[1, 5]]);
    let order = detect_common_order(&disagreeing);
    match ordered_efx(&disagreeing, &order) {
        Err(AlgorithmError::NoCommonOrder) => {
            println!("disagreeing agents: no shared order, routine declines");
        }
        other => panic!("expected NoCommonOrder, got {other:?}"),
    }

    Ok(())
}
