//! Check the implication rules between fairness notions by brute force.
//!
//! The crate ships a catalog of rules of the form "every α-X allocation is
//! also f(α)-Y". Each rule can be audited: enumerate (or sample) instances,
//! enumerate every allocation of each, and verify the implication at a
//! sweep of thresholds — reporting any violation and the witness that sits
//! exactly on the bound when one exists in the space.
//!
//! Run with: cargo run --example audit_rules

use fairdiv::oracle::{
    audit_all, audit_implication, default_budget, find_rule, rule_catalog, AuditSpace,
};
use fairdiv::{MeasureConfig, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = MeasureConfig::default();
    let budget = default_budget();

    // The catalog. `guarantee(α, n)` is the conclusion threshold each rule
    // promises when its premise holds at α for n agents.
    println!("--- rule catalog (guarantees shown for alpha = 1/2, n = 3)");
    let half = Value::from_fraction(1, 2);
    for rule in rule_catalog() {
        let at_half = if rule.applicable_to(3) {
            format!("{}", rule.guarantee(&half, 3))
        } else {
            "n/a".to_string()
        };
        println!(
            "  {:7} {:4} => {:4} at {}  ({})",
            rule.id,
            rule.premise.as_str(),
            rule.conclusion.as_str(),
            at_half,
            rule.requirement
        );
    }
    println!();

    // Exhaustive audit of one rule: every 2-agent instance with at most 4
    // goods valued in {0, 1, 2} — up to relabeling — and every allocation.
    let rule = find_rule("prop6").expect("prop6 is in the catalog");
    let space = AuditSpace::Exhaustive {
        agents: vec![2],
        max_goods: 4,
        values: vec![0, 1, 2],
    };
    let alphas = [Value::from_fraction(1, 2), Value::one()];
    let report = audit_implication(rule, &space, &alphas, &config, budget)?;
    println!(
        "--- exhaustive audit of {}: {} instances, {} allocations, {:.1?}",
        report.rule, report.instances_checked, report.allocations_checked, report.elapsed
    );
    for sweep in &report.sweeps {
        println!(
            "  alpha = {:3}: guarantee {}, premise held {} times, violations {}",
            sweep.alpha.to_string(),
            rule.guarantee(&sweep.alpha, 2),
            sweep.premise_satisfied,
            sweep.violations_total
        );
        // The closest call in the space: margin is the conclusion ratio
        // over the guarantee, so margin 1 means the bound is met exactly.
        if let Some(witness) = &sweep.tight_witness {
            let rows: Vec<&[fairdiv::Value]> = (0..witness.instance.agent_count())
                .map(|agent| witness.instance.agent_row(agent))
                .collect();
            println!(
                "    closest case: margin {} by {:?} on values {rows:?}",
                witness.margin,
                witness.allocation.bundles()
            );
        }
    }
    assert!(report.passed());
    println!();

    // Random audit of everything applicable to 2 and 3 agents. Seeded, so
    // two runs explore the same instances.
    let space = AuditSpace::Random {
        trials: 150,
        agents: vec![2, 3],
        max_goods: 5,
        values: (0, 6),
        seed: 11,
    };
    let alphas = [
        Value::from_fraction(1, 4),
        Value::from_fraction(1, 2),
        Value::from_fraction(3, 4),
        Value::one(),
    ];
    println!("--- random audit of the full catalog (seed 11, 150 trials each)");
    for report in audit_all(&space, &alphas, &config, budget)? {
        let verdict = if report.passed() { "ok" } else { "VIOLATED" };
        println!(
            "  {:7} {} ({} allocations, {:.1?})",
            report.rule, verdict, report.allocations_checked, report.elapsed
        );
        assert!(report.passed());
    }

    Ok(())
}
