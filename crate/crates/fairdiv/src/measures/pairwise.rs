//! Exact two-part maximin values via meet-in-the-middle subset sums.
//!
//! For a set of goods with total value `t`, the best min of a two-way split
//! is the largest subset sum not exceeding `t/2`. The value classes are
//! split into two halves of balanced enumeration size; each half's distinct
//! sums are merged with a two-pointer sweep.

use num_bigint::BigUint;

use crate::instance::Instance;
use crate::value::Value;

use super::mass::{collapse, scale_row, unscale, Classes, Mass, ScaledEntries};
use super::{MeasureConfig, MeasureError};

// Per-half enumeration cap; balanced splitting keeps any sane input far
// below it, and a pathological class structure errors instead of thrashing.
const HALF_LIMIT: u128 = 1 << 23;

/// Exact best-half value `max { v(S') : S' ⊆ S, 2 v(S') <= v(S) }`, the
/// two-part maximin share of `agent` over `union_goods`.
pub fn pairwise_base(
    inst: &Instance,
    agent: usize,
    union_goods: &[usize],
    config: &MeasureConfig,
) -> Result<Value, MeasureError> {
    validate(inst, agent, union_goods)?;
    let row = scale_row(union_goods.iter().map(|&g| inst.value(agent, g)));
    match &row.entries {
        ScaledEntries::Small(entries) => best_half(entries, union_goods, &row.scale, config),
        ScaledEntries::Big(entries) => best_half(entries, union_goods, &row.scale, config),
    }
}

fn validate(inst: &Instance, agent: usize, union_goods: &[usize]) -> Result<(), MeasureError> {
    if agent >= inst.agent_count() {
        return Err(MeasureError::AgentOutOfRange {
            agent,
            agents: inst.agent_count(),
        });
    }
    let mut seen = vec![false; inst.good_count()];
    for &good in union_goods {
        if good >= inst.good_count() {
            return Err(MeasureError::GoodOutOfRange {
                good,
                goods: inst.good_count(),
            });
        }
        if seen[good] {
            return Err(MeasureError::DuplicateGood { good });
        }
        seen[good] = true;
    }
    Ok(())
}

fn best_half<M: Mass>(
    entries: &[M],
    good_ids: &[usize],
    scale: &BigUint,
    config: &MeasureConfig,
) -> Result<Value, MeasureError> {
    let classes = collapse(entries, good_ids);
    if classes.total.is_zero() {
        return Ok(Value::zero());
    }
    let states = classes.state_space();
    if states > config.pairwise_state_limit as u128 {
        return Err(MeasureError::PairwiseSizeLimit {
            states,
            limit: config.pairwise_state_limit,
        });
    }

    let (left, right) = balanced_split(&classes);
    let left_sums = half_sums(&classes, &left)?;
    let right_sums = half_sums(&classes, &right)?;

    // both lists are ascending and contain 0, so every left sum pairs with
    // at least the empty right sum
    let mut best = M::zero();
    let mut ri = right_sums.len();
    for l in &left_sums {
        while ri > 0 && l.add(&right_sums[ri - 1]).mul_small(2) > classes.total {
            ri -= 1;
        }
        debug_assert!(ri > 0);
        let cand = l.add(&right_sums[ri - 1]);
        if cand > best {
            best = cand;
        }
    }
    Ok(unscale(&best, scale))
}

/// Splits class indices into two groups with roughly equal products of
/// (count + 1), greedily placing large factors on the lighter side.
fn balanced_split<M: Mass>(classes: &Classes<M>) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..classes.goods.len()).collect();
    order.sort_by_key(|&c| std::cmp::Reverse(classes.goods[c].len()));
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let (mut lp, mut rp) = (1u128, 1u128);
    for c in order {
        let f = classes.goods[c].len() as u128 + 1;
        if lp <= rp {
            left.push(c);
            lp = lp.saturating_mul(f);
        } else {
            right.push(c);
            rp = rp.saturating_mul(f);
        }
    }
    (left, right)
}

/// Distinct subset sums of the chosen classes, ascending, pruned to at most
/// half the grand total.
fn half_sums<M: Mass>(classes: &Classes<M>, chosen: &[usize]) -> Result<Vec<M>, MeasureError> {
    let product = chosen
        .iter()
        .fold(1u128, |acc, &c| acc.saturating_mul(classes.goods[c].len() as u128 + 1));
    if product > HALF_LIMIT {
        return Err(MeasureError::PairwiseSizeLimit {
            states: product,
            limit: HALF_LIMIT as u64,
        });
    }
    let mut sums = vec![M::zero()];
    for &c in chosen {
        let v = &classes.values[c];
        let count = classes.goods[c].len();
        let mut out = Vec::with_capacity(sums.len() * (count + 1));
        let mut shift = M::zero();
        for j in 0..=count {
            if j > 0 {
                shift = shift.add(v);
            }
            for s in &sums {
                let t = s.add(&shift);
                if t.mul_small(2) <= classes.total {
                    out.push(t);
                }
            }
        }
        out.sort();
        out.dedup();
        sums = out;
    }
    Ok(sums)
}
