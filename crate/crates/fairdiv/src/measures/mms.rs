//! Exact maximin shares.
//!
//! The solver collapses the queried goods into classes of equal value for
//! the agent, enumerates every distinct subset sum as a candidate for the
//! optimum, and binary-searches the largest candidate for which the goods
//! can be split into the required number of parts each worth at least the
//! candidate. Feasibility is a depth-first search over class count vectors
//! with memoized failures.

use std::collections::HashSet;

use num_bigint::BigUint;

use crate::instance::Instance;
use crate::value::Value;

use super::mass::{collapse, scale_row, unscale, Classes, Mass, ScaledEntries};
use super::{MeasureConfig, MeasureError, MmsQuery};

/// A maximin share together with a partition achieving it.
#[derive(Clone, Debug)]
pub struct MmsSolution {
    /// The maximin share value.
    pub value: Value,
    /// Partition of the queried goods into exactly `parts` bundles whose
    /// minimum bundle value for the agent equals `value`.
    pub partition: Vec<Vec<usize>>,
}

/// Exact maximin share of `q.agent` splitting `q.goods` into `q.parts`.
pub fn maximin_share(
    inst: &Instance,
    q: &MmsQuery,
    config: &MeasureConfig,
) -> Result<Value, MeasureError> {
    Ok(maximin_share_solution(inst, q, config)?.value)
}

/// Exact maximin share plus a defining partition.
pub fn maximin_share_solution(
    inst: &Instance,
    q: &MmsQuery,
    config: &MeasureConfig,
) -> Result<MmsSolution, MeasureError> {
    q.validate(inst)?;
    let row = scale_row(q.goods.iter().map(|&g| inst.value(q.agent, g)));
    let (value, partition) = match &row.entries {
        ScaledEntries::Small(entries) => solve(entries, &q.goods, q.parts, &row.scale, config)?,
        ScaledEntries::Big(entries) => solve(entries, &q.goods, q.parts, &row.scale, config)?,
    };
    Ok(MmsSolution { value, partition })
}

fn solve<M: Mass>(
    entries: &[M],
    good_ids: &[usize],
    parts: usize,
    scale: &BigUint,
    config: &MeasureConfig,
) -> Result<(Value, Vec<Vec<usize>>), MeasureError> {
    let classes = collapse(entries, good_ids);

    if parts == 1 {
        let mut all: Vec<usize> = good_ids.to_vec();
        all.sort_unstable();
        return Ok((unscale(&classes.total, scale), vec![all]));
    }
    if classes.positive_count() < parts {
        // some part must end up worth zero, so any split attains the optimum
        let mut all: Vec<usize> = good_ids.to_vec();
        all.sort_unstable();
        let mut partition = vec![Vec::new(); parts];
        partition[0] = all;
        return Ok((Value::zero(), partition));
    }

    let states = classes.state_space();
    if states > config.mms_state_limit as u128 {
        return Err(MeasureError::MmsSizeLimit {
            states,
            limit: config.mms_state_limit,
        });
    }

    let candidates = subset_sums(&classes, parts as u64);
    let mut search = Feasibility::new(&classes, parts);

    // candidates[0] = 0 is always feasible; find the largest feasible one
    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if search.feasible(&candidates[mid]) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let best = candidates[lo].clone();

    // positive_count >= parts guarantees a positive optimum
    debug_assert!(!best.is_zero());
    let peels = search.reconstruct(&best);
    let partition = assemble(&classes, parts, peels);
    debug_assert!(partition_min(entries, good_ids, &partition) == best);
    Ok((unscale(&best, scale), partition))
}

/// All distinct subset sums that could be the minimum of a `k`-partition,
/// i.e. sums `s` with `k*s <= total`, in ascending order.
fn subset_sums<M: Mass>(classes: &Classes<M>, k: u64) -> Vec<M> {
    let mut sums = vec![M::zero()];
    for (v, goods) in classes.values.iter().zip(&classes.goods) {
        let mut out = Vec::with_capacity(sums.len() * (goods.len() + 1));
        let mut shift = M::zero();
        for j in 0..=goods.len() {
            if j > 0 {
                shift = shift.add(v);
            }
            for s in &sums {
                let t = s.add(&shift);
                // sums above total/k cannot shrink later; prune them now
                if t.mul_small(k) <= classes.total {
                    out.push(t);
                }
            }
        }
        out.sort();
        out.dedup();
        sums = out;
    }
    sums
}

/// Can the remaining goods be split into `parts_left` bundles each worth at
/// least `t`? The search peels one bundle at a time. Each peeled bundle must
/// contain the largest remaining good (some bundle does, and bundles are
/// unordered), and only minimal crossing bundles are tried: once a bundle
/// reaches `t`, adding smaller items only wastes value the other parts need.
struct Feasibility<'a, M: Mass> {
    values: &'a [M],
    counts: Vec<u32>,
    parts: usize,
    // failed (packed counts, parts_left) states for the current threshold
    failed: HashSet<(u128, u32)>,
    widths: Vec<u32>,
    trace: Option<Vec<Vec<u32>>>,
}

impl<'a, M: Mass> Feasibility<'a, M> {
    fn new(classes: &'a Classes<M>, parts: usize) -> Self {
        let counts = classes.counts();
        // bits needed per class to pack a count vector into the memo key;
        // the state-space guard keeps the total width within u128
        let widths: Vec<u32> = counts.iter().map(|&c| 32 - c.leading_zeros()).collect();
        assert!(widths.iter().sum::<u32>() <= 128, "memo key overflow");
        Feasibility {
            values: &classes.values,
            counts,
            parts,
            failed: HashSet::new(),
            widths,
            trace: None,
        }
    }

    fn feasible(&mut self, t: &M) -> bool {
        self.failed.clear();
        self.trace = None;
        let total = self.remaining_total();
        self.split(t, self.parts as u32, &total)
    }

    /// Re-runs the search recording one bundle (as per-class taken counts)
    /// per peel. Only failures are memoized, so the successful path is
    /// re-derived in full.
    fn reconstruct(&mut self, t: &M) -> Vec<Vec<u32>> {
        self.failed.clear();
        self.trace = Some(Vec::new());
        let total = self.remaining_total();
        let ok = self.split(t, self.parts as u32, &total);
        debug_assert!(ok, "reconstruction at a feasible threshold");
        self.trace.take().unwrap()
    }

    fn remaining_total(&self) -> M {
        let mut total = M::zero();
        for (v, &c) in self.values.iter().zip(&self.counts) {
            total = total.add(&v.mul_small(c as u64));
        }
        total
    }

    fn pack(&self) -> u128 {
        let mut key = 0u128;
        for (&c, &w) in self.counts.iter().zip(&self.widths) {
            key = (key << w) | c as u128;
        }
        key
    }

    fn split(&mut self, t: &M, parts_left: u32, remaining: &M) -> bool {
        if *remaining < t.mul_small(parts_left as u64) {
            return false;
        }
        if parts_left <= 1 {
            // the last part takes everything left, which is at least t
            if let Some(trace) = &mut self.trace {
                trace.push(self.counts.clone());
            }
            return true;
        }
        let key = (self.pack(), parts_left);
        if self.failed.contains(&key) {
            return false;
        }
        let forced = self
            .counts
            .iter()
            .position(|&c| c > 0)
            .expect("positive remaining value implies a remaining good");
        let sum = M::zero();
        let ok = self.grow_bundle(t, parts_left, remaining, forced, forced, &sum);
        if !ok {
            self.failed.insert(key);
        }
        ok
    }

    /// Extends the bundle being peeled with items of class `class` and
    /// beyond. `sum < t` on entry; `forced` is the class whose largest
    /// remaining good the bundle must contain.
    fn grow_bundle(
        &mut self,
        t: &M,
        parts_left: u32,
        remaining: &M,
        forced: usize,
        class: usize,
        sum: &M,
    ) -> bool {
        // nothing from this class onward can reach t: dead branch
        let mut potential = sum.clone();
        for c in class..self.values.len() {
            potential = potential.add(&self.values[c].mul_small(self.counts[c] as u64));
        }
        if potential < *t {
            return false;
        }

        let available = self.counts[class];
        let v = self.values[class].clone();

        // partial sums below t; the first crossing completes the bundle
        let mut partials = Vec::with_capacity(available as usize + 1);
        let mut crossing = None;
        let mut s = sum.clone();
        for j in 0..=available {
            if s >= *t {
                crossing = Some(j);
                break;
            }
            partials.push(s.clone());
            if j < available {
                s = s.add(&v);
            }
        }

        // a failed subtree records nothing, so the record for the bundle
        // being grown always lands at the current trace length
        let mark = self.trace.as_ref().map_or(0, Vec::len);

        if let Some(j) = crossing {
            // bundle completed with j items of this class; minimal because
            // j-1 items fall short, and the smaller classes are untouched
            debug_assert!(j >= 1);
            self.counts[class] -= j;
            let rest = remaining.sub(&s);
            let ok = self.split(t, parts_left - 1, &rest);
            self.counts[class] += j;
            if ok {
                if let Some(trace) = &mut self.trace {
                    let mut taken = vec![0u32; self.values.len()];
                    taken[class] = j;
                    // deeper peels were recorded first; this one goes before
                    trace.insert(mark, taken);
                }
                return true;
            }
        }

        // keep the bundle below t and move to the next class
        if class + 1 < self.values.len() {
            let j_min = if class == forced { 1 } else { 0 };
            for j in (j_min..partials.len() as u32).rev() {
                self.counts[class] -= j;
                let ok = self.grow_bundle(t, parts_left, remaining, forced, class + 1, &partials[j as usize]);
                self.counts[class] += j;
                if ok {
                    if let Some(trace) = &mut self.trace {
                        trace[mark][class] += j;
                    }
                    return true;
                }
            }
        }
        false
    }
}

/// Turns peeled per-class counts into bundles of good indices. Classes hand
/// out their goods in index order; everything left over (including goods the
/// agent values at zero) joins the final bundle.
fn assemble<M: Mass>(classes: &Classes<M>, parts: usize, peels: Vec<Vec<u32>>) -> Vec<Vec<usize>> {
    debug_assert_eq!(peels.len(), parts);
    let mut cursor = vec![0usize; classes.goods.len()];
    let mut partition = Vec::with_capacity(parts);
    // the last recorded peel is the catch-all part; fill the others first
    for taken in peels.iter().take(parts - 1) {
        let mut bundle = Vec::new();
        for (class, &j) in taken.iter().enumerate() {
            for _ in 0..j {
                bundle.push(classes.goods[class][cursor[class]]);
                cursor[class] += 1;
            }
        }
        bundle.sort_unstable();
        partition.push(bundle);
    }
    let mut last: Vec<usize> = classes.zeros.clone();
    for (class, goods) in classes.goods.iter().enumerate() {
        last.extend_from_slice(&goods[cursor[class]..]);
    }
    last.sort_unstable();
    partition.push(last);
    partition
}

// Debug-only consistency check: the minimum bundle value of a reconstructed
// partition, recomputed from scratch.
fn partition_min<M: Mass>(entries: &[M], good_ids: &[usize], partition: &[Vec<usize>]) -> M {
    let value_of = |good: usize| {
        let k = good_ids.iter().position(|&g| g == good).unwrap();
        entries[k].clone()
    };
    partition
        .iter()
        .map(|bundle| {
            bundle
                .iter()
                .fold(M::zero(), |acc, &g| acc.add(&value_of(g)))
        })
        .min()
        .expect("nonempty partition")
}
