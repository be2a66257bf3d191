//! Integer fast path for evaluating ratios across an enumeration.
//!
//! The exhaustive searches visit up to millions of allocations, so ratios
//! are computed on integer-scaled values (one scale per agent, which leaves
//! every ratio unchanged) and compared by cross-multiplication. Results are
//! exact: the scaled totals are capped low enough that no product can
//! overflow, and the slow solver path double-checks the cap's assumptions
//! in tests.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::instance::{Allocation, Instance};
use crate::measures::{
    mass::{scale_row, ScaledEntries},
    maximin_share, pairwise_base, MeasureConfig, MmsQuery, Notion,
};
use crate::oracle::{
    allocation_from_assignment, advance_assignment, check_enumerable, OracleError,
};
use crate::value::{Ratio, Value};

/// Dense per-mask tables are built up to this many goods; beyond it the
/// evaluator walks bundle bits on the fly.
const DENSE_TABLE_GOODS: usize = 16;

/// Cap on any agent's scaled total: cross-multiplied comparisons then fit
/// comfortably in 128 bits.
const MAX_SCALED_TOTAL: u128 = 1 << 63;

/// Two-part splits are solved by a subset-sum bitset when the bundle total
/// fits the bit width of u128.
const SUBSET_BITSET_TOTAL: u128 = 127;

/// A nonnegative ratio of scaled integers; `den == 0` encodes the vacuous,
/// unbounded ratio that outranks every finite one.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frac {
    num: u128,
    den: u128,
}

impl Frac {
    pub(crate) const UNBOUNDED: Frac = Frac { num: 1, den: 0 };

    pub(crate) fn new(num: u128, den: u128) -> Frac {
        if den == 0 {
            Frac::UNBOUNDED
        } else {
            Frac { num, den }
        }
    }

    pub(crate) fn is_unbounded(self) -> bool {
        self.den == 0
    }

    /// Exact value bridge; `None` when a component exceeds the integer cap.
    pub(crate) fn from_value(v: &Value) -> Option<Frac> {
        let num = u128::try_from(v.numer()).ok()?;
        let den = u128::try_from(v.denom()).ok()?;
        if num > MAX_SCALED_TOTAL || den > MAX_SCALED_TOTAL {
            return None;
        }
        Some(Frac { num, den })
    }

    pub(crate) fn to_ratio(self) -> Ratio {
        if self.is_unbounded() {
            Ratio::Unbounded
        } else {
            Ratio::Finite(Value::from_big(BigUint::from(self.num), BigUint::from(self.den)))
        }
    }

    pub(crate) fn cmp(self, other: Frac) -> std::cmp::Ordering {
        match (self.is_unbounded(), other.is_unbounded()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            // Totals are capped at 2^63, so these products stay below 2^126.
            (false, false) => (self.num * other.den).cmp(&(other.num * self.den)),
        }
    }

    pub(crate) fn ge(self, other: Frac) -> bool {
        self.cmp(other) != std::cmp::Ordering::Less
    }

    pub(crate) fn gt(self, other: Frac) -> bool {
        self.cmp(other) == std::cmp::Ordering::Greater
    }

    pub(crate) fn min(self, other: Frac) -> Frac {
        if other.cmp(self) == std::cmp::Ordering::Less {
            other
        } else {
            self
        }
    }
}

/// Per-agent, per-mask item statistics: bundle sum, largest item, smallest
/// positive item, and smallest item of any value (`u128::MAX` when absent).
struct Tables {
    sums: Vec<Vec<u128>>,
    max_item: Vec<Vec<u128>>,
    minpos_item: Vec<Vec<u128>>,
    minany_item: Vec<Vec<u128>>,
}

#[derive(Clone, Copy)]
struct BundleStats {
    sum: u128,
    max_item: u128,
    minpos_item: u128,
    minany_item: u128,
}

enum Mu2Cache {
    Dense(Vec<Vec<Option<u128>>>),
    Sparse(HashMap<(usize, u32), u128>),
}

/// Evaluates fairness ratios for bundle bitmasks over one instance, with
/// every agent's values scaled to integers.
pub(crate) struct Evaluator<'a> {
    inst: &'a Instance,
    config: &'a MeasureConfig,
    n: usize,
    m: usize,
    rows: Vec<Vec<u128>>,
    scales: Vec<BigUint>,
    tables: Option<Tables>,
    mu_n: Vec<Option<u128>>,
    mu2: Mu2Cache,
}

/// Scales an exact value by an agent's row multiplier; exact by
/// construction because the multiplier clears every denominator in the row.
fn scale_value(v: &Value, scale: &BigUint) -> u128 {
    let scaled = v.numer() * scale;
    let den = v.denom();
    debug_assert!((&scaled % &den) == BigUint::from(0u32), "scale must clear the denominator");
    u128::try_from(scaled / den).expect("scaled magnitude is bounded by the row total")
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(inst: &'a Instance, config: &'a MeasureConfig) -> Result<Self, OracleError> {
        let n = inst.agent_count();
        let m = inst.good_count();
        if m > super::MAX_ENUMERATION_GOODS {
            return Err(OracleError::TooManyGoods {
                goods: m,
                max: super::MAX_ENUMERATION_GOODS,
            });
        }
        let mut rows = Vec::with_capacity(n);
        let mut scales = Vec::with_capacity(n);
        for agent in 0..n {
            let scaled = scale_row(inst.agent_row(agent));
            let entries = match scaled.entries {
                ScaledEntries::Small(entries) => entries,
                ScaledEntries::Big(_) => return Err(OracleError::ValuesTooLarge),
            };
            let total: u128 = entries.iter().sum();
            if total > MAX_SCALED_TOTAL {
                return Err(OracleError::ValuesTooLarge);
            }
            rows.push(entries);
            scales.push(scaled.scale);
        }
        let tables = (m <= DENSE_TABLE_GOODS).then(|| build_tables(&rows, m));
        let mu2 = if m <= DENSE_TABLE_GOODS {
            Mu2Cache::Dense(vec![vec![None; 1 << m]; n])
        } else {
            Mu2Cache::Sparse(HashMap::new())
        };
        Ok(Evaluator {
            inst,
            config,
            n,
            m,
            rows,
            scales,
            tables,
            mu_n: vec![None; n],
            mu2,
        })
    }

    fn stats(&self, agent: usize, mask: u32) -> BundleStats {
        if let Some(tables) = &self.tables {
            let idx = mask as usize;
            return BundleStats {
                sum: tables.sums[agent][idx],
                max_item: tables.max_item[agent][idx],
                minpos_item: tables.minpos_item[agent][idx],
                minany_item: tables.minany_item[agent][idx],
            };
        }
        let row = &self.rows[agent];
        let mut stats = BundleStats {
            sum: 0,
            max_item: 0,
            minpos_item: u128::MAX,
            minany_item: u128::MAX,
        };
        let mut bits = mask;
        while bits != 0 {
            let good = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let v = row[good];
            stats.sum += v;
            stats.max_item = stats.max_item.max(v);
            stats.minany_item = stats.minany_item.min(v);
            if v > 0 {
                stats.minpos_item = stats.minpos_item.min(v);
            }
        }
        stats
    }

    fn sum(&self, agent: usize, mask: u32) -> u128 {
        if let Some(tables) = &self.tables {
            tables.sums[agent][mask as usize]
        } else {
            self.stats(agent, mask).sum
        }
    }

    /// Largest `alpha` with `v_i(own) >= alpha * v_i(other)`.
    fn ef_pair(&self, i: usize, own: u32, other: u32) -> Frac {
        Frac::new(self.sum(i, own), self.sum(i, other))
    }

    /// As [`Self::ef_pair`] after dropping the item `i` values most.
    fn ef1_pair(&self, i: usize, own: u32, other: u32) -> Frac {
        if other == 0 {
            return Frac::UNBOUNDED;
        }
        let stats = self.stats(i, other);
        Frac::new(self.sum(i, own), stats.sum - stats.max_item)
    }

    /// As [`Self::ef_pair`] after dropping the worst admissible item.
    fn efx_pair(&self, i: usize, own: u32, other: u32) -> Frac {
        let stats = self.stats(i, other);
        let witness = if self.config.strict_efx {
            if other == 0 {
                return Frac::UNBOUNDED;
            }
            stats.minany_item
        } else {
            if stats.minpos_item == u128::MAX {
                return Frac::UNBOUNDED;
            }
            stats.minpos_item
        };
        Frac::new(self.sum(i, own), stats.sum - witness)
    }

    fn pmms_pair(&mut self, i: usize, own: u32, other: u32) -> Result<Frac, OracleError> {
        let mu = self.mu2(i, own | other)?;
        Ok(Frac::new(self.sum(i, own), mu))
    }

    fn mms_agent(&mut self, agent: usize, own: u32) -> Result<Frac, OracleError> {
        let mu = self.mu_n(agent)?;
        Ok(Frac::new(self.sum(agent, own), mu))
    }

    /// The agent's best guaranteed half of the goods in `mask`, scaled.
    fn mu2(&mut self, agent: usize, mask: u32) -> Result<u128, OracleError> {
        match &self.mu2 {
            Mu2Cache::Dense(cache) => {
                if let Some(mu) = cache[agent][mask as usize] {
                    return Ok(mu);
                }
            }
            Mu2Cache::Sparse(cache) => {
                if let Some(&mu) = cache.get(&(agent, mask)) {
                    return Ok(mu);
                }
            }
        }
        let total = self.sum(agent, mask);
        let mu = if total == 0 {
            0
        } else if total <= SUBSET_BITSET_TOTAL {
            // Subset sums as bits: the best half is the largest achievable
            // sum no greater than total / 2.
            let mut sums: u128 = 1;
            let mut bits = mask;
            while bits != 0 {
                let good = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                sums |= sums << self.rows[agent][good];
            }
            let mut best = total / 2;
            while sums >> best & 1 == 0 {
                best -= 1;
            }
            best
        } else {
            let goods: Vec<usize> = (0..self.m).filter(|g| mask >> g & 1 == 1).collect();
            let exact = pairwise_base(self.inst, agent, &goods, self.config)?;
            scale_value(&exact, &self.scales[agent])
        };
        match &mut self.mu2 {
            Mu2Cache::Dense(cache) => cache[agent][mask as usize] = Some(mu),
            Mu2Cache::Sparse(cache) => {
                cache.insert((agent, mask), mu);
            }
        }
        Ok(mu)
    }

    /// The agent's maximin share over all goods and all agents' parts,
    /// scaled.
    fn mu_n(&mut self, agent: usize) -> Result<u128, OracleError> {
        if let Some(mu) = self.mu_n[agent] {
            return Ok(mu);
        }
        let query = MmsQuery::whole(self.inst, agent, self.n);
        let exact = maximin_share(self.inst, &query, self.config)?;
        let mu = scale_value(&exact, &self.scales[agent]);
        self.mu_n[agent] = Some(mu);
        Ok(mu)
    }

    /// Minimum constituent ratio of `notion` for the allocation given as
    /// one bundle mask per agent; unbounded when there are no constituents.
    pub(crate) fn aggregate(&mut self, notion: Notion, masks: &[u32]) -> Result<Frac, OracleError> {
        let mut agg = Frac::UNBOUNDED;
        if notion == Notion::Mms {
            for agent in 0..self.n {
                agg = agg.min(self.mms_agent(agent, masks[agent])?);
            }
            return Ok(agg);
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let pair = match notion {
                    Notion::Ef => self.ef_pair(i, masks[i], masks[j]),
                    Notion::Ef1 => self.ef1_pair(i, masks[i], masks[j]),
                    Notion::Efx => self.efx_pair(i, masks[i], masks[j]),
                    Notion::Pmms => self.pmms_pair(i, masks[i], masks[j])?,
                    Notion::Mms => unreachable!("handled above"),
                };
                agg = agg.min(pair);
            }
        }
        Ok(agg)
    }

    /// Whether every constituent ratio of `notion` is at least `alpha`;
    /// short-circuits on the first violation.
    pub(crate) fn satisfies(
        &mut self,
        notion: Notion,
        masks: &[u32],
        alpha: Frac,
    ) -> Result<bool, OracleError> {
        if notion == Notion::Mms {
            for agent in 0..self.n {
                if !self.mms_agent(agent, masks[agent])?.ge(alpha) {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let pair = match notion {
                    Notion::Ef => self.ef_pair(i, masks[i], masks[j]),
                    Notion::Ef1 => self.ef1_pair(i, masks[i], masks[j]),
                    Notion::Efx => self.efx_pair(i, masks[i], masks[j]),
                    Notion::Pmms => self.pmms_pair(i, masks[i], masks[j])?,
                    Notion::Mms => unreachable!("handled above"),
                };
                if !pair.ge(alpha) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn build_tables(rows: &[Vec<u128>], m: usize) -> Tables {
    let n = rows.len();
    let size = 1usize << m;
    let mut tables = Tables {
        sums: vec![vec![0; size]; n],
        max_item: vec![vec![0; size]; n],
        minpos_item: vec![vec![u128::MAX; size]; n],
        minany_item: vec![vec![u128::MAX; size]; n],
    };
    for agent in 0..n {
        for mask in 1..size {
            let good = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let v = rows[agent][good];
            tables.sums[agent][mask] = tables.sums[agent][rest] + v;
            tables.max_item[agent][mask] = tables.max_item[agent][rest].max(v);
            tables.minany_item[agent][mask] = tables.minany_item[agent][rest].min(v);
            tables.minpos_item[agent][mask] = if v > 0 {
                tables.minpos_item[agent][rest].min(v)
            } else {
                tables.minpos_item[agent][rest]
            };
        }
    }
    tables
}

pub(crate) fn masks_from_assignment(assign: &[usize], n: usize) -> Vec<u32> {
    let mut masks = vec![0u32; n];
    for (good, &agent) in assign.iter().enumerate() {
        masks[agent] |= 1 << good;
    }
    masks
}

/// The largest `alpha` any allocation achieves under `notion`, with the
/// first allocation (in enumeration order) that achieves it.
pub fn best_alpha(
    inst: &Instance,
    notion: Notion,
    config: &MeasureConfig,
    budget: u64,
) -> Result<(Ratio, Allocation), OracleError> {
    check_enumerable(inst, budget)?;
    let mut evaluator = Evaluator::new(inst, config)?;
    let n = inst.agent_count();
    let mut assign = vec![0usize; inst.good_count()];
    let mut best: Option<(Frac, Vec<usize>)> = None;
    loop {
        let masks = masks_from_assignment(&assign, n);
        let agg = evaluator.aggregate(notion, &masks)?;
        if best.as_ref().map_or(true, |(prev, _)| agg.gt(*prev)) {
            best = Some((agg, assign.clone()));
        }
        if !advance_assignment(&mut assign, n) {
            break;
        }
    }
    let (frac, winner) = best.expect("enumeration yields at least one allocation");
    Ok((frac.to_ratio(), allocation_from_assignment(inst, &winner)))
}

/// The first allocation (in enumeration order) whose `notion` aggregate is
/// at least `alpha`, if any.
pub fn exact_fair_search(
    inst: &Instance,
    notion: Notion,
    alpha: &Value,
    config: &MeasureConfig,
    budget: u64,
) -> Result<Option<Allocation>, OracleError> {
    check_enumerable(inst, budget)?;
    let threshold = Frac::from_value(alpha).ok_or(OracleError::ValuesTooLarge)?;
    let mut evaluator = Evaluator::new(inst, config)?;
    let n = inst.agent_count();
    let mut assign = vec![0usize; inst.good_count()];
    loop {
        let masks = masks_from_assignment(&assign, n);
        if evaluator.satisfies(notion, &masks, threshold)? {
            return Ok(Some(allocation_from_assignment(inst, &assign)));
        }
        if !advance_assignment(&mut assign, n) {
            return Ok(None);
        }
    }
}
