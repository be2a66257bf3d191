//! Fairness measures for a fixed allocation.
//!
//! Every function reports the largest factor `alpha` for which its notion
//! holds, as an exact [`Ratio`]: envy-freeness compares bundles directly,
//! EF1/EFX compare after dropping the best/worst witness item, and the
//! share-based notions compare against maximin values computed by the
//! partition solvers in this module. Vacuous comparisons (an empty bundle,
//! a zero share) yield [`Ratio::Unbounded`].

pub(crate) mod mass;
mod mms;
mod pairwise;

pub use mms::{maximin_share, maximin_share_solution, MmsSolution};
pub use pairwise::pairwise_base;

use std::fmt;
use std::str::FromStr;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::instance::{Allocation, Instance};
use crate::value::{Ratio, Value, DECIMAL_SIG_DIGITS};

/// Tunables for the measure computations.
#[derive(Clone, Debug)]
pub struct MeasureConfig {
    /// Admit zero-valued items as EFX witnesses (the stricter reading).
    pub strict_efx: bool,
    /// Cap on the maximin solver's state space: the product of
    /// (multiplicity + 1) over the agent's distinct positive values.
    pub mms_state_limit: u64,
    /// Same cap for the two-part split solver.
    pub pairwise_state_limit: u64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            strict_efx: false,
            mms_state_limit: 1 << 22,
            pairwise_state_limit: 1 << 34,
        }
    }
}

/// A maximin-share question: split `goods` into `parts` by `agent`'s values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmsQuery {
    pub agent: usize,
    pub parts: usize,
    pub goods: Vec<usize>,
}

impl MmsQuery {
    /// Query over all goods of the instance.
    pub fn whole(inst: &Instance, agent: usize, parts: usize) -> Self {
        MmsQuery {
            agent,
            parts,
            goods: (0..inst.good_count()).collect(),
        }
    }

    pub(crate) fn validate(&self, inst: &Instance) -> Result<(), MeasureError> {
        if self.agent >= inst.agent_count() {
            return Err(MeasureError::AgentOutOfRange {
                agent: self.agent,
                agents: inst.agent_count(),
            });
        }
        if self.parts == 0 {
            return Err(MeasureError::ZeroParts);
        }
        let mut seen = vec![false; inst.good_count()];
        for &good in &self.goods {
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
}

/// Failure of a measure computation. Size limits are hard errors: the
/// solvers never approximate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("maximin solver state space {states} exceeds the limit {limit}")]
    MmsSizeLimit { states: u128, limit: u64 },
    #[error("two-part split state space {states} exceeds the limit {limit}")]
    PairwiseSizeLimit { states: u128, limit: u64 },
    #[error("maximin query needs at least one part")]
    ZeroParts,
    #[error("duplicate good {good} in query")]
    DuplicateGood { good: usize },
    #[error("good index {good} out of range for {goods} goods")]
    GoodOutOfRange { good: usize, goods: usize },
    #[error("agent index {agent} out of range for {agents} agents")]
    AgentOutOfRange { agent: usize, agents: usize },
}

/// The five fairness notions the crate measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Notion {
    Ef,
    Ef1,
    Efx,
    Mms,
    Pmms,
}

impl Notion {
    pub const ALL: [Notion; 5] = [Notion::Ef, Notion::Ef1, Notion::Efx, Notion::Mms, Notion::Pmms];

    pub fn as_str(self) -> &'static str {
        match self {
            Notion::Ef => "ef",
            Notion::Ef1 => "ef1",
            Notion::Efx => "efx",
            Notion::Mms => "mms",
            Notion::Pmms => "pmms",
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Notion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl FromStr for Notion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ef" => Ok(Notion::Ef),
            "ef1" => Ok(Notion::Ef1),
            "efx" => Ok(Notion::Efx),
            "mms" => Ok(Notion::Mms),
            "pmms" => Ok(Notion::Pmms),
            other => Err(format!(
                "unknown notion `{other}` (expected ef, ef1, efx, mms, or pmms)"
            )),
        }
    }
}

fn own_value(inst: &Instance, i: usize, alloc: &Allocation) -> Value {
    inst.sum_over(i, alloc.bundle(i).iter().copied())
}

fn ratio_of(own: &Value, denom: &Value) -> Ratio {
    if denom.is_zero() {
        Ratio::Unbounded
    } else {
        Ratio::Finite(own / denom)
    }
}

/// Largest `alpha` with `v_i(A_i) >= alpha * v_i(A_j)`.
pub fn ef_ratio_pair(inst: &Instance, i: usize, j: usize, alloc: &Allocation) -> Ratio {
    assert_ne!(i, j, "envy ratios compare distinct agents");
    let own = own_value(inst, i, alloc);
    let other = inst.sum_over(i, alloc.bundle(j).iter().copied());
    ratio_of(&own, &other)
}

/// Largest `alpha` with `v_i(A_i) >= alpha * v_i(A_j \ {g})` for the best
/// single dropped item `g` (the one `i` values most).
pub fn ef1_ratio_pair(inst: &Instance, i: usize, j: usize, alloc: &Allocation) -> Ratio {
    assert_ne!(i, j, "envy ratios compare distinct agents");
    let bundle = alloc.bundle(j);
    let best = bundle.iter().map(|&g| inst.value(i, g)).max();
    let Some(best) = best else {
        return Ratio::Unbounded;
    };
    let other = inst.sum_over(i, bundle.iter().copied());
    let remainder = &other - best;
    ratio_of(&own_value(inst, i, alloc), &remainder)
}

/// Largest `alpha` with `v_i(A_i) >= alpha * v_i(A_j \ {g})` for every
/// admissible dropped item `g`; the binding witness is the one `i` values
/// least. Admissible means positively valued, or any item in strict mode.
pub fn efx_ratio_pair(
    inst: &Instance,
    i: usize,
    j: usize,
    alloc: &Allocation,
    config: &MeasureConfig,
) -> Ratio {
    assert_ne!(i, j, "envy ratios compare distinct agents");
    let bundle = alloc.bundle(j);
    let witness = bundle
        .iter()
        .map(|&g| inst.value(i, g))
        .filter(|v| config.strict_efx || !v.is_zero())
        .min();
    let Some(witness) = witness else {
        return Ratio::Unbounded;
    };
    let other = inst.sum_over(i, bundle.iter().copied());
    let remainder = &other - witness;
    ratio_of(&own_value(inst, i, alloc), &remainder)
}

/// Largest `alpha` with `v_i(A_i) >= alpha *` (best half of `A_i ∪ A_j`).
pub fn pmms_ratio_pair(
    inst: &Instance,
    i: usize,
    j: usize,
    alloc: &Allocation,
    config: &MeasureConfig,
) -> Result<Ratio, MeasureError> {
    assert_ne!(i, j, "envy ratios compare distinct agents");
    let mut union: Vec<usize> = alloc.bundle(i).to_vec();
    union.extend_from_slice(alloc.bundle(j));
    let base = pairwise_base(inst, i, &union, config)?;
    Ok(ratio_of(&own_value(inst, i, alloc), &base))
}

/// Largest `alpha` with `v_i(A_i) >= alpha *` (maximin share over all goods).
pub fn mms_ratio_agent(
    inst: &Instance,
    i: usize,
    alloc: &Allocation,
    config: &MeasureConfig,
) -> Result<Ratio, MeasureError> {
    let q = MmsQuery::whole(inst, i, inst.agent_count());
    let share = maximin_share(inst, &q, config)?;
    Ok(ratio_of(&own_value(inst, i, alloc), &share))
}

/// All four pair ratios for one ordered pair of agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRatios {
    pub i: usize,
    pub j: usize,
    pub ef: Ratio,
    pub ef1: Ratio,
    pub efx: Ratio,
    pub pmms: Ratio,
}

/// One agent's bundle value, maximin share, and their ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentShare {
    pub agent: usize,
    pub bundle_value: Value,
    pub share: Value,
    pub ratio: Ratio,
}

/// Every pair and agent ratio for one allocation, with aggregate minima.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport {
    pub ef: Ratio,
    pub ef1: Ratio,
    pub efx: Ratio,
    pub mms: Ratio,
    pub pmms: Ratio,
    pub pairs: Vec<PairRatios>,
    pub shares: Vec<AgentShare>,
}

impl FairnessReport {
    pub fn aggregate(&self, notion: Notion) -> &Ratio {
        match notion {
            Notion::Ef => &self.ef,
            Notion::Ef1 => &self.ef1,
            Notion::Efx => &self.efx,
            Notion::Mms => &self.mms,
            Notion::Pmms => &self.pmms,
        }
    }

    /// Whether the allocation is `alpha`-fair under `notion`.
    pub fn satisfies(&self, notion: Notion, alpha: &Value) -> bool {
        self.aggregate(notion).at_least(alpha)
    }
}

/// Computes every ratio for `alloc`.
pub fn full_report(
    inst: &Instance,
    alloc: &Allocation,
    config: &MeasureConfig,
) -> Result<FairnessReport, MeasureError> {
    let n = inst.agent_count();
    let mut pairs = Vec::with_capacity(n.saturating_sub(1) * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            pairs.push(PairRatios {
                i,
                j,
                ef: ef_ratio_pair(inst, i, j, alloc),
                ef1: ef1_ratio_pair(inst, i, j, alloc),
                efx: efx_ratio_pair(inst, i, j, alloc, config),
                pmms: pmms_ratio_pair(inst, i, j, alloc, config)?,
            });
        }
    }
    let mut shares = Vec::with_capacity(n);
    for agent in 0..n {
        let q = MmsQuery::whole(inst, agent, n);
        let share = maximin_share(inst, &q, config)?;
        let bundle_value = own_value(inst, agent, alloc);
        let ratio = ratio_of(&bundle_value, &share);
        shares.push(AgentShare {
            agent,
            bundle_value,
            share,
            ratio,
        });
    }
    Ok(FairnessReport {
        ef: Ratio::aggregate(pairs.iter().map(|p| p.ef.clone())),
        ef1: Ratio::aggregate(pairs.iter().map(|p| p.ef1.clone())),
        efx: Ratio::aggregate(pairs.iter().map(|p| p.efx.clone())),
        mms: Ratio::aggregate(shares.iter().map(|s| s.ratio.clone())),
        pmms: Ratio::aggregate(pairs.iter().map(|p| p.pmms.clone())),
        pairs,
        shares,
    })
}

// Values inside reports are rendered like finite ratios: exact plus decimal.
struct ExactValue<'a>(&'a Value);

impl Serialize for ExactValue<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Value", 2)?;
        s.serialize_field("exact", &self.0.to_string())?;
        s.serialize_field("decimal", &self.0.to_decimal(DECIMAL_SIG_DIGITS))?;
        s.end()
    }
}

impl Serialize for PairRatios {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PairRatios", 6)?;
        // agents are numbered from 1 in human-facing output
        s.serialize_field("i", &(self.i + 1))?;
        s.serialize_field("j", &(self.j + 1))?;
        s.serialize_field("ef", &self.ef)?;
        s.serialize_field("ef1", &self.ef1)?;
        s.serialize_field("efx", &self.efx)?;
        s.serialize_field("pmms", &self.pmms)?;
        s.end()
    }
}

impl Serialize for AgentShare {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("AgentShare", 4)?;
        s.serialize_field("agent", &(self.agent + 1))?;
        s.serialize_field("bundle_value", &ExactValue(&self.bundle_value))?;
        s.serialize_field("share", &ExactValue(&self.share))?;
        s.serialize_field("ratio", &self.ratio)?;
        s.end()
    }
}

impl Serialize for FairnessReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Aggregates<'a> {
            ef: &'a Ratio,
            ef1: &'a Ratio,
            efx: &'a Ratio,
            mms: &'a Ratio,
            pmms: &'a Ratio,
        }
        let mut s = serializer.serialize_struct("FairnessReport", 3)?;
        s.serialize_field(
            "aggregates",
            &Aggregates {
                ef: &self.ef,
                ef1: &self.ef1,
                efx: &self.efx,
                mms: &self.mms,
                pmms: &self.pmms,
            },
        )?;
        s.serialize_field("pairs", &self.pairs)?;
        s.serialize_field("mms", &self.shares)?;
        s.end()
    }
}
