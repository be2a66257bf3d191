//! Instances (agents, goods, valuation matrix) and allocations, with the
//! canonical JSON formats and their validation.
//!
//! Goods are identified positionally by index; labels are display metadata.
//! An allocation is an ordered partition of all goods into one bundle per
//! agent, and empty bundles are legal.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::value::{Value, ValueParseError};

/// A fair-division instance: `n` agents with additive non-negative values
/// over `m` goods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    name: Option<String>,
    good_labels: Vec<String>,
    // n rows of m entries each; every entry is >= 0 by construction
    values: Vec<Vec<Value>>,
}

/// Validation failure while building or parsing an [`Instance`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("malformed instance JSON: {0}")]
    Json(String),
    #[error("instance must have at least one agent")]
    NoAgents,
    #[error("negative valuation for agent {agent}, good {good}")]
    NegativeValue { agent: usize, good: usize },
    #[error("invalid valuation for agent {agent}, good {good}: {reason}")]
    BadValue {
        agent: usize,
        good: usize,
        reason: String,
    },
    #[error("valuation matrix has {rows} rows but `agents` is {agents}")]
    RowCount { rows: usize, agents: usize },
    #[error("valuation row for agent {agent} has {cols} entries but there are {goods} goods")]
    ColCount {
        agent: usize,
        cols: usize,
        goods: usize,
    },
    #[error("duplicate good label `{label}`")]
    DuplicateLabel { label: String },
    #[error("good index {good} out of range for {goods} goods")]
    GoodOutOfRange { good: usize, goods: usize },
    #[error("agent index {agent} out of range for {agents} agents")]
    AgentOutOfRange { agent: usize, agents: usize },
}

impl Instance {
    /// Builds an instance from one valuation row per agent. Rows must share
    /// a length equal to `good_labels.len()`, and labels must be distinct.
    pub fn new(
        name: Option<String>,
        good_labels: Vec<String>,
        values: Vec<Vec<Value>>,
    ) -> Result<Self, InstanceError> {
        if values.is_empty() {
            return Err(InstanceError::NoAgents);
        }
        let goods = good_labels.len();
        for (agent, row) in values.iter().enumerate() {
            if row.len() != goods {
                return Err(InstanceError::ColCount {
                    agent: agent + 1,
                    cols: row.len(),
                    goods,
                });
            }
        }
        let mut seen = HashSet::new();
        for label in &good_labels {
            if !seen.insert(label) {
                return Err(InstanceError::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        Ok(Instance {
            name,
            good_labels,
            values,
        })
    }

    /// Builds an instance from rows of values with default labels g1..gm.
    pub fn from_rows(rows: Vec<Vec<Value>>) -> Result<Self, InstanceError> {
        let m = rows.first().map_or(0, Vec::len);
        let labels = (1..=m).map(|g| format!("g{g}")).collect();
        Instance::new(None, labels, rows)
    }

    /// Convenience for tests and examples: integer-valued rows.
    pub fn from_ints(rows: &[&[u64]]) -> Self {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|&v| Value::from_int(v)).collect())
            .collect();
        Instance::from_rows(rows).expect("integer rows form a valid instance")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn agent_count(&self) -> usize {
        self.values.len()
    }

    pub fn good_count(&self) -> usize {
        self.good_labels.len()
    }

    pub fn good_label(&self, good: usize) -> &str {
        &self.good_labels[good]
    }

    /// Agent `agent`'s value for a single good. Indices are 0-based.
    pub fn value(&self, agent: usize, good: usize) -> &Value {
        &self.values[agent][good]
    }

    pub fn agent_row(&self, agent: usize) -> &[Value] {
        &self.values[agent]
    }

    /// Exact value of a bundle for an agent: the sum of the agent's values
    /// over the listed goods. Indices are checked.
    pub fn bundle_value(&self, agent: usize, bundle: &[usize]) -> Result<Value, InstanceError> {
        if agent >= self.agent_count() {
            return Err(InstanceError::AgentOutOfRange {
                agent,
                agents: self.agent_count(),
            });
        }
        let mut total = Value::zero();
        for &good in bundle {
            if good >= self.good_count() {
                return Err(InstanceError::GoodOutOfRange {
                    good,
                    goods: self.good_count(),
                });
            }
            total = &total + &self.values[agent][good];
        }
        Ok(total)
    }

    /// Infallible bundle sum for indices already validated by an
    /// [`Allocation`] or produced internally.
    pub(crate) fn sum_over<I: IntoIterator<Item = usize>>(&self, agent: usize, goods: I) -> Value {
        let mut total = Value::zero();
        for good in goods {
            total = &total + &self.values[agent][good];
        }
        total
    }

    /// Parses and validates the instance JSON format.
    pub fn parse_json(text: &str) -> Result<Self, InstanceError> {
        let raw: RawInstance =
            serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        raw.validate()
    }

    /// Canonical JSON: lowest-terms rational strings, explicit `agents`.
    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            name: self.name.clone(),
            agents: self.agent_count(),
            goods: self.good_labels.clone(),
            valuations: self
                .values
                .iter()
                .map(|row| row.iter().map(|v| RawValue::Text(v.to_string())).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    agents: usize,
    goods: Vec<String>,
    valuations: Vec<Vec<RawValue>>,
}

/// A matrix entry as it appears in JSON: a rational string, or for
/// convenience a bare non-negative integer.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawValue {
    Text(String),
    Unsigned(u64),
    Signed(i64),
}

impl RawInstance {
    fn validate(self) -> Result<Instance, InstanceError> {
        if self.agents == 0 {
            return Err(InstanceError::NoAgents);
        }
        if self.valuations.len() != self.agents {
            return Err(InstanceError::RowCount {
                rows: self.valuations.len(),
                agents: self.agents,
            });
        }
        let goods = self.goods.len();
        let mut values = Vec::with_capacity(self.agents);
        for (agent_ix, row) in self.valuations.into_iter().enumerate() {
            let agent = agent_ix + 1;
            if row.len() != goods {
                return Err(InstanceError::ColCount {
                    agent,
                    cols: row.len(),
                    goods,
                });
            }
            let mut out = Vec::with_capacity(goods);
            for (good, raw) in row.into_iter().enumerate() {
                let value = match raw {
                    RawValue::Text(s) => s.parse::<Value>().map_err(|e| match e {
                        ValueParseError::Negative(_) => {
                            InstanceError::NegativeValue { agent, good }
                        }
                        ValueParseError::Malformed(_) => InstanceError::BadValue {
                            agent,
                            good,
                            reason: e.to_string(),
                        },
                    })?,
                    RawValue::Unsigned(n) => Value::from_int(n),
                    RawValue::Signed(_) => {
                        // i64 only matches when u64 did not, i.e. negative
                        return Err(InstanceError::NegativeValue { agent, good });
                    }
                };
                out.push(value);
            }
            values.push(out);
        }
        Instance::new(self.name, self.goods, values)
    }
}

/// An ordered partition of the goods into one bundle per agent. Bundle
/// indices are kept sorted; bundles may be empty.
#[derive(Clone, PartialEq, Eq)]
pub struct Allocation {
    bundles: Vec<Vec<usize>>,
}

/// Validation failure while building or parsing an [`Allocation`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AllocationError {
    #[error("malformed allocation JSON: {0}")]
    Json(String),
    #[error("allocation has {got} bundles but the instance has {want} agents")]
    BundleCount { got: usize, want: usize },
    #[error("good {good} allocated twice")]
    GoodTwice { good: usize },
    #[error("good {good} missing from the allocation")]
    GoodMissing { good: usize },
    #[error("good index {good} out of range for {goods} goods")]
    OutOfRange { good: usize, goods: usize },
}

impl Allocation {
    /// Validates that `bundles` is a partition of the instance's goods with
    /// one bundle per agent, and canonicalizes by sorting each bundle.
    pub fn new(bundles: Vec<Vec<usize>>, inst: &Instance) -> Result<Self, AllocationError> {
        let n = inst.agent_count();
        let m = inst.good_count();
        if bundles.len() != n {
            return Err(AllocationError::BundleCount {
                got: bundles.len(),
                want: n,
            });
        }
        let mut seen = vec![false; m];
        for bundle in &bundles {
            for &good in bundle {
                if good >= m {
                    return Err(AllocationError::OutOfRange { good, goods: m });
                }
                if seen[good] {
                    return Err(AllocationError::GoodTwice { good });
                }
                seen[good] = true;
            }
        }
        if let Some(good) = seen.iter().position(|&s| !s) {
            return Err(AllocationError::GoodMissing { good });
        }
        let mut bundles = bundles;
        for bundle in &mut bundles {
            bundle.sort_unstable();
        }
        Ok(Allocation { bundles })
    }

    /// Parses and validates the allocation JSON format against an instance.
    pub fn parse_json(text: &str, inst: &Instance) -> Result<Self, AllocationError> {
        #[derive(Deserialize)]
        struct Raw {
            bundles: Vec<Vec<usize>>,
        }
        let raw: Raw =
            serde_json::from_str(text).map_err(|e| AllocationError::Json(e.to_string()))?;
        Allocation::new(raw.bundles, inst)
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> &[usize] {
        &self.bundles[agent]
    }

    pub fn agent_count(&self) -> usize {
        self.bundles.len()
    }

    /// Canonical JSON with sorted indices per bundle.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "bundles": self.bundles }).to_string()
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Allocation{:?}", self.bundles)
    }
}

impl Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Allocation", 1)?;
        s.serialize_field("bundles", &self.bundles)?;
        s.end()
    }
}
