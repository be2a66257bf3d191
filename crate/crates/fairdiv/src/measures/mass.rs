//! Integer scaling for one agent's valuation row.
//!
//! Every fairness ratio compares quantities derived from a single agent's
//! values, so multiplying that row by a positive constant changes nothing.
//! Scaling by the lcm of the denominators turns the row into integers, which
//! lets the partition solvers run on machine words; results are divided back
//! by the scale exactly. Rows whose scaled total would not fit comfortably in
//! a `u128` fall back to big integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::value::Value;

/// Non-negative integer magnitude the solvers compute with.
pub(crate) trait Mass: Clone + Ord + std::fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    /// Requires `self >= other`.
    fn sub(&self, other: &Self) -> Self;
    fn mul_small(&self, k: u64) -> Self;
    fn to_biguint(&self) -> BigUint;
}

impl Mass for u128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, other: &Self) -> Self {
        // totals are capped at 2^96 by scale_row, so sums cannot overflow
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_small(&self, k: u64) -> Self {
        self.checked_mul(k as u128).expect("mass product overflow")
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Mass for BigUint {
    fn zero() -> Self {
        <BigUint as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_small(&self, k: u64) -> Self {
        self * k
    }
    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
}

/// One agent's values over a list of goods, scaled to integers.
pub(crate) struct ScaledRow {
    /// Multiplier applied to the original values.
    pub scale: BigUint,
    pub entries: ScaledEntries,
}

pub(crate) enum ScaledEntries {
    Small(Vec<u128>),
    Big(Vec<BigUint>),
}

// Keeping totals at or below 2^96 leaves headroom in u128 for the solvers'
// products (threshold times part count, doubled sums).
const SMALL_TOTAL_LIMIT: u128 = 1 << 96;

/// Scales `values` by the lcm of their denominators.
pub(crate) fn scale_row<'a, I>(values: I) -> ScaledRow
where
    I: IntoIterator<Item = &'a Value>,
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let mut scale = BigUint::one();
    for v in iter.clone() {
        scale = scale.lcm(&v.denom());
    }
    let scaled: Vec<BigUint> = iter
        .map(|v| v.numer() * (&scale / v.denom()))
        .collect();
    let total: BigUint = scaled.iter().sum();
    let entries = match total.to_u128() {
        Some(t) if t <= SMALL_TOTAL_LIMIT => ScaledEntries::Small(
            scaled
                .iter()
                .map(|b| b.to_u128().expect("entry below total"))
                .collect(),
        ),
        _ => ScaledEntries::Big(scaled),
    };
    ScaledRow { scale, entries }
}

/// Converts a scaled magnitude back to an exact value.
pub(crate) fn unscale<M: Mass>(mass: &M, scale: &BigUint) -> Value {
    Value::from_big(mass.to_biguint(), scale.clone())
}

/// Goods grouped by equal positive scaled value, largest value first.
/// `goods[k]` lists the (caller-side) indices of the goods in class `k`.
pub(crate) struct Classes<M> {
    pub values: Vec<M>,
    pub goods: Vec<Vec<usize>>,
    /// Indices of goods the agent values at zero.
    pub zeros: Vec<usize>,
    pub total: M,
}

impl<M: Mass> Classes<M> {
    pub fn counts(&self) -> Vec<u32> {
        self.goods.iter().map(|g| g.len() as u32).collect()
    }

    pub fn positive_count(&self) -> usize {
        self.goods.iter().map(Vec::len).sum()
    }

    /// Product of (count + 1) over classes, the solver state-space measure;
    /// saturates instead of overflowing.
    pub fn state_space(&self) -> u128 {
        self.goods
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128 + 1))
    }
}

/// Collapses `entries[k]` (the scaled value of good `ids[k]`) into classes.
pub(crate) fn collapse<M: Mass>(entries: &[M], ids: &[usize]) -> Classes<M> {
    debug_assert_eq!(entries.len(), ids.len());
    let mut order: Vec<usize> = (0..entries.len()).collect();
    // descending by value, ties by good id for determinism
    order.sort_by(|&a, &b| entries[b].cmp(&entries[a]).then(ids[a].cmp(&ids[b])));

    let mut values: Vec<M> = Vec::new();
    let mut goods: Vec<Vec<usize>> = Vec::new();
    let mut zeros = Vec::new();
    let mut total = M::zero();
    for k in order {
        let v = &entries[k];
        if v.is_zero() {
            zeros.push(ids[k]);
            continue;
        }
        total = total.add(v);
        if values.last() == Some(v) {
            goods.last_mut().unwrap().push(ids[k]);
        } else {
            values.push(v.clone());
            goods.push(vec![ids[k]]);
        }
    }
    zeros.sort_unstable();
    Classes {
        values,
        goods,
        zeros,
        total,
    }
}
