//! A catalog of named instances whose fairness profiles are known in closed
//! form.
//!
//! Each entry builds an instance together with a distinguished allocation,
//! the exact ratio every listed notion attains on it, and a note explaining
//! what the example demonstrates. Entries take rational parameters with
//! defaults; out-of-domain parameters are rejected with a message that cites
//! the violated constraint. The unit tests pin the promise that
//! [`full_report`](crate::measures::full_report) reproduces every expected
//! ratio exactly.
//!
//! Several entries use *owner agents*: every agent other than the first
//! values exactly the goods of their own bundle at 1 and everything else at
//! 0. Their envy ratios are all `Unbounded` and their pairwise-share ratios
//! never fall below 1, so the first agent's ratios are the instance's ratios
//! and the constructions stay readable.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::One;

use crate::instance::{Allocation, Instance};
use crate::measures::Notion;
use crate::value::{Ratio, Value};

/// Why a gallery lookup or build failed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GalleryError {
    #[error("unknown gallery entry `{0}`")]
    UnknownEntry(String),
    #[error("entry `{entry}` has no parameter `{param}` (available: {available})")]
    UnknownParam {
        entry: &'static str,
        param: String,
        available: String,
    },
    #[error("entry `{entry}`: {param} = {given} violates the constraint: {constraint}")]
    OutOfDomain {
        entry: &'static str,
        param: &'static str,
        given: String,
        constraint: &'static str,
    },
}

/// A built gallery entry: the instance, its distinguished allocation, the
/// exact ratio each listed notion attains, and a prose note.
#[derive(Clone, Debug)]
pub struct GalleryItem {
    pub instance: Instance,
    pub allocation: Allocation,
    /// Exact aggregate ratio per notion. Notions whose value depends on
    /// details the entry does not control are omitted rather than guessed.
    pub expected: BTreeMap<Notion, Ratio>,
    pub note: String,
}

/// A named construction with rational parameters.
pub struct GalleryEntry {
    /// Stable identifier used on the command line and in tests.
    pub id: &'static str,
    /// One-line description for listings.
    pub summary: &'static str,
    /// Parameter names with their default values, in display order.
    pub params: &'static [(&'static str, &'static str)],
    build: fn(&ParamSet) -> Result<GalleryItem, GalleryError>,
}

impl GalleryEntry {
    /// The defaults as parsed values.
    pub fn default_params(&self) -> BTreeMap<&'static str, Value> {
        self.params
            .iter()
            .map(|(name, default)| {
                let value =
                    Value::from_str(default).expect("gallery default parameters are valid");
                (*name, value)
            })
            .collect()
    }

    /// Build the entry with `overrides` applied on top of the defaults.
    pub fn build(
        &'static self,
        overrides: &BTreeMap<String, Value>,
    ) -> Result<GalleryItem, GalleryError> {
        let mut values = self.default_params();
        for (name, value) in overrides {
            let known = self.params.iter().find(|(known, _)| known == name);
            let Some((key, _)) = known else {
                let available = if self.params.is_empty() {
                    "none".to_string()
                } else {
                    self.params
                        .iter()
                        .map(|(name, _)| *name)
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                return Err(GalleryError::UnknownParam {
                    entry: self.id,
                    param: name.clone(),
                    available,
                });
            };
            values.insert(key, value.clone());
        }
        (self.build)(&ParamSet {
            entry: self.id,
            values,
        })
    }
}

/// All entries, in stable catalog order.
pub fn list_entries() -> &'static [GalleryEntry] {
    static CATALOG: OnceLock<Vec<GalleryEntry>> = OnceLock::new();
    CATALOG.get_or_init(catalog)
}

/// Look an entry up by id.
pub fn find_entry(id: &str) -> Option<&'static GalleryEntry> {
    list_entries().iter().find(|entry| entry.id == id)
}

/// Build `id` with `overrides` applied on top of its defaults.
pub fn build(id: &str, overrides: &BTreeMap<String, Value>) -> Result<GalleryItem, GalleryError> {
    let entry = find_entry(id).ok_or_else(|| GalleryError::UnknownEntry(id.to_string()))?;
    entry.build(overrides)
}

fn catalog() -> Vec<GalleryEntry> {
    vec![
        GalleryEntry {
            id: "example1",
            summary: "Three agents, five goods: a worked warm-up with two contrasting allocations.",
            params: &[("alloc", "0")],
            build: build_example1,
        },
        GalleryEntry {
            id: "prop1-ef1-not-efx",
            summary: "Dropping the best good forgives what dropping the worst exposes: EF1 = alpha, EFX = alpha/V.",
            params: &[("alpha", "1"), ("V", "1000")],
            build: build_prop1,
        },
        GalleryEntry {
            id: "prop2-tight",
            summary: "An exactly EFX allocation whose maximin-share ratio is 2/3.",
            params: &[("n", "2")],
            build: build_prop2,
        },
        GalleryEntry {
            id: "prop3-8-13",
            summary: "An exactly EFX allocation for four or more agents at maximin ratio 8/13.",
            params: &[("n", "4")],
            build: build_prop3,
        },
        GalleryEntry {
            id: "prop4-2agent",
            summary: "alpha-EFX for two agents with maximin ratio exactly 2*alpha/(2+alpha).",
            params: &[("alpha", "1/2")],
            build: build_prop4_two,
        },
        GalleryEntry {
            id: "prop4-4agent",
            summary: "alpha-EFX for four agents with maximin ratio exactly 8*alpha/(11+2*alpha).",
            params: &[("alpha", "1/2"), ("k", "4")],
            build: build_prop4_four,
        },
        GalleryEntry {
            id: "prop5-tight",
            summary: "alpha-EF1 with maximin ratio exactly alpha/(n-1+alpha).",
            params: &[("n", "3"), ("alpha", "1/2"), ("V", "1000")],
            build: build_prop5,
        },
        GalleryEntry {
            id: "prop6-tight",
            summary: "alpha-EFX with pairwise-share ratio exactly 2*alpha/(2+alpha).",
            params: &[("n", "3"), ("alpha", "1/2")],
            build: build_prop6,
        },
        GalleryEntry {
            id: "prop7-tight",
            summary: "alpha-EF1 with pairwise-share ratio exactly alpha/(1+alpha).",
            params: &[("n", "3"), ("alpha", "1/2"), ("V", "1000")],
            build: build_prop7,
        },
        GalleryEntry {
            id: "prop9-2-3",
            summary: "Pairwise shares met exactly while the full maximin ratio is 2/3.",
            params: &[("n", "3")],
            build: build_prop9,
        },
        GalleryEntry {
            id: "sylvester-pmms",
            summary: "Exact pairwise shares with a maximin ratio that sinks along the sequence 3, 7, 43, ...",
            params: &[("n", "21")],
            build: build_sylvester,
        },
        GalleryEntry {
            id: "prop10-tight",
            summary: "alpha-PMMS with maximin ratio exactly alpha/(n-1-alpha*(n-2)).",
            params: &[("n", "3"), ("alpha", "1/2"), ("V", "1000")],
            build: build_prop10,
        },
        GalleryEntry {
            id: "prop11-mms-not-pmms",
            summary: "Full maximin share met exactly while pairwise shares collapse to the epsilon scale.",
            params: &[("n", "3"), ("epsilon", "1/1000")],
            build: build_prop11,
        },
        GalleryEntry {
            id: "prop12-tight",
            summary: "alpha-PMMS with EF1 pinned near the best transferable bound alpha/(2-alpha).",
            params: &[("k", "5"), ("alpha", "1/2"), ("epsilon", "1/1000")],
            build: build_prop12,
        },
        GalleryEntry {
            id: "prop14-pmms-not-efx",
            summary: "Exact alpha pairwise shares while EFX is only 1/V.",
            params: &[("n", "3"), ("alpha", "1/2"), ("V", "1000")],
            build: build_prop14,
        },
    ]
}

// ---------------------------------------------------------------------------
// Parameter handling
// ---------------------------------------------------------------------------

struct ParamSet {
    entry: &'static str,
    values: BTreeMap<&'static str, Value>,
}

impl ParamSet {
    fn value(&self, name: &'static str) -> &Value {
        &self.values[name]
    }

    fn require(
        &self,
        param: &'static str,
        ok: bool,
        constraint: &'static str,
    ) -> Result<(), GalleryError> {
        if ok {
            Ok(())
        } else {
            Err(GalleryError::OutOfDomain {
                entry: self.entry,
                param,
                given: self.value(param).to_string(),
                constraint,
            })
        }
    }

    /// An integer parameter within `lo..=hi`.
    fn count(
        &self,
        param: &'static str,
        lo: u64,
        hi: u64,
        constraint: &'static str,
    ) -> Result<u64, GalleryError> {
        let value = self.value(param);
        let as_int = if value.denom().is_one() {
            u64::try_from(value.numer()).ok()
        } else {
            None
        };
        match as_int {
            Some(k) if (lo..=hi).contains(&k) => Ok(k),
            _ => Err(GalleryError::OutOfDomain {
                entry: self.entry,
                param,
                given: value.to_string(),
                constraint,
            }),
        }
    }

    /// A rational in `(0, 1]`, the usual domain for `alpha`.
    fn unit_interval(&self, param: &'static str) -> Result<Value, GalleryError> {
        let value = self.value(param).clone();
        self.require(
            param,
            !value.is_zero() && value <= Value::one(),
            "0 < alpha <= 1",
        )?;
        Ok(value)
    }
}

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

fn int(n: u64) -> Value {
    Value::from_int(n)
}

fn frac(num: u64, den: u64) -> Value {
    Value::from_fraction(num, den)
}

fn fin(v: Value) -> Ratio {
    Ratio::Finite(v)
}

/// `a - b` for gallery arithmetic that is non-negative by construction.
fn minus(a: &Value, b: &Value) -> Value {
    a.checked_sub(b)
        .expect("gallery arithmetic stays non-negative inside the validated domain")
}

fn identical_instance(id: &str, row: Vec<Value>, agents: usize) -> Instance {
    Instance::from_rows(vec![row; agents])
        .expect("gallery rows are rectangular and non-negative")
        .with_name(id)
}

/// Agent 1 values goods by `row`; every later agent values exactly the goods
/// of their own bundle at 1. See the module notes on owner agents.
fn owner_instance(id: &str, row: Vec<Value>, bundles: &[Vec<usize>]) -> Instance {
    let goods = row.len();
    let mut rows = vec![vec![Value::zero(); goods]; bundles.len()];
    rows[0] = row;
    for (agent, bundle) in bundles.iter().enumerate().skip(1) {
        for &good in bundle {
            rows[agent][good] = Value::one();
        }
    }
    Instance::from_rows(rows)
        .expect("gallery rows are rectangular and non-negative")
        .with_name(id)
}

fn allocation(instance: &Instance, bundles: Vec<Vec<usize>>) -> Allocation {
    Allocation::new(bundles, instance)
        .expect("gallery allocations assign each good exactly once")
}

// ---------------------------------------------------------------------------
// Entry builders
// ---------------------------------------------------------------------------

fn build_example1(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let choice = p.count("alloc", 0, 1, "alloc is 0 or 1 (two stored allocations)")?;
    let rows: [[u64; 5]; 3] = [[3, 1, 1, 1, 4], [4, 3, 3, 1, 4], [3, 2, 1, 3, 4]];
    let instance = Instance::new(
        Some("example1".into()),
        vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
        rows.iter()
            .map(|row| row.iter().map(|&v| Value::from_int(v)).collect())
            .collect(),
    )
    .expect("the worked instance is valid");
    let (bundles, expected, note) = if choice == 0 {
        (
            vec![vec![4], vec![1, 2], vec![0, 3]],
            BTreeMap::from([
                (Notion::Ef, Ratio::finite(1, 1)),
                (Notion::Ef1, Ratio::finite(4, 1)),
                (Notion::Efx, Ratio::finite(4, 3)),
                (Notion::Mms, Ratio::finite(4, 3)),
                (Notion::Pmms, Ratio::finite(1, 1)),
            ]),
            "Allocation 0 of the warm-up instance: envy-free outright, with every \
             other notion met with room to spare.",
        )
    } else {
        (
            vec![vec![0], vec![1, 4], vec![2, 3]],
            BTreeMap::from([
                (Notion::Ef, Ratio::finite(3, 5)),
                (Notion::Ef1, Ratio::finite(2, 1)),
                (Notion::Efx, Ratio::finite(3, 4)),
                (Notion::Mms, Ratio::finite(1, 1)),
                (Notion::Pmms, Ratio::finite(3, 4)),
            ]),
            "Allocation 1 of the warm-up instance: everyone keeps their maximin \
             share, yet removing the cheapest good from an envied bundle still \
             leaves envy (EFX = 3/4).",
        )
    };
    let allocation = allocation(&instance, bundles);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: note.to_string(),
    })
}

fn build_prop1(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let alpha = p.unit_interval("alpha")?;
    let big = p.value("V").clone();
    p.require("V", big >= int(2), "V >= 2 (the large good must dominate)")?;
    let instance = identical_instance(
        "prop1-ef1-not-efx",
        vec![big.clone(), Value::one(), alpha.clone()],
        2,
    );
    let allocation = allocation(&instance, vec![vec![0, 1], vec![2]]);
    let one_plus_alpha = &Value::one() + &alpha;
    let share = &alpha / &one_plus_alpha;
    let expected = BTreeMap::from([
        (Notion::Ef, fin(&alpha / &(&big + &Value::one()))),
        (Notion::Ef1, fin(alpha.clone())),
        (Notion::Efx, fin(&alpha / &big)),
        (Notion::Mms, fin(share.clone())),
        (Notion::Pmms, fin(share)),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: format!(
            "Two identical agents split goods V, 1, alpha. The second agent's \
             bundle is the single alpha-good: dropping the best good of the \
             other bundle (V) leaves denominator 1, so EF1 = alpha, while \
             dropping the worst (1) leaves denominator V, so EFX = alpha/V = {}.",
            &alpha / &big
        ),
    })
}

fn build_prop2(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 2, 100, "n is an integer with 2 <= n <= 100")? as usize;
    let mut row = vec![int(2), int(2), int(1), int(1)];
    row.extend(std::iter::repeat_with(|| int(3)).take(n - 2));
    let instance = identical_instance("prop2-tight", row, n);
    let mut bundles = vec![vec![0, 1], vec![2, 3]];
    bundles.extend((4..n + 2).map(|good| vec![good]));
    let allocation = allocation(&instance, bundles);
    let expected = BTreeMap::from([
        (Notion::Ef, Ratio::finite(1, 2)),
        (Notion::Ef1, Ratio::finite(1, 1)),
        (Notion::Efx, Ratio::finite(1, 1)),
        (Notion::Mms, Ratio::finite(2, 3)),
        (Notion::Pmms, Ratio::finite(2, 3)),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "Identical agents share goods 2, 2, 1, 1 (plus value-3 filler for \
               agents beyond the first two). Giving {2,2} and {1,1} to the first \
               two agents is exactly envy-free up to any good, yet the maximin \
               share is 3 (split {2,1} / {2,1}), so the {1,1} holder sits at 2/3 \
               of it — the worst possible for an EFX allocation here."
            .to_string(),
    })
}

fn build_prop3(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 4, 100, "n is an integer with 4 <= n <= 100")? as usize;
    let mut row = Vec::new();
    row.extend(std::iter::repeat_with(|| frac(1, 8)).take(4));
    row.extend(std::iter::repeat_with(|| frac(1, 2)).take(4));
    row.extend(std::iter::repeat_with(Value::one).take(4 + 2 * (n - 4)));
    let instance = identical_instance("prop3-8-13", row, n);
    let mut bundles = vec![
        vec![0, 1, 2, 3, 4],
        vec![5, 6, 7],
        vec![8, 9],
        vec![10, 11],
    ];
    bundles.extend((0..n - 4).map(|extra| vec![12 + 2 * extra, 13 + 2 * extra]));
    let allocation = allocation(&instance, bundles);
    let expected = BTreeMap::from([
        (Notion::Ef, Ratio::finite(1, 2)),
        (Notion::Ef1, Ratio::finite(1, 1)),
        (Notion::Efx, Ratio::finite(1, 1)),
        (Notion::Mms, Ratio::finite(8, 13)),
        (Notion::Pmms, Ratio::finite(2, 3)),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "Identical agents value four goods at 1/8, four at 1/2 and the rest \
               at 1. Bundling the four eighths with one half is exactly EFX, but \
               the maximin share is 13/8 (four bundles {1, 1/2, 1/8}), leaving \
               that agent at 8/13 — below the 2/3 reachable with up to three \
               agents, and the worst known for an exactly-EFX allocation."
            .to_string(),
    })
}

fn build_prop4_two(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let alpha = p.unit_interval("alpha")?;
    let half_alpha = &alpha / &int(2);
    let instance = identical_instance(
        "prop4-2agent",
        vec![
            Value::one(),
            Value::one(),
            half_alpha.clone(),
            half_alpha.clone(),
        ],
        2,
    );
    let allocation = allocation(&instance, vec![vec![0, 1], vec![2, 3]]);
    let share = &(&int(2) * &alpha) / &(&int(2) + &alpha);
    let expected = BTreeMap::from([
        (Notion::Ef, fin(half_alpha)),
        (Notion::Ef1, fin(alpha.clone())),
        (Notion::Efx, fin(alpha.clone())),
        (Notion::Mms, fin(share.clone())),
        (Notion::Pmms, fin(share)),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "Two identical agents, goods 1, 1, alpha/2, alpha/2. Handing over \
               both unit goods is alpha-EFX, and the maximin share 1 + alpha/2 \
               puts the other agent at exactly 2*alpha/(2+alpha): the strongest \
               share ratio that alpha-EFX can force for two agents."
            .to_string(),
    })
}

fn build_prop4_four(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let alpha = p.value("alpha").clone();
    p.require(
        "alpha",
        alpha >= frac(1, 2) && alpha <= Value::one(),
        "1/2 <= alpha <= 1",
    )?;
    let k = p.count("k", 1, 100, "k is an integer with 1 <= k <= 100")? as usize;
    let sliver_share = &(&int(k as u64) * &minus(&(&int(2) * &alpha), &Value::one()))
        / &(&int(8) * &alpha);
    p.require(
        "k",
        sliver_share.denom().is_one(),
        "k*(2*alpha - 1)/(8*alpha) is an integer, so the balanced four-way split \
         can hand whole slivers to each anchored bundle",
    )?;
    let sliver = &alpha / &int(k as u64);
    let mut row = Vec::new();
    row.extend(std::iter::repeat_with(|| sliver.clone()).take(k));
    row.extend(std::iter::repeat_with(|| frac(1, 2)).take(3));
    row.extend(std::iter::repeat_with(Value::one).take(4));
    let instance = identical_instance("prop4-4agent", row, 4);
    let bundles = vec![
        (0..k).collect(),
        vec![k, k + 1, k + 2],
        vec![k + 3, k + 4],
        vec![k + 5, k + 6],
    ];
    let allocation = allocation(&instance, bundles);
    let expected = BTreeMap::from([
        (Notion::Ef, fin(&alpha / &int(2))),
        (Notion::Ef1, fin(alpha.clone())),
        (Notion::Efx, fin(alpha.clone())),
        (
            Notion::Mms,
            fin(&(&int(8) * &alpha) / &(&int(11) + &(&int(2) * &alpha))),
        ),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "Four identical agents; one bundle holds k slivers worth alpha in \
               total, the others hold {1/2,1/2,1/2}, {1,1} and {1,1}. The split \
               is alpha-EFX, and a balanced partition worth (11+2*alpha)/8 per \
               bundle pins the sliver-holder's maximin ratio to exactly \
               8*alpha/(11+2*alpha)."
            .to_string(),
    })
}

fn build_prop5(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 2, 100, "n is an integer with 2 <= n <= 100")? as usize;
    let alpha = p.unit_interval("alpha")?;
    let big = p.value("V").clone();
    p.require(
        "V",
        big >= int(n as u64),
        "V >= n (each large good must anchor its own maximin bundle)",
    )?;
    let one_minus_alpha = minus(&Value::one(), &alpha);
    let mut row = vec![alpha.clone()];
    for _ in 1..n {
        row.push(alpha.clone());
        row.push(one_minus_alpha.clone());
        row.push(big.clone());
    }
    let instance = identical_instance("prop5-tight", row, n);
    let mut bundles = vec![vec![0]];
    bundles.extend((1..n).map(|k| vec![3 * k - 2, 3 * k - 1, 3 * k]));
    let allocation = allocation(&instance, bundles);
    let expected = BTreeMap::from([
        (Notion::Ef, fin(&alpha / &(&Value::one() + &big))),
        (Notion::Ef1, fin(alpha.clone())),
        (
            Notion::Mms,
            fin(&alpha / &(&int(n as u64 - 1) + &alpha)),
        ),
        (Notion::Pmms, fin(&alpha / &(&Value::one() + &alpha))),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "Identical agents; the first keeps a lone alpha-good while each \
               other bundle packs {alpha, 1-alpha, V}. Dropping V from any rival \
               bundle leaves exactly 1, so EF1 = alpha, but the maximin share is \
               n-1+alpha (spread the V goods, pool everything else), leaving the \
               first agent at exactly alpha/(n-1+alpha). EFX is omitted: which \
               good counts as cheapest flips with alpha."
            .to_string(),
    })
}

fn build_prop6(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 2, 100, "n is an integer with 2 <= n <= 100")? as usize;
    let alpha = p.unit_interval("alpha")?;
    let half_alpha = &alpha / &int(2);
    let mut row = vec![half_alpha.clone(), half_alpha.clone()];
    row.extend(std::iter::repeat_with(Value::one).take(2 * (n - 1)));
    let instance = identical_instance("prop6-tight", row, n);
    let mut bundles = vec![vec![0, 1]];
    bundles.extend((1..n).map(|k| vec![2 * k, 2 * k + 1]));
    let allocation = allocation(&instance, bundles);
    let share = &(&int(2) * &alpha) / &(&int(2) + &alpha);
    let expected = BTreeMap::from([
        (Notion::Ef, fin(half_alpha)),
        (Notion::Ef1, fin(alpha.clone())),
        (Notion::Efx, fin(alpha.clone())),
        (Notion::Mms, fin(share.clone())),
        (Notion::Pmms, fin(share)),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "Identical agents; the first holds two alpha/2 slivers, everyone \
               else a pair of unit goods. The split is exactly alpha-EFX, and \
               against any neighbour the two-way share of {alpha/2, alpha/2, 1, 1} \
               is 1 + alpha/2, pinning the pairwise ratio to 2*alpha/(2+alpha) \
               — the strongest pairwise share alpha-EFX can force."
            .to_string(),
    })
}

fn build_prop7(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 3, 100, "n is an integer with 3 <= n <= 100")? as usize;
    let alpha = p.unit_interval("alpha")?;
    let big = p.value("V").clone();
    p.require(
        "V",
        big >= &Value::one() + &alpha,
        "V >= 1 + alpha (the large good must cover the two-way share)",
    )?;
    let mut row = vec![alpha.clone(), Value::one(), big.clone()];
    row.extend(std::iter::repeat_with(|| alpha.clone()).take(n - 2));
    let mut bundles = vec![vec![0], vec![1, 2]];
    bundles.extend((3..n + 1).map(|good| vec![good]));
    let instance = owner_instance("prop7-tight", row, &bundles);
    let allocation = allocation(&instance, bundles);
    let expected = BTreeMap::from([
        (Notion::Ef, fin(&alpha / &(&Value::one() + &big))),
        (Notion::Ef1, fin(alpha.clone())),
        (Notion::Efx, fin(&alpha / &big)),
        (Notion::Pmms, fin(&alpha / &(&Value::one() + &alpha))),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "The first agent keeps one alpha-good while the bundle {1, V} sits \
               next door (the remaining goods are singletons the first agent \
               values at alpha, held by their owners). Dropping V leaves 1, so \
               EF1 = alpha; the two-way share of {alpha, 1, V} is 1 + alpha, so \
               PMMS = alpha/(1+alpha) exactly — EF1's best possible pairwise \
               transfer. The full maximin share is omitted: it tracks the \
               owner-agent filler rather than the construction."
            .to_string(),
    })
}

fn build_prop9(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 3, 100, "n is an integer with 3 <= n <= 100")? as usize;
    let mut row = vec![frac(1, 2), frac(1, 2), frac(1, 2)];
    row.extend(std::iter::repeat_with(Value::one).take(3 + 2 * (n - 3)));
    let mut bundles = vec![vec![3], vec![0, 1, 2], vec![4, 5]];
    bundles.extend((0..n - 3).map(|extra| vec![6 + 2 * extra, 7 + 2 * extra]));
    let instance = owner_instance("prop9-2-3", row, &bundles);
    let allocation = allocation(&instance, bundles);
    let expected = BTreeMap::from([
        (Notion::Ef, Ratio::finite(1, 2)),
        (Notion::Ef1, Ratio::finite(1, 1)),
        (Notion::Efx, Ratio::finite(1, 1)),
        (Notion::Mms, Ratio::finite(2, 3)),
        (Notion::Pmms, Ratio::finite(1, 1)),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "The first agent holds a single unit good; three half-goods and \
               pairs of unit goods sit with their owners. Every two-way share \
               the first agent could claim is exactly 1, so PMMS = 1, yet the \
               full n-way maximin share is 3/2 (three {1, 1/2} bundles plus unit \
               pairs), leaving MMS = 2/3: exact pairwise shares do not lift the \
               global share above 2/3 even for three agents."
            .to_string(),
    })
}

fn build_sylvester(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count(
        "n",
        3,
        100,
        "n is an integer with 3 <= n <= 100 (larger instances outgrow the desk-scale solvers)",
    )? as usize;
    // Bundle blueprint: one lone unit good, then for each tier (size s, item
    // value 1/(s-1)) exactly floor(n/s) bundles of s equal items, then pairs
    // of unit goods for the remaining agents. Removing one item from any tier
    // bundle leaves exactly (s-1)/(s-1) = 1.
    let tiers: [(usize, Value); 4] = [
        (3, frac(1, 2)),
        (7, frac(1, 6)),
        (43, frac(1, 42)),
        (1807, frac(1, 1806)),
    ];
    let mut row = vec![Value::one()];
    let mut bundles = vec![vec![0usize]];
    let mut next_good = 1usize;
    let mut tier_counts: Vec<(Value, usize)> = Vec::new();
    for (size, value) in &tiers {
        let copies = n / size;
        tier_counts.push((value.clone(), copies * size));
        for _ in 0..copies {
            bundles.push((next_good..next_good + size).collect());
            row.extend(std::iter::repeat_with(|| value.clone()).take(*size));
            next_good += size;
        }
    }
    let rest = n - bundles.len();
    debug_assert!(rest >= 1, "the tier floors always leave unit pairs");
    for _ in 0..rest {
        bundles.push(vec![next_good, next_good + 1]);
        row.push(Value::one());
        row.push(Value::one());
        next_good += 2;
    }
    let ones_count = 1 + 2 * rest;
    let instance = owner_instance("sylvester-pmms", row, &bundles);
    let allocation = allocation(&instance, bundles);
    let mut expected = BTreeMap::from([
        (Notion::Ef, Ratio::finite(1, 2)),
        (Notion::Ef1, Ratio::finite(1, 1)),
        (Notion::Efx, Ratio::finite(1, 1)),
        (Notion::Pmms, Ratio::finite(1, 1)),
    ]);
    // When every value class has exactly n goods, the partition giving each
    // of the n bundles one good of every class is perfectly balanced, so the
    // maximin share equals 1 + the sum of the tier item values. Otherwise the
    // exact share has no closed form and is omitted.
    let perfect = ones_count == n
        && tier_counts
            .iter()
            .all(|(_, count)| *count == 0 || *count == n);
    if perfect {
        let mut share = Value::one();
        for (value, count) in &tier_counts {
            if *count > 0 {
                share = &share + value;
            }
        }
        expected.insert(Notion::Mms, fin(&Value::one() / &share));
    }
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "The first agent holds one unit good; rival bundles follow the \
               doubling tiers 3 x 1/2, 7 x 1/6, 43 x 1/42, ... (each worth just \
               over 1, but exactly 1 after removing any single item), padded \
               with unit pairs. Every two-way share is exactly 1, so the \
               allocation is fully PMMS and EFX, yet whenever the tiers line up \
               perfectly (n = 3, 21, ...) the n-way maximin share grows to \
               1 + 1/2 + 1/6 + ..., dragging MMS down toward ~0.585: pairwise \
               shares cannot hold the global share above that slide."
            .to_string(),
    })
}

fn build_prop10(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 3, 100, "n is an integer with 3 <= n <= 100")? as usize;
    let alpha = p.unit_interval("alpha")?;
    let big = p.value("V").clone();
    p.require(
        "V",
        big >= int(n as u64),
        "V >= n (the huge goods must exceed every bundle built without them)",
    )?;
    let one_minus_alpha = minus(&Value::one(), &alpha);
    let mut row = vec![alpha.clone()];
    for _ in 1..n {
        row.push(one_minus_alpha.clone());
        row.push(big.clone());
    }
    let mut bundles = vec![vec![0]];
    bundles.extend((1..n).map(|k| vec![2 * k - 1, 2 * k]));
    let instance = owner_instance("prop10-tight", row, &bundles);
    let allocation = allocation(&instance, bundles);
    let mms_denom = minus(&int(n as u64 - 1), &(&alpha * &int(n as u64 - 2)));
    let mut expected = BTreeMap::from([
        (Notion::Ef, fin(&alpha / &(&one_minus_alpha + &big))),
        (Notion::Pmms, fin(alpha.clone())),
        (Notion::Mms, fin(&alpha / &mms_denom)),
    ]);
    if alpha < Value::one() {
        expected.insert(Notion::Ef1, fin(&alpha / &one_minus_alpha));
        expected.insert(Notion::Efx, fin(&alpha / &big));
    } else {
        expected.insert(Notion::Ef1, Ratio::Unbounded);
        expected.insert(Notion::Efx, Ratio::Unbounded);
    }
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "The first agent keeps one alpha-good; each rival bundle pairs a \
               (1-alpha)-good with a huge V-good and belongs to its owner. Every \
               two-way share is exactly 1, so PMMS = alpha on the nose, yet the \
               n-way maximin share is n-1-alpha*(n-2) (spread the V goods, pool \
               the rest), so MMS = alpha/(n-1-alpha*(n-2)): no guarantee can \
               transfer alpha-PMMS to a better global share than this."
            .to_string(),
    })
}

fn build_prop11(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 3, 100, "n is an integer with 3 <= n <= 100")? as usize;
    let eps = p.value("epsilon").clone();
    p.require(
        "epsilon",
        !eps.is_zero() && eps < Value::one(),
        "0 < epsilon < 1",
    )?;
    let mut row = vec![eps.clone()];
    row.extend(std::iter::repeat_with(Value::one).take(n - 1));
    row.extend(std::iter::repeat_with(Value::zero).take(n - 2));
    let mut bundles = vec![vec![0], (1..n).collect::<Vec<_>>()];
    bundles.extend((n..2 * n - 2).map(|good| vec![good]));
    let instance = owner_instance("prop11-mms-not-pmms", row, &bundles);
    let allocation = allocation(&instance, bundles);
    let pmms = if n % 2 == 1 {
        &(&int(2) * &eps) / &int(n as u64 - 1)
    } else {
        &(&int(2) * &eps) / &(&int(n as u64 - 2) + &(&int(2) * &eps))
    };
    let expected = BTreeMap::from([
        (Notion::Ef, fin(&eps / &int(n as u64 - 1))),
        (Notion::Ef1, fin(&eps / &int(n as u64 - 2))),
        (Notion::Efx, fin(&eps / &int(n as u64 - 2))),
        (Notion::Mms, Ratio::finite(1, 1)),
        (Notion::Pmms, fin(pmms)),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "The first agent values one good at epsilon, n-1 goods at 1, and \
               n-2 worthless goods at 0. With n bundles the maximin share is \
               only epsilon (some bundle misses every unit good), so holding the \
               epsilon-good alone meets MMS exactly — while the pairwise share \
               against the bundle of unit goods collapses to the epsilon scale, \
               and so do EF1 and EFX. Meeting the full maximin share transfers \
               nothing to the other notions."
            .to_string(),
    })
}

fn build_prop12(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let k = p.count("k", 2, 100, "k is an integer with 2 <= k <= 100")? as usize;
    let alpha = p.value("alpha").clone();
    p.require(
        "alpha",
        !alpha.is_zero() && alpha < Value::one(),
        "0 < alpha < 1",
    )?;
    let two_minus_alpha = minus(&int(2), &alpha);
    let eps = p.value("epsilon").clone();
    p.require(
        "epsilon",
        !eps.is_zero() && eps < &two_minus_alpha / &int(k as u64),
        "0 < epsilon < (2 - alpha)/k (the tiny good must stay the smallest)",
    )?;
    // The two-way share of the whole pile must be exactly 1: some subset of
    // the graded goods must hit the half-point on the nose, and no other
    // subset may land within epsilon of it. In units of 1/k this reads
    // i*alpha + j*(2 - alpha) compared against k.
    let target = int(k as u64);
    let window = &eps * &target;
    let mut exact_half = false;
    let mut near_miss = false;
    for i in 0..=k as u64 {
        for j in 0..=k as u64 {
            let sum = &(&int(i) * &alpha) + &(&int(j) * &two_minus_alpha);
            if sum == target {
                exact_half = true;
            } else {
                let dist = if sum > target {
                    minus(&sum, &target)
                } else {
                    minus(&target, &sum)
                };
                if dist < window {
                    near_miss = true;
                }
            }
        }
    }
    p.require(
        "alpha",
        exact_half,
        "some subset of the graded goods sums to exactly half the non-epsilon \
         total: i*alpha + j*(2 - alpha) = k for integers 0 <= i, j <= k",
    )?;
    p.require(
        "epsilon",
        !near_miss,
        "every subset of the graded goods other than the exact half stays \
         outside (k*(1 - epsilon), k*(1 + epsilon)), keeping the two-way share \
         at exactly 1",
    )?;
    let small = &alpha / &int(k as u64);
    let large = &two_minus_alpha / &int(k as u64);
    let mut row = Vec::new();
    row.extend(std::iter::repeat_with(|| small.clone()).take(k));
    row.extend(std::iter::repeat_with(|| large.clone()).take(k));
    row.push(eps.clone());
    let bundles = vec![(0..k).collect::<Vec<_>>(), (k..2 * k + 1).collect()];
    let instance = owner_instance("prop12-tight", row, &bundles);
    let allocation = allocation(&instance, bundles);
    let ef1_denom = &(&two_minus_alpha * &minus(&Value::one(), &frac(1, k as u64))) + &eps;
    let expected = BTreeMap::from([
        (Notion::Ef, fin(&alpha / &(&two_minus_alpha + &eps))),
        (Notion::Ef1, fin(&alpha / &ef1_denom)),
        (Notion::Efx, fin(&alpha / &two_minus_alpha)),
        (Notion::Mms, fin(alpha.clone())),
        (Notion::Pmms, fin(alpha.clone())),
    ]);
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: format!(
            "The first agent keeps k goods worth alpha in total; the rival \
             bundle holds k goods worth 2-alpha plus one epsilon-good. The \
             two-way share of everything is exactly 1, so PMMS = alpha, while \
             dropping the rival bundle's best good leaves (2-alpha)(1-1/k) + \
             epsilon. As k grows and epsilon shrinks the EF1 ratio {} falls \
             toward alpha/(2-alpha) = {}: the strongest EF1 bound any \
             alpha-PMMS allocation must obey.",
            &alpha / &ef1_denom,
            &alpha / &two_minus_alpha
        ),
    })
}

fn build_prop14(p: &ParamSet) -> Result<GalleryItem, GalleryError> {
    let n = p.count("n", 2, 100, "n is an integer with 2 <= n <= 100")? as usize;
    let alpha = p.value("alpha").clone();
    p.require(
        "alpha",
        !alpha.is_zero() && alpha < Value::one(),
        "0 < alpha < 1",
    )?;
    let inv_alpha = &Value::one() / &alpha;
    let big = p.value("V").clone();
    p.require(
        "V",
        big >= inv_alpha,
        "V >= 1/alpha (splitting off the large good must leave the two-way \
         share exactly)",
    )?;
    let companion = minus(&inv_alpha, &Value::one());
    let mut row = vec![big.clone(), companion.clone()];
    row.extend(std::iter::repeat_with(Value::one).take(n - 1));
    let instance = identical_instance("prop14-pmms-not-efx", row, n);
    let mut bundles = vec![vec![0, 1]];
    bundles.extend((2..n + 1).map(|good| vec![good]));
    let allocation = allocation(&instance, bundles);
    let one_minus_alpha = minus(&Value::one(), &alpha);
    let mut expected = BTreeMap::from([
        (
            Notion::Ef,
            fin(&alpha / &(&(&alpha * &big) + &one_minus_alpha)),
        ),
        (Notion::Ef1, fin(&alpha / &one_minus_alpha)),
        (Notion::Efx, fin(&Value::one() / &big)),
        (Notion::Pmms, fin(alpha.clone())),
    ]);
    expected.insert(
        Notion::Mms,
        match n {
            2 => fin(alpha.clone()),
            // Goods are {V, 1/alpha - 1, 1, 1}: when the companion good
            // exceeds 1 the partition {V} | {companion} | {1, 1} lifts the
            // three-way share to min(companion, 2), leaving the unit
            // singletons below their full share.
            3 => {
                let mu = Value::one().max(companion.clone().min(int(2)));
                fin(&Value::one() / &mu)
            }
            // From four agents on, the n - 1 unit goods cannot cover the
            // n - 1 parts beyond {V} in pairs, so the share stays at 1.
            _ => Ratio::finite(1, 1),
        },
    );
    Ok(GalleryItem {
        instance,
        allocation,
        expected,
        note: "Identical agents; one bundle holds {V, 1/alpha - 1}, everyone \
               else a single unit good. The two-way share of {V, 1/alpha - 1, 1} \
               is exactly 1/alpha, so every pairwise share is met at alpha — yet \
               removing the cheapest good from the big bundle still leaves V, so \
               EFX = 1/V: pairwise shares place no floor under EFX."
            .to_string(),
    })
}
