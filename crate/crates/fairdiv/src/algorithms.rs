//! Constructive allocation procedures: round-robin picking, and envy-cycle
//! elimination for instances whose agents rank the goods identically.
//!
//! Both are deterministic; every tie breaks toward the lowest index.

use crate::instance::{Allocation, Instance};
use crate::value::Value;

/// Failure modes of the constructive procedures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgorithmError {
    #[error("agents do not share a common value order")]
    NoCommonOrder,
    #[error("agent order must be a permutation of all {agents} agents")]
    BadAgentOrder { agents: usize },
    #[error("good order covers {got} goods but the instance has {want}")]
    OrderMismatch { got: usize, want: usize },
}

/// A candidate ordering of the goods by non-increasing value, shared by all
/// agents when `is_valid()` holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonOrder {
    order: Vec<usize>,
    valid: bool,
}

impl CommonOrder {
    /// The good indices, best first. When invalid, this is the attempted
    /// ordering, not a witness.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Whether every agent's values are non-increasing along `order`.
    pub fn is_valid(&self) -> bool {
        self.valid
    }
}

/// Searches for an ordering of the goods that every agent agrees ranks them
/// from best to worst.
///
/// Goods are sorted by agent 1's values descending, ties by agent 2's, and
/// so on, with the index as the final tie-break. If any shared order exists,
/// the goods are totally preordered by componentwise dominance and this
/// stacked sort emits one, so the subsequent verification is decisive.
pub fn detect_common_order(inst: &Instance) -> CommonOrder {
    let mut order: Vec<usize> = (0..inst.good_count()).collect();
    order.sort_by(|&a, &b| {
        for agent in 0..inst.agent_count() {
            let cmp = inst.value(agent, b).cmp(inst.value(agent, a));
            if cmp != std::cmp::Ordering::Equal {
                return cmp;
            }
        }
        a.cmp(&b)
    });
    let valid = (0..inst.agent_count()).all(|agent| {
        order
            .windows(2)
            .all(|w| inst.value(agent, w[0]) >= inst.value(agent, w[1]))
    });
    CommonOrder { order, valid }
}

/// Agents pick in cyclic `agent_order`; each takes her most valued remaining
/// good, ties toward the lowest good index. The result is always worth
/// checking with [`crate::measures::full_report`]: it satisfies EF1 by
/// construction and empirically 1/2-PMMS for three or more agents.
pub fn round_robin(inst: &Instance, agent_order: &[usize]) -> Result<Allocation, AlgorithmError> {
    let n = inst.agent_count();
    let mut seen = vec![false; n];
    if agent_order.len() != n || !agent_order.iter().all(|&a| a < n && !std::mem::replace(&mut seen[a], true)) {
        return Err(AlgorithmError::BadAgentOrder { agents: n });
    }

    let m = inst.good_count();
    let mut taken = vec![false; m];
    let mut bundles = vec![Vec::new(); n];
    for turn in 0..m {
        let agent = agent_order[turn % n];
        let pick = (0..m)
            .filter(|&g| !taken[g])
            .max_by(|&a, &b| {
                inst.value(agent, a)
                    .cmp(inst.value(agent, b))
                    .then(b.cmp(&a))
            })
            .expect("goods remain while turns remain");
        taken[pick] = true;
        bundles[agent].push(pick);
    }
    Ok(Allocation::new(bundles, inst).expect("picking covers each good once"))
}

/// Envy-cycle elimination along a shared non-increasing good order.
///
/// Goods are handed out best first, each to an agent nobody envies; when
/// every agent is envied, agents along an envy cycle swap bundles in the
/// direction of their envy, which strictly reduces total envy until a free
/// agent appears. On instances with a valid common order the result is EFX,
/// and empirically 2/3-PMMS and 2/3-MMS.
pub fn ordered_efx(inst: &Instance, order: &CommonOrder) -> Result<Allocation, AlgorithmError> {
    if !order.is_valid() {
        return Err(AlgorithmError::NoCommonOrder);
    }
    let n = inst.agent_count();
    let m = inst.good_count();
    let mut covered = vec![false; m];
    let in_range = order.order().iter().all(|&g| g < m);
    if order.order().len() != m
        || !in_range
        || !order.order().iter().all(|&g| !std::mem::replace(&mut covered[g], true))
    {
        return Err(AlgorithmError::OrderMismatch {
            got: order.order().len(),
            want: m,
        });
    }

    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); n];
    // held[i][j] = agent i's value for the bundle agent j currently holds
    let mut held = vec![vec![Value::zero(); n]; n];
    let envies = |held: &[Vec<Value>], i: usize, j: usize| held[i][i] < held[i][j];
    let mut rotations = 0usize;

    for &good in order.order() {
        loop {
            let source = (0..n).find(|&j| (0..n).all(|i| i == j || !envies(&held, i, j)));
            if let Some(agent) = source {
                bundles[agent].push(good);
                for i in 0..n {
                    held[i][agent] = &held[i][agent] + inst.value(i, good);
                }
                break;
            }

            // everyone is envied, so the envy digraph contains a cycle
            let cycle = find_cycle(n, |i, j| envies(&held, i, j))
                .expect("a graph where every node is envied has a cycle");
            rotations += 1;
            // each rotation deletes at least one envy edge; placements add
            // at most n^2, so the whole run stays within m * n^2 swaps
            assert!(rotations <= m * n * n, "envy rotation failed to make progress");
            let moved: Vec<Vec<usize>> = cycle.iter().map(|&a| bundles[a].clone()).collect();
            let seen: Vec<Vec<Value>> = (0..n)
                .map(|i| cycle.iter().map(|&a| held[i][a].clone()).collect())
                .collect();
            let k = cycle.len();
            for w in 0..k {
                // the agent takes the bundle of the neighbor she envies
                bundles[cycle[w]] = moved[(w + 1) % k].clone();
                for (i, row) in held.iter_mut().enumerate() {
                    row[cycle[w]] = seen[i][(w + 1) % k].clone();
                }
            }
        }
    }
    Ok(Allocation::new(bundles, inst).expect("every good was placed once"))
}

/// First directed cycle by depth-first search with ascending starts and
/// neighbor order, as the sequence of nodes along its edges.
fn find_cycle(n: usize, edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on the current path, 2 = exhausted
    let mut color = vec![0u8; n];
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut path = vec![start];
        let mut next = vec![0usize];
        color[start] = 1;
        while let Some(&u) = path.last() {
            let begin = *next.last().unwrap();
            let neighbor = (begin..n).find(|&v| v != u && edge(u, v));
            let Some(v) = neighbor else {
                color[u] = 2;
                path.pop();
                next.pop();
                continue;
            };
            *next.last_mut().unwrap() = v + 1;
            match color[v] {
                0 => {
                    color[v] = 1;
                    path.push(v);
                    next.push(0);
                }
                1 => {
                    let at = path.iter().position(|&x| x == v).expect("on path");
                    return Some(path[at..].to_vec());
                }
                _ => {}
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{full_report, MeasureConfig, Notion};

    fn cfg() -> MeasureConfig {
        MeasureConfig::default()
    }

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    #[test]
    fn round_robin_on_the_worked_instance() {
        let inst = crate::instance::tests::abc_instance();
        let alloc = round_robin(&inst, &[0, 1, 2]).unwrap();
        // picks: e (agent 1), a, d, then b (tie toward b), c
        assert_eq!(alloc.bundles(), &[vec![1, 4], vec![0, 2], vec![3]]);
        let report = full_report(&inst, &alloc, &cfg()).unwrap();
        assert!(report.satisfies(Notion::Ef1, &v("1")));
        assert!(report.satisfies(Notion::Pmms, &v("1/2")));
    }

    #[test]
    fn round_robin_edge_cases() {
        let empty = Instance::from_rows(vec![vec![], vec![]]).unwrap();
        let alloc = round_robin(&empty, &[0, 1]).unwrap();
        assert_eq!(alloc.bundles(), &[Vec::<usize>::new(), Vec::new()]);

        let solo = Instance::from_ints(&[&[1, 2, 3]]);
        let alloc = round_robin(&solo, &[0]).unwrap();
        assert_eq!(alloc.bundles(), &[vec![0, 1, 2]]);

        let inst = Instance::from_ints(&[&[1], &[1]]);
        assert_eq!(
            round_robin(&inst, &[0, 0]),
            Err(AlgorithmError::BadAgentOrder { agents: 2 })
        );
        assert_eq!(
            round_robin(&inst, &[0]),
            Err(AlgorithmError::BadAgentOrder { agents: 2 })
        );
    }

    #[test]
    fn round_robin_respects_the_agent_order() {
        let inst = Instance::from_ints(&[&[5, 1], &[5, 1]]);
        let forward = round_robin(&inst, &[0, 1]).unwrap();
        assert_eq!(forward.bundles(), &[vec![0], vec![1]]);
        let backward = round_robin(&inst, &[1, 0]).unwrap();
        assert_eq!(backward.bundles(), &[vec![1], vec![0]]);
    }

    #[test]
    fn common_order_detection() {
        let inst = crate::instance::tests::abc_instance();
        assert!(!detect_common_order(&inst).is_valid());

        let identical = Instance::from_ints(&[&[3, 1, 2], &[3, 1, 2]]);
        let order = detect_common_order(&identical);
        assert!(order.is_valid());
        assert_eq!(order.order(), &[0, 2, 1]);

        let single = Instance::from_ints(&[&[7], &[2]]);
        assert!(detect_common_order(&single).is_valid());

        let none = Instance::from_rows(vec![vec![], vec![]]).unwrap();
        assert!(detect_common_order(&none).is_valid());
    }

    #[test]
    fn common_order_needs_later_agents_to_break_ties() {
        // agent 1 is indifferent; only agent 2 separates the goods, so a
        // sort keyed on agent 1 alone would pick g1 first and fail
        let inst = Instance::from_ints(&[&[1, 1], &[1, 2]]);
        let order = detect_common_order(&inst);
        assert!(order.is_valid());
        assert_eq!(order.order(), &[1, 0]);
    }

    #[test]
    fn ordered_efx_identical_pairs() {
        let inst = Instance::from_ints(&[&[2, 2, 1, 1], &[2, 2, 1, 1]]);
        let order = detect_common_order(&inst);
        let alloc = ordered_efx(&inst, &order).unwrap();
        assert_eq!(alloc.bundles(), &[vec![0, 2], vec![1, 3]]);
        let report = full_report(&inst, &alloc, &cfg()).unwrap();
        assert!(report.satisfies(Notion::Efx, &v("1")));
        for (agent, bundle) in alloc.bundles().iter().enumerate() {
            assert!(inst.bundle_value(agent, bundle).unwrap() >= v("2"));
        }
    }

    #[test]
    fn ordered_efx_trivial_cases() {
        let solo = Instance::from_ints(&[&[4, 2]]);
        let order = detect_common_order(&solo);
        let alloc = ordered_efx(&solo, &order).unwrap();
        assert_eq!(alloc.bundles(), &[vec![0, 1]]);

        let inst = crate::instance::tests::abc_instance();
        let order = detect_common_order(&inst);
        assert_eq!(
            ordered_efx(&inst, &order),
            Err(AlgorithmError::NoCommonOrder)
        );
    }

    #[test]
    fn ordered_efx_rejects_foreign_orders() {
        let a = Instance::from_ints(&[&[2, 1], &[2, 1]]);
        let b = Instance::from_ints(&[&[3, 2, 1], &[3, 2, 1]]);
        let order = detect_common_order(&a);
        assert_eq!(
            ordered_efx(&b, &order),
            Err(AlgorithmError::OrderMismatch { got: 2, want: 3 })
        );
    }

    #[test]
    fn envy_cycle_rotation_runs() {
        // by the fourth good every agent is envied, forcing a bundle swap
        // between agents 2 and 3 before agent 2 can receive again
        let inst = Instance::from_ints(&[
            &[4, 4, 2, 1, 1],
            &[4, 3, 3, 2, 1],
            &[9, 8, 1, 1, 1],
        ]);
        let order = detect_common_order(&inst);
        assert!(order.is_valid());
        let alloc = ordered_efx(&inst, &order).unwrap();
        assert_eq!(alloc.bundles(), &[vec![0], vec![2, 3, 4], vec![1]]);
        let report = full_report(&inst, &alloc, &cfg()).unwrap();
        assert!(report.satisfies(Notion::Efx, &v("1")));
    }

    #[test]
    fn deterministic_outputs() {
        let inst = Instance::from_ints(&[&[5, 4, 3, 2, 1], &[5, 5, 3, 3, 1], &[9, 7, 5, 3, 1]]);
        let order = detect_common_order(&inst);
        assert_eq!(
            ordered_efx(&inst, &order).unwrap(),
            ordered_efx(&inst, &order).unwrap()
        );
        assert_eq!(
            round_robin(&inst, &[2, 0, 1]).unwrap(),
            round_robin(&inst, &[2, 0, 1]).unwrap()
        );
    }

    fn random_common_order_instance(rng: &mut impl rand::Rng) -> Instance {
        let n = rng.gen_range(1usize..4);
        let m = rng.gen_range(0usize..8);
        let rows: Vec<Vec<Value>> = (0..n)
            .map(|_| {
                let mut row: Vec<u64> = (0..m).map(|_| rng.gen_range(0..10)).collect();
                row.sort_unstable_by(|a, b| b.cmp(a));
                row.into_iter().map(Value::from_int).collect()
            })
            .collect();
        Instance::from_rows(rows).unwrap()
    }

    #[test]
    fn ordered_efx_guarantees_hold() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(41);
        let config = cfg();
        for _ in 0..150 {
            let inst = random_common_order_instance(&mut rng);
            let order = detect_common_order(&inst);
            assert!(order.is_valid(), "sorted rows share the identity order");
            let alloc = ordered_efx(&inst, &order).unwrap();
            let report = full_report(&inst, &alloc, &config).unwrap();
            assert!(report.satisfies(Notion::Efx, &v("1")), "{inst:?} -> {alloc:?}");
            assert!(report.satisfies(Notion::Pmms, &v("2/3")), "{inst:?} -> {alloc:?}");
            assert!(report.satisfies(Notion::Mms, &v("2/3")), "{inst:?} -> {alloc:?}");
        }
    }

    #[test]
    fn round_robin_guarantees_hold() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(42);
        let config = cfg();
        for _ in 0..150 {
            let n = rng.gen_range(2usize..5);
            let m = rng.gen_range(0usize..8);
            let rows: Vec<Vec<Value>> = (0..n)
                .map(|_| (0..m).map(|_| Value::from_int(rng.gen_range(0..10))).collect())
                .collect();
            let inst = Instance::from_rows(rows).unwrap();
            let agent_order: Vec<usize> = (0..n).collect();
            let alloc = round_robin(&inst, &agent_order).unwrap();
            let report = full_report(&inst, &alloc, &config).unwrap();
            assert!(report.satisfies(Notion::Ef1, &v("1")), "{inst:?} -> {alloc:?}");
            if n >= 3 {
                assert!(report.satisfies(Notion::Pmms, &v("1/2")), "{inst:?} -> {alloc:?}");
            }
        }
    }
}
