//! Schedule enumeration and per-slot selection.
//!
//! A schedule activates a set of link-flow pairs no two of which conflict.
//! The exact policies score every maximal feasible schedule (precomputed
//! once per network) and take the argmax; the greedy policies build a
//! maximal schedule by descending weight. Negative weights are clamped to
//! zero for scoring, and pairs with non-positive weight are deactivated in
//! the winning schedule, so the returned activation is canonical.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ConflictGraph;

/// Default ceiling on pair count for exact catalog enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 32;

/// Hard ceiling for any enumeration cap (bitmask width).
pub const MAX_ENUMERATION_PAIRS: usize = 128;

/// Largest instance [`brute_force_maxweight`] accepts (scans all 2^n sets).
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Per-pair weights a policy feeds the selector. Indexed like the pair list.
pub type WeightVector = Vec<i64>;

/// Activation vector over pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    active: Vec<bool>,
}

impl Schedule {
    pub fn empty(pair_count: usize) -> Self {
        Self {
            active: vec![false; pair_count],
        }
    }

    pub fn from_active(active: Vec<bool>) -> Self {
        Self { active }
    }

    pub fn pair_count(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, p: usize) -> bool {
        self.active[p]
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn active_pairs(&self) -> impl Iterator<Item = usize> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter_map(|(p, &a)| a.then_some(p))
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// True when no two active pairs are adjacent in `conflicts`.
    pub fn is_feasible(&self, conflicts: &ConflictGraph) -> bool {
        let active: Vec<usize> = self.active_pairs().collect();
        for (i, &p) in active.iter().enumerate() {
            for &q in &active[i + 1..] {
                if conflicts.adjacent(p, q) {
                    return false;
                }
            }
        }
        true
    }
}

/// Sum of `weights` over the schedule's active pairs. For schedules produced
/// by the selectors in this module every active pair has positive weight, so
/// this equals the clamped objective value they maximized.
pub fn schedule_score(schedule: &Schedule, weights: &[i64]) -> i64 {
    schedule.active_pairs().map(|p| weights[p]).sum()
}

/// All maximal feasible schedules of one conflict graph, precomputed once.
/// Sets are stored as ascending member lists in lexicographic order, which
/// fixes the tie-break index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleCatalog {
    pair_count: usize,
    sets: Vec<Vec<u32>>,
}

impl ScheduleCatalog {
    pub fn pair_count(&self) -> usize {
        self.pair_count
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    /// Activation vector for catalog entry `index`.
    pub fn schedule(&self, index: usize) -> Schedule {
        let mut active = vec![false; self.pair_count];
        for &p in &self.sets[index] {
            active[p as usize] = true;
        }
        Schedule { active }
    }
}

/// Enumerates all maximal feasible schedules under the default cap of
/// [`DEFAULT_ENUMERATION_CAP`] pairs.
pub fn enumerate_maximal_schedules(conflicts: &ConflictGraph) -> Result<ScheduleCatalog> {
    enumerate_maximal_schedules_with_cap(conflicts, DEFAULT_ENUMERATION_CAP)
}

/// Enumerates all maximal feasible schedules, refusing instances with more
/// than `cap` pairs (the count of maximal sets can grow exponentially).
pub fn enumerate_maximal_schedules_with_cap(
    conflicts: &ConflictGraph,
    cap: usize,
) -> Result<ScheduleCatalog> {
    if cap > MAX_ENUMERATION_PAIRS {
        return Err(Error::InvalidArgument(format!(
            "enumeration cap {cap} exceeds the supported maximum of {MAX_ENUMERATION_PAIRS}"
        )));
    }
    let n = conflicts.pair_count();
    if n > cap {
        return Err(Error::TooManyPairs { pairs: n, cap });
    }
    if n == 0 {
        return Ok(ScheduleCatalog {
            pair_count: 0,
            sets: Vec::new(),
        });
    }
    // Maximal independent sets of the conflict graph are maximal cliques of
    // its complement; enumerate those with pivoting Bron–Kerbosch on masks.
    let full: u128 = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    let mut comp = vec![0u128; n];
    for (i, mask) in comp.iter_mut().enumerate() {
        let mut m = 0u128;
        for j in 0..n {
            if i != j && !conflicts.adjacent(i, j) {
                m |= 1 << j;
            }
        }
        *mask = m & full;
    }
    let mut masks = Vec::new();
    bron_kerbosch(0, full, 0, &comp, &mut masks);
    let mut sets: Vec<Vec<u32>> = masks
        .into_iter()
        .map(|mut m| {
            let mut set = Vec::with_capacity(m.count_ones() as usize);
            while m != 0 {
                let p = m.trailing_zeros();
                set.push(p);
                m &= m - 1;
            }
            set
        })
        .collect();
    sets.sort_unstable();
    Ok(ScheduleCatalog {
        pair_count: n,
        sets,
    })
}

fn bron_kerbosch(r: u128, p: u128, x: u128, comp: &[u128], out: &mut Vec<u128>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    let pivot_pool = p | x;
    let mut pivot = pivot_pool.trailing_zeros() as usize;
    let mut best = u32::MAX;
    let mut scan = pivot_pool;
    while scan != 0 {
        let u = scan.trailing_zeros() as usize;
        let uncovered = (p & !comp[u]).count_ones();
        if uncovered < best {
            best = uncovered;
            pivot = u;
        }
        scan &= scan - 1;
    }
    let mut candidates = p & !comp[pivot];
    let mut p = p;
    let mut x = x;
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u128 << v;
        bron_kerbosch(r | bit, p & comp[v], x & comp[v], comp, out);
        p &= !bit;
        x |= bit;
        candidates &= !bit;
    }
}

fn canonical_from_set(pair_count: usize, members: &[u32], weights: &[i64]) -> Schedule {
    let mut active = vec![false; pair_count];
    for &p in members {
        if weights[p as usize] > 0 {
            active[p as usize] = true;
        }
    }
    Schedule { active }
}

/// Picks the catalog entry maximizing the clamped weight sum
/// Σ max(w, 0) over members, then deactivates members with w ≤ 0.
/// Ties go to the lowest catalog index.
pub fn maxweight_select(weights: &[i64], catalog: &ScheduleCatalog) -> Result<Schedule> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    if weights.len() != catalog.pair_count() {
        return Err(Error::InvalidArgument(format!(
            "weight vector length {} does not match pair count {}",
            weights.len(),
            catalog.pair_count()
        )));
    }
    let mut best_index = 0usize;
    let mut best_score = i64::MIN;
    for (index, set) in catalog.sets.iter().enumerate() {
        let score: i64 = set.iter().map(|&p| weights[p as usize].max(0)).sum();
        if score > best_score {
            best_score = score;
            best_index = index;
        }
    }
    Ok(canonical_from_set(
        catalog.pair_count(),
        &catalog.sets[best_index],
        weights,
    ))
}

/// Builds a schedule by repeatedly activating the highest-positive-weight
/// pair that conflicts with nothing already active (ties to the lowest pair
/// index), until no positive-weight pair can be added.
pub fn greedy_maximal_select(weights: &[i64], conflicts: &ConflictGraph) -> Schedule {
    let n = conflicts.pair_count();
    assert_eq!(
        weights.len(),
        n,
        "weight vector length must match pair count"
    );
    let mut order: Vec<usize> = (0..n).filter(|&p| weights[p] > 0).collect();
    order.sort_unstable_by_key(|&p| (Reverse(weights[p]), p));
    let mut active = vec![false; n];
    for &p in &order {
        if !conflicts.neighbors(p).any(|q| active[q]) {
            active[p] = true;
        }
    }
    Schedule { active }
}

/// Test oracle: scans every activation vector, keeps the feasible ones, and
/// maximizes the same clamped objective with the same canonicalization.
/// Ties go to the lowest activation-vector value, scanning ascending.
pub fn brute_force_maxweight(weights: &[i64], conflicts: &ConflictGraph) -> Result<Schedule> {
    let n = conflicts.pair_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::BruteForceTooLarge {
            pairs: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    assert_eq!(
        weights.len(),
        n,
        "weight vector length must match pair count"
    );
    let mut adj_mask = vec![0u32; n];
    for (i, mask) in adj_mask.iter_mut().enumerate() {
        for j in conflicts.neighbors(i) {
            *mask |= 1 << j;
        }
    }
    let mut best_mask = 0u32;
    let mut best_score = i64::MIN;
    for mask in 0..(1u32 << n) {
        let mut feasible = true;
        let mut score = 0i64;
        let mut scan = mask;
        while scan != 0 {
            let i = scan.trailing_zeros() as usize;
            if adj_mask[i] & mask != 0 {
                feasible = false;
                break;
            }
            score += weights[i].max(0);
            scan &= scan - 1;
        }
        if feasible && score > best_score {
            best_score = score;
            best_mask = mask;
        }
    }
    let mut active = vec![false; n];
    for i in 0..n {
        if best_mask & (1 << i) != 0 && weights[i] > 0 {
            active[i] = true;
        }
    }
    Ok(Schedule { active })
}

/// Scheduling policy selectable from the CLI and scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Exact MaxWeight over queue differentials.
    Qbp,
    /// Exact MaxWeight over delay differentials.
    Dbp,
    /// Greedy maximal scheduling over queue differentials.
    Qgms,
    /// Greedy maximal scheduling over delay differentials.
    Dgms,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Qbp, Policy::Dbp, Policy::Qgms, Policy::Dgms];

    /// True for policies weighing queue differentials (vs delay).
    pub fn queue_weighted(self) -> bool {
        matches!(self, Policy::Qbp | Policy::Qgms)
    }

    /// True for exact MaxWeight policies (vs greedy maximal).
    pub fn exact(self) -> bool {
        matches!(self, Policy::Qbp | Policy::Dbp)
    }

    pub fn name(self) -> &'static str {
        match self {
            Policy::Qbp => "qbp",
            Policy::Dbp => "dbp",
            Policy::Qgms => "qgms",
            Policy::Dgms => "dgms",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qbp" => Ok(Policy::Qbp),
            "dbp" => Ok(Policy::Dbp),
            "qgms" => Ok(Policy::Qgms),
            "dgms" => Ok(Policy::Dgms),
            other => Err(Error::InvalidArgument(format!(
                "unknown policy '{other}' (expected qbp, dbp, qgms, or dgms)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, edges: &[(usize, usize)]) -> ConflictGraph {
        ConflictGraph::from_edges(n, edges).unwrap()
    }

    fn path3() -> ConflictGraph {
        graph(3, &[(0, 1), (1, 2)])
    }

    fn catalog(g: &ConflictGraph) -> ScheduleCatalog {
        enumerate_maximal_schedules(g).unwrap()
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, edge_prob: f64) -> ConflictGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < edge_prob {
                    edges.push((i, j));
                }
            }
        }
        graph(n, &edges)
    }

    #[test]
    fn catalog_of_path_graph() {
        assert_eq!(catalog(&path3()).sets(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn catalog_without_conflicts_is_everything() {
        assert_eq!(catalog(&graph(2, &[])).sets(), &[vec![0, 1]]);
    }

    #[test]
    fn catalog_of_triangle_is_singletons() {
        let g = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(catalog(&g).sets(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn catalog_of_five_cycle() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(
            catalog(&g).sets(),
            &[vec![0, 2], vec![0, 3], vec![1, 3], vec![1, 4], vec![2, 4]]
        );
    }

    #[test]
    fn catalog_of_zero_pairs_is_empty_and_select_refuses() {
        let g = graph(0, &[]);
        let cat = catalog(&g);
        assert!(cat.is_empty());
        assert!(matches!(
            maxweight_select(&[], &cat),
            Err(Error::EmptyCatalog)
        ));
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let g = graph(DEFAULT_ENUMERATION_CAP + 1, &[]);
        match enumerate_maximal_schedules(&g) {
            Err(Error::TooManyPairs { pairs, cap }) => {
                assert_eq!(pairs, DEFAULT_ENUMERATION_CAP + 1);
                assert_eq!(cap, DEFAULT_ENUMERATION_CAP);
            }
            other => panic!("expected TooManyPairs, got {other:?}"),
        }
        assert!(enumerate_maximal_schedules_with_cap(&g, 33).is_ok());
        assert!(enumerate_maximal_schedules_with_cap(&g, MAX_ENUMERATION_PAIRS + 1).is_err());
    }

    #[test]
    fn catalog_sets_are_maximal_feasible_and_cover() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.random_range(1..11usize);
            let g = random_graph(&mut rng, n, 0.4);
            let cat = catalog(&g);
            assert!(!cat.is_empty());
            for (idx, set) in cat.sets().iter().enumerate() {
                let sched = cat.schedule(idx);
                assert!(sched.is_feasible(&g));
                for p in 0..n {
                    if !sched.is_active(p) {
                        let blocked = set.iter().any(|&q| g.adjacent(p, q as usize));
                        assert!(blocked, "adding pair {p} keeps set {set:?} feasible");
                    }
                }
            }
            let mut dedup = cat.sets().to_vec();
            dedup.dedup();
            assert_eq!(dedup.len(), cat.len(), "duplicate catalog entries");
        }
    }

    #[test]
    fn maxweight_prefers_higher_total() {
        let cat = catalog(&path3());
        let sched = maxweight_select(&[3, 1, 2], &cat).unwrap();
        assert_eq!(sched.active(), &[true, false, true]);
        assert_eq!(schedule_score(&sched, &[3, 1, 2]), 5);
    }

    #[test]
    fn negative_weight_pair_is_never_active() {
        let g = graph(2, &[(0, 1)]);
        let sched = maxweight_select(&[-1, 5], &catalog(&g)).unwrap();
        assert_eq!(sched.active(), &[false, true]);
    }

    #[test]
    fn all_zero_weights_yield_empty_activation() {
        let cat = catalog(&path3());
        let sched = maxweight_select(&[0, 0, 0], &cat).unwrap();
        assert_eq!(sched.active_count(), 0);
    }

    #[test]
    fn scoring_clamps_negatives_before_comparison() {
        let cat = catalog(&path3());
        // {0,2} scores 3 + 0 after clamping vs {1}'s 1; the −100 member of
        // the winner is then deactivated.
        let sched = maxweight_select(&[3, 1, -100], &cat).unwrap();
        assert_eq!(sched.active(), &[true, false, false]);
        let sched = maxweight_select(&[-3, 1, -3], &cat).unwrap();
        assert_eq!(sched.active(), &[false, true, false]);
    }

    #[test]
    fn ties_break_to_lowest_catalog_index() {
        let g = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let sched = maxweight_select(&[5, 5, 5], &catalog(&g)).unwrap();
        assert_eq!(sched.active(), &[true, false, false]);
    }

    #[test]
    fn weight_length_mismatch_is_an_error() {
        let cat = catalog(&path3());
        assert!(maxweight_select(&[1, 2], &cat).is_err());
    }

    #[test]
    fn greedy_hand_traces() {
        let g = path3();
        let sched = greedy_maximal_select(&[5, 3, 4], &g);
        assert_eq!(sched.active(), &[true, false, true]);
        let sched = greedy_maximal_select(&[1, 10, 1], &g);
        assert_eq!(sched.active(), &[false, true, false]);
        let sched = greedy_maximal_select(&[0, -2, 0], &g);
        assert_eq!(sched.active_count(), 0);
    }

    #[test]
    fn greedy_ties_break_to_lowest_pair_index() {
        let g = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let sched = greedy_maximal_select(&[7, 7, 7], &g);
        assert_eq!(sched.active(), &[true, false, false]);
    }

    #[test]
    fn greedy_is_feasible_maximal_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let n = rng.random_range(1..13usize);
            let g = random_graph(&mut rng, n, 0.35);
            let weights: Vec<i64> = (0..n).map(|_| rng.random_range(-10..=10)).collect();
            let sched = greedy_maximal_select(&weights, &g);
            assert!(sched.is_feasible(&g));
            assert_eq!(sched, greedy_maximal_select(&weights, &g));
            for (p, &w) in weights.iter().enumerate() {
                if w > 0 && !sched.is_active(p) {
                    assert!(
                        g.neighbors(p).any(|q| sched.is_active(q)),
                        "positive-weight pair {p} left inactive with no active neighbor"
                    );
                }
                if w <= 0 {
                    assert!(!sched.is_active(p));
                }
            }
        }
    }

    #[test]
    fn brute_force_trivial_cases_and_limit() {
        let single = graph(1, &[]);
        let sched = brute_force_maxweight(&[4], &single).unwrap();
        assert_eq!(sched.active(), &[true]);
        let sched = brute_force_maxweight(&[-4], &single).unwrap();
        assert_eq!(sched.active(), &[false]);

        let big = graph(BRUTE_FORCE_LIMIT + 1, &[]);
        let weights = vec![1i64; BRUTE_FORCE_LIMIT + 1];
        assert!(matches!(
            brute_force_maxweight(&weights, &big),
            Err(Error::BruteForceTooLarge { .. })
        ));
    }

    #[test]
    fn exact_matches_brute_force_and_dominates_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let n = rng.random_range(1..11usize);
            let g = random_graph(&mut rng, n, 0.4);
            let weights: Vec<i64> = (0..n).map(|_| rng.random_range(-10..=10)).collect();
            let exact = maxweight_select(&weights, &catalog(&g)).unwrap();
            let brute = brute_force_maxweight(&weights, &g).unwrap();
            let greedy = greedy_maximal_select(&weights, &g);
            assert!(exact.is_feasible(&g));
            assert!(brute.is_feasible(&g));
            let exact_score = schedule_score(&exact, &weights);
            assert_eq!(exact_score, schedule_score(&brute, &weights));
            assert!(schedule_score(&greedy, &weights) <= exact_score);
        }
    }

    #[test]
    fn adding_a_negative_pair_never_changes_the_achieved_score() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..40 {
            let n = rng.random_range(1..10usize);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random::<f64>() < 0.4 {
                        edges.push((i, j));
                    }
                }
            }
            let g = graph(n, &edges);
            let mut weights: Vec<i64> = (0..n).map(|_| rng.random_range(-10..=10)).collect();
            let before =
                schedule_score(&maxweight_select(&weights, &catalog(&g)).unwrap(), &weights);

            let mut extended = edges.clone();
            for j in 0..n {
                if rng.random::<f64>() < 0.5 {
                    extended.push((n, j));
                }
            }
            let g2 = graph(n + 1, &extended);
            weights.push(-rng.random_range(1..=10));
            let after = schedule_score(
                &maxweight_select(&weights, &catalog(&g2)).unwrap(),
                &weights,
            );
            assert_eq!(before, after);
        }
    }

    #[test]
    fn policy_names_round_trip() {
        for policy in Policy::ALL {
            assert_eq!(policy.name().parse::<Policy>().unwrap(), policy);
            let json = serde_json::to_string(&policy).unwrap();
            assert_eq!(json, format!("\"{policy}\""));
            assert_eq!(serde_json::from_str::<Policy>(&json).unwrap(), policy);
        }
        let err = "maxweight".parse::<Policy>().unwrap_err().to_string();
        for name in ["qbp", "dbp", "qgms", "dgms"] {
            assert!(err.contains(name));
        }
        assert!(Policy::Qbp.queue_weighted() && Policy::Qgms.queue_weighted());
        assert!(!Policy::Dbp.queue_weighted() && !Policy::Dgms.queue_weighted());
        assert!(Policy::Qbp.exact() && Policy::Dbp.exact());
        assert!(!Policy::Qgms.exact() && !Policy::Dgms.exact());
    }
}
