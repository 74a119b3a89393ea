//! Anytime depth-first branch-and-bound.
//!
//! Branching picks the uncovered element with the fewest remaining coverers
//! and opens one child per coverer: child `k` selects coverer `k` and
//! excludes coverers `0..k`. Every optimal cover is reachable this way, and a
//! node whose selection already covers everything is a leaf (adding sets
//! never lowers the objective).
//!
//! Node bounds ignore future penalties and use a fractional covering
//! argument: an element `e` costs at least `min c_j / |S_j ∩ uncovered|` over
//! its still available coverers. Fractions are summed in scaled integers and
//! rounded down, so the bound is never above the true completion cost.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{self, Cost, Instance, ModelError, Solution};

const BOUND_SCALE: u128 = 1 << 20;
const CLOCK_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unknown,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unknown => "unknown",
        })
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optimal" => Ok(SolveStatus::Optimal),
            "feasible" => Ok(SolveStatus::Feasible),
            "infeasible" => Ok(SolveStatus::Infeasible),
            "unknown" => Ok(SolveStatus::Unknown),
            _ => Err(format!("unknown status {s:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub time_limit: Duration,
    pub node_limit: Option<u64>,
    /// Objective value known to be attainable; nodes bounded strictly above
    /// it are pruned before any incumbent is found.
    pub initial_upper_bound: Option<Cost>,
    /// Starting incumbent, e.g. from a heuristic. Ignored unless it is a cover.
    pub initial_incumbent: Option<Solution>,
    /// When false, node bounds are just the accumulated objective.
    pub use_completion_bound: bool,
    /// Polled at node boundaries; raising it stops the search.
    pub stop: Option<Arc<AtomicBool>>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            time_limit: Duration::from_secs(3600),
            node_limit: None,
            initial_upper_bound: None,
            initial_incumbent: None,
            use_completion_bound: true,
            stop: None,
        }
    }
}

impl SolveConfig {
    pub fn with_time_limit(time_limit: Duration) -> Self {
        SolveConfig {
            time_limit,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub lower_bound: Cost,
    pub upper_bound: Option<Cost>,
    pub incumbent: Option<Solution>,
    pub status: SolveStatus,
    pub nodes_explored: u64,
    pub time_to_best: Duration,
    pub time_total: Duration,
    /// Set when the instance has an element no subset covers.
    pub uncoverable_element: Option<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("incumbent is not a cover")]
    NotACover,
    #[error("objective mismatch: reported {reported}, evaluated {evaluated}")]
    ObjectiveMismatch { reported: Cost, evaluated: Cost },
    #[error("upper bound reported without an incumbent")]
    MissingIncumbent,
    #[error("incumbent present but no upper bound reported")]
    MissingUpperBound,
    #[error("lower bound {lower} exceeds upper bound {upper}")]
    BoundsCrossed { lower: Cost, upper: Cost },
    #[error("status optimal but bounds differ ({lower} < {upper})")]
    OpenGap { lower: Cost, upper: Cost },
    #[error("status optimal without an incumbent")]
    OptimalWithoutIncumbent,
    #[error("status infeasible but every element is coverable")]
    SpuriousInfeasibility,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Re-checks a report against the instance from scratch.
pub fn verify_certificate(inst: &Instance, report: &SolveReport) -> Result<(), CertificateError> {
    match (&report.incumbent, report.upper_bound) {
        (Some(sol), Some(ub)) => {
            if !model::is_cover(inst, sol)? {
                return Err(CertificateError::NotACover);
            }
            let evaluated = model::evaluate(inst, sol)?.total;
            if evaluated != ub {
                return Err(CertificateError::ObjectiveMismatch {
                    reported: ub,
                    evaluated,
                });
            }
            if report.lower_bound > ub {
                return Err(CertificateError::BoundsCrossed {
                    lower: report.lower_bound,
                    upper: ub,
                });
            }
        }
        (None, Some(_)) => return Err(CertificateError::MissingIncumbent),
        (Some(_), None) => return Err(CertificateError::MissingUpperBound),
        (None, None) => {}
    }
    match report.status {
        SolveStatus::Optimal => match report.upper_bound {
            None => return Err(CertificateError::OptimalWithoutIncumbent),
            Some(ub) if ub != report.lower_bound => {
                return Err(CertificateError::OpenGap {
                    lower: report.lower_bound,
                    upper: ub,
                })
            }
            Some(_) => {}
        },
        SolveStatus::Infeasible => {
            if inst.uncoverable_elements().is_empty() {
                return Err(CertificateError::SpuriousInfeasibility);
            }
        }
        SolveStatus::Feasible | SolveStatus::Unknown => {}
    }
    Ok(())
}

/// A search node described by which subsets are fixed in or out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialState {
    pub selected: Vec<bool>,
    pub excluded: Vec<bool>,
}

/// Lower bound on the best cover extending `state` (selected sets kept,
/// excluded sets never added). `None` when some uncovered element has no
/// remaining coverer.
pub fn node_lower_bound(inst: &Instance, state: &PartialState) -> Option<Cost> {
    let sol = Solution::from_mask(&state.selected);
    let accumulated = model::evaluate(inst, &sol)
        .map(|b| b.total)
        .unwrap_or(Cost::MAX);
    let mut covered = vec![false; inst.num_elements()];
    for &j in sol.selected() {
        for &e in inst.members(j) {
            covered[e] = true;
        }
    }
    let set_uncov: Vec<u32> = (0..inst.num_subsets())
        .map(|j| inst.members(j).iter().filter(|&&e| !covered[e]).count() as u32)
        .collect();
    let unavailable = |j: usize| state.excluded[j] || state.selected[j];
    let completion = completion_bound(
        inst,
        (0..inst.num_elements()).filter(|&k| !covered[k]),
        unavailable,
        &set_uncov,
    )?;
    Some(accumulated.saturating_add(completion))
}

fn completion_bound(
    inst: &Instance,
    uncovered: impl Iterator<Item = usize>,
    unavailable: impl Fn(usize) -> bool,
    set_uncov: &[u32],
) -> Option<Cost> {
    let mut scaled: u128 = 0;
    let mut single: Cost = 0;
    for k in uncovered {
        let mut best_scaled = u128::MAX;
        let mut best_cost = Cost::MAX;
        let mut any = false;
        for &j in inst.coverers(k) {
            if unavailable(j) {
                continue;
            }
            any = true;
            let c = inst.cost(j);
            best_cost = best_cost.min(c);
            best_scaled = best_scaled.min(u128::from(c) * BOUND_SCALE / u128::from(set_uncov[j]));
        }
        if !any {
            return None;
        }
        scaled = scaled.saturating_add(best_scaled);
        single = single.max(best_cost);
    }
    let frac = Cost::try_from(scaled / BOUND_SCALE).unwrap_or(Cost::MAX);
    Some(frac.max(single))
}

struct Frame {
    candidates: Vec<usize>,
    next: usize,
    child_open: bool,
    bound: Cost,
}

struct Search<'a> {
    inst: &'a Instance,
    cfg: &'a SolveConfig,
    selected: Vec<bool>,
    excluded: Vec<bool>,
    cover_count: Vec<u32>,
    avail: Vec<u32>,
    set_uncov: Vec<u32>,
    pen_to_selected: Vec<Cost>,
    uncovered: usize,
    cover_cost: Cost,
    penalty: Cost,
    incumbent: Option<(Cost, Solution)>,
    pruned_min: Cost,
    nodes: u64,
    start: Instant,
    time_to_best: Duration,
    stack: Vec<Frame>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, cfg: &'a SolveConfig, start: Instant) -> Self {
        let n = inst.num_subsets();
        let m = inst.num_elements();
        Search {
            inst,
            cfg,
            selected: vec![false; n],
            excluded: vec![false; n],
            cover_count: vec![0; m],
            avail: (0..m).map(|k| inst.coverers(k).len() as u32).collect(),
            set_uncov: (0..n).map(|j| inst.members(j).len() as u32).collect(),
            pen_to_selected: vec![0; n],
            uncovered: m,
            cover_cost: 0,
            penalty: 0,
            incumbent: None,
            pruned_min: Cost::MAX,
            nodes: 0,
            start,
            time_to_best: Duration::ZERO,
            stack: Vec::new(),
        }
    }

    fn select(&mut self, j: usize) {
        let inst = self.inst;
        self.selected[j] = true;
        self.cover_cost = self.cover_cost.saturating_add(inst.cost(j));
        self.penalty = self.penalty.saturating_add(self.pen_to_selected[j]);
        for (p, d) in inst.conflict_partners(j) {
            self.pen_to_selected[p] = self.pen_to_selected[p].saturating_add(d);
        }
        for &e in inst.members(j) {
            self.cover_count[e] += 1;
            if self.cover_count[e] == 1 {
                self.uncovered -= 1;
                for &q in inst.coverers(e) {
                    self.set_uncov[q] -= 1;
                }
            }
        }
    }

    fn unselect(&mut self, j: usize) {
        let inst = self.inst;
        self.selected[j] = false;
        self.cover_cost = self.cover_cost.saturating_sub(inst.cost(j));
        self.penalty = self.penalty.saturating_sub(self.pen_to_selected[j]);
        for (p, d) in inst.conflict_partners(j) {
            self.pen_to_selected[p] = self.pen_to_selected[p].saturating_sub(d);
        }
        for &e in inst.members(j) {
            self.cover_count[e] -= 1;
            if self.cover_count[e] == 0 {
                self.uncovered += 1;
                for &q in inst.coverers(e) {
                    self.set_uncov[q] += 1;
                }
            }
        }
    }

    fn exclude(&mut self, j: usize) {
        self.excluded[j] = true;
        for &e in self.inst.members(j) {
            self.avail[e] -= 1;
        }
    }

    fn include(&mut self, j: usize) {
        self.excluded[j] = false;
        for &e in self.inst.members(j) {
            self.avail[e] += 1;
        }
    }

    fn accumulated(&self) -> Cost {
        self.cover_cost.saturating_add(self.penalty)
    }

    /// Nodes with a bound at or above this are pruned.
    fn prune_threshold(&self) -> Cost {
        let warm = self
            .cfg
            .initial_upper_bound
            .map_or(Cost::MAX, |u| u.saturating_add(1));
        self.incumbent
            .as_ref()
            .map_or(warm, |(v, _)| (*v).min(warm))
    }

    fn bound(&self) -> Option<Cost> {
        if !self.cfg.use_completion_bound {
            return Some(self.accumulated());
        }
        let (excluded, selected) = (&self.excluded, &self.selected);
        let completion = completion_bound(
            self.inst,
            (0..self.inst.num_elements()).filter(|&k| self.cover_count[k] == 0),
            |j| excluded[j] || selected[j],
            &self.set_uncov,
        )?;
        Some(self.accumulated().saturating_add(completion))
    }

    fn record_leaf(&mut self) {
        let value = self.accumulated();
        if self.incumbent.as_ref().is_some_and(|(v, _)| *v <= value) {
            return;
        }
        let sol = Solution::from_mask(&self.selected);
        debug_assert_eq!(
            model::evaluate(self.inst, &sol).map(|b| (b.cover_cost, b.penalty_cost)),
            Ok((self.cover_cost, self.penalty)),
            "incremental objective diverged from recomputation"
        );
        self.incumbent = Some((value, sol));
        self.time_to_best = self.start.elapsed();
    }

    /// Expands the node described by the current state.
    fn visit(&mut self) {
        self.nodes += 1;
        if self.uncovered == 0 {
            self.record_leaf();
            return;
        }
        let Some(bound) = self.bound() else { return };
        if bound >= self.prune_threshold() {
            self.pruned_min = self.pruned_min.min(bound);
            return;
        }
        let Some(pivot) = (0..self.inst.num_elements())
            .filter(|&k| self.cover_count[k] == 0)
            .min_by_key(|&k| (self.avail[k], k))
        else {
            return;
        };
        if self.avail[pivot] == 0 {
            return;
        }
        let mut candidates: Vec<usize> = self
            .inst
            .coverers(pivot)
            .iter()
            .copied()
            .filter(|&j| !self.excluded[j])
            .collect();
        let score = |j: usize| {
            (
                u128::from(self.inst.cost(j).saturating_add(self.pen_to_selected[j])),
                u128::from(self.set_uncov[j]),
            )
        };
        candidates.sort_by(|&a, &b| {
            let ((na, da), (nb, db)) = (score(a), score(b));
            (na * db).cmp(&(nb * da)).then(a.cmp(&b))
        });
        self.stack.push(Frame {
            candidates,
            next: 0,
            child_open: false,
            bound,
        });
    }

    fn out_of_budget(&self) -> bool {
        if self.cfg.node_limit.is_some_and(|limit| self.nodes >= limit) {
            return true;
        }
        if self.nodes.is_multiple_of(CLOCK_INTERVAL) {
            if self.start.elapsed() >= self.cfg.time_limit {
                return true;
            }
            if self
                .cfg
                .stop
                .as_ref()
                .is_some_and(|s| s.load(Ordering::Relaxed))
            {
                return true;
            }
        }
        false
    }

    /// Runs until the tree is exhausted (true) or a limit is hit (false).
    fn run(&mut self) -> bool {
        if self.out_of_budget() {
            return false;
        }
        self.visit();
        while let Some(top) = self.stack.len().checked_sub(1) {
            let frame = &mut self.stack[top];
            if frame.child_open {
                frame.child_open = false;
                let prev = frame.candidates[frame.next - 1];
                self.unselect(prev);
                self.exclude(prev);
            }
            let frame = &self.stack[top];
            if frame.next == frame.candidates.len() || frame.bound >= self.prune_threshold() {
                let frame = self.stack.pop().unwrap();
                if frame.next < frame.candidates.len() {
                    self.pruned_min = self.pruned_min.min(frame.bound);
                }
                for &j in &frame.candidates[..frame.next] {
                    self.include(j);
                }
                continue;
            }
            if self.out_of_budget() {
                return false;
            }
            let frame = &mut self.stack[top];
            let j = frame.candidates[frame.next];
            frame.next += 1;
            frame.child_open = true;
            self.select(j);
            self.visit();
        }
        true
    }
}

/// Solves to optimality or until a limit is reached; bounds are valid either way.
pub fn solve(inst: &Instance, cfg: &SolveConfig) -> SolveReport {
    let start = Instant::now();
    if let Some(&k) = inst.uncoverable_elements().first() {
        return SolveReport {
            lower_bound: 0,
            upper_bound: None,
            incumbent: None,
            status: SolveStatus::Infeasible,
            nodes_explored: 0,
            time_to_best: Duration::ZERO,
            time_total: start.elapsed(),
            uncoverable_element: Some(k),
        };
    }
    let mut search = Search::new(inst, cfg, start);
    if let Some(sol) = &cfg.initial_incumbent {
        if let (Ok(true), Ok(b)) = (model::is_cover(inst, sol), model::evaluate(inst, sol)) {
            search.incumbent = Some((b.total, sol.clone()));
        }
    }
    let finished = search.run();
    let upper = search.incumbent.as_ref().map(|(v, _)| *v);
    let open_min = search
        .stack
        .iter()
        .map(|f| f.bound)
        .min()
        .unwrap_or(Cost::MAX);
    let lower = open_min
        .min(search.pruned_min)
        .min(upper.unwrap_or(Cost::MAX));
    let lower = if lower == Cost::MAX { 0 } else { lower };
    let status = match (finished, upper) {
        (true, Some(ub)) if lower == ub => SolveStatus::Optimal,
        (_, Some(_)) => SolveStatus::Feasible,
        (_, None) => SolveStatus::Unknown,
    };
    SolveReport {
        lower_bound: lower,
        upper_bound: upper,
        incumbent: search.incumbent.map(|(_, s)| s),
        status,
        nodes_explored: search.nodes,
        time_to_best: search.time_to_best,
        time_total: start.elapsed(),
        uncoverable_element: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Conflict;
    use crate::oracle::brute_force_optimum;
    use crate::toy::{fig1_instance, FIG1_OPTIMUM};
    use proptest::prelude::*;

    fn small_random(seed: u64, n: usize, m: usize) -> Instance {
        crate::testgen::random_instance(seed, m, n, 0.3)
    }

    #[test]
    fn toy_is_solved_to_optimality() {
        let inst = fig1_instance(1, 10);
        let rep = solve(&inst, &SolveConfig::default());
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert_eq!((rep.lower_bound, rep.upper_bound), (3, Some(3)));
        assert_eq!(rep.incumbent.as_ref().unwrap().selected(), &FIG1_OPTIMUM);
        verify_certificate(&inst, &rep).unwrap();
    }

    #[test]
    fn single_full_set() {
        let inst = Instance::new("one", 4, vec![7], vec![vec![0, 1, 2, 3]], vec![]).unwrap();
        let rep = solve(&inst, &SolveConfig::default());
        assert_eq!(
            (rep.status, rep.lower_bound, rep.upper_bound),
            (SolveStatus::Optimal, 7, Some(7))
        );
    }

    #[test]
    fn infeasible_reports_element() {
        let inst = Instance::new("h", 3, vec![1], vec![vec![0, 2]], vec![]).unwrap();
        let rep = solve(&inst, &SolveConfig::default());
        assert_eq!(rep.status, SolveStatus::Infeasible);
        assert_eq!(rep.uncoverable_element, Some(1));
        verify_certificate(&inst, &rep).unwrap();
    }

    #[test]
    fn root_bound_on_tiny_plain_instance() {
        let inst = Instance::new(
            "s",
            2,
            vec![1, 1, 1],
            vec![vec![0], vec![0, 1], vec![1]],
            vec![],
        )
        .unwrap();
        let root = PartialState {
            selected: vec![false; 3],
            excluded: vec![false; 3],
        };
        assert!(node_lower_bound(&inst, &root).unwrap() >= 1);
        let done = PartialState {
            selected: vec![true, false, true],
            excluded: vec![false; 3],
        };
        assert_eq!(node_lower_bound(&inst, &done), Some(2));
        let dead = PartialState {
            selected: vec![false; 3],
            excluded: vec![true, true, false],
        };
        assert_eq!(node_lower_bound(&inst, &dead), None);
    }

    #[test]
    fn certificate_rejections() {
        let inst = fig1_instance(1, 10);
        let good = solve(&inst, &SolveConfig::default());
        let mut not_cover = good.clone();
        not_cover.incumbent = Some(Solution::from_ids([0, 4]));
        not_cover.upper_bound = Some(2);
        assert_eq!(
            verify_certificate(&inst, &not_cover),
            Err(CertificateError::NotACover)
        );
        let mut tampered = good.clone();
        tampered.upper_bound = Some(2);
        tampered.lower_bound = 2;
        assert!(matches!(
            verify_certificate(&inst, &tampered),
            Err(CertificateError::ObjectiveMismatch {
                reported: 2,
                evaluated: 3
            })
        ));
        let mut gap = good.clone();
        gap.lower_bound = 1;
        assert!(matches!(
            verify_certificate(&inst, &gap),
            Err(CertificateError::OpenGap { .. })
        ));
    }

    #[test]
    fn node_limit_gives_valid_bounds() {
        let inst = small_random(7, 18, 25);
        let opt = brute_force_optimum(&inst, 20).unwrap().total;
        for limit in [1, 2, 5, 20, 100] {
            let rep = solve(
                &inst,
                &SolveConfig {
                    node_limit: Some(limit),
                    ..Default::default()
                },
            );
            assert!(rep.lower_bound <= opt, "limit {limit}: {rep:?}");
            if let Some(ub) = rep.upper_bound {
                assert!(ub >= opt);
            }
            verify_certificate(&inst, &rep).unwrap();
        }
    }

    #[test]
    fn stop_flag_interrupts() {
        let inst = small_random(3, 18, 25);
        let stop = Arc::new(AtomicBool::new(true));
        let rep = solve(
            &inst,
            &SolveConfig {
                stop: Some(stop),
                ..Default::default()
            },
        );
        assert_ne!(rep.status, SolveStatus::Optimal);
        assert_eq!(rep.nodes_explored, 0);
    }

    #[test]
    fn warm_start_with_optimum_keeps_optimality() {
        for seed in 0..20 {
            let inst = small_random(seed, 14, 18);
            let opt = brute_force_optimum(&inst, 20).unwrap();
            let cold = solve(&inst, &SolveConfig::default());
            let warm = solve(
                &inst,
                &SolveConfig {
                    initial_upper_bound: Some(opt.total),
                    ..Default::default()
                },
            );
            assert_eq!(warm.status, SolveStatus::Optimal);
            assert_eq!(warm.upper_bound, Some(opt.total));
            assert!(warm.nodes_explored <= cold.nodes_explored);
            let seeded = solve(
                &inst,
                &SolveConfig {
                    initial_incumbent: Some(opt.witness.clone()),
                    ..Default::default()
                },
            );
            assert_eq!(
                (seeded.status, seeded.upper_bound),
                (SolveStatus::Optimal, Some(opt.total))
            );
        }
    }

    #[test]
    fn wrong_warm_bound_is_not_certified() {
        let inst = Instance::new(
            "w",
            2,
            vec![3, 3, 5],
            vec![vec![0], vec![1], vec![0, 1]],
            vec![Conflict::new(0, 1, 1)],
        )
        .unwrap();
        let rep = solve(
            &inst,
            &SolveConfig {
                initial_upper_bound: Some(2),
                ..Default::default()
            },
        );
        assert!(rep.lower_bound <= 5);
        assert_ne!(rep.status, SolveStatus::Infeasible);
        verify_certificate(&inst, &rep).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_oracle_with_and_without_bound(seed in any::<u64>(), n in 1usize..13, m in 1usize..15) {
            let inst = small_random(seed, n, m);
            let with = solve(&inst, &SolveConfig::default());
            let without = solve(&inst, &SolveConfig { use_completion_bound: false, ..Default::default() });
            match brute_force_optimum(&inst, 20) {
                Ok(opt) => {
                    prop_assert_eq!(with.status, SolveStatus::Optimal);
                    prop_assert_eq!(with.upper_bound, Some(opt.total));
                    prop_assert_eq!(without.upper_bound, Some(opt.total));
                    verify_certificate(&inst, &with).unwrap();
                }
                Err(_) => prop_assert_eq!(with.status, SolveStatus::Infeasible),
            }
        }

        #[test]
        fn node_bound_never_exceeds_completion(seed in any::<u64>(), fix in proptest::collection::vec(0u8..3, 10)) {
            let inst = small_random(seed, 10, 12);
            let selected: Vec<bool> = fix.iter().map(|&f| f == 1).collect();
            let excluded: Vec<bool> = fix.iter().map(|&f| f == 2).collect();
            let state = PartialState { selected: selected.clone(), excluded: excluded.clone() };
            // best completion by enumeration over the free subsets
            let free: Vec<usize> = (0..10).filter(|&j| fix[j] == 0).collect();
            let mut best: Option<Cost> = None;
            for mask in 0u32..(1 << free.len()) {
                let ids = (0..10).filter(|&j| selected[j])
                    .chain(free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| j));
                let sol = Solution::from_ids(ids);
                if model::is_cover(&inst, &sol).unwrap() {
                    let v = model::evaluate(&inst, &sol).unwrap().total;
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
            match (node_lower_bound(&inst, &state), best) {
                (Some(lb), Some(b)) => prop_assert!(lb <= b, "bound {} above completion {}", lb, b),
                (None, b) => prop_assert_eq!(b, None),
                (Some(_), None) => {}
            }
        }
    }
}
