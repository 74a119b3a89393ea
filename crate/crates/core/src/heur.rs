//! Greedy construction, local search and GRASP for upper bounds.
//!
//! All scores are ratios of integers compared by cross-multiplication, so
//! results depend only on the instance and the seed.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{self, Cost, Instance, ModelError, Solution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeurError {
    #[error("element {0} cannot be covered")]
    Uncoverable(usize),
    #[error("local search needs a cover as input")]
    NotACover,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Resolution of the restricted candidate list threshold.
const ALPHA_DENOM: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GraspConfig {
    pub iterations: u64,
    /// 0 admits only the best-scoring candidates, 1 admits every candidate.
    pub rcl_alpha: f64,
    pub seed: u64,
    pub time_limit: Duration,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            iterations: 100,
            rcl_alpha: 0.2,
            seed: 0,
            time_limit: Duration::from_secs(60),
        }
    }
}

impl GraspConfig {
    pub fn validate(&self) -> Result<(), HeurError> {
        if !(0.0..=1.0).contains(&self.rcl_alpha) {
            return Err(HeurError::Config(format!(
                "rcl_alpha {} outside [0, 1]",
                self.rcl_alpha
            )));
        }
        if self.iterations == 0 {
            return Err(HeurError::Config("iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Restricted candidate list parameters for a randomized construction.
pub struct Rcl<'r, R: Rng> {
    pub rng: &'r mut R,
    pub alpha: f64,
}

/// Selection with incrementally maintained coverage and penalty data.
struct CoverState<'a> {
    inst: &'a Instance,
    selected: Vec<bool>,
    cover_count: Vec<u32>,
    uncovered: usize,
    /// Uncovered elements of each subset.
    fresh: Vec<u32>,
    /// Penalty a subset pays against the current selection.
    pen_to_selected: Vec<Cost>,
}

impl<'a> CoverState<'a> {
    fn new(inst: &'a Instance) -> Self {
        CoverState {
            inst,
            selected: vec![false; inst.num_subsets()],
            cover_count: vec![0; inst.num_elements()],
            uncovered: inst.num_elements(),
            fresh: (0..inst.num_subsets())
                .map(|j| inst.members(j).len() as u32)
                .collect(),
            pen_to_selected: vec![0; inst.num_subsets()],
        }
    }

    fn from_solution(inst: &'a Instance, sol: &Solution) -> Self {
        let mut st = CoverState::new(inst);
        for &j in sol.selected() {
            st.add(j);
        }
        st
    }

    fn add(&mut self, j: usize) {
        let inst = self.inst;
        self.selected[j] = true;
        for (p, d) in inst.conflict_partners(j) {
            self.pen_to_selected[p] = self.pen_to_selected[p].saturating_add(d);
        }
        for &e in inst.members(j) {
            self.cover_count[e] += 1;
            if self.cover_count[e] == 1 {
                self.uncovered -= 1;
                for &q in inst.coverers(e) {
                    self.fresh[q] -= 1;
                }
            }
        }
    }

    fn remove(&mut self, j: usize) {
        let inst = self.inst;
        self.selected[j] = false;
        for (p, d) in inst.conflict_partners(j) {
            self.pen_to_selected[p] = self.pen_to_selected[p].saturating_sub(d);
        }
        for &e in inst.members(j) {
            self.cover_count[e] -= 1;
            if self.cover_count[e] == 0 {
                self.uncovered += 1;
                for &q in inst.coverers(e) {
                    self.fresh[q] += 1;
                }
            }
        }
    }

    /// What the objective drops by when `j` leaves the selection.
    fn saving(&self, j: usize) -> Cost {
        self.inst.cost(j).saturating_add(self.pen_to_selected[j])
    }

    fn is_redundant(&self, j: usize) -> bool {
        self.inst
            .members(j)
            .iter()
            .all(|&e| self.cover_count[e] >= 2)
    }

    fn solution(&self) -> Solution {
        Solution::from_mask(&self.selected)
    }

    #[cfg(debug_assertions)]
    fn check_penalties(&self) {
        for j in 0..self.inst.num_subsets() {
            let rescan: Cost = self
                .inst
                .conflict_partners(j)
                .filter(|&(p, _)| self.selected[p])
                .map(|(_, d)| d)
                .sum();
            debug_assert_eq!(
                rescan, self.pen_to_selected[j],
                "marginal penalty of {j} drifted"
            );
        }
    }

    /// Removes redundant subsets, largest saving first, until none is left.
    fn drop_redundant(&mut self) {
        loop {
            let best = (0..self.inst.num_subsets())
                .filter(|&j| self.selected[j] && self.is_redundant(j))
                .max_by(|&a, &b| self.saving(a).cmp(&self.saving(b)).then(b.cmp(&a)));
            match best {
                Some(j) => self.remove(j),
                None => break,
            }
        }
    }
}

fn first_uncoverable(inst: &Instance) -> Result<(), HeurError> {
    match inst.uncoverable_elements().first() {
        Some(&k) => Err(HeurError::Uncoverable(k)),
        None => Ok(()),
    }
}

/// `a1 / b1 < a2 / b2` for positive denominators.
fn ratio_lt((a1, b1): (u128, u128), (a2, b2): (u128, u128)) -> bool {
    a1 * b2 < a2 * b1
}

/// Greedy cover: repeatedly adds the subset with the lowest
/// `(cost + penalty against the selection) / newly covered elements`, then
/// drops redundant subsets. With an [`Rcl`], the pick is uniform among
/// candidates scoring within `alpha` of the best-to-worst range.
pub fn greedy_construct<R: Rng>(
    inst: &Instance,
    mut rcl: Option<Rcl<'_, R>>,
) -> Result<Solution, HeurError> {
    first_uncoverable(inst)?;
    let mut st = CoverState::new(inst);
    let score = |st: &CoverState, j: usize| (u128::from(st.saving(j)), u128::from(st.fresh[j]));
    while st.uncovered > 0 {
        let candidates: Vec<usize> = (0..inst.num_subsets())
            .filter(|&j| !st.selected[j] && st.fresh[j] > 0)
            .collect();
        let mut best = candidates[0];
        let mut worst = candidates[0];
        for &j in &candidates[1..] {
            if ratio_lt(score(&st, j), score(&st, best)) {
                best = j;
            }
            if ratio_lt(score(&st, worst), score(&st, j)) {
                worst = j;
            }
        }
        let pick = match rcl.as_mut() {
            Some(rcl) if rcl.alpha > 0.0 => {
                let p = (rcl.alpha.clamp(0.0, 1.0) * ALPHA_DENOM as f64).round() as u128;
                let (amin, bmin) = score(&st, best);
                let (amax, bmax) = score(&st, worst);
                let pool: Vec<usize> = candidates
                    .iter()
                    .copied()
                    .filter(|&j| {
                        let (a, b) = score(&st, j);
                        a * ALPHA_DENOM * bmin * bmax
                            <= (ALPHA_DENOM - p) * amin * b * bmax + p * amax * b * bmin
                    })
                    .collect();
                pool[rcl.rng.gen_range(0..pool.len())]
            }
            _ => best,
        };
        st.add(pick);
    }
    st.drop_redundant();
    #[cfg(debug_assertions)]
    st.check_penalties();
    Ok(st.solution())
}

/// Deterministic greedy cover.
pub fn greedy(inst: &Instance) -> Result<Solution, HeurError> {
    greedy_construct::<ChaCha8Rng>(inst, None)
}

enum Move {
    Drop(usize),
    Swap { out: usize, inc: usize },
}

/// Best-improvement descent over dropping a subset and swapping one selected
/// subset for one unselected subset that covers everything the leaving subset
/// covered alone.
pub fn local_search(inst: &Instance, sol: &Solution) -> Result<Solution, HeurError> {
    if !model::is_cover(inst, sol)? {
        return Err(HeurError::NotACover);
    }
    let mut st = CoverState::from_solution(inst, sol);
    let mut unique = Vec::new();
    loop {
        let mut best: Option<(i128, Move)> = None;
        let consider = |delta: i128, mv: Move, best: &mut Option<(i128, Move)>| {
            if delta < 0 && best.as_ref().is_none_or(|(d, _)| delta < *d) {
                *best = Some((delta, mv));
            }
        };
        for out in (0..inst.num_subsets()).filter(|&j| st.selected[j]) {
            let saving = i128::from(st.saving(out));
            unique.clear();
            unique.extend(
                inst.members(out)
                    .iter()
                    .copied()
                    .filter(|&e| st.cover_count[e] == 1),
            );
            let Some(&anchor) = unique.first() else {
                consider(-saving, Move::Drop(out), &mut best);
                continue;
            };
            for &inc in inst.coverers(anchor) {
                if st.selected[inc] {
                    continue;
                }
                let members = inst.members(inc);
                if !unique.iter().all(|e| members.binary_search(e).is_ok()) {
                    continue;
                }
                let added = inst
                    .cost(inc)
                    .saturating_add(st.pen_to_selected[inc].saturating_sub(inst.penalty(out, inc)));
                consider(
                    i128::from(added) - saving,
                    Move::Swap { out, inc },
                    &mut best,
                );
            }
        }
        match best {
            None => break,
            Some((_, Move::Drop(j))) => st.remove(j),
            Some((_, Move::Swap { out, inc })) => {
                st.add(inc);
                st.remove(out);
            }
        }
    }
    #[cfg(debug_assertions)]
    st.check_penalties();
    Ok(st.solution())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraspOutcome {
    pub solution: Solution,
    pub total: Cost,
    /// 0-based iteration that first produced `total`.
    pub iteration_found: u64,
    pub iterations_run: u64,
    pub time_to_best: Duration,
}

/// Seed of iteration `it`, independent of how many iterations run.
pub fn iteration_seed(seed: u64, it: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ it.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Randomized greedy plus local search, repeated; keeps the first best.
pub fn grasp(inst: &Instance, cfg: &GraspConfig) -> Result<GraspOutcome, HeurError> {
    cfg.validate()?;
    first_uncoverable(inst)?;
    let start = Instant::now();
    let mut best: Option<GraspOutcome> = None;
    let mut it = 0;
    while it < cfg.iterations && (it == 0 || start.elapsed() < cfg.time_limit) {
        let built = if cfg.rcl_alpha == 0.0 {
            greedy(inst)?
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(iteration_seed(cfg.seed, it));
            greedy_construct(
                inst,
                Some(Rcl {
                    rng: &mut rng,
                    alpha: cfg.rcl_alpha,
                }),
            )?
        };
        let improved = local_search(inst, &built)?;
        let total = model::evaluate(inst, &improved)?.total;
        if best.as_ref().is_none_or(|b| total < b.total) {
            best = Some(GraspOutcome {
                solution: improved,
                total,
                iteration_found: it,
                iterations_run: 0,
                time_to_best: start.elapsed(),
            });
        }
        it += 1;
    }
    let mut best = best.expect("at least one iteration runs");
    best.iterations_run = it;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_optimum;
    use crate::testgen::random_instance;
    use crate::toy::{fig1_instance, FIG1_OPTIMUM};
    use proptest::prelude::*;

    #[test]
    fn toy_instance() {
        let inst = fig1_instance(1, 10);
        // the three-element row is cheapest per element but overlaps a later pick
        let g = greedy(&inst).unwrap();
        assert!(model::is_cover(&inst, &g).unwrap());
        assert_eq!(model::evaluate(&inst, &g).unwrap().total, 13);
        // a narrow list always starts from that row and no single swap escapes
        let narrow = grasp(&inst, &GraspConfig::default()).unwrap();
        assert_eq!(narrow.total, 13);
        let cfg = GraspConfig {
            iterations: 200,
            rcl_alpha: 1.0,
            ..Default::default()
        };
        let out = grasp(&inst, &cfg).unwrap();
        assert_eq!(out.solution.selected(), &FIG1_OPTIMUM);
        assert_eq!(out.total, 3);
    }

    #[test]
    fn dominant_set_wins() {
        let inst = Instance::new(
            "dom",
            3,
            vec![5, 1, 5, 5],
            vec![vec![0], vec![0, 1, 2], vec![1], vec![2]],
            vec![],
        )
        .unwrap();
        assert_eq!(greedy(&inst).unwrap().selected(), &[1]);
    }

    #[test]
    fn uncoverable_is_an_error() {
        let inst = Instance::new("h", 2, vec![1], vec![vec![0]], vec![]).unwrap();
        assert_eq!(greedy(&inst), Err(HeurError::Uncoverable(1)));
        assert_eq!(
            grasp(&inst, &GraspConfig::default()),
            Err(HeurError::Uncoverable(1))
        );
    }

    #[test]
    fn local_search_keeps_optimum() {
        let inst = fig1_instance(1, 10);
        let sol = Solution::from_ids(FIG1_OPTIMUM);
        assert_eq!(local_search(&inst, &sol).unwrap(), sol);
    }

    #[test]
    fn local_search_drops_redundant_set() {
        let inst = Instance::new(
            "r",
            2,
            vec![1, 1, 9],
            vec![vec![0], vec![1], vec![0, 1]],
            vec![],
        )
        .unwrap();
        let out = local_search(&inst, &Solution::from_ids([0, 1, 2])).unwrap();
        assert_eq!(out.selected(), &[0, 1]);
    }

    #[test]
    fn local_search_swaps() {
        // {0} is cheaper than {1} for the same element
        let inst = Instance::new(
            "s",
            2,
            vec![1, 5, 1],
            vec![vec![0], vec![0], vec![1]],
            vec![],
        )
        .unwrap();
        let out = local_search(&inst, &Solution::from_ids([1, 2])).unwrap();
        assert_eq!(out.selected(), &[0, 2]);
    }

    #[test]
    fn local_search_rejects_non_cover() {
        let inst = fig1_instance(1, 10);
        assert_eq!(
            local_search(&inst, &Solution::from_ids([0])),
            Err(HeurError::NotACover)
        );
    }

    #[test]
    fn grasp_is_deterministic() {
        let inst = random_instance(11, 25, 18, 0.25);
        let cfg = GraspConfig {
            iterations: 30,
            rcl_alpha: 0.3,
            seed: 99,
            ..Default::default()
        };
        let (a, b) = (grasp(&inst, &cfg).unwrap(), grasp(&inst, &cfg).unwrap());
        assert_eq!(
            (a.solution, a.iteration_found),
            (b.solution, b.iteration_found)
        );
    }

    #[test]
    fn degenerate_grasp_is_greedy_plus_descent() {
        let inst = random_instance(5, 25, 18, 0.25);
        let cfg = GraspConfig {
            iterations: 1,
            rcl_alpha: 0.0,
            seed: 1,
            ..Default::default()
        };
        let out = grasp(&inst, &cfg).unwrap();
        let expected = local_search(&inst, &greedy(&inst).unwrap()).unwrap();
        assert_eq!(out.solution, expected);
        assert_eq!(out.iteration_found, 0);
    }

    #[test]
    fn config_is_checked() {
        let inst = fig1_instance(1, 10);
        for cfg in [
            GraspConfig {
                rcl_alpha: 1.5,
                ..Default::default()
            },
            GraspConfig {
                iterations: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(grasp(&inst, &cfg), Err(HeurError::Config(_))));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn heuristics_return_covers_above_optimum(seed in any::<u64>(), n in 2usize..12, m in 1usize..14, alpha in 0.0f64..1.0) {
            let inst = random_instance(seed, m, n, 0.3);
            let opt = brute_force_optimum(&inst, 20).unwrap().total;
            let g = greedy(&inst).unwrap();
            let l = local_search(&inst, &g).unwrap();
            let cfg = GraspConfig { iterations: 5, rcl_alpha: alpha, seed, ..Default::default() };
            let r = grasp(&inst, &cfg).unwrap();
            for s in [&g, &l, &r.solution] {
                prop_assert!(model::is_cover(&inst, s).unwrap());
                prop_assert!(model::evaluate(&inst, s).unwrap().total >= opt);
            }
            prop_assert!(model::evaluate(&inst, &l).unwrap().total <= model::evaluate(&inst, &g).unwrap().total);
            prop_assert_eq!(model::evaluate(&inst, &r.solution).unwrap().total, r.total);
        }

        #[test]
        fn more_iterations_never_hurt(seed in any::<u64>(), k in 1u64..8) {
            let inst = random_instance(seed, 15, 12, 0.3);
            let run = |iterations| grasp(&inst, &GraspConfig { iterations, rcl_alpha: 0.5, seed, ..Default::default() }).unwrap().total;
            prop_assert!(run(k + 1) <= run(k));
        }

        #[test]
        fn local_search_never_worsens(seed in any::<u64>(), mask in proptest::collection::vec(any::<bool>(), 12)) {
            let inst = random_instance(seed, 14, 12, 0.3);
            let sol = Solution::from_ids((0..12).filter(|&j| mask[j]).chain(greedy(&inst).unwrap().selected().iter().copied()));
            let out = local_search(&inst, &sol).unwrap();
            prop_assert!(model::is_cover(&inst, &out).unwrap());
            prop_assert!(model::evaluate(&inst, &out).unwrap().total <= model::evaluate(&inst, &sol).unwrap().total);
        }
    }
}
