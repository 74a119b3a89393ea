//! Exhaustive reference solver for tiny instances.
//!
//! Every one of the `2^n` selections is built and scored with
//! [`model::is_cover`] and [`model::evaluate`]; nothing else is shared with
//! the other solvers.

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{self, Cost, Instance, ModelError, Solution};

pub const DEFAULT_MAX_SUBSETS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {n} subsets, enumeration limit is {max_n}")]
    TooLarge { n: usize, max_n: usize },
    #[error("no selection covers every element")]
    Infeasible,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOptimum {
    pub total: Cost,
    /// Lexicographically least optimal selection (as a sorted id list).
    pub witness: Solution,
    /// Number of selections attaining `total`.
    pub count: u64,
}

const CHUNK: u64 = 1 << 12;

/// Enumerates all selections of an instance with at most `max_n` subsets.
pub fn brute_force_optimum(inst: &Instance, max_n: usize) -> Result<OracleOptimum, OracleError> {
    let n = inst.num_subsets();
    if n > max_n || n >= 63 {
        return Err(OracleError::TooLarge { n, max_n });
    }
    let space: u64 = 1 << n;
    let chunks = space.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local: Option<OracleOptimum> = None;
            for mask in c * CHUNK..((c + 1) * CHUNK).min(space) {
                let sol = Solution::from_ids((0..n).filter(|j| mask >> j & 1 == 1));
                if !model::is_cover(inst, &sol)? {
                    continue;
                }
                let total = model::evaluate(inst, &sol)?.total;
                local = Some(merge(
                    local,
                    OracleOptimum {
                        total,
                        witness: sol,
                        count: 1,
                    },
                ));
            }
            Ok::<_, OracleError>(local)
        })
        .try_reduce(|| None, |a, b| Ok(merge_opt(a, b)))?;
    best.ok_or(OracleError::Infeasible)
}

fn merge_opt(a: Option<OracleOptimum>, b: Option<OracleOptimum>) -> Option<OracleOptimum> {
    match (a, b) {
        (Some(a), Some(b)) => Some(merge(Some(a), b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn merge(acc: Option<OracleOptimum>, new: OracleOptimum) -> OracleOptimum {
    let Some(acc) = acc else { return new };
    match acc.total.cmp(&new.total) {
        std::cmp::Ordering::Less => acc,
        std::cmp::Ordering::Greater => new,
        std::cmp::Ordering::Equal => OracleOptimum {
            total: acc.total,
            witness: acc.witness.clone().min(new.witness),
            count: acc.count + new.count,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::{fig1_instance, FIG1_OPTIMUM};

    #[test]
    fn toy_optimum() {
        let opt = brute_force_optimum(&fig1_instance(1, 10), DEFAULT_MAX_SUBSETS).unwrap();
        assert_eq!(opt.total, 3);
        assert_eq!(opt.witness.selected(), &FIG1_OPTIMUM);
        assert_eq!(opt.count, 1);
    }

    #[test]
    fn single_cover() {
        let inst = Instance::new("one", 3, vec![9], vec![vec![0, 1, 2]], vec![]).unwrap();
        let opt = brute_force_optimum(&inst, 20).unwrap();
        assert_eq!((opt.total, opt.count), (9, 1));
    }

    #[test]
    fn symmetric_optima_are_counted() {
        let inst =
            Instance::new("two", 2, vec![4, 4], vec![vec![0, 1], vec![0, 1]], vec![]).unwrap();
        let opt = brute_force_optimum(&inst, 20).unwrap();
        assert_eq!((opt.total, opt.count), (4, 2));
        assert_eq!(opt.witness.selected(), &[0]);
    }

    #[test]
    fn zero_cost_sets_multiply_optima() {
        let inst = Instance::new("z", 1, vec![0, 0], vec![vec![0], vec![0]], vec![]).unwrap();
        let opt = brute_force_optimum(&inst, 20).unwrap();
        assert_eq!((opt.total, opt.count), (0, 3));
        assert_eq!(opt.witness.selected(), &[0]);
    }

    #[test]
    fn refusals() {
        let big = Instance::new("big", 1, vec![1; 21], vec![vec![0]; 21], vec![]).unwrap();
        assert_eq!(
            brute_force_optimum(&big, DEFAULT_MAX_SUBSETS),
            Err(OracleError::TooLarge { n: 21, max_n: 20 })
        );
        let holes = Instance::new("h", 2, vec![1], vec![vec![0]], vec![]).unwrap();
        assert_eq!(
            brute_force_optimum(&holes, 20),
            Err(OracleError::Infeasible)
        );
    }

    #[test]
    fn chunking_does_not_change_the_witness() {
        // 14 identical sets: many optima spread over several chunks
        let inst = Instance::new("same", 1, vec![2; 14], vec![vec![0]; 14], vec![]).unwrap();
        let opt = brute_force_optimum(&inst, 20).unwrap();
        assert_eq!((opt.total, opt.count), (2, 14));
        assert_eq!(opt.witness.selected(), &[0]);
    }
}
