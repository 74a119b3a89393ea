//! The six-element illustration instance used in golden tests and docs.
//!
//! Elements sit on a 2x3 grid (top row 0 1 2, bottom row 3 4 5). Six
//! rectangles cover them:
//!
//! | subset | elements |
//! |--------|----------|
//! | 0      | 0 3      |
//! | 1      | 0 1 2    |
//! | 2      | 3 4      |
//! | 3      | 2 5      |
//! | 4      | 1 5      |
//! | 5      | 2 4      |
//!
//! Subsets 0, 4 and 5 are pairwise disjoint and cover the grid, so with every
//! set costing `alpha` and overlapping pairs paying more than `alpha`, the
//! optimum is `3 * alpha`.

use crate::model::{Conflict, Cost, Instance};

pub const FIG1_MEMBERS: [&[usize]; 6] = [&[0, 3], &[0, 1, 2], &[3, 4], &[2, 5], &[1, 5], &[2, 4]];

/// Optimal selection for [`fig1_instance`].
pub const FIG1_OPTIMUM: [usize; 3] = [0, 4, 5];

/// Builds the toy instance with set cost `alpha` and a penalty of
/// `penalty_per_shared` per shared element for every overlapping pair.
pub fn fig1_instance(alpha: Cost, penalty_per_shared: Cost) -> Instance {
    let members: Vec<Vec<usize>> = FIG1_MEMBERS.iter().map(|s| s.to_vec()).collect();
    let mut conflicts = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let shared = members[i].iter().filter(|e| members[j].contains(e)).count() as Cost;
            if shared > 0 && penalty_per_shared > 0 {
                conflicts.push(Conflict::new(i, j, shared * penalty_per_shared));
            }
        }
    }
    Instance::new("fig1", 6, vec![alpha; 6], members, conflicts)
        .expect("toy instance is well formed")
}
