//! Seeded random instances for tests, calibration runs and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::RawScpInstance;
use crate::model::{Conflict, Instance};

/// Random instance with `m` elements and `n` subsets.
///
/// Each subset takes each element with probability `density` (at least one
/// element), every element gets at least one coverer, costs are in `1..=20`
/// and about a third of all pairs conflict with a penalty in `1..=15`.
pub fn random_instance(seed: u64, m: usize, n: usize, density: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut set: Vec<usize> = (0..m).filter(|_| rng.gen_bool(density)).collect();
            if set.is_empty() && m > 0 {
                set.push(rng.gen_range(0..m));
            }
            set
        })
        .collect();
    if n > 0 {
        for k in 0..m {
            if !members.iter().any(|s| s.contains(&k)) {
                let j = rng.gen_range(0..n);
                members[j].push(k);
            }
        }
    }
    let cost = (0..n).map(|_| rng.gen_range(1..=20)).collect();
    let mut conflicts = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.3) {
                conflicts.push(Conflict::new(i, j, rng.gen_range(1..=15)));
            }
        }
    }
    Instance::new(format!("rand-{seed}"), m, cost, members, conflicts)
        .expect("generated instance is well formed")
}

/// The `index`-th instance of the random corpus used for oracle comparisons:
/// 4 to 18 subsets, 5 to 30 elements, densities between 0.15 and 0.4.
pub fn corpus_instance(index: u64) -> Instance {
    let n = 4 + (index % 15) as usize;
    let m = 5 + ((index * 7) % 26) as usize;
    let density = 0.15 + 0.05 * (index % 6) as f64;
    random_instance(0x5eed_0000 + index, m, n, density)
}

/// Unicost covering of the 4-cycles of the `d`-dimensional hypercube by its
/// edges: one row per 4-cycle, one column per edge, edges numbered in
/// lexicographic order of their (lower, upper) endpoint pair. For `d = 6`
/// this has the shape of the OR-Library `scpcyc06` file (240 rows, 192
/// columns).
pub fn hypercube_cycles(d: u32) -> RawScpInstance {
    let mut edges: Vec<(u32, u32)> = (0..1u32 << d)
        .flat_map(|v| {
            (0..d)
                .filter(move |b| v >> b & 1 == 0)
                .map(move |b| (v, v | 1 << b))
        })
        .collect();
    edges.sort_unstable();
    let column = |a: u32, b: u32| {
        edges
            .binary_search(&(a.min(b), a.max(b)))
            .expect("hypercube edge")
            + 1
    };
    let mut row_cover_lists = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            for v in (0..1u32 << d).filter(|v| v >> a & 1 == 0 && v >> b & 1 == 0) {
                let corners = [v, v | 1 << a, v | 1 << a | 1 << b, v | 1 << b];
                let mut row: Vec<usize> = (0..4)
                    .map(|k| column(corners[k], corners[(k + 1) % 4]))
                    .collect();
                row.sort_unstable();
                row_cover_lists.push(row);
            }
        }
    }
    RawScpInstance {
        num_rows: row_cover_lists.len(),
        num_cols: edges.len(),
        col_cost: vec![1; edges.len()],
        row_cover_lists,
    }
}
