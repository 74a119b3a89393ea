//! Benchmark construction: turns a plain set covering instance into one with
//! conflict penalties.
//!
//! Three consecutive columns are merged into one subset (cost summed, members
//! unioned). A calibration constant `gamma` is taken from the largest
//! cost-per-element ratio, and every pair of merged subsets sharing more than
//! `kappa` elements receives the penalty `gamma * (overlap - kappa)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::{self, IngestError, RawScpInstance};
use crate::model::{Conflict, Cost, Instance, ModelError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("instance {0:?} already has conflicts")]
    HasConflicts(String),
    #[error("subset {0} is empty, gamma is undefined")]
    EmptySubset(usize),
    #[error("penalty overflow for pair ({0}, {1})")]
    Overflow(usize, usize),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How the cost-per-element ratio is rounded to an integer `gamma`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum GammaRounding {
    #[default]
    HalfUp,
    Floor,
    Ceil,
}

impl GammaRounding {
    /// Rounds the nonnegative fraction `num / den`.
    pub fn apply(self, num: u128, den: u128) -> u128 {
        match self {
            GammaRounding::HalfUp => (2 * num + den) / (2 * den),
            GammaRounding::Floor => num / den,
            GammaRounding::Ceil => num.div_ceil(den),
        }
    }
}

impl fmt::Display for GammaRounding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaRounding::HalfUp => "half-up",
            GammaRounding::Floor => "floor",
            GammaRounding::Ceil => "ceil",
        })
    }
}

impl FromStr for GammaRounding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half-up" | "round-half-up" | "nearest" => Ok(GammaRounding::HalfUp),
            "floor" => Ok(GammaRounding::Floor),
            "ceil" | "ceiling" => Ok(GammaRounding::Ceil),
            _ => Err(format!(
                "unknown rounding policy {s:?} (half-up, floor, ceil)"
            )),
        }
    }
}

/// Which subsets `gamma` is computed over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum GammaSource {
    /// The merged subsets that carry the conflicts.
    #[default]
    Merged,
    /// The original columns, before merging.
    Original,
}

impl fmt::Display for GammaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaSource::Merged => "merged",
            GammaSource::Original => "original",
        })
    }
}

impl FromStr for GammaSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "merged" => Ok(GammaSource::Merged),
            "original" => Ok(GammaSource::Original),
            _ => Err(format!("unknown gamma source {s:?} (merged, original)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct TransformParams {
    /// Overlap tolerated without penalty.
    pub kappa: u64,
    pub rounding: GammaRounding,
    pub gamma_source: GammaSource,
}

impl TransformParams {
    pub fn new(kappa: u64) -> Self {
        TransformParams {
            kappa,
            ..Default::default()
        }
    }
}

/// Facts about a generated instance that its file format does not carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformMeta {
    pub gamma: Cost,
    pub kappa: u64,
    pub rounding: GammaRounding,
    pub gamma_source: GammaSource,
}

/// Overlap counting backend. All variants produce identical output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OverlapStrategy {
    /// Picks the cheaper of `ElementScan` and `Bitset` from the instance shape.
    #[default]
    Auto,
    /// For each subset, bumps a counter for every coverer of each of its elements.
    ElementScan,
    /// Popcount over per-subset bitsets.
    Bitset,
    /// Sorted-list intersection of every pair. Quadratic, used as the reference.
    PairwiseMerge,
}

/// Merges consecutive triples of subsets: group `g` holds `3g, 3g+1, 3g+2`
/// (the last group may be shorter).
pub fn merge3(inst: &Instance) -> Result<Instance, TransformError> {
    if inst.has_conflicts() {
        return Err(TransformError::HasConflicts(inst.name().to_string()));
    }
    let n = inst.num_subsets();
    let groups = n.div_ceil(3);
    let mut cost = Vec::with_capacity(groups);
    let mut members = Vec::with_capacity(groups);
    for g in 0..groups {
        let ids = 3 * g..(3 * g + 3).min(n);
        let mut c: Cost = 0;
        let mut set = Vec::new();
        for j in ids {
            c = c.checked_add(inst.cost(j)).ok_or(ModelError::Overflow)?;
            set.extend_from_slice(inst.members(j));
        }
        cost.push(c);
        members.push(set);
    }
    Ok(Instance::new(
        inst.name(),
        inst.num_elements(),
        cost,
        members,
        Vec::new(),
    )?)
}

/// Calibration constant: the largest `max(cost_j / |S_j|, 1)`, rounded.
/// Always at least 1.
pub fn gamma(inst: &Instance, rounding: GammaRounding) -> Result<Cost, TransformError> {
    let mut best: (u128, u128) = (1, 1);
    for j in 0..inst.num_subsets() {
        let size = inst.members(j).len() as u128;
        if size == 0 {
            return Err(TransformError::EmptySubset(j));
        }
        let c = inst.cost(j) as u128;
        if c * best.1 > best.0 * size {
            best = (c, size);
        }
    }
    let g = rounding.apply(best.0, best.1).max(1);
    Cost::try_from(g).map_err(|_| TransformError::Model(ModelError::Overflow))
}

/// Pairs `(i, j)` with `i < j` sharing more than `min_exclusive` elements,
/// with their overlap, sorted by `(i, j)`.
pub fn overlapping_pairs(
    inst: &Instance,
    min_exclusive: u64,
    strategy: OverlapStrategy,
) -> Vec<(usize, usize, u64)> {
    let strategy = match strategy {
        OverlapStrategy::Auto => pick_strategy(inst),
        s => s,
    };
    let per_subset: Vec<Vec<(usize, u64)>> = match strategy {
        OverlapStrategy::ElementScan => element_scan(inst, min_exclusive),
        OverlapStrategy::Bitset => bitset_scan(inst, min_exclusive),
        OverlapStrategy::PairwiseMerge => pairwise_merge(inst, min_exclusive),
        OverlapStrategy::Auto => unreachable!(),
    };
    per_subset
        .into_iter()
        .enumerate()
        .flat_map(|(i, row)| row.into_iter().map(move |(j, o)| (i, j, o)))
        .collect()
}

fn pick_strategy(inst: &Instance) -> OverlapStrategy {
    let n = inst.num_subsets() as u128;
    let words = inst.num_elements().div_ceil(64) as u128;
    let scan: u128 = (0..inst.num_elements())
        .map(|k| {
            let d = inst.coverers(k).len() as u128;
            d * d
        })
        .sum();
    if scan <= n * n * words {
        OverlapStrategy::ElementScan
    } else {
        OverlapStrategy::Bitset
    }
}

fn element_scan(inst: &Instance, min_exclusive: u64) -> Vec<Vec<(usize, u64)>> {
    let n = inst.num_subsets();
    (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::<usize>::new()),
            |(counts, touched), i| {
                for &e in inst.members(i) {
                    let cov = inst.coverers(e);
                    let start = cov.partition_point(|&j| j <= i);
                    for &j in &cov[start..] {
                        if counts[j] == 0 {
                            touched.push(j);
                        }
                        counts[j] += 1;
                    }
                }
                touched.sort_unstable();
                let mut row = Vec::new();
                for &j in touched.iter() {
                    let o = u64::from(counts[j]);
                    if o > min_exclusive {
                        row.push((j, o));
                    }
                    counts[j] = 0;
                }
                touched.clear();
                row
            },
        )
        .collect()
}

fn bitset_scan(inst: &Instance, min_exclusive: u64) -> Vec<Vec<(usize, u64)>> {
    let n = inst.num_subsets();
    let words = inst.num_elements().div_ceil(64).max(1);
    let mut bits = vec![0u64; n * words];
    for j in 0..n {
        for &e in inst.members(j) {
            bits[j * words + e / 64] |= 1 << (e % 64);
        }
    }
    let bits = &bits;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = &bits[i * words..(i + 1) * words];
            let mut row = Vec::new();
            for j in i + 1..n {
                let b = &bits[j * words..(j + 1) * words];
                let o: u64 = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| u64::from((x & y).count_ones()))
                    .sum();
                if o > min_exclusive {
                    row.push((j, o));
                }
            }
            row
        })
        .collect()
}

fn pairwise_merge(inst: &Instance, min_exclusive: u64) -> Vec<Vec<(usize, u64)>> {
    let n = inst.num_subsets();
    (0..n)
        .map(|i| {
            (i + 1..n)
                .filter_map(|j| {
                    let o = sorted_intersection_len(inst.members(i), inst.members(j)) as u64;
                    (o > min_exclusive).then_some((j, o))
                })
                .collect()
        })
        .collect()
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut x, mut y, mut count) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                x += 1;
                y += 1;
            }
        }
    }
    count
}

/// Adds conflicts `gamma * max(|S_i ∩ S_j| - kappa, 0)` for every pair with
/// a positive value, `gamma` taken from `inst` under `params.rounding`.
pub fn generate_conflicts(
    inst: &Instance,
    params: &TransformParams,
) -> Result<Instance, TransformError> {
    let g = gamma(inst, params.rounding)?;
    generate_conflicts_with_gamma(inst, g, params.kappa, OverlapStrategy::Auto)
}

/// As [`generate_conflicts`] with an explicit `gamma`.
pub fn generate_conflicts_with_gamma(
    inst: &Instance,
    gamma: Cost,
    kappa: u64,
    strategy: OverlapStrategy,
) -> Result<Instance, TransformError> {
    if inst.has_conflicts() {
        return Err(TransformError::HasConflicts(inst.name().to_string()));
    }
    let conflicts = if gamma == 0 {
        Vec::new()
    } else {
        overlapping_pairs(inst, kappa, strategy)
            .into_iter()
            .map(|(i, j, o)| {
                gamma
                    .checked_mul(o - kappa)
                    .map(|d| Conflict::new(i, j, d))
                    .ok_or(TransformError::Overflow(i, j))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(inst.with_conflicts(conflicts)?)
}

/// Name given to the instance generated from `base` at `kappa`.
pub fn derived_name(base: &str, kappa: u64) -> String {
    format!("{base}-k{kappa}")
}

/// Full construction: raw file contents to a penalized instance named
/// `<base>-k<kappa>`.
pub fn pipeline(
    raw: &RawScpInstance,
    base: &str,
    params: &TransformParams,
) -> Result<(Instance, TransformMeta), TransformError> {
    let plain = ingest::to_instance(raw, base)?;
    let merged = merge3(&plain)?;
    let g = match params.gamma_source {
        GammaSource::Merged => gamma(&merged, params.rounding)?,
        GammaSource::Original => gamma(&plain, params.rounding)?,
    };
    let out = generate_conflicts_with_gamma(&merged, g, params.kappa, OverlapStrategy::Auto)?
        .with_name(derived_name(base, params.kappa));
    let meta = TransformMeta {
        gamma: g,
        kappa: params.kappa,
        rounding: params.rounding,
        gamma_source: params.gamma_source,
    };
    Ok((out, meta))
}
