//! Instances, selections and objective evaluation for set covering with
//! pairwise conflict penalties.
//!
//! Elements and subsets are 0-based everywhere in this module. File formats
//! that use 1-based ids are converted in [`crate::ingest`].

use std::fmt;

use thiserror::Error;

/// Integer cost unit for set costs, penalties and objective values.
pub type Cost = u64;

/// A conflicting pair `{i, j}` with `i < j` and a positive penalty paid when
/// both subsets are selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conflict {
    pub i: usize,
    pub j: usize,
    pub penalty: Cost,
}

impl Conflict {
    pub fn new(i: usize, j: usize, penalty: Cost) -> Self {
        Conflict { i, j, penalty }
    }
}

/// One broken invariant of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    CostCountMismatch {
        costs: usize,
        subsets: usize,
    },
    CovererCountMismatch {
        lists: usize,
        elements: usize,
    },
    ElementOutOfRange {
        subset: usize,
        element: usize,
    },
    SubsetOutOfRange {
        element: usize,
        subset: usize,
    },
    MembersNotSorted {
        subset: usize,
    },
    CoverersNotSorted {
        element: usize,
    },
    /// `element` is listed in one direction of the incidence but not the other.
    TransposeMismatch {
        subset: usize,
        element: usize,
    },
    ConflictNotOrdered {
        i: usize,
        j: usize,
    },
    ConflictOutOfRange {
        i: usize,
        j: usize,
    },
    DuplicateConflict {
        i: usize,
        j: usize,
    },
    ZeroPenalty {
        i: usize,
        j: usize,
    },
    Uncoverable {
        element: usize,
    },
}

impl Violation {
    /// Uncoverable elements make an instance infeasible but not malformed.
    pub fn is_uncoverable(&self) -> bool {
        matches!(self, Violation::Uncoverable { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::CostCountMismatch { costs, subsets } => {
                write!(f, "{costs} costs given for {subsets} subsets")
            }
            Violation::CovererCountMismatch { lists, elements } => {
                write!(f, "{lists} coverer lists given for {elements} elements")
            }
            Violation::ElementOutOfRange { subset, element } => {
                write!(f, "subset {subset} lists out-of-range element {element}")
            }
            Violation::SubsetOutOfRange { element, subset } => {
                write!(f, "element {element} lists out-of-range subset {subset}")
            }
            Violation::MembersNotSorted { subset } => {
                write!(f, "members of subset {subset} not strictly ascending")
            }
            Violation::CoverersNotSorted { element } => {
                write!(f, "coverers of element {element} not strictly ascending")
            }
            Violation::TransposeMismatch { subset, element } => write!(
                f,
                "incidence of subset {subset} and element {element} is not symmetric"
            ),
            Violation::ConflictNotOrdered { i, j } => {
                write!(f, "conflict pair not ordered i<j ({i}, {j})")
            }
            Violation::ConflictOutOfRange { i, j } => {
                write!(f, "conflict pair ({i}, {j}) references an unknown subset")
            }
            Violation::DuplicateConflict { i, j } => {
                write!(f, "conflict pair ({i}, {j}) listed more than once")
            }
            Violation::ZeroPenalty { i, j } => {
                write!(f, "conflict pair ({i}, {j}) has zero penalty")
            }
            Violation::Uncoverable { element } => write!(f, "uncoverable element {element}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid instance: {0}")]
    Invalid(Violation),
    #[error(
        "malformed solution: subset id {id} out of range (instance has {num_subsets} subsets)"
    )]
    SubsetOutOfRange { id: usize, num_subsets: usize },
    #[error("objective overflow")]
    Overflow,
}

/// A set covering instance with conflict penalties.
///
/// Immutable once built. The inverse index and the per-subset conflict
/// adjacency are derived at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    num_elements: usize,
    cost: Vec<Cost>,
    members: Vec<Vec<usize>>,
    element_coverers: Vec<Vec<usize>>,
    conflicts: Vec<Conflict>,
    // CSR adjacency over both endpoints, partners ascending.
    adj_offsets: Vec<usize>,
    adj_partner: Vec<u32>,
    adj_penalty: Vec<Cost>,
}

impl Instance {
    /// Builds an instance, normalizing member lists (sorted, deduplicated)
    /// and sorting conflicts by `(i, j)`.
    ///
    /// Structural violations are rejected. Uncoverable elements are
    /// accepted: such an instance is well formed but has no feasible cover.
    pub fn new(
        name: impl Into<String>,
        num_elements: usize,
        cost: Vec<Cost>,
        mut members: Vec<Vec<usize>>,
        mut conflicts: Vec<Conflict>,
    ) -> Result<Self, ModelError> {
        if cost.len() != members.len() {
            return Err(ModelError::Invalid(Violation::CostCountMismatch {
                costs: cost.len(),
                subsets: members.len(),
            }));
        }
        for (j, set) in members.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(&e) = set.last().filter(|&&e| e >= num_elements) {
                return Err(ModelError::Invalid(Violation::ElementOutOfRange {
                    subset: j,
                    element: e,
                }));
            }
        }
        let n = members.len();
        for c in &conflicts {
            let v = if c.i >= c.j {
                Some(Violation::ConflictNotOrdered { i: c.i, j: c.j })
            } else if c.j >= n {
                Some(Violation::ConflictOutOfRange { i: c.i, j: c.j })
            } else if c.penalty == 0 {
                Some(Violation::ZeroPenalty { i: c.i, j: c.j })
            } else {
                None
            };
            if let Some(v) = v {
                return Err(ModelError::Invalid(v));
            }
        }
        conflicts.sort_unstable();
        if let Some(w) = conflicts
            .windows(2)
            .find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j))
        {
            return Err(ModelError::Invalid(Violation::DuplicateConflict {
                i: w[0].i,
                j: w[0].j,
            }));
        }
        let element_coverers = transpose(num_elements, &members);
        Ok(Self::assemble(
            name.into(),
            num_elements,
            cost,
            members,
            element_coverers,
            conflicts,
        ))
    }

    /// Assembles an instance from raw fields without any checking.
    ///
    /// Meant for inspecting malformed data with [`validate_instance`];
    /// out-of-range conflict endpoints are left out of the adjacency.
    pub fn from_parts_unchecked(
        name: impl Into<String>,
        num_elements: usize,
        cost: Vec<Cost>,
        members: Vec<Vec<usize>>,
        element_coverers: Vec<Vec<usize>>,
        conflicts: Vec<Conflict>,
    ) -> Self {
        Self::assemble(
            name.into(),
            num_elements,
            cost,
            members,
            element_coverers,
            conflicts,
        )
    }

    fn assemble(
        name: String,
        num_elements: usize,
        cost: Vec<Cost>,
        members: Vec<Vec<usize>>,
        element_coverers: Vec<Vec<usize>>,
        conflicts: Vec<Conflict>,
    ) -> Self {
        let n = members.len();
        let usable = |c: &&Conflict| c.i < n && c.j < n && c.i != c.j;
        let mut degree = vec![0usize; n];
        for c in conflicts.iter().filter(usable) {
            degree[c.i] += 1;
            degree[c.j] += 1;
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0);
        for d in &degree {
            adj_offsets.push(adj_offsets.last().unwrap() + d);
        }
        let total = *adj_offsets.last().unwrap();
        let mut adj_partner = vec![0u32; total];
        let mut adj_penalty = vec![0; total];
        let mut fill = adj_offsets[..n].to_vec();
        for c in conflicts.iter().filter(usable) {
            for (a, b) in [(c.i, c.j), (c.j, c.i)] {
                adj_partner[fill[a]] = b as u32;
                adj_penalty[fill[a]] = c.penalty;
                fill[a] += 1;
            }
        }
        for j in 0..n {
            let (lo, hi) = (adj_offsets[j], adj_offsets[j + 1]);
            let partners = &adj_partner[lo..hi];
            if !partners.windows(2).all(|w| w[0] <= w[1]) {
                let mut pairs: Vec<(u32, Cost)> = partners
                    .iter()
                    .copied()
                    .zip(adj_penalty[lo..hi].iter().copied())
                    .collect();
                pairs.sort_unstable();
                for (k, (p, d)) in pairs.into_iter().enumerate() {
                    adj_partner[lo + k] = p;
                    adj_penalty[lo + k] = d;
                }
            }
        }
        Instance {
            name,
            num_elements,
            cost,
            members,
            element_coverers,
            conflicts,
            adj_offsets,
            adj_partner,
            adj_penalty,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn num_subsets(&self) -> usize {
        self.members.len()
    }

    pub fn cost(&self, j: usize) -> Cost {
        self.cost[j]
    }

    pub fn costs(&self) -> &[Cost] {
        &self.cost
    }

    /// Elements of subset `j`, ascending.
    pub fn members(&self, j: usize) -> &[usize] {
        &self.members[j]
    }

    pub fn all_members(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// Subsets covering element `k`, ascending.
    pub fn coverers(&self, k: usize) -> &[usize] {
        &self.element_coverers[k]
    }

    /// Conflicts sorted by `(i, j)`.
    pub fn conflicts(&self) -> &[Conflict] {
        &self.conflicts
    }

    pub fn has_conflicts(&self) -> bool {
        !self.conflicts.is_empty()
    }

    /// Conflict partners of subset `j` with their penalties, ascending by partner.
    pub fn conflict_partners(&self, j: usize) -> impl Iterator<Item = (usize, Cost)> + '_ {
        let (lo, hi) = (self.adj_offsets[j], self.adj_offsets[j + 1]);
        self.adj_partner[lo..hi]
            .iter()
            .zip(&self.adj_penalty[lo..hi])
            .map(|(&p, &d)| (p as usize, d))
    }

    pub fn conflict_degree(&self, j: usize) -> usize {
        self.adj_offsets[j + 1] - self.adj_offsets[j]
    }

    /// Penalty of the pair `{a, b}`, zero when the pair does not conflict.
    pub fn penalty(&self, a: usize, b: usize) -> Cost {
        let (lo, hi) = (self.adj_offsets[a], self.adj_offsets[a + 1]);
        match self.adj_partner[lo..hi].binary_search(&(b as u32)) {
            Ok(pos) => self.adj_penalty[lo + pos],
            Err(_) => 0,
        }
    }

    pub fn uncoverable_elements(&self) -> Vec<usize> {
        (0..self.num_elements)
            .filter(|&k| self.element_coverers.get(k).is_none_or(|c| c.is_empty()))
            .collect()
    }

    /// Copy of this instance with the conflict list replaced.
    pub fn with_conflicts(&self, conflicts: Vec<Conflict>) -> Result<Self, ModelError> {
        Instance::new(
            self.name.clone(),
            self.num_elements,
            self.cost.clone(),
            self.members.clone(),
            conflicts,
        )
    }
}

fn transpose(num_elements: usize, members: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); num_elements];
    for (j, set) in members.iter().enumerate() {
        for &e in set {
            out[e].push(j);
        }
    }
    out
}

/// A selection of subsets, kept sorted and free of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution {
    selected: Vec<usize>,
}

impl Solution {
    pub fn empty() -> Self {
        Solution::default()
    }

    pub fn from_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut selected: Vec<usize> = ids.into_iter().collect();
        selected.sort_unstable();
        selected.dedup();
        Solution { selected }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Solution {
            selected: mask
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(j, _)| j)
                .collect(),
        }
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.selected.binary_search(&j).is_ok()
    }

    pub fn to_mask(&self, num_subsets: usize) -> Vec<bool> {
        let mut mask = vec![false; num_subsets];
        for &j in &self.selected {
            mask[j] = true;
        }
        mask
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, j) in self.selected.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// Objective value split into its covering and penalty parts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ObjectiveBreakdown {
    pub cover_cost: Cost,
    pub penalty_cost: Cost,
    pub total: Cost,
}

/// Lists every broken invariant, including uncoverable elements.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let m = inst.num_elements;
    let n = inst.members.len();
    let mut out = Vec::new();
    if inst.cost.len() != n {
        out.push(Violation::CostCountMismatch {
            costs: inst.cost.len(),
            subsets: n,
        });
    }
    if inst.element_coverers.len() != m {
        out.push(Violation::CovererCountMismatch {
            lists: inst.element_coverers.len(),
            elements: m,
        });
    }
    for (j, set) in inst.members.iter().enumerate() {
        if !set.windows(2).all(|w| w[0] < w[1]) {
            out.push(Violation::MembersNotSorted { subset: j });
        }
        for &e in set {
            if e >= m {
                out.push(Violation::ElementOutOfRange {
                    subset: j,
                    element: e,
                });
            } else if inst.element_coverers.get(e).is_none_or(|c| !c.contains(&j)) {
                out.push(Violation::TransposeMismatch {
                    subset: j,
                    element: e,
                });
            }
        }
    }
    for (k, cov) in inst.element_coverers.iter().enumerate() {
        if !cov.windows(2).all(|w| w[0] < w[1]) {
            out.push(Violation::CoverersNotSorted { element: k });
        }
        for &j in cov {
            if j >= n {
                out.push(Violation::SubsetOutOfRange {
                    element: k,
                    subset: j,
                });
            } else if !inst.members[j].contains(&k) {
                out.push(Violation::TransposeMismatch {
                    subset: j,
                    element: k,
                });
            }
        }
    }
    let mut seen = std::collections::HashSet::with_capacity(inst.conflicts.len());
    for c in &inst.conflicts {
        if c.i >= c.j {
            out.push(Violation::ConflictNotOrdered { i: c.i, j: c.j });
        }
        if c.i >= n || c.j >= n {
            out.push(Violation::ConflictOutOfRange { i: c.i, j: c.j });
        }
        if c.penalty == 0 {
            out.push(Violation::ZeroPenalty { i: c.i, j: c.j });
        }
        if !seen.insert((c.i.min(c.j), c.i.max(c.j))) {
            out.push(Violation::DuplicateConflict { i: c.i, j: c.j });
        }
    }
    for k in 0..m {
        if inst.element_coverers.get(k).is_none_or(|c| c.is_empty()) {
            out.push(Violation::Uncoverable { element: k });
        }
    }
    out
}

fn check_ids(inst: &Instance, sol: &Solution) -> Result<(), ModelError> {
    match sol.selected.last() {
        Some(&id) if id >= inst.num_subsets() => Err(ModelError::SubsetOutOfRange {
            id,
            num_subsets: inst.num_subsets(),
        }),
        _ => Ok(()),
    }
}

/// True iff the selected subsets cover every element.
pub fn is_cover(inst: &Instance, sol: &Solution) -> Result<bool, ModelError> {
    check_ids(inst, sol)?;
    let mut covered = vec![false; inst.num_elements];
    let mut remaining = inst.num_elements;
    for &j in &sol.selected {
        for &e in &inst.members[j] {
            if !covered[e] {
                covered[e] = true;
                remaining -= 1;
            }
        }
    }
    Ok(remaining == 0)
}

/// Conflicts whose two endpoints are both selected, ascending by `(i, j)`.
pub fn active_conflicts(inst: &Instance, sol: &Solution) -> Result<Vec<Conflict>, ModelError> {
    check_ids(inst, sol)?;
    let mask = sol.to_mask(inst.num_subsets());
    let mut out = Vec::new();
    for &i in &sol.selected {
        for (j, d) in inst.conflict_partners(i) {
            if j > i && mask[j] {
                out.push(Conflict::new(i, j, d));
            }
        }
    }
    Ok(out)
}

/// Objective of an arbitrary selection (not necessarily a cover).
pub fn evaluate(inst: &Instance, sol: &Solution) -> Result<ObjectiveBreakdown, ModelError> {
    check_ids(inst, sol)?;
    let cover_cost = sol
        .selected
        .iter()
        .try_fold(0 as Cost, |acc, &j| acc.checked_add(inst.cost[j]))
        .ok_or(ModelError::Overflow)?;
    let penalty_cost = active_conflicts(inst, sol)?
        .iter()
        .try_fold(0 as Cost, |acc, c| acc.checked_add(c.penalty))
        .ok_or(ModelError::Overflow)?;
    let total = cover_cost
        .checked_add(penalty_cost)
        .ok_or(ModelError::Overflow)?;
    Ok(ObjectiveBreakdown {
        cover_cost,
        penalty_cost,
        total,
    })
}
