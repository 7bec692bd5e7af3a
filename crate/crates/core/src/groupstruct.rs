//! Group structures: the genome half that encodes feature selection,
//! interaction constraints and monotonicity constraints at once.
//!
//! A structure partitions the feature indices `0..p` into an unselected set
//! and a list of interaction groups. Features in the same group are allowed
//! to interact; every group carries one monotonicity attribute. Decreasing
//! effects are handled upstream by flipping feature signs, so the attribute
//! only distinguishes unconstrained from increasing.
//!
//! Structures are kept in canonical form: no empty groups, groups ordered by
//! their smallest member.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Monotonicity {
    Unconstrained,
    Increasing,
}

impl Monotonicity {
    pub fn tag(self) -> &'static str {
        match self {
            Monotonicity::Unconstrained => "UNC",
            Monotonicity::Increasing => "INC",
        }
    }

    pub(crate) fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random_bool(0.5) {
            Monotonicity::Increasing
        } else {
            Monotonicity::Unconstrained
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Group {
    pub members: BTreeSet<usize>,
    pub monotonicity: Monotonicity,
}

impl Group {
    pub fn new(members: impl IntoIterator<Item = usize>, monotonicity: Monotonicity) -> Self {
        Self { members: members.into_iter().collect(), monotonicity }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupStructure {
    pub unselected: BTreeSet<usize>,
    pub groups: Vec<Group>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Duplicated(usize),
    Unassigned(usize),
    OutOfRange(usize),
    EmptyGroup(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Duplicated(i) => write!(f, "index {i} duplicated"),
            Violation::Unassigned(i) => write!(f, "index {i} unassigned"),
            Violation::OutOfRange(i) => write!(f, "index {i} out of range"),
            Violation::EmptyGroup(g) => write!(f, "group {g} is empty"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("pair ({0}, {1}) touches an unselected or out-of-range feature")]
    PairOutsideSelection(usize, usize),
    #[error("feature {0} is out of range")]
    OutOfRange(usize),
    #[error("pair ({0}, {1}) crosses interaction groups")]
    PairCrossesGroups(usize, usize),
    #[error("feature {0} was used but is not selected")]
    UsedUnselected(usize),
    #[error("malformed group structure `{0}`")]
    Parse(String),
}

/// Hard constraints handed to the learner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub selected_mask: Vec<bool>,
    pub interaction_groups: Vec<BTreeSet<usize>>,
    pub monotone_mask: Vec<u8>,
}

impl ConstraintSet {
    pub fn p(&self) -> usize {
        self.selected_mask.len()
    }

    /// Index of the interaction group holding each feature, `None` if unselected.
    pub fn group_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.p()];
        for (g, members) in self.interaction_groups.iter().enumerate() {
            for &j in members {
                if j < out.len() {
                    out[j] = Some(g);
                }
            }
        }
        out
    }

    pub fn selected(&self) -> Vec<usize> {
        (0..self.p()).filter(|&j| self.selected_mask[j]).collect()
    }
}

impl GroupStructure {
    /// Builds a structure and brings it into canonical form.
    pub fn new(unselected: impl IntoIterator<Item = usize>, groups: Vec<Group>) -> Self {
        let mut g = Self { unselected: unselected.into_iter().collect(), groups };
        g.normalize();
        g
    }

    /// Every feature unselected.
    pub fn empty(p: usize) -> Self {
        Self { unselected: (0..p).collect(), groups: Vec::new() }
    }

    /// Every feature selected in its own unconstrained group.
    pub fn singletons(p: usize) -> Self {
        Self::new([], (0..p).map(|j| Group::new([j], Monotonicity::Unconstrained)).collect())
    }

    pub fn normalize(&mut self) {
        self.groups.retain(|g| !g.members.is_empty());
        self.groups.sort_by_key(|g| g.members.first().copied());
    }

    pub fn selected(&self) -> BTreeSet<usize> {
        self.groups.iter().flat_map(|g| g.members.iter().copied()).collect()
    }

    pub fn n_selected(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }

    pub fn is_empty_selection(&self) -> bool {
        self.n_selected() == 0
    }

    /// Number of feature pairs allowed to interact.
    pub fn within_group_pairs(&self) -> usize {
        self.groups.iter().map(|g| g.members.len() * g.members.len().saturating_sub(1) / 2).sum()
    }

    pub fn group_containing(&self, feature: usize) -> Option<&Group> {
        self.groups.iter().find(|g| g.members.contains(&feature))
    }

    /// Reports every violated partition invariant for feature count `p`.
    pub fn validate(&self, p: usize) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut seen = vec![false; p];
        let mut visit = |i: usize, violations: &mut Vec<Violation>| {
            if i >= p {
                violations.push(Violation::OutOfRange(i));
            } else if seen[i] {
                violations.push(Violation::Duplicated(i));
            } else {
                seen[i] = true;
            }
        };
        for &i in &self.unselected {
            visit(i, &mut violations);
        }
        for (k, g) in self.groups.iter().enumerate() {
            if g.members.is_empty() {
                violations.push(Violation::EmptyGroup(k));
            }
            for &i in &g.members {
                visit(i, &mut violations);
            }
        }
        violations.extend((0..p).filter(|&i| !seen[i]).map(Violation::Unassigned));
        violations
    }

    pub fn is_valid(&self, p: usize) -> bool {
        self.validate(p).is_empty()
    }

    /// Learner-facing form of the structure.
    pub fn to_constraints(&self, p: usize) -> ConstraintSet {
        let mut selected_mask = vec![false; p];
        let mut monotone_mask = vec![0u8; p];
        for g in &self.groups {
            for &j in &g.members {
                selected_mask[j] = true;
                if g.monotonicity == Monotonicity::Increasing {
                    monotone_mask[j] = 1;
                }
            }
        }
        ConstraintSet {
            selected_mask,
            interaction_groups: self.groups.iter().map(|g| g.members.clone()).collect(),
            monotone_mask,
        }
    }

    /// Number of genes in the grouping encoding: the unselected set plus one per group.
    fn n_genes(&self) -> usize {
        self.groups.len() + 1
    }

    /// Tightens the structure to what a fitted model actually realized.
    ///
    /// Unused selected features become unselected and groups split into the
    /// transitive closure of the realized pairs. New groups keep the attribute
    /// of the old group they came from.
    pub fn update_from_model(
        &self,
        used: &BTreeSet<usize>,
        realized_pairs: &BTreeSet<(usize, usize)>,
    ) -> Result<GroupStructure, GroupError> {
        let p = self.unselected.len() + self.n_selected();
        let mut owner: Vec<Option<usize>> = vec![None; p];
        for (k, g) in self.groups.iter().enumerate() {
            for &j in &g.members {
                if j >= p {
                    return Err(GroupError::OutOfRange(j));
                }
                owner[j] = Some(k);
            }
        }
        for &j in used {
            if j >= p || owner[j].is_none() {
                return Err(GroupError::UsedUnselected(j));
            }
        }
        for &(a, b) in realized_pairs {
            if !used.contains(&a) || !used.contains(&b) {
                return Err(GroupError::PairOutsideSelection(a, b));
            }
            if owner[a] != owner[b] {
                return Err(GroupError::PairCrossesGroups(a, b));
            }
        }
        let pairs: Vec<(usize, usize)> = realized_pairs.iter().copied().collect();
        from_pairs_with(p, used, &pairs, |members| {
            let first = *members.first().expect("components are nonempty");
            self.groups[owner[first].expect("used features are selected")].monotonicity
        })
    }
}

/// Groups the selected features into the connected components of `pairs`;
/// every group is unconstrained.
pub fn from_pairs(
    p: usize,
    selected: &BTreeSet<usize>,
    pairs: &[(usize, usize)],
) -> Result<GroupStructure, GroupError> {
    from_pairs_with(p, selected, pairs, |_| Monotonicity::Unconstrained)
}

/// Like [`from_pairs`], with the attribute of each group chosen by `attribute`.
pub fn from_pairs_with(
    p: usize,
    selected: &BTreeSet<usize>,
    pairs: &[(usize, usize)],
    mut attribute: impl FnMut(&BTreeSet<usize>) -> Monotonicity,
) -> Result<GroupStructure, GroupError> {
    if let Some(&j) = selected.iter().find(|&&j| j >= p) {
        return Err(GroupError::OutOfRange(j));
    }
    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| !selected.contains(a) || !selected.contains(b)) {
        return Err(GroupError::PairOutsideSelection(a, b));
    }
    let nodes: Vec<usize> = selected.iter().copied().collect();
    let groups = closure::components(&nodes, pairs, p)
        .into_iter()
        .map(|comp| {
            let members: BTreeSet<usize> = comp.into_iter().collect();
            let monotonicity = attribute(&members);
            Group { members, monotonicity }
        })
        .collect();
    Ok(GroupStructure::new((0..p).filter(|j| !selected.contains(j)), groups))
}

/// Two distinct crossing sites `a < b` among the boundaries `0..=n_genes`.
fn crossing_sites<R: Rng + ?Sized>(n_genes: usize, rng: &mut R) -> (usize, usize) {
    let first = rng.random_range(0..=n_genes);
    let mut second = rng.random_range(0..n_genes);
    if second >= first {
        second += 1;
    }
    (first.min(second), first.max(second))
}

/// Injects the genes of `donor` between `donor_sites` into `receiver` at
/// boundary `insert_at`, then removes the injected items from the
/// receiver's old genes.
pub fn inject_section(
    donor: &GroupStructure,
    donor_sites: (usize, usize),
    receiver: &GroupStructure,
    insert_at: usize,
) -> GroupStructure {
    let (lo, hi) = donor_sites;
    debug_assert!(lo < hi && hi <= donor.n_genes());
    debug_assert!(insert_at <= receiver.n_genes());

    let mut injected_unselected = BTreeSet::new();
    let mut injected_groups = Vec::new();
    for gene in lo..hi {
        if gene == 0 {
            injected_unselected.extend(donor.unselected.iter().copied());
        } else {
            injected_groups.push(donor.groups[gene - 1].clone());
        }
    }
    let injected: BTreeSet<usize> = injected_unselected
        .iter()
        .copied()
        .chain(injected_groups.iter().flat_map(|g| g.members.iter().copied()))
        .collect();

    let strip = |members: &BTreeSet<usize>| -> BTreeSet<usize> {
        members.difference(&injected).copied().collect()
    };
    let mut unselected = strip(&receiver.unselected);
    unselected.extend(injected_unselected);

    // The unselected set always stays in front, so injection at boundary 0 or 1
    // lands just after it.
    let at = insert_at.saturating_sub(1).min(receiver.groups.len());
    let mut groups: Vec<Group> = Vec::with_capacity(receiver.groups.len() + injected_groups.len());
    for g in &receiver.groups[..at] {
        groups.push(Group { members: strip(&g.members), monotonicity: g.monotonicity });
    }
    groups.extend(injected_groups);
    for g in &receiver.groups[at..] {
        groups.push(Group { members: strip(&g.members), monotonicity: g.monotonicity });
    }
    GroupStructure::new(unselected, groups)
}

/// Grouping crossover: each child is one parent with the crossing section
/// of the other injected at its first crossing site.
pub fn gga_crossover<R: Rng + ?Sized>(
    a: &GroupStructure,
    b: &GroupStructure,
    rng: &mut R,
) -> (GroupStructure, GroupStructure) {
    let sites_a = crossing_sites(a.n_genes(), rng);
    let sites_b = crossing_sites(b.n_genes(), rng);
    let child1 = inject_section(a, sites_a, b, sites_b.0);
    let child2 = inject_section(b, sites_b, a, sites_a.0);
    (child1, child2)
}

/// Grouping mutation.
///
/// Each feature moves with probability `p_move` to a destination drawn
/// uniformly from the unselected set, the existing groups, and a fresh
/// singleton group. Each group then redraws its attribute with probability
/// `p_attr`.
pub fn gga_mutate<R: Rng + ?Sized>(
    g: &GroupStructure,
    p_move: f64,
    p_attr: f64,
    rng: &mut R,
) -> GroupStructure {
    let p = g.unselected.len() + g.n_selected();
    let n_existing = g.groups.len();
    let mut attrs: Vec<Monotonicity> = g.groups.iter().map(|grp| grp.monotonicity).collect();
    let mut location: Vec<Option<usize>> = vec![None; p];
    for (k, grp) in g.groups.iter().enumerate() {
        for &j in &grp.members {
            location[j] = Some(k);
        }
    }
    for loc in location.iter_mut() {
        if !rng.random_bool(p_move) {
            continue;
        }
        let dest = rng.random_range(0..n_existing + 2);
        *loc = if dest == 0 {
            None
        } else if dest <= n_existing {
            Some(dest - 1)
        } else {
            attrs.push(Monotonicity::random(rng));
            Some(attrs.len() - 1)
        };
    }

    let mut members = vec![BTreeSet::new(); attrs.len()];
    let mut unselected = BTreeSet::new();
    for (j, loc) in location.iter().enumerate() {
        match loc {
            Some(k) => {
                members[*k].insert(j);
            }
            None => {
                unselected.insert(j);
            }
        }
    }
    let mut groups = Vec::new();
    for (set, mut attr) in members.into_iter().zip(attrs) {
        if set.is_empty() {
            continue;
        }
        if rng.random_bool(p_attr) {
            attr = Monotonicity::random(rng);
        }
        groups.push(Group { members: set, monotonicity: attr });
    }
    GroupStructure::new(unselected, groups)
}

fn write_indices(f: &mut fmt::Formatter<'_>, set: &BTreeSet<usize>) -> fmt::Result {
    write!(f, "[")?;
    for (i, j) in set.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{j}")?;
    }
    write!(f, "]")
}

/// Canonical text form `unselected:[0,4];group:[1,2]:INC;group:[3]:UNC`.
impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unselected:")?;
        write_indices(f, &self.unselected)?;
        for g in &self.groups {
            write!(f, ";group:")?;
            write_indices(f, &g.members)?;
            write!(f, ":{}", g.monotonicity.tag())?;
        }
        Ok(())
    }
}

fn parse_indices(text: &str) -> Option<BTreeSet<usize>> {
    let inner = text.strip_prefix('[')?.strip_suffix(']')?;
    if inner.trim().is_empty() {
        return Some(BTreeSet::new());
    }
    inner.split(',').map(|s| s.trim().parse().ok()).collect()
}

impl FromStr for GroupStructure {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::Parse(s.to_string());
        let mut parts = s.trim().split(';');
        let unselected = parts
            .next()
            .and_then(|head| head.strip_prefix("unselected:"))
            .and_then(parse_indices)
            .ok_or_else(bad)?;
        let mut groups = Vec::new();
        for part in parts {
            let body = part.strip_prefix("group:").ok_or_else(bad)?;
            let (set, tag) = body.rsplit_once(':').ok_or_else(bad)?;
            let monotonicity = match tag {
                "INC" => Monotonicity::Increasing,
                "UNC" => Monotonicity::Unconstrained,
                _ => return Err(bad()),
            };
            groups.push(Group { members: parse_indices(set).ok_or_else(bad)?, monotonicity });
        }
        Ok(GroupStructure::new(unselected, groups))
    }
}
