//! Exact greedy growth of one constrained regression tree on gradient statistics.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: Box<TreeNode>, right: Box<TreeNode> },
    Leaf { weight: f64 },
}

impl TreeNode {
    /// Leaf value reached by `row`; rows go left when `x <= threshold`.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { weight } => return *weight,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub(crate) fn predict_column_major(&self, columns: &[Vec<f64>], i: usize) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { weight } => return *weight,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if columns[*feature][i] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Calls `f` with every split feature, in preorder.
    pub fn visit_splits(&self, f: &mut impl FnMut(usize, f64)) {
        if let TreeNode::Split { feature, threshold, left, right } = self {
            f(*feature, *threshold);
            left.visit_splits(f);
            right.visit_splits(f);
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    pub eta: f64,
}

/// L1 soft-thresholding of a gradient sum.
pub(crate) fn soft_threshold(g: f64, alpha: f64) -> f64 {
    if g > alpha {
        g - alpha
    } else if g < -alpha {
        g + alpha
    } else {
        0.0
    }
}

pub(crate) fn optimal_weight(g: f64, h: f64, p: &GrowParams) -> f64 {
    let denom = h + p.lambda;
    if denom <= 0.0 {
        return 0.0;
    }
    -soft_threshold(g, p.alpha) / denom
}

/// Objective reduction of a leaf holding weight `w`; equals `T(G)^2 / (H + lambda)`
/// at the unconstrained optimum.
pub(crate) fn weight_gain(g: f64, h: f64, w: f64, p: &GrowParams) -> f64 {
    -(2.0 * soft_threshold(g, p.alpha) * w + (h + p.lambda) * w * w)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
    pub left_weight: f64,
    pub right_weight: f64,
}

/// Best threshold on one feature. `rows` must be sorted by `values`.
///
/// Thresholds are midpoints between consecutive distinct values; a candidate
/// replaces the incumbent only on strictly larger gain, so the lowest
/// threshold wins ties.
#[allow(clippy::too_many_arguments)]
pub(crate) fn best_split_on_feature(
    feature: usize,
    values: &[f64],
    rows: &[usize],
    grad: &[f64],
    hess: &[f64],
    bounds: (f64, f64),
    monotone: bool,
    p: &GrowParams,
) -> Option<SplitCandidate> {
    let (g_total, h_total) =
        rows.iter().fold((0.0, 0.0), |(g, h), &i| (g + grad[i], h + hess[i]));
    let parent_w = optimal_weight(g_total, h_total, p).clamp(bounds.0, bounds.1);
    let parent_gain = weight_gain(g_total, h_total, parent_w, p);

    let mut best: Option<SplitCandidate> = None;
    let (mut gl, mut hl) = (0.0, 0.0);
    for k in 0..rows.len().saturating_sub(1) {
        let i = rows[k];
        gl += grad[i];
        hl += hess[i];
        let (v, next) = (values[i], values[rows[k + 1]]);
        if v == next {
            continue;
        }
        let (gr, hr) = (g_total - gl, h_total - hl);
        if hl < p.min_child_weight || hr < p.min_child_weight {
            continue;
        }
        let wl = optimal_weight(gl, hl, p).clamp(bounds.0, bounds.1);
        let wr = optimal_weight(gr, hr, p).clamp(bounds.0, bounds.1);
        if monotone && wl > wr {
            continue;
        }
        let gain =
            0.5 * (weight_gain(gl, hl, wl, p) + weight_gain(gr, hr, wr, p) - parent_gain) - p.gamma;
        if gain.is_nan() || gain <= 0.0 || best.is_some_and(|b| gain <= b.gain) {
            continue;
        }
        let mut threshold = 0.5 * (v + next);
        if !(threshold >= v && threshold < next) {
            threshold = v;
        }
        best = Some(SplitCandidate { feature, threshold, gain, left_weight: wl, right_weight: wr });
    }
    best
}

/// Per-tree growth state. Each entry of `order` holds the sampled rows sorted
/// by one tree feature; a node owns the same index range in every entry.
pub(crate) struct Grower<'a> {
    pub columns: &'a [Vec<f64>],
    pub grad: &'a [f64],
    pub hess: &'a [f64],
    pub params: GrowParams,
    pub monotone: &'a [u8],
    pub group_of: &'a [Option<usize>],
    pub tree_features: Vec<usize>,
    pub level_features: Vec<Vec<usize>>,
    pub order: Vec<Vec<usize>>,
    pub position: Vec<Option<usize>>,
    pub go_left: Vec<bool>,
    pub scratch: Vec<usize>,
}

impl Grower<'_> {
    pub fn grow(&mut self) -> TreeNode {
        let n = self.order.first().map_or(0, Vec::len);
        self.grow_node(0, n, 0, (f64::NEG_INFINITY, f64::INFINITY), None)
    }

    fn candidates(&self, depth: usize, root_group: Option<usize>) -> Vec<usize> {
        let level = &self.level_features[depth.min(self.level_features.len() - 1)];
        match root_group {
            None => level.clone(),
            Some(group) => {
                let in_group = |f: &&usize| self.group_of[**f] == Some(group);
                let restricted: Vec<usize> = level.iter().filter(in_group).copied().collect();
                if restricted.is_empty() {
                    self.tree_features.iter().filter(in_group).copied().collect()
                } else {
                    restricted
                }
            }
        }
    }

    fn grow_node(
        &mut self,
        start: usize,
        end: usize,
        depth: usize,
        bounds: (f64, f64),
        root_group: Option<usize>,
    ) -> TreeNode {
        let p = self.params;
        let leaf = |rows: &[usize], grad: &[f64], hess: &[f64]| {
            let (g, h) = rows.iter().fold((0.0, 0.0), |(g, h), &i| (g + grad[i], h + hess[i]));
            TreeNode::Leaf { weight: optimal_weight(g, h, &p).clamp(bounds.0, bounds.1) * p.eta }
        };
        if self.order.is_empty() || end - start < 2 || depth >= p.max_depth {
            let rows = self.order.first().map_or(&[][..], |o| &o[start..end]);
            return leaf(rows, self.grad, self.hess);
        }

        let mut best: Option<SplitCandidate> = None;
        for f in self.candidates(depth, root_group) {
            let pos = self.position[f].expect("candidate is a tree feature");
            let found = best_split_on_feature(
                f,
                &self.columns[f],
                &self.order[pos][start..end],
                self.grad,
                self.hess,
                bounds,
                self.monotone[f] == 1,
                &p,
            );
            if let Some(c) = found {
                if best.is_none_or(|b| c.gain > b.gain) {
                    best = Some(c);
                }
            }
        }
        let Some(split) = best else {
            return leaf(&self.order[0][start..end], self.grad, self.hess);
        };

        let col = &self.columns[split.feature];
        let mut n_left = 0;
        for &i in &self.order[0][start..end] {
            let left = col[i] <= split.threshold;
            self.go_left[i] = left;
            n_left += usize::from(left);
        }
        for idx in 0..self.order.len() {
            let range = &mut self.order[idx][start..end];
            self.scratch.clear();
            let mut write = 0;
            for k in 0..range.len() {
                let i = range[k];
                if self.go_left[i] {
                    range[write] = i;
                    write += 1;
                } else {
                    self.scratch.push(i);
                }
            }
            range[write..].copy_from_slice(&self.scratch);
        }

        let (left_bounds, right_bounds) = if self.monotone[split.feature] == 1 {
            let mid = 0.5 * (split.left_weight + split.right_weight);
            ((bounds.0, mid), (mid, bounds.1))
        } else {
            (bounds, bounds)
        };
        let group = root_group.or(self.group_of[split.feature]);
        let mid = start + n_left;
        let left = self.grow_node(start, mid, depth + 1, left_bounds, group);
        let right = self.grow_node(mid, end, depth + 1, right_bounds, group);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}
