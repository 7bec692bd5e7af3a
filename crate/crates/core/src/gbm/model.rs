use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::params::HyperparamConfig;
use super::tree::{GrowParams, Grower, TreeNode};
use crate::data::Dataset;
use crate::groupstruct::ConstraintSet;

#[derive(Debug, Error)]
pub enum GbmError {
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("expected {expected} feature columns, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("hyperparameters out of range: {0:?}")]
    InvalidHyperparams(Vec<&'static str>),
    #[error("malformed model dump: {0}")]
    Dump(#[from] serde_json::Error),
}

/// Additive ensemble of regression trees on the log-odds scale.
///
/// Leaf weights already include the learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub n_features: usize,
    pub base_score: f64,
    pub eta: f64,
    pub trees: Vec<TreeNode>,
    #[serde(skip)]
    pub constraints: Option<ConstraintSet>,
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn check_constraints(cs: &ConstraintSet, p: usize) -> Result<(), GbmError> {
    let bad = |msg: String| Err(GbmError::InvalidConstraint(msg));
    if cs.selected_mask.len() != p || cs.monotone_mask.len() != p {
        return bad(format!("masks must have length {p}"));
    }
    let mut owner = vec![false; p];
    for group in &cs.interaction_groups {
        for &j in group {
            if j >= p {
                return bad(format!("feature {j} out of range"));
            }
            if !cs.selected_mask[j] {
                return bad(format!("feature {j} grouped but not selected"));
            }
            if owner[j] {
                return bad(format!("feature {j} appears in two groups"));
            }
            owner[j] = true;
        }
    }
    for j in 0..p {
        if cs.selected_mask[j] && !owner[j] {
            return bad(format!("selected feature {j} has no group"));
        }
        if cs.monotone_mask[j] > 1 || (cs.monotone_mask[j] == 1 && !cs.selected_mask[j]) {
            return bad(format!("monotone flag on feature {j} is invalid"));
        }
    }
    Ok(())
}

/// Draws `round(fraction * items.len())` items (at least one) without replacement.
fn subsample_sorted<R: Rng + ?Sized>(items: &[usize], fraction: f64, rng: &mut R) -> Vec<usize> {
    let k = ((fraction * items.len() as f64).round() as usize).clamp(1, items.len().max(1));
    if k >= items.len() {
        return items.to_vec();
    }
    let mut picked: Vec<usize> = index::sample(rng, items.len(), k).into_iter().map(|i| items[i]).collect();
    picked.sort_unstable();
    picked
}

/// Fits a boosted ensemble with logistic loss under the given constraints.
///
/// Trees are restricted to selected features; every split below the root
/// uses the root feature's interaction group, and monotone features carry
/// weight bounds through the subtree.
pub fn fit<R: Rng + ?Sized>(
    ds: &Dataset,
    hp: &HyperparamConfig,
    cs: &ConstraintSet,
    rng: &mut R,
) -> Result<BoostedModel, GbmError> {
    let p = ds.p();
    check_constraints(cs, p)?;
    if !hp.is_valid() {
        return Err(GbmError::InvalidHyperparams(hp.out_of_range()));
    }
    let n = ds.n();
    let [_, ones] = ds.class_counts();
    let rate = ones as f64 / n as f64;
    let base_score = (rate / (1.0 - rate)).ln().clamp(-10.0, 10.0);
    let mut model = BoostedModel {
        n_features: p,
        base_score,
        eta: hp.eta,
        trees: Vec::new(),
        constraints: Some(cs.clone()),
    };
    let selected = cs.selected();
    if selected.is_empty() {
        return Ok(model);
    }

    let columns = ds.columns();
    let y: Vec<f64> = ds.target().iter().map(|&t| f64::from(t)).collect();
    let group_of = cs.group_of();
    let presorted: Vec<Vec<usize>> = selected
        .iter()
        .map(|&f| {
            let col = &columns[f];
            let mut rows: Vec<usize> = (0..n).collect();
            rows.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            rows
        })
        .collect();
    let params = GrowParams {
        max_depth: hp.max_depth as usize,
        lambda: hp.lambda,
        alpha: hp.alpha,
        gamma: hp.gamma,
        min_child_weight: hp.min_child_weight,
        eta: hp.eta,
    };
    let all_rows: Vec<usize> = (0..n).collect();

    let mut raw = vec![base_score; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut in_sample = vec![false; n];
    for _ in 0..hp.nrounds {
        for i in 0..n {
            let prob = sigmoid(raw[i]);
            grad[i] = prob - y[i];
            hess[i] = (prob * (1.0 - prob)).max(1e-16);
        }
        let rows = subsample_sorted(&all_rows, hp.subsample, rng);
        in_sample.iter_mut().for_each(|s| *s = false);
        for &i in &rows {
            in_sample[i] = true;
        }
        let tree_features = subsample_sorted(&selected, hp.colsample_bytree, rng);
        let level_features: Vec<Vec<usize>> = (0..params.max_depth.max(1))
            .map(|_| subsample_sorted(&tree_features, hp.colsample_bylevel, rng))
            .collect();
        let mut position = vec![None; p];
        let mut order = Vec::with_capacity(tree_features.len());
        for (pos, &f) in tree_features.iter().enumerate() {
            position[f] = Some(pos);
            let sel_pos = selected.binary_search(&f).expect("tree features are selected");
            order.push(presorted[sel_pos].iter().copied().filter(|&i| in_sample[i]).collect());
        }
        let mut grower = Grower {
            columns,
            grad: &grad,
            hess: &hess,
            params,
            monotone: &cs.monotone_mask,
            group_of: &group_of,
            tree_features,
            level_features,
            order,
            position,
            go_left: vec![false; n],
            scratch: Vec::with_capacity(rows.len()),
        };
        let tree = grower.grow();
        for (i, r) in raw.iter_mut().enumerate() {
            *r += tree.predict_column_major(columns, i);
        }
        model.trees.push(tree);
    }
    Ok(model)
}

impl BoostedModel {
    pub fn predict_raw_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().fold(self.base_score, |acc, t| acc + t.predict(row))
    }

    /// Log-odds for each row of `x`.
    pub fn predict_raw(&self, x: &[Vec<f64>]) -> Result<Vec<f64>, GbmError> {
        x.iter()
            .map(|row| {
                if row.len() != self.n_features {
                    Err(GbmError::DimensionMismatch { expected: self.n_features, found: row.len() })
                } else {
                    Ok(self.predict_raw_row(row))
                }
            })
            .collect()
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Vec<f64>, GbmError> {
        Ok(self.predict_raw(x)?.into_iter().map(sigmoid).collect())
    }

    /// Log-odds for every row of a dataset.
    pub fn predict_dataset(&self, ds: &Dataset) -> Result<Vec<f64>, GbmError> {
        if ds.p() != self.n_features {
            return Err(GbmError::DimensionMismatch { expected: self.n_features, found: ds.p() });
        }
        let columns = ds.columns();
        Ok((0..ds.n())
            .map(|i| {
                self.trees
                    .iter()
                    .fold(self.base_score, |acc, t| acc + t.predict_column_major(columns, i))
            })
            .collect())
    }

    /// Features split on in each tree.
    pub fn tree_feature_sets(&self) -> Vec<BTreeSet<usize>> {
        self.trees
            .iter()
            .map(|t| {
                let mut set = BTreeSet::new();
                t.visit_splits(&mut |f, _| {
                    set.insert(f);
                });
                set
            })
            .collect()
    }

    /// Every feature appearing in at least one split.
    pub fn used_features(&self) -> BTreeSet<usize> {
        self.tree_feature_sets().into_iter().flatten().collect()
    }

    /// Pairs of distinct features that share a tree.
    pub fn realized_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut pairs = BTreeSet::new();
        for set in self.tree_feature_sets() {
            let features: Vec<usize> = set.into_iter().collect();
            for (i, &a) in features.iter().enumerate() {
                for &b in &features[i + 1..] {
                    pairs.insert((a, b));
                }
            }
        }
        pairs
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GbmError> {
        Ok(serde_json::from_str(text)?)
    }
}
