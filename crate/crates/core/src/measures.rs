//! The four objectives: negated AUC plus the interpretability measures NF, NI
//! and NNM, read exactly off a fitted model.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure;
use crate::data::{Dataset, ResamplingSplit};
use crate::gbm::{self, BoostedModel, GbmError, HyperparamConfig};
use crate::groupstruct::{GroupError, GroupStructure, Monotonicity};

/// `(-AUC, NF, NI, NNM)`, all minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub neg_auc: f64,
    pub nf: f64,
    pub ni: f64,
    pub nnm: f64,
}

impl ObjectiveVector {
    pub const FEATURELESS: ObjectiveVector = ObjectiveVector { neg_auc: -0.5, nf: 0.0, ni: 0.0, nnm: 0.0 };
    pub const REFERENCE: ObjectiveVector = ObjectiveVector { neg_auc: 0.0, nf: 1.0, ni: 1.0, nnm: 1.0 };

    pub fn new(neg_auc: f64, nf: f64, ni: f64, nnm: f64) -> Self {
        Self { neg_auc, nf, ni, nnm }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.neg_auc, self.nf, self.ni, self.nnm]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn auc(&self) -> f64 {
        -self.neg_auc
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.neg_auc, self.nf, self.ni, self.nnm)
    }
}

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("AUC is undefined unless both classes are present")]
    SingleClass,
    #[error("{labels} labels but {scores} scores")]
    LengthMismatch { labels: usize, scores: usize },
}

/// Area under the ROC curve in Mann-Whitney form, ties counted one half.
///
/// Computed from midranks in `O(m log m)`.
pub fn auc(labels: &[u8], scores: &[f64]) -> Result<f64, MeasureError> {
    if labels.len() != scores.len() {
        return Err(MeasureError::LengthMismatch { labels: labels.len(), scores: scores.len() });
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MeasureError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // ranks are 1-based; ties share the mean of their positions
        let midrank = (start + 1 + end) as f64 / 2.0;
        let pos_in_run = order[start..end].iter().filter(|&&i| labels[i] == 1).count();
        rank_sum_pos += midrank * pos_in_run as f64;
        start = end;
    }
    let n_pos_f = n_pos as f64;
    let u = rank_sum_pos - n_pos_f * (n_pos_f + 1.0) / 2.0;
    Ok(u / (n_pos_f * n_neg as f64))
}

/// Fraction of features used in at least one split.
pub fn nf(model: &BoostedModel, p: usize) -> f64 {
    model.used_features().len() as f64 / p as f64
}

/// Fraction of feature pairs in the transitive closure of the realized interactions.
pub fn ni(model: &BoostedModel, p: usize) -> f64 {
    if p < 2 {
        return 0.0;
    }
    let pairs: Vec<(usize, usize)> = model.realized_pairs().into_iter().collect();
    let closed = closure::closed_pairs(&pairs, p);
    closed.len() as f64 / (p * (p - 1) / 2) as f64
}

/// Fraction of features used by the model whose group is unconstrained.
pub fn nnm(model: &BoostedModel, g: &GroupStructure, p: usize) -> f64 {
    let unconstrained = model
        .used_features()
        .into_iter()
        .filter(|&j| {
            g.group_containing(j).is_none_or(|grp| grp.monotonicity == Monotonicity::Unconstrained)
        })
        .count();
    unconstrained as f64 / p as f64
}

/// Interpretability part of the objectives for a fitted model.
pub fn interpretability(model: &BoostedModel, g: &GroupStructure, p: usize) -> (f64, f64, f64) {
    (nf(model, p), ni(model, p), nnm(model, g, p))
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Fit(#[from] GbmError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("learner broke its constraints: {0}")]
    Feedback(#[from] GroupError),
}

#[derive(Debug, Clone)]
pub struct CandidateEvaluation {
    pub objectives: ObjectiveVector,
    /// The structure tightened to what the final model realized.
    pub structure: GroupStructure,
    pub fold_aucs: Vec<f64>,
    /// Model refit on all of the data the folds were drawn from.
    pub model: BoostedModel,
}

/// Cross-validated evaluation of one candidate.
///
/// The AUC part is the mean test-fold AUC. NF, NI and NNM are measured on a
/// single model refit on all rows of `ds`, and that model also drives the
/// structure update. `seed` fixes one generator stream per fit.
pub fn evaluate_candidate(
    ds: &Dataset,
    folds: &[ResamplingSplit],
    hp: &HyperparamConfig,
    g: &GroupStructure,
    seed: u64,
) -> Result<CandidateEvaluation, EvalError> {
    let p = ds.p();
    let cs = g.to_constraints(p);
    let stream_rng = |stream: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    };
    let final_model = gbm::fit(ds, hp, &cs, &mut stream_rng(0))?;
    if g.is_empty_selection() {
        return Ok(CandidateEvaluation {
            objectives: ObjectiveVector::FEATURELESS,
            structure: g.clone(),
            fold_aucs: vec![0.5; folds.len()],
            model: final_model,
        });
    }

    let mut fold_aucs = Vec::with_capacity(folds.len());
    for (k, split) in folds.iter().enumerate() {
        let train = ds.subset(&split.train_indices);
        let test = ds.subset(&split.test_indices);
        let model = gbm::fit(&train, hp, &cs, &mut stream_rng(k as u64 + 1))?;
        let scores = model.predict_dataset(&test)?;
        fold_aucs.push(auc(test.target(), &scores)?);
    }
    let mean_auc = fold_aucs.iter().sum::<f64>() / fold_aucs.len().max(1) as f64;
    let (nf, ni, nnm) = interpretability(&final_model, g, p);
    let structure = g.update_from_model(&final_model.used_features(), &final_model.realized_pairs())?;
    Ok(CandidateEvaluation {
        objectives: ObjectiveVector::new(-mean_auc, nf, ni, nnm),
        structure,
        fold_aucs,
        model: final_model,
    })
}

/// Draws a fit seed from `rng` and evaluates; convenience for callers holding a generator.
pub fn evaluate_candidate_with<R: Rng + ?Sized>(
    ds: &Dataset,
    folds: &[ResamplingSplit],
    hp: &HyperparamConfig,
    g: &GroupStructure,
    rng: &mut R,
) -> Result<CandidateEvaluation, EvalError> {
    evaluate_candidate(ds, folds, hp, g, rng.random())
}
