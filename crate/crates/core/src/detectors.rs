//! Data-driven priors for the initial population: an information-gain
//! filter, FAST pairwise interaction scores and a tree-based monotonicity
//! detector, plus the sampler that turns them into group structures.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::groupstruct::{self, Group, GroupStructure, Monotonicity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub filter_bins: usize,
    pub fast_bins: usize,
    pub fast_passes: usize,
    pub mono_repeats: usize,
    pub mono_subsample: f64,
    pub tree_max_depth: usize,
    pub tree_min_leaf: usize,
    /// Minimum SSE reduction of a split, as a fraction of the root SSE.
    pub tree_min_gain: f64,
    /// Success probability of the truncated geometric law for the number of selected features.
    pub p_select: f64,
    /// Same, for the number of interaction pairs.
    pub p_interact: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            filter_bins: 10,
            fast_bins: 10,
            fast_passes: 3,
            mono_repeats: 10,
            mono_subsample: 0.5,
            tree_max_depth: 5,
            tree_min_leaf: 10,
            tree_min_gain: 0.01,
            p_select: 0.5,
            p_interact: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterScores {
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionScores {
    pub matrix: Vec<Vec<f64>>,
}

impl InteractionScores {
    /// Pairs `(j, k)` with `j < k`, best first; ties in lexicographic order.
    pub fn ranked_pairs(&self) -> Vec<(usize, usize)> {
        let p = self.matrix.len();
        let mut pairs: Vec<(usize, usize)> =
            (0..p).flat_map(|j| (j + 1..p).map(move |k| (j, k))).collect();
        pairs.sort_by(|&(a, b), &(c, d)| self.matrix[c][d].total_cmp(&self.matrix[a][b]));
        pairs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityScores {
    pub signed: Vec<f64>,
    pub probability: Vec<f64>,
    pub sign: Vec<i8>,
}

impl MonotonicityScores {
    pub fn from_signed(signed: Vec<f64>) -> Self {
        let signed: Vec<f64> = signed.into_iter().map(|s| s.clamp(-1.0, 1.0)).collect();
        let probability = signed.iter().map(|s| 0.2 + 0.6 * s.abs()).collect();
        let sign = signed.iter().map(|&s| if s >= 0.0 { 1 } else { -1 }).collect();
        Self { signed, probability, sign }
    }

    /// All features treated as increasing with no evidence either way.
    pub fn neutral(p: usize) -> Self {
        Self::from_signed(vec![0.0; p])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detectors {
    pub filter: FilterScores,
    pub interactions: InteractionScores,
    pub monotonicity: MonotonicityScores,
}

/// Equal-frequency bins; tied values share the bin of their lowest stable rank.
pub fn equal_frequency_bins(x: &[f64], n_bins: usize) -> Vec<usize> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut bins = vec![0; n];
    let mut tie_start = 0;
    for (rank, &i) in order.iter().enumerate() {
        if rank > 0 && x[order[rank - 1]] != x[i] {
            tie_start = rank;
        }
        bins[i] = (tie_start * n_bins / n).min(n_bins - 1);
    }
    bins
}

fn entropy_bits(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let q = c as f64 / n;
            -q * q.log2()
        })
        .sum()
}

/// Information gain of the binned feature about the target, in bits.
pub fn information_gain(ds: &Dataset, n_bins: usize) -> FilterScores {
    assert!(n_bins >= 2, "n_bins must be at least 2");
    let y = ds.target();
    let h_y = entropy_bits(ds.class_counts());
    let n = ds.n() as f64;
    let scores = ds
        .columns()
        .par_iter()
        .map(|col| {
            let bins = equal_frequency_bins(col, n_bins);
            let mut counts = vec![[0usize; 2]; n_bins];
            for (&b, &t) in bins.iter().zip(y) {
                counts[b][t as usize] += 1;
            }
            let conditional: f64 = counts
                .iter()
                .filter(|c| c[0] + c[1] > 0)
                .map(|&c| (c[0] + c[1]) as f64 / n * entropy_bits(c))
                .sum();
            (h_y - conditional).max(0.0)
        })
        .collect();
    FilterScores { scores }
}

/// Residuals of `y` after a cyclic backfit of per-feature bin-mean effects.
fn main_effect_residuals(bins: &[Vec<usize>], y: &[f64], n_bins: usize, passes: usize) -> Vec<f64> {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let mut resid: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let mut effects = vec![vec![0.0; n_bins]; bins.len()];
    for _ in 0..passes {
        for (j, b) in bins.iter().enumerate() {
            let mut sums = vec![0.0; n_bins];
            let mut counts = vec![0usize; n_bins];
            for i in 0..n {
                sums[b[i]] += resid[i] + effects[j][b[i]];
                counts[b[i]] += 1;
            }
            let updated: Vec<f64> = sums
                .iter()
                .zip(&counts)
                .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
                .collect();
            for i in 0..n {
                resid[i] += effects[j][b[i]] - updated[b[i]];
            }
            effects[j] = updated;
        }
    }
    resid
}

/// Largest reduction in RSS over all 2x2 quadrant splits of a binned pair,
/// relative to fitting the residual mean, divided by n.
fn quadrant_score(bj: &[usize], bk: &[usize], r: &[f64], n_bins: usize) -> f64 {
    let n = r.len();
    // inclusive 2-d prefix sums, shifted by one
    let w = n_bins + 1;
    let mut sum = vec![0.0; w * w];
    let mut cnt = vec![0.0; w * w];
    for i in 0..n {
        sum[(bj[i] + 1) * w + bk[i] + 1] += r[i];
        cnt[(bj[i] + 1) * w + bk[i] + 1] += 1.0;
    }
    for a in 1..w {
        for b in 1..w {
            let idx = a * w + b;
            sum[idx] += sum[idx - w] + sum[idx - 1] - sum[idx - w - 1];
            cnt[idx] += cnt[idx - w] + cnt[idx - 1] - cnt[idx - w - 1];
        }
    }
    let total_s = sum[w * w - 1];
    let baseline = total_s * total_s / n as f64;
    let fit = |s: f64, c: f64| if c > 0.0 { s * s / c } else { 0.0 };
    let mut best = baseline;
    for a in 1..=n_bins {
        for b in 1..=n_bins {
            let s_ll = sum[a * w + b];
            let c_ll = cnt[a * w + b];
            let s_l = sum[a * w + n_bins];
            let c_l = cnt[a * w + n_bins];
            let s_b = sum[n_bins * w + b];
            let c_b = cnt[n_bins * w + b];
            let explained = fit(s_ll, c_ll)
                + fit(s_l - s_ll, c_l - c_ll)
                + fit(s_b - s_ll, c_b - c_ll)
                + fit(total_s - s_l - s_b + s_ll, n as f64 - c_l - c_b + c_ll);
            best = best.max(explained);
        }
    }
    ((best - baseline) / n as f64).max(0.0)
}

/// FAST interaction scores for a real-valued response.
pub fn fast_interactions_y(columns: &[Vec<f64>], y: &[f64], n_bins: usize, passes: usize) -> InteractionScores {
    assert!(n_bins >= 2, "n_bins must be at least 2");
    let p = columns.len();
    let bins: Vec<Vec<usize>> = columns.par_iter().map(|c| equal_frequency_bins(c, n_bins)).collect();
    let resid = main_effect_residuals(&bins, y, n_bins, passes);
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|j| (j + 1..p).map(move |k| (j, k))).collect();
    let scores: Vec<f64> = pairs
        .par_iter()
        .map(|&(j, k)| quadrant_score(&bins[j], &bins[k], &resid, n_bins))
        .collect();
    let mut matrix = vec![vec![0.0; p]; p];
    for (&(j, k), s) in pairs.iter().zip(scores) {
        matrix[j][k] = s;
        matrix[k][j] = s;
    }
    InteractionScores { matrix }
}

pub fn fast_interactions(ds: &Dataset, n_bins: usize) -> InteractionScores {
    fast_interactions_with(ds, n_bins, DetectorConfig::default().fast_passes)
}

pub fn fast_interactions_with(ds: &Dataset, n_bins: usize, passes: usize) -> InteractionScores {
    let y: Vec<f64> = ds.target().iter().map(|&t| t as f64).collect();
    fast_interactions_y(ds.columns(), &y, n_bins, passes)
}

/// Average ranks, ties sharing the mean of their positions.
fn midranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let r = (start + end - 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation; 0 when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (midranks(x), midranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        0.0
    } else {
        (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
    }
}

/// Fits a one-feature regression tree to `(x, y)` and returns its in-sample
/// predictions.
fn tree_predictions(x: &[f64], y: &[f64], max_depth: usize, min_leaf: usize, min_gain: f64) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut prefix = vec![0.0; n + 1];
    let mut prefix_sq = vec![0.0; n + 1];
    for (k, &i) in order.iter().enumerate() {
        prefix[k + 1] = prefix[k] + y[i];
        prefix_sq[k + 1] = prefix_sq[k] + y[i] * y[i];
    }
    let sse = |lo: usize, hi: usize| {
        let s = prefix[hi] - prefix[lo];
        prefix_sq[hi] - prefix_sq[lo] - s * s / (hi - lo) as f64
    };
    let threshold = (min_gain * sse(0, n)).max(1e-12);
    let mut pred = vec![0.0; n];
    let mut stack = vec![(0usize, n, 0usize)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let mut best: Option<(f64, usize)> = None;
        if depth < max_depth && hi - lo >= 2 * min_leaf.max(1) {
            let parent = sse(lo, hi);
            for s in lo + min_leaf.max(1)..=hi - min_leaf.max(1) {
                if x[order[s - 1]] == x[order[s]] {
                    continue;
                }
                let gain = parent - sse(lo, s) - sse(s, hi);
                if gain > threshold && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, s));
                }
            }
        }
        match best {
            Some((_, s)) => {
                stack.push((lo, s, depth + 1));
                stack.push((s, hi, depth + 1));
            }
            None => {
                let mean = (prefix[hi] - prefix[lo]) / (hi - lo) as f64;
                for &i in &order[lo..hi] {
                    pred[i] = mean;
                }
            }
        }
    }
    pred
}

/// Monotonicity scores for a real-valued response. Feature `j` uses rng
/// stream `j` of a generator seeded with `seed`.
pub fn monotonicity_scores_y(columns: &[Vec<f64>], y: &[f64], cfg: &DetectorConfig, seed: u64) -> MonotonicityScores {
    assert!(cfg.mono_repeats >= 1, "at least one repeat");
    assert!(cfg.mono_subsample > 0.0 && cfg.mono_subsample <= 1.0, "subsample fraction in (0, 1]");
    let n = y.len();
    let m = ((cfg.mono_subsample * n as f64).round() as usize).clamp(1.min(n), n);
    let signed = columns
        .par_iter()
        .enumerate()
        .map(|(j, col)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let mut total = 0.0;
            for _ in 0..cfg.mono_repeats {
                let mut rows = rand::seq::index::sample(&mut rng, n, m).into_vec();
                rows.sort_unstable();
                let xs: Vec<f64> = rows.iter().map(|&i| col[i]).collect();
                let ys: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
                let pred = tree_predictions(&xs, &ys, cfg.tree_max_depth, cfg.tree_min_leaf, cfg.tree_min_gain);
                total += spearman(&xs, &pred);
            }
            total / cfg.mono_repeats as f64
        })
        .collect();
    MonotonicityScores::from_signed(signed)
}

pub fn monotonicity_scores<R: Rng + ?Sized>(ds: &Dataset, cfg: &DetectorConfig, rng: &mut R) -> MonotonicityScores {
    let y: Vec<f64> = ds.target().iter().map(|&t| t as f64).collect();
    monotonicity_scores_y(ds.columns(), &y, cfg, rng.random())
}

/// Negates the columns whose sign is −1.
pub fn apply_sign_flip(ds: &Dataset, sign: &[i8]) -> Dataset {
    let columns = ds
        .columns()
        .iter()
        .zip(sign)
        .map(|(col, &s)| if s < 0 { col.iter().map(|v| -v).collect() } else { col.clone() })
        .collect();
    ds.with_columns(columns)
}

pub fn run_detectors<R: Rng + ?Sized>(ds: &Dataset, cfg: &DetectorConfig, rng: &mut R) -> Detectors {
    Detectors {
        filter: information_gain(ds, cfg.filter_bins),
        interactions: fast_interactions_with(ds, cfg.fast_bins, cfg.fast_passes),
        monotonicity: monotonicity_scores(ds, cfg, rng),
    }
}

/// Draws from `{lo..=hi}` with mass proportional to `(1 - success_p)^(k - lo)`.
pub fn truncated_geometric<R: Rng + ?Sized>(lo: usize, hi: usize, success_p: f64, rng: &mut R) -> usize {
    assert!(lo <= hi, "empty support");
    assert!(success_p > 0.0 && success_p < 1.0, "success probability in (0, 1)");
    let m = (hi - lo + 1) as f64;
    let q = 1.0 - success_p;
    let u: f64 = rng.random();
    // inverse of the renormalized CDF
    let k = ((1.0 - u * (1.0 - q.powf(m))).ln() / q.ln()).floor();
    lo + (k.max(0.0) as usize).min(hi - lo)
}

/// `count` distinct indices drawn sequentially with probability
/// proportional to `weights`; uniform once the remaining weights are all zero.
pub fn weighted_sample_without_replacement<R: Rng + ?Sized>(
    weights: &[f64],
    count: usize,
    rng: &mut R,
) -> BTreeSet<usize> {
    let mut remaining: Vec<usize> = (0..weights.len()).collect();
    let mut chosen = BTreeSet::new();
    while chosen.len() < count && !remaining.is_empty() {
        let total: f64 = remaining.iter().map(|&i| weights[i].max(0.0)).sum();
        let pos = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pos = remaining.len() - 1;
            for (k, &i) in remaining.iter().enumerate() {
                let w = weights[i].max(0.0);
                if u < w {
                    pos = k;
                    break;
                }
                u -= w;
            }
            while weights[remaining[pos]] <= 0.0 {
                pos -= 1;
            }
            pos
        } else {
            rng.random_range(0..remaining.len())
        };
        chosen.insert(remaining.remove(pos));
    }
    chosen
}

/// Detector-guided draw of an initial group structure.
pub fn sample_initial_structure<R: Rng + ?Sized>(
    p: usize,
    det: &Detectors,
    cfg: &DetectorConfig,
    rng: &mut R,
) -> GroupStructure {
    if p == 0 {
        return GroupStructure::empty(0);
    }
    let s = truncated_geometric(1, p, cfg.p_select, rng);
    let selected = weighted_sample_without_replacement(&det.filter.scores, s, rng);
    let n_pairs = if p < 2 { 0 } else { truncated_geometric(1, p * (p - 1) / 2, cfg.p_interact, rng) };
    let pairs: Vec<(usize, usize)> = det
        .interactions
        .ranked_pairs()
        .into_iter()
        .take(n_pairs)
        .filter(|(a, b)| selected.contains(a) && selected.contains(b))
        .collect();
    let prob = &det.monotonicity.probability;
    groupstruct::from_pairs_with(p, &selected, &pairs, |members| {
        let mean = members.iter().map(|&j| prob[j]).sum::<f64>() / members.len() as f64;
        if rng.random_bool(mean.clamp(0.0, 1.0)) {
            Monotonicity::Increasing
        } else {
            Monotonicity::Unconstrained
        }
    })
    .expect("pairs restricted to the selection")
}

/// Detector-free draw: uniform selection size, a random partition of the
/// selection and uniform attributes.
pub fn sample_uniform_structure<R: Rng + ?Sized>(p: usize, rng: &mut R) -> GroupStructure {
    if p == 0 {
        return GroupStructure::empty(0);
    }
    let s = rng.random_range(1..=p);
    let selected = rand::seq::index::sample(rng, p, s).into_vec();
    let k = rng.random_range(1..=s);
    let mut members = vec![BTreeSet::new(); k];
    for j in selected.iter().copied() {
        members[rng.random_range(0..k)].insert(j);
    }
    let chosen: BTreeSet<usize> = selected.into_iter().collect();
    let groups = members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|m| Group::new(m, Monotonicity::random(rng)))
        .collect();
    GroupStructure::new((0..p).filter(|j| !chosen.contains(j)), groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn binning_ties_go_low() {
        let x = [1.0, 2.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        assert_eq!(equal_frequency_bins(&x, 5), vec![0, 0, 0, 0, 2, 2, 3, 3, 4, 4]);
        assert_eq!(equal_frequency_bins(&[3.0; 6], 10), vec![0; 6]);
    }

    #[test]
    fn information_gain_examples() {
        let y: Vec<u8> = (0..200).map(|i| (i % 2) as u8).collect();
        let copy: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        let ds = Dataset::from_columns(
            vec![copy, vec![1.0; 200]],
            y,
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let ig = information_gain(&ds, 10).scores;
        assert!((ig[0] - 1.0).abs() < 1e-12);
        assert_eq!(ig[1], 0.0);
    }

    #[test]
    fn information_gain_noise_is_small() {
        let mut r = rng(3);
        let n = 10_000;
        let x: Vec<f64> = (0..n).map(|_| r.random()).collect();
        let y: Vec<u8> = (0..n).map(|_| r.random_bool(0.5) as u8).collect();
        let ds = Dataset::from_columns(vec![x], y, vec!["x".into()]).unwrap();
        assert!(information_gain(&ds, 10).scores[0] <= 0.02);
    }

    #[test]
    fn information_gain_rank_invariant() {
        let ds = crate::data::synthetic_monotone_interaction(500, 2);
        let transformed: Vec<Vec<f64>> = ds.columns().iter().map(|c| c.iter().map(|v| v.exp()).collect()).collect();
        let ds2 = ds.with_columns(transformed);
        assert_eq!(information_gain(&ds, 10), information_gain(&ds2, 10));
    }

    fn brute_force_quadrant(bj: &[usize], bk: &[usize], r: &[f64], n_bins: usize) -> f64 {
        let n = r.len() as f64;
        let rss = |sel: &dyn Fn(usize) -> bool| {
            let vals: Vec<f64> = (0..r.len()).filter(|&i| sel(i)).map(|i| r[i]).collect();
            if vals.is_empty() {
                return 0.0;
            }
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
        };
        let base = rss(&|_| true);
        let mut best = base;
        for a in 0..n_bins {
            for b in 0..n_bins {
                let total = rss(&|i| bj[i] <= a && bk[i] <= b)
                    + rss(&|i| bj[i] <= a && bk[i] > b)
                    + rss(&|i| bj[i] > a && bk[i] <= b)
                    + rss(&|i| bj[i] > a && bk[i] > b);
                best = best.min(total);
            }
        }
        (base - best) / n
    }

    #[test]
    fn quadrant_score_matches_brute_force() {
        let mut r = rng(11);
        for _ in 0..5 {
            let n = 150;
            let bj: Vec<usize> = (0..n).map(|_| r.random_range(0..6)).collect();
            let bk: Vec<usize> = (0..n).map(|_| r.random_range(0..6)).collect();
            let res: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
            let fast = quadrant_score(&bj, &bk, &res, 6);
            let slow = brute_force_quadrant(&bj, &bk, &res, 6);
            assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
        }
    }

    #[test]
    fn fast_finds_product_interaction() {
        let mut r = rng(5);
        let n = 2000;
        let sign = |r: &mut ChaCha8Rng| if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let x1: Vec<f64> = (0..n).map(|_| sign(&mut r)).collect();
        let x2: Vec<f64> = (0..n).map(|_| sign(&mut r)).collect();
        let x3: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a * b).collect();
        let m = fast_interactions_y(&[x1, x2, x3], &y, 10, 3).matrix;
        assert!(m[0][1] > m[0][2] && m[0][1] > m[1][2]);
        for j in 0..3 {
            assert_eq!(m[j][j], 0.0);
            for k in 0..3 {
                assert_eq!(m[j][k], m[k][j]);
            }
        }
    }

    #[test]
    fn fast_on_noise_is_small() {
        let mut r = rng(6);
        let n = 2000;
        let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| StandardNormal.sample(&mut r)).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| r.random_bool(0.5) as u8 as f64).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let m = fast_interactions_y(&cols, &y, 10, 3).matrix;
        assert!(m.iter().flatten().all(|&s| s >= 0.0 && s <= 0.05 * var));
    }

    #[test]
    fn fast_two_features() {
        let ds = crate::data::synthetic_monotone_interaction(300, 1).subset(&(0..300).collect::<Vec<_>>());
        let two = ds.with_columns(ds.columns()[..2].to_vec());
        let m = fast_interactions(&two, 10).matrix;
        assert_eq!(m.len(), 2);
        assert_eq!(m[0][1], m[1][0]);
        assert_eq!(m[0][0], 0.0);
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), -1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), 0.0);
    }

    fn stepped(n_levels: usize, reps: usize) -> Vec<f64> {
        (0..n_levels * reps).map(|i| (i % n_levels) as f64).collect()
    }

    #[test]
    fn monotone_detector_perfect_cases() {
        let x = stepped(5, 200);
        let up: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let down: Vec<f64> = x.iter().map(|v| -3.0 * v).collect();
        let cfg = DetectorConfig::default();
        let s = monotonicity_scores_y(std::slice::from_ref(&x), &up, &cfg, 1);
        assert!((s.signed[0] - 1.0).abs() < 1e-12);
        assert!((s.probability[0] - 0.8).abs() < 1e-12);
        assert_eq!(s.sign[0], 1);
        let s = monotonicity_scores_y(&[x], &down, &cfg, 1);
        assert!((s.signed[0] + 1.0).abs() < 1e-12);
        assert!((s.probability[0] - 0.8).abs() < 1e-12);
        assert_eq!(s.sign[0], -1);
    }

    #[test]
    fn monotone_detector_noise() {
        let mut r = rng(8);
        let n = 2000;
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        let y: Vec<f64> = (0..n).map(|_| r.random_bool(0.5) as u8 as f64).collect();
        let s = monotonicity_scores_y(&[x], &y, &DetectorConfig::default(), 4);
        assert!(s.signed[0].abs() <= 0.1, "{}", s.signed[0]);
        assert!((0.2..=0.26).contains(&s.probability[0]));
    }

    #[test]
    fn sign_flip_round_trip_and_effect() {
        let x = stepped(5, 200);
        let y: Vec<u8> = x.iter().map(|&v| (v < 2.0) as u8).collect();
        let ds = Dataset::from_columns(vec![x.clone(), x], y, vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(apply_sign_flip(&ds, &[1, 1]), ds);
        let flipped = apply_sign_flip(&ds, &[-1, 1]);
        assert_eq!(flipped.column(0)[3], -3.0);
        assert_eq!(apply_sign_flip(&flipped, &[-1, 1]), ds);
        let cfg = DetectorConfig::default();
        assert!(monotonicity_scores(&ds, &cfg, &mut rng(1)).signed[0] < 0.0);
        assert!(monotonicity_scores(&flipped, &cfg, &mut rng(1)).signed[0] > 0.0);
    }

    #[test]
    fn truncated_geometric_mass() {
        let mut r = rng(0);
        assert!((0..100).all(|_| truncated_geometric(1, 1, 0.5, &mut r) == 1));
        let draws = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            counts[truncated_geometric(1, 3, 0.5, &mut r) - 1] += 1;
        }
        let expected = [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
        for (c, e) in counts.iter().zip(expected) {
            assert!((*c as f64 / draws as f64 - e).abs() < 0.01);
        }
        let mean = |sp: f64, r: &mut ChaCha8Rng| {
            (0..20_000).map(|_| truncated_geometric(1, 20, sp, r) as f64).sum::<f64>() / 20_000.0
        };
        let means: Vec<f64> = [0.1, 0.3, 0.5, 0.8].iter().map(|&sp| mean(sp, &mut r)).collect();
        assert!(means.windows(2).all(|w| w[0] > w[1]), "{means:?}");
    }

    fn detectors_with(filter: Vec<f64>) -> Detectors {
        let p = filter.len();
        Detectors {
            filter: FilterScores { scores: filter },
            interactions: InteractionScores { matrix: vec![vec![0.0; p]; p] },
            monotonicity: MonotonicityScores::neutral(p),
        }
    }

    #[test]
    fn initial_structure_forced_cases() {
        let cfg = DetectorConfig::default();
        let g = sample_initial_structure(1, &detectors_with(vec![0.3]), &cfg, &mut rng(0));
        assert_eq!(g.groups.len(), 1);
        assert_eq!(g.groups[0].members, BTreeSet::from([0]));
        let mut r = rng(1);
        let det = detectors_with(vec![1.0, 0.0, 0.0, 0.0]);
        for _ in 0..2000 {
            let g = sample_initial_structure(4, &det, &cfg, &mut r);
            if g.n_selected() == 1 {
                assert!(g.selected().contains(&0));
            }
        }
    }

    #[test]
    fn weighted_sampling_falls_back_to_uniform() {
        let mut r = rng(2);
        let s = weighted_sample_without_replacement(&[0.0, 1.0, 0.0], 3, &mut r);
        assert_eq!(s.len(), 3);
        assert!((0..200).all(|_| weighted_sample_without_replacement(&[0.0, 1.0, 0.0], 1, &mut r) == BTreeSet::from([1])));
    }

    #[test]
    fn uniform_structures_are_valid() {
        let mut r = rng(3);
        for p in 1..8 {
            for _ in 0..200 {
                let g = sample_uniform_structure(p, &mut r);
                assert!(g.is_valid(p));
                assert!(!g.is_empty_selection());
            }
        }
    }
}
