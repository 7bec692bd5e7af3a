//! The evolutionary driver: detector-guided initialization, binary
//! tournaments, paired hyperparameter and grouping variation, cross-validated
//! evaluation with structure feedback, and (mu + nu) survival.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{self, DataError, Dataset};
use crate::detectors::{self, DetectorConfig, Detectors};
use crate::gbm::{BoostedModel, GbmError, HyperparamConfig, SEARCH_SPACE};
use crate::groupstruct::{self, GroupStructure};
use crate::measures::{self, EvalError, MeasureError, ObjectiveVector};
use crate::moo::{self, ArchiveEntry, ParetoArchive};

#[derive(Debug, Error)]
pub enum EaggaError {
    #[error("budget allows no evaluations")]
    BudgetZero,
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("fewer than two individuals with a non-empty selection")]
    TooFewEligible,
    #[error("individual {eval_index:?} violates the partition invariant: {structure}")]
    InvalidStructure { eval_index: Option<usize>, structure: String },
    #[error("unknown flavor `{0}`")]
    UnknownFlavor(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Fit(#[from] GbmError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("worker pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, EaggaError>;

/// Ablation toggles. All off is the full optimizer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flavor {
    pub random_search: bool,
    pub no_gga_crossover: bool,
    pub no_gga_mutation: bool,
    pub no_detectors: bool,
}

impl Flavor {
    pub const NAMES: [&'static str; 6] =
        ["eagga", "random_search", "no_crossover", "no_mutation", "no_cross_mut", "no_detectors"];

    pub fn named(name: &str) -> Result<Self> {
        let mut f = Flavor::default();
        match name {
            "eagga" | "full" => {}
            "random_search" => f.random_search = true,
            "no_crossover" => f.no_gga_crossover = true,
            "no_mutation" => f.no_gga_mutation = true,
            "no_cross_mut" => {
                f.no_gga_crossover = true;
                f.no_gga_mutation = true;
            }
            "no_detectors" => f.no_detectors = true,
            other => return Err(EaggaError::UnknownFlavor(other.to_string())),
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mu: usize,
    pub nu: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub p_uniform_swap: f64,
    pub sigma_gauss: f64,
    pub p_param_mut: f64,
    pub p_move: f64,
    pub p_attr: f64,
    pub max_evals: Option<usize>,
    pub max_seconds: Option<f64>,
    pub seed: u64,
    pub flavor: Flavor,
    /// Fixes `max_depth` for every candidate when set.
    pub max_depth: Option<u32>,
    pub workers: usize,
    /// Re-mutation attempts for a child identical to an evaluated configuration; 0 disables.
    pub duplicate_retries: usize,
    pub holdout_ratio: f64,
    pub inner_folds: usize,
    pub detectors: DetectorConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mu: 100,
            nu: 10,
            p_crossover: 0.7,
            p_mutation: 0.3,
            p_uniform_swap: 0.5,
            sigma_gauss: 0.1,
            p_param_mut: 0.2,
            p_move: 0.2,
            p_attr: 0.2,
            max_evals: None,
            max_seconds: None,
            seed: 0,
            flavor: Flavor::default(),
            max_depth: None,
            workers: 1,
            duplicate_retries: 0,
            holdout_ratio: 2.0 / 3.0,
            inner_folds: 5,
            detectors: DetectorConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(EaggaError::InvalidConfig(msg.to_string()));
        if self.mu < 1 {
            return bad("mu must be at least 1");
        }
        if self.nu < 1 {
            return bad("nu must be at least 1");
        }
        let probs = [
            self.p_crossover,
            self.p_mutation,
            self.p_uniform_swap,
            self.p_param_mut,
            self.p_move,
            self.p_attr,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("probabilities must lie in [0, 1]");
        }
        if !(self.sigma_gauss >= 0.0 && self.sigma_gauss.is_finite()) {
            return bad("sigma_gauss must be finite and nonnegative");
        }
        if let Some(d) = self.max_depth {
            if !SEARCH_SPACE[6].contains(d as f64) {
                return bad("max_depth override outside the search space");
            }
        }
        if self.workers < 1 {
            return bad("workers must be at least 1");
        }
        if self.max_seconds.is_some_and(|s| s.is_nan() || s < 0.0) {
            return bad("max_seconds must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub hp: HyperparamConfig,
    pub g: GroupStructure,
    pub objectives: Option<ObjectiveVector>,
    pub eval_index: Option<usize>,
}

impl Individual {
    pub fn new(hp: HyperparamConfig, g: GroupStructure) -> Self {
        Self { hp, g, objectives: None, eval_index: None }
    }

    fn objectives_or_panic(&self) -> ObjectiveVector {
        self.objectives.expect("individual evaluated before selection")
    }
}

/// Uniform crossover: each field is swapped between the children with probability `p_swap`.
pub fn hp_crossover<R: Rng + ?Sized>(
    a: &HyperparamConfig,
    b: &HyperparamConfig,
    p_swap: f64,
    rng: &mut R,
) -> (HyperparamConfig, HyperparamConfig) {
    let (mut c, mut d) = (*a, *b);
    for i in 0..HyperparamConfig::N_PARAMS {
        if rng.random_bool(p_swap) {
            c.set(i, b.get(i));
            d.set(i, a.get(i));
        }
    }
    (c, d)
}

/// Gaussian mutation in the min-max scaled (log where flagged) unit cube.
pub fn hp_mutate<R: Rng + ?Sized>(a: &HyperparamConfig, p_field: f64, sigma: f64, rng: &mut R) -> HyperparamConfig {
    let mut out = *a;
    let noise = Normal::new(0.0, sigma).expect("finite sigma");
    for (i, spec) in SEARCH_SPACE.iter().enumerate() {
        if rng.random_bool(p_field) {
            let u = (spec.to_unit(a.get(i)) + noise.sample(rng)).clamp(0.0, 1.0);
            out.set(i, spec.from_unit(u));
        }
    }
    out
}

fn with_override(mut hp: HyperparamConfig, cfg: &RunConfig) -> HyperparamConfig {
    if let Some(d) = cfg.max_depth {
        hp.max_depth = d;
    }
    hp
}

fn sample_structure<R: Rng + ?Sized>(p: usize, det: Option<&Detectors>, cfg: &RunConfig, rng: &mut R) -> GroupStructure {
    match det {
        Some(det) => detectors::sample_initial_structure(p, det, &cfg.detectors, rng),
        None => detectors::sample_uniform_structure(p, rng),
    }
}

fn fresh_individual<R: Rng + ?Sized>(p: usize, det: Option<&Detectors>, cfg: &RunConfig, rng: &mut R) -> Individual {
    let hp = hp_mutate(&HyperparamConfig::default(), cfg.p_param_mut, cfg.sigma_gauss, rng);
    Individual::new(with_override(hp, cfg), sample_structure(p, det, cfg, rng))
}

/// Member 0 keeps the default hyperparameters; the rest mutate them.
/// Structures come from the detectors, or uniformly when `det` is `None`.
pub fn initialize_population<R: Rng + ?Sized>(
    p: usize,
    det: Option<&Detectors>,
    cfg: &RunConfig,
    rng: &mut R,
) -> Vec<Individual> {
    let mut pop = Vec::with_capacity(cfg.mu);
    for k in 0..cfg.mu {
        if k == 0 {
            let hp = with_override(HyperparamConfig::default(), cfg);
            pop.push(Individual::new(hp, sample_structure(p, det, cfg, rng)));
        } else {
            pop.push(fresh_individual(p, det, cfg, rng));
        }
    }
    pop
}

/// Non-domination rank and crowding distance of every individual.
pub fn rank_and_crowding(pop: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let objectives: Vec<ObjectiveVector> = pop.iter().map(Individual::objectives_or_panic).collect();
    let mut rank = vec![0; pop.len()];
    let mut crowding = vec![0.0; pop.len()];
    for (r, front) in moo::nondominated_sort(&objectives).iter().enumerate() {
        let points: Vec<ObjectiveVector> = front.iter().map(|&i| objectives[i]).collect();
        for (&i, d) in front.iter().zip(moo::crowding_distance(&points)) {
            rank[i] = r;
            crowding[i] = d;
        }
    }
    (rank, crowding)
}

fn better<R: Rng + ?Sized>(a: usize, b: usize, rank: &[usize], crowding: &[f64], rng: &mut R) -> usize {
    if rank[a] != rank[b] {
        return if rank[a] < rank[b] { a } else { b };
    }
    if crowding[a] != crowding[b] {
        return if crowding[a] > crowding[b] { a } else { b };
    }
    if rng.random_bool(0.5) {
        a
    } else {
        b
    }
}

/// Binary tournament over `candidates` (indices into `rank`/`crowding`).
pub fn tournament<R: Rng + ?Sized>(candidates: &[usize], rank: &[usize], crowding: &[f64], rng: &mut R) -> Option<usize> {
    match candidates.len() {
        0 => None,
        1 => Some(candidates[0]),
        n => {
            let picked = rand::seq::index::sample(rng, n, 2);
            Some(better(candidates[picked.index(0)], candidates[picked.index(1)], rank, crowding, rng))
        }
    }
}

/// Binary tournament among individuals with a non-empty selection.
pub fn tournament_select<R: Rng + ?Sized>(pop: &[Individual], rng: &mut R) -> Result<usize> {
    let eligible: Vec<usize> = (0..pop.len()).filter(|&i| !pop[i].g.is_empty_selection()).collect();
    if eligible.len() < 2 {
        return Err(EaggaError::TooFewEligible);
    }
    let (rank, crowding) = rank_and_crowding(pop);
    Ok(tournament(&eligible, &rank, &crowding, rng).expect("eligible set is non-empty"))
}

/// Two distinct parents; falls back to the whole population when fewer
/// than two individuals selected any feature.
fn select_parents<R: Rng + ?Sized>(pop: &[Individual], rank: &[usize], crowding: &[f64], rng: &mut R) -> (usize, usize) {
    let eligible: Vec<usize> = (0..pop.len()).filter(|&i| !pop[i].g.is_empty_selection()).collect();
    let pool: Vec<usize> = if eligible.len() >= 2 { eligible } else { (0..pop.len()).collect() };
    let first = tournament(&pool, rank, crowding, rng).expect("population is non-empty");
    let rest: Vec<usize> = pool.iter().copied().filter(|&i| i != first).collect();
    let second = tournament(&rest, rank, crowding, rng).unwrap_or(first);
    (first, second)
}

/// Variation of one parent pair into two unevaluated children.
pub fn make_offspring<R: Rng + ?Sized>(
    a: &Individual,
    b: &Individual,
    cfg: &RunConfig,
    rng: &mut R,
) -> (Individual, Individual) {
    let (mut hp1, mut hp2) = (a.hp, b.hp);
    let (mut g1, mut g2) = (a.g.clone(), b.g.clone());
    if rng.random_bool(cfg.p_crossover) {
        (hp1, hp2) = hp_crossover(&hp1, &hp2, cfg.p_uniform_swap, rng);
        if !cfg.flavor.no_gga_crossover {
            (g1, g2) = groupstruct::gga_crossover(&g1, &g2, rng);
        }
    }
    for (hp, g) in [(&mut hp1, &mut g1), (&mut hp2, &mut g2)] {
        if rng.random_bool(cfg.p_mutation) {
            *hp = hp_mutate(hp, cfg.p_param_mut, cfg.sigma_gauss, rng);
            if !cfg.flavor.no_gga_mutation {
                *g = groupstruct::gga_mutate(g, cfg.p_move, cfg.p_attr, rng);
            }
        }
    }
    (
        Individual::new(with_override(hp1, cfg), g1),
        Individual::new(with_override(hp2, cfg), g2),
    )
}

fn config_key(hp: &HyperparamConfig, g: &GroupStructure) -> String {
    format!("{}|{g}", serde_json::to_string(hp).expect("plain struct serializes"))
}

/// Mutates `child` until it differs from every configuration in `seen`,
/// giving up after `retries` attempts.
fn deduplicate<R: Rng + ?Sized>(child: &mut Individual, seen: &HashSet<String>, cfg: &RunConfig, rng: &mut R) {
    for _ in 0..cfg.duplicate_retries {
        if !seen.contains(&config_key(&child.hp, &child.g)) {
            return;
        }
        child.hp = with_override(hp_mutate(&child.hp, cfg.p_param_mut, cfg.sigma_gauss, rng), cfg);
        if !cfg.flavor.no_gga_mutation {
            child.g = groupstruct::gga_mutate(&child.g, cfg.p_move, cfg.p_attr, rng);
        }
    }
}

/// (mu + nu) survival: whole fronts in rank order, the splitting front cut
/// by descending crowding distance.
pub fn survival(pool: Vec<Individual>, mu: usize) -> Vec<Individual> {
    if pool.len() <= mu {
        return pool;
    }
    let objectives: Vec<ObjectiveVector> = pool.iter().map(Individual::objectives_or_panic).collect();
    let mut keep = Vec::with_capacity(mu);
    for front in moo::nondominated_sort(&objectives) {
        if keep.len() + front.len() <= mu {
            keep.extend(front);
            continue;
        }
        let points: Vec<ObjectiveVector> = front.iter().map(|&i| objectives[i]).collect();
        let distance = moo::crowding_distance(&points);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&x, &y| distance[y].total_cmp(&distance[x]));
        keep.extend(order.into_iter().take(mu - keep.len()).map(|k| front[k]));
        break;
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("index kept once")).collect()
}

/// Per-candidate fit seed; independent of the order in which candidates run.
pub fn candidate_seed(run_seed: u64, eval_index: usize) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(run_seed ^ splitmix(eval_index as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub eval_index: usize,
    pub hypervolume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub eval_index: usize,
    pub generation: usize,
    pub hp: HyperparamConfig,
    /// Structure as proposed, before the feedback update.
    pub proposed: GroupStructure,
    /// Structure after the feedback update.
    pub structure: GroupStructure,
    pub objectives: ObjectiveVector,
    pub accepted: bool,
}

/// One archive member re-evaluated on the outer test split.
#[derive(Debug, Clone)]
pub struct TestEntry {
    pub eval_index: usize,
    pub hp: HyperparamConfig,
    pub structure: GroupStructure,
    pub objectives: ObjectiveVector,
    /// Fit on the full outer-train split.
    pub model: BoostedModel,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub archive: ParetoArchive,
    pub hv_trace: Vec<TracePoint>,
    pub eval_log: Vec<EvalRecord>,
    pub test_front: Vec<TestEntry>,
    /// Sign applied to each feature column before training.
    pub signs: Vec<i8>,
    pub detectors: Option<Detectors>,
    pub feature_names: Vec<String>,
    pub n_train: usize,
    pub n_test: usize,
}

impl RunResult {
    pub fn n_evals(&self) -> usize {
        self.eval_log.len()
    }

    pub fn final_hypervolume(&self) -> f64 {
        self.hv_trace.last().map_or_else(
            || self.archive.hypervolume(&ObjectiveVector::REFERENCE),
            |t| t.hypervolume,
        )
    }
}

fn featureless_entry(p: usize) -> ArchiveEntry {
    ArchiveEntry {
        objectives: ObjectiveVector::FEATURELESS,
        hp: HyperparamConfig::default(),
        structure: GroupStructure::empty(p),
        eval_index: 0,
    }
}

struct State<'a> {
    cfg: &'a RunConfig,
    train: Dataset,
    folds: Vec<data::ResamplingSplit>,
    pool: rayon::ThreadPool,
    archive: ParetoArchive,
    models: BTreeMap<usize, BoostedModel>,
    hv: f64,
    trace: Vec<TracePoint>,
    log: Vec<EvalRecord>,
    seen: HashSet<String>,
    started: Instant,
}

impl State<'_> {
    fn remaining(&self) -> usize {
        let by_count = self.cfg.max_evals.map_or(usize::MAX, |m| m.saturating_sub(self.log.len()));
        let out_of_time = self.cfg.max_seconds.is_some_and(|s| self.started.elapsed().as_secs_f64() >= s);
        if out_of_time {
            0
        } else {
            by_count
        }
    }

    fn check(&self, ind: &Individual) -> Result<()> {
        if ind.g.is_valid(self.train.p()) {
            Ok(())
        } else {
            Err(EaggaError::InvalidStructure { eval_index: ind.eval_index, structure: ind.g.to_string() })
        }
    }

    /// Evaluates `batch` (truncated to the remaining budget) in chunks of the
    /// worker count and commits results in submission order.
    fn evaluate(&mut self, batch: Vec<Individual>, generation: usize) -> Result<Vec<Individual>> {
        let mut done = Vec::with_capacity(batch.len());
        let mut pending = batch.into_iter();
        loop {
            let room = self.remaining();
            if room == 0 {
                break;
            }
            let chunk: Vec<Individual> = pending.by_ref().take(room.min(self.cfg.workers)).collect();
            if chunk.is_empty() {
                break;
            }
            for ind in &chunk {
                self.check(ind)?;
            }
            let first_index = self.log.len() + 1;
            let seed = self.cfg.seed;
            let (train, folds) = (&self.train, &self.folds);
            let results: Vec<_> = self.pool.install(|| {
                chunk
                    .par_iter()
                    .enumerate()
                    .map(|(k, ind)| {
                        measures::evaluate_candidate(train, folds, &ind.hp, &ind.g, candidate_seed(seed, first_index + k))
                    })
                    .collect()
            });
            for (k, (mut ind, res)) in chunk.into_iter().zip(results).enumerate() {
                let eval = res?;
                let eval_index = first_index + k;
                let proposed = std::mem::replace(&mut ind.g, eval.structure);
                ind.objectives = Some(eval.objectives);
                ind.eval_index = Some(eval_index);
                self.check(&ind)?;
                self.seen.insert(config_key(&ind.hp, &proposed));
                self.seen.insert(config_key(&ind.hp, &ind.g));
                let accepted = self.archive.insert(ArchiveEntry {
                    objectives: eval.objectives,
                    hp: ind.hp,
                    structure: ind.g.clone(),
                    eval_index,
                });
                if accepted {
                    self.models.insert(eval_index, eval.model);
                    let live: Vec<usize> = self.archive.entries().iter().map(|e| e.eval_index).collect();
                    self.models.retain(|i, _| live.contains(i));
                    self.hv = self.archive.hypervolume(&ObjectiveVector::REFERENCE);
                }
                self.trace.push(TracePoint { eval_index, hypervolume: self.hv });
                self.log.push(EvalRecord {
                    eval_index,
                    generation,
                    hp: ind.hp,
                    proposed,
                    structure: ind.g.clone(),
                    objectives: eval.objectives,
                    accepted,
                });
                done.push(ind);
            }
        }
        Ok(done)
    }
}

/// Runs the optimizer end to end on `ds`.
pub fn run(ds: &Dataset, cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    if cfg.max_evals == Some(0) || (cfg.max_evals.is_none() && cfg.max_seconds.is_none()) {
        return Err(EaggaError::BudgetZero);
    }
    let started = Instant::now();
    let p = ds.p();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let outer = data::stratified_holdout(ds, cfg.holdout_ratio, rng.random())?;
    let raw_train = ds.subset(&outer.train_indices);
    let raw_test = ds.subset(&outer.test_indices);

    let det = if cfg.flavor.no_detectors {
        None
    } else {
        Some(detectors::run_detectors(&raw_train, &cfg.detectors, &mut rng))
    };
    let signs: Vec<i8> = det.as_ref().map_or_else(|| vec![1; p], |d| d.monotonicity.sign.clone());
    let train = detectors::apply_sign_flip(&raw_train, &signs);
    let test = detectors::apply_sign_flip(&raw_test, &signs);
    let folds = data::stratified_kfold(&train, cfg.inner_folds, rng.random())?;
    log::info!(
        "outer split {}/{} rows, {} features, {} folds",
        train.n(),
        test.n(),
        p,
        folds.len()
    );

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| EaggaError::Pool(e.to_string()))?;
    let mut archive = ParetoArchive::new();
    archive.insert(featureless_entry(p));
    let hv = archive.hypervolume(&ObjectiveVector::REFERENCE);
    let mut state = State {
        cfg,
        train,
        folds,
        pool,
        archive,
        models: BTreeMap::new(),
        hv,
        trace: Vec::new(),
        log: Vec::new(),
        seen: HashSet::new(),
        started,
    };

    let initial = initialize_population(p, det.as_ref(), cfg, &mut rng);
    let mut population = state.evaluate(initial, 0)?;
    let mut generation = 0;
    while state.remaining() > 0 && !population.is_empty() {
        generation += 1;
        let offspring = if cfg.flavor.random_search {
            (0..cfg.nu).map(|_| fresh_individual(p, det.as_ref(), cfg, &mut rng)).collect()
        } else {
            let (rank, crowding) = rank_and_crowding(&population);
            let mut children = Vec::with_capacity(cfg.nu + 1);
            while children.len() < cfg.nu {
                let (a, b) = select_parents(&population, &rank, &crowding, &mut rng);
                let (c1, c2) = make_offspring(&population[a], &population[b], cfg, &mut rng);
                for mut child in [c1, c2] {
                    deduplicate(&mut child, &state.seen, cfg, &mut rng);
                    children.push(child);
                }
            }
            children.truncate(cfg.nu);
            children
        };
        let evaluated = state.evaluate(offspring, generation)?;
        if cfg.flavor.random_search {
            continue;
        }
        population.extend(evaluated);
        population = survival(population, cfg.mu);
        for ind in &population {
            state.check(ind)?;
        }
        log::debug!("generation {generation}: {} evaluations, hv {:.6}", state.log.len(), state.hv);
    }
    log::info!("{} evaluations, final hv {:.6}", state.log.len(), state.hv);

    let mut test_front = Vec::with_capacity(state.archive.len());
    for entry in state.archive.entries() {
        let model = match state.models.get(&entry.eval_index) {
            Some(m) => m.clone(),
            None => crate::gbm::fit(
                &state.train,
                &entry.hp,
                &entry.structure.to_constraints(p),
                &mut ChaCha8Rng::seed_from_u64(candidate_seed(cfg.seed, entry.eval_index)),
            )?,
        };
        let objectives = if entry.structure.is_empty_selection() {
            ObjectiveVector::FEATURELESS
        } else {
            let scores = model.predict_dataset(&test)?;
            let auc = measures::auc(test.target(), &scores)?;
            let (nf, ni, nnm) = measures::interpretability(&model, &entry.structure, p);
            ObjectiveVector::new(-auc, nf, ni, nnm)
        };
        test_front.push(TestEntry {
            eval_index: entry.eval_index,
            hp: entry.hp,
            structure: entry.structure.clone(),
            objectives,
            model,
        });
    }

    Ok(RunResult {
        archive: state.archive,
        hv_trace: state.trace,
        eval_log: state.log,
        test_front,
        signs,
        detectors: det,
        feature_names: ds.feature_names().to_vec(),
        n_train: state.train.n(),
        n_test: test.n(),
    })
}
