//! Tabular binary-classification datasets and deterministic stratified resampling.
//!
//! Features are stored column-major since every consumer (detectors, tree
//! growing) scans one feature at a time. The feature order of the source file
//! defines the feature indices `0..p` used everywhere downstream.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("file not found: {0}")]
    MissingFile(String),
    #[error("column `{0}` not present in header")]
    MissingColumn(String),
    #[error("non-numeric value `{value}` at row {row}, column `{col}`")]
    NonNumericCell { row: usize, col: String, value: String },
    #[error("missing value at row {row}, column `{col}`")]
    MissingValue { row: usize, col: String },
    #[error("target is not binary: found labels {0:?}")]
    NonBinaryTarget(Vec<String>),
    #[error("dataset has no rows")]
    Empty,
    #[error("dataset needs at least one feature column")]
    NoFeatures,
    #[error("duplicate feature name `{0}`")]
    DuplicateName(String),
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },
    #[error("both classes are required for stratified splitting")]
    SingleClass,
    #[error("split would leave an empty train or test part")]
    DegenerateSplit,
    #[error("every class needs at least {k} members for {k}-fold splitting")]
    TooFewPerClass { k: usize },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DataError>;

/// Immutable numeric feature matrix with a binary target.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    target: Vec<u8>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from feature columns, checking every invariant.
    pub fn from_columns(
        columns: Vec<Vec<f64>>,
        target: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if columns.is_empty() {
            return Err(DataError::NoFeatures);
        }
        if target.is_empty() {
            return Err(DataError::Empty);
        }
        if feature_names.len() != columns.len() {
            return Err(DataError::Invalid(format!(
                "{} names for {} columns",
                feature_names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(DataError::DuplicateName(name.clone()));
            }
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != target.len() {
                return Err(DataError::Invalid(format!(
                    "column {j} has {} rows, target has {}",
                    col.len(),
                    target.len()
                )));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(DataError::NonNumericCell {
                    row,
                    col: feature_names[j].clone(),
                    value: col[row].to_string(),
                });
            }
        }
        if target.iter().any(|&y| y > 1) {
            return Err(DataError::NonBinaryTarget(
                target.iter().map(|y| y.to_string()).collect::<BTreeSet<_>>().into_iter().collect(),
            ));
        }
        Ok(Self { columns, target, feature_names })
    }

    /// Builds a dataset from row-major data with generated names `x0..x{p-1}`.
    pub fn from_rows(rows: &[Vec<f64>], target: Vec<u8>) -> Result<Self> {
        let p = rows.first().map(Vec::len).unwrap_or(0);
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(DataError::RaggedRow { row: i, found: row.len(), expected: p });
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        let names = (0..p).map(|j| format!("x{j}")).collect();
        Self::from_columns(columns, target, names)
    }

    pub fn n(&self) -> usize {
        self.target.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn target(&self) -> &[u8] {
        &self.target
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.row(i)).collect()
    }

    /// Number of observations per class, `[zeros, ones]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.target.iter().filter(|&&y| y == 1).count();
        [self.n() - ones, ones]
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            columns: self
                .columns
                .iter()
                .map(|c| indices.iter().map(|&i| c[i]).collect())
                .collect(),
            target: indices.iter().map(|&i| self.target[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Replaces the feature columns, keeping target and names.
    pub(crate) fn with_columns(&self, columns: Vec<Vec<f64>>) -> Dataset {
        Dataset { columns, target: self.target.clone(), feature_names: self.feature_names.clone() }
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "na" | "NaN" | "nan" | "?")
}

/// Loads a comma-separated file with one header row.
///
/// Every non-target column must be numeric. Target labels `0`/`1` are taken
/// as-is; any other pair of labels is mapped to 0/1 by lexicographic order.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(DataError::MissingFile(path.display().to_string()));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let target_idx = header
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| DataError::MissingColumn(target_column.to_string()))?;
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&c| c != target_idx).collect();
    if feature_cols.is_empty() {
        return Err(DataError::NoFeatures);
    }

    let mut columns = vec![Vec::new(); feature_cols.len()];
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(DataError::RaggedRow { row, found: record.len(), expected: header.len() });
        }
        let label = record[target_idx].trim();
        if is_missing(label) {
            return Err(DataError::MissingValue { row, col: target_column.to_string() });
        }
        labels.push(label.to_string());
        for (slot, &c) in feature_cols.iter().enumerate() {
            let cell = record[c].trim();
            if is_missing(cell) {
                return Err(DataError::MissingValue { row, col: header[c].clone() });
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => columns[slot].push(v),
                _ => {
                    return Err(DataError::NonNumericCell {
                        row,
                        col: header[c].clone(),
                        value: cell.to_string(),
                    })
                }
            }
        }
    }
    if labels.is_empty() {
        return Err(DataError::Empty);
    }
    let target = map_labels(&labels)?;
    let names = feature_cols.iter().map(|&c| header[c].clone()).collect();
    Dataset::from_columns(columns, target, names)
}

fn map_labels(labels: &[String]) -> Result<Vec<u8>> {
    let numeric: Option<Vec<u8>> = labels
        .iter()
        .map(|l| match l.parse::<f64>() {
            Ok(0.0) => Some(0),
            Ok(1.0) => Some(1),
            _ => None,
        })
        .collect();
    if let Some(target) = numeric {
        return Ok(target);
    }
    let distinct: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
    if distinct.len() != 2 {
        return Err(DataError::NonBinaryTarget(distinct.into_iter().map(str::to_string).collect()));
    }
    let codes: BTreeMap<&str, u8> = distinct.into_iter().zip([0u8, 1]).collect();
    Ok(labels.iter().map(|l| codes[l.as_str()]).collect())
}

/// Writes the dataset back out, features first and the target last.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>, target_column: &str) -> Result<()> {
    let mut out = std::io::BufWriter::new(File::create(path)?);
    let mut header = ds.feature_names.join(",");
    header.push(',');
    header.push_str(target_column);
    writeln!(out, "{header}")?;
    for i in 0..ds.n() {
        let mut line = String::new();
        for col in &ds.columns {
            line.push_str(&col[i].to_string());
            line.push(',');
        }
        line.push_str(&ds.target[i].to_string());
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Train/test index lists, both sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResamplingSplit {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

fn class_members(ds: &Dataset) -> [Vec<usize>; 2] {
    let mut members = [Vec::new(), Vec::new()];
    for (i, &y) in ds.target.iter().enumerate() {
        members[y as usize].push(i);
    }
    members
}

/// Stratified holdout: each class contributes `round(train_ratio * count)`
/// members to the train part, the remainder goes to test.
pub fn stratified_holdout(ds: &Dataset, train_ratio: f64, seed: u64) -> Result<ResamplingSplit> {
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(DataError::DegenerateSplit);
    }
    let n = ds.n() as f64;
    if train_ratio * n < 1.0 || (1.0 - train_ratio) * n < 1.0 {
        return Err(DataError::DegenerateSplit);
    }
    let mut members = class_members(ds);
    if members.iter().any(Vec::is_empty) {
        return Err(DataError::SingleClass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in members.iter_mut() {
        class.shuffle(&mut rng);
        let take = (train_ratio * class.len() as f64).round() as usize;
        train.extend_from_slice(&class[..take]);
        test.extend_from_slice(&class[take..]);
    }
    if train.is_empty() || test.is_empty() {
        return Err(DataError::DegenerateSplit);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(ResamplingSplit { train_indices: train, test_indices: test })
}

/// Stratified k-fold partition. Shuffled class members are dealt round-robin
/// onto folds, continuing the deal across classes so fold sizes stay balanced.
pub fn stratified_kfold(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<ResamplingSplit>> {
    if k < 2 {
        return Err(DataError::TooFewPerClass { k });
    }
    let mut members = class_members(ds);
    if members.iter().any(|m| m.len() < k) {
        return Err(DataError::TooFewPerClass { k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0usize;
    for class in members.iter_mut() {
        class.shuffle(&mut rng);
        for &i in class.iter() {
            folds[slot % k].push(i);
            slot += 1;
        }
    }
    let n = ds.n();
    Ok(folds
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; n];
            for &i in &test {
                in_test[i] = true;
            }
            let train = (0..n).filter(|&i| !in_test[i]).collect();
            ResamplingSplit { train_indices: train, test_indices: test }
        })
        .collect())
}

/// Synthetic benchmark with known structure: ten Uniform(0, 1) features
/// `x1..x10`, log-odds `3 * (x1 - 0.5) + 6 * (x2 * x3 - 0.25)`, and seven
/// pure-noise features.
pub fn synthetic_monotone_interaction(n: usize, seed: u64) -> Dataset {
    let p = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<f64>> = (0..p).map(|_| Vec::with_capacity(n)).collect();
    let mut target = Vec::with_capacity(n);
    for i in 0..n {
        for col in columns.iter_mut() {
            col.push(rng.random::<f64>());
        }
        let logit = 3.0 * (columns[0][i] - 0.5) + 6.0 * (columns[1][i] * columns[2][i] - 0.25);
        let prob = 1.0 / (1.0 + (-logit).exp());
        target.push(rng.random_bool(prob) as u8);
    }
    let names = (1..=p).map(|j| format!("x{j}")).collect();
    Dataset::from_columns(columns, target, names).expect("synthetic data satisfies invariants")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn labelled(zeros: usize, ones: usize) -> Dataset {
        let n = zeros + ones;
        let col = (0..n).map(|i| i as f64).collect();
        let target = (0..n).map(|i| u8::from(i >= zeros)).collect();
        Dataset::from_columns(vec![col], target, vec!["a".into()]).unwrap()
    }

    #[test]
    fn loads_simple_file() {
        let f = write_tmp("x1,x2,y\n1.0,2,0\n3,4.5,1\n-1,0,1\n");
        let ds = load_csv(f.path(), "y").unwrap();
        assert_eq!((ds.n(), ds.p()), (3, 2));
        assert_eq!(ds.feature_names(), &["x1".to_string(), "x2".to_string()]);
        assert_eq!(ds.target(), &[0, 1, 1]);
        assert_eq!(ds.row(1), vec![3.0, 4.5]);
    }

    #[test]
    fn blank_cell_is_missing_value() {
        let f = write_tmp("x1,x2,y\n1,,0\n3,4,1\n");
        match load_csv(f.path(), "y") {
            Err(DataError::MissingValue { row: 0, col }) => assert_eq!(col, "x2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn string_labels_map_lexicographically() {
        let f = write_tmp("y,x\nb,1\na,2\nb,3\n");
        let ds = load_csv(f.path(), "y").unwrap();
        assert_eq!(ds.target(), &[1, 0, 1]);
        assert_eq!(ds.p(), 1);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(load_csv("/nonexistent/file.csv", "y"), Err(DataError::MissingFile(_))));
        let f = write_tmp("x,y\n1,0\n");
        assert!(matches!(load_csv(f.path(), "z"), Err(DataError::MissingColumn(_))));
        let f = write_tmp("x,y\nabc,0\n");
        assert!(matches!(load_csv(f.path(), "y"), Err(DataError::NonNumericCell { .. })));
        let f = write_tmp("x,y\n1,a\n2,b\n3,c\n");
        assert!(matches!(load_csv(f.path(), "y"), Err(DataError::NonBinaryTarget(_))));
        let f = write_tmp("x,y\n1,0\n2,2\n3,1\n");
        assert!(matches!(load_csv(f.path(), "y"), Err(DataError::NonBinaryTarget(_))));
        let f = write_tmp("x,y\n1,0\n2,2\n");
        assert_eq!(load_csv(f.path(), "y").unwrap().target(), &[0, 1]);
    }

    #[test]
    fn csv_round_trip() {
        let ds = synthetic_monotone_interaction(50, 3);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_csv(&ds, f.path(), "y").unwrap();
        let back = load_csv(f.path(), "y").unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn holdout_rounds_per_class() {
        let ds = labelled(6, 3);
        for seed in 0..5 {
            let split = stratified_holdout(&ds, 2.0 / 3.0, seed).unwrap();
            let ones = split.train_indices.iter().filter(|&&i| ds.target()[i] == 1).count();
            assert_eq!(split.train_indices.len() - ones, 4);
            assert_eq!(ones, 2);
        }
        let a = stratified_holdout(&ds, 2.0 / 3.0, 11).unwrap();
        let b = stratified_holdout(&ds, 2.0 / 3.0, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn holdout_balanced_sizes() {
        let split = stratified_holdout(&labelled(450, 450), 2.0 / 3.0, 1).unwrap();
        assert_eq!(split.train_indices.len(), 600);
        assert_eq!(split.test_indices.len(), 300);
    }

    #[test]
    fn holdout_errors() {
        assert!(matches!(stratified_holdout(&labelled(5, 0), 0.5, 0), Err(DataError::SingleClass)));
        assert!(matches!(stratified_holdout(&labelled(1, 1), 0.6, 0), Err(DataError::DegenerateSplit)));
        assert!(matches!(stratified_holdout(&labelled(5, 5), 1.0, 0), Err(DataError::DegenerateSplit)));
    }

    #[test]
    fn kfold_balanced() {
        let ds = labelled(5, 5);
        let folds = stratified_kfold(&ds, 5, 0).unwrap();
        assert_eq!(folds.len(), 5);
        for f in &folds {
            assert_eq!(f.test_indices.len(), 2);
            let ones = f.test_indices.iter().filter(|&&i| ds.target()[i] == 1).count();
            assert_eq!(ones, 1);
        }
    }

    #[test]
    fn kfold_unbalanced_classes() {
        let ds = labelled(5, 2);
        let folds = stratified_kfold(&ds, 2, 9).unwrap();
        let ones: Vec<usize> = folds
            .iter()
            .map(|f| f.test_indices.iter().filter(|&&i| ds.target()[i] == 1).count())
            .collect();
        assert_eq!(ones, vec![1, 1]);
        assert!(matches!(stratified_kfold(&ds, 3, 0), Err(DataError::TooFewPerClass { k: 3 })));
    }

    #[test]
    fn kfold_partitions_indices() {
        let ds = labelled(13, 8);
        let folds = stratified_kfold(&ds, 4, 2).unwrap();
        let mut all: Vec<usize> = folds.iter().flat_map(|f| f.test_indices.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..21).collect::<Vec<_>>());
        for i in 0..21 {
            let in_train = folds.iter().filter(|f| f.train_indices.contains(&i)).count();
            assert_eq!(in_train, 3);
        }
    }
}
