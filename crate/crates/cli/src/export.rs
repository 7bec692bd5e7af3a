//! CSV and JSON exports of a finished run, and the reader for exported fronts.

use std::fs;
use std::path::Path;

use eagga_core::eagga::{RunResult, TracePoint};
use eagga_core::gbm::{BoostedModel, HyperparamConfig};
use eagga_core::measures::ObjectiveVector;

use crate::CliError;

pub const FRONT_HEADER: [&str; 7] = ["eval_index", "auc", "nf", "ni", "nnm", "group_structure", "hp_json"];
pub const TRACE_HEADER: [&str; 2] = ["eval_index", "hypervolume"];

/// Shortest representation that parses back to the same bits; never `-0`.
pub fn num(x: f64) -> String {
    format!("{}", x + 0.0)
}

/// Export label of an evaluation; the featureless anchor has none.
pub fn index_label(eval_index: usize) -> String {
    if eval_index == 0 {
        "_".to_string()
    } else {
        eval_index.to_string()
    }
}

pub fn model_file_name(eval_index: usize) -> String {
    if eval_index == 0 {
        "featureless.json".to_string()
    } else {
        format!("eval_{eval_index}.json")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontRow {
    pub eval_index: usize,
    pub objectives: ObjectiveVector,
    pub group_structure: String,
    pub hp_json: String,
}

impl FrontRow {
    pub fn new(eval_index: usize, objectives: ObjectiveVector, structure: String, hp: &HyperparamConfig) -> Self {
        let hp_json = serde_json::to_string(hp).expect("hyperparameters serialize");
        Self { eval_index, objectives, group_structure: structure, hp_json }
    }

    fn record(&self) -> [String; 7] {
        let o = &self.objectives;
        [
            index_label(self.eval_index),
            num(o.auc()),
            num(o.nf),
            num(o.ni),
            num(o.nnm),
            self.group_structure.clone(),
            self.hp_json.clone(),
        ]
    }
}

/// Sorted by AUC ascending, ties by eval index.
fn sort_rows(rows: &mut [FrontRow]) {
    rows.sort_by(|a, b| {
        a.objectives
            .auc()
            .total_cmp(&b.objectives.auc())
            .then(a.eval_index.cmp(&b.eval_index))
    });
}

pub fn archive_rows(result: &RunResult) -> Vec<FrontRow> {
    let mut rows: Vec<FrontRow> = result
        .archive
        .entries()
        .iter()
        .map(|e| FrontRow::new(e.eval_index, e.objectives, e.structure.to_string(), &e.hp))
        .collect();
    sort_rows(&mut rows);
    rows
}

pub fn test_rows(result: &RunResult) -> Vec<FrontRow> {
    let mut rows: Vec<FrontRow> = result
        .test_front
        .iter()
        .map(|e| FrontRow::new(e.eval_index, e.objectives, e.structure.to_string(), &e.hp))
        .collect();
    sort_rows(&mut rows);
    rows
}

pub fn write_front(rows: &[FrontRow], path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(FRONT_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(trace: &[TracePoint], path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    for t in trace {
        w.write_record([t.eval_index.to_string(), num(t.hypervolume)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_models<'a>(models: impl IntoIterator<Item = (usize, &'a BoostedModel)>, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for (eval_index, model) in models {
        fs::write(dir.join(model_file_name(eval_index)), model.to_json())?;
    }
    Ok(())
}

/// Writes pareto_front.csv, test_front.csv, hv_trace.csv and models/.
pub fn export_run(result: &RunResult, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    write_front(&archive_rows(result), &dir.join("pareto_front.csv"))?;
    write_front(&test_rows(result), &dir.join("test_front.csv"))?;
    write_trace(&result.hv_trace, &dir.join("hv_trace.csv"))?;
    write_models(result.test_front.iter().map(|e| (e.eval_index, &e.model)), &dir.join("models"))?;
    Ok(())
}

fn parse_num(field: &str, what: &str) -> Result<f64, CliError> {
    field
        .trim()
        .trim_matches(|c| c == '(' || c == ')')
        .trim()
        .replace('\u{2212}', "-")
        .parse()
        .map_err(|_| CliError::Data(format!("cannot parse {what} value `{field}`")))
}

/// Objective vectors of a front file.
///
/// Accepts the exported layout (with header), headerless export rows, and
/// headerless 4-tuples `neg_auc,nf,ni,nnm`.
pub fn read_front(path: &Path) -> Result<Vec<ObjectiveVector>, CliError> {
    if !path.is_file() {
        return Err(CliError::Data(format!("front file not found: {}", path.display())));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_path(path)?;
    let mut points = Vec::new();
    let mut columns: Option<[usize; 4]> = None;
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if first {
            first = false;
            let names: Vec<&str> = record.iter().map(str::trim).collect();
            if names.contains(&"auc") {
                let pos = |n: &str| {
                    names.iter().position(|&c| c == n).ok_or_else(|| CliError::Data(format!("front header lacks `{n}`")))
                };
                columns = Some([pos("auc")?, pos("nf")?, pos("ni")?, pos("nnm")?]);
                continue;
            }
        }
        let point = match columns {
            Some([a, f, i, m]) => {
                let get = |k: usize| record.get(k).ok_or_else(|| CliError::Data("short row in front file".into()));
                ObjectiveVector::new(
                    -parse_num(get(a)?, "auc")?,
                    parse_num(get(f)?, "nf")?,
                    parse_num(get(i)?, "ni")?,
                    parse_num(get(m)?, "nnm")?,
                )
            }
            None if record.len() == 4 => {
                let v: Vec<f64> = record.iter().map(|f| parse_num(f, "objective")).collect::<Result<_, _>>()?;
                ObjectiveVector::new(v[0], v[1], v[2], v[3])
            }
            None if record.len() >= 5 => ObjectiveVector::new(
                -parse_num(&record[1], "auc")?,
                parse_num(&record[2], "nf")?,
                parse_num(&record[3], "ni")?,
                parse_num(&record[4], "nnm")?,
            ),
            None => return Err(CliError::Data(format!("unrecognized front row with {} fields", record.len()))),
        };
        points.push(point);
    }
    Ok(points)
}

/// Group structure strings of an exported front, in file order.
pub fn read_structures(path: &Path) -> Result<Vec<String>, CliError> {
    let mut reader = csv::Reader::from_path(path)?;
    let col = reader
        .headers()?
        .iter()
        .position(|h| h == "group_structure")
        .ok_or_else(|| CliError::Data("front header lacks `group_structure`".into()))?;
    let mut out = Vec::new();
    for record in reader.records() {
        out.push(record?[col].to_string());
    }
    Ok(out)
}
