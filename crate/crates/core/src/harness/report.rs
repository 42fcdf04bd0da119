//! Summaries over a directory of finished runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::sbnn_connection_count;
use crate::pruning::StructureClass;

use super::record::RunRecord;

/// Histogram bin of a working-connection share: bin `k` (labelled `10k`%)
/// holds shares in `(10(k-1)%, 10k%]`, with 0% falling into the first bin.
pub fn working_bin(working: usize, total: usize) -> usize {
    if total == 0 || working == 0 {
        return 1;
    }
    (10 * working).div_ceil(total).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    /// Upper edge of the bin in percent.
    pub bin_upper_percent: usize,
    pub runs: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureRow {
    pub structure: String,
    pub runs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitnessStats {
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Trainable parameters of the three model families at `h` hidden units with
/// one input and one output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParameterRow {
    pub hidden: usize,
    /// Weights of a feed-forward net with two hidden layers of `h` units.
    pub ffnn: usize,
    /// Four rule coefficients per weight of that same net.
    pub hebbian_ffnn: usize,
    /// Connections of the dense SBNN topology.
    pub sbnn_connections: usize,
    /// Four rule coefficients per SBNN connection.
    pub sbnn: usize,
}

pub fn parameter_row(h: usize) -> ParameterRow {
    let ffnn = h * h + 2 * h;
    let c = sbnn_connection_count(1, h, 1);
    ParameterRow {
        hidden: h,
        ffnn,
        hebbian_ffnn: 4 * ffnn,
        sbnn_connections: c,
        sbnn: 4 * c,
    }
}

pub fn parameter_table(max_hidden: usize) -> Vec<ParameterRow> {
    (1..=max_hidden).map(parameter_row).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub records: Vec<RunRecord>,
    pub histogram: Vec<HistogramRow>,
    pub structures: Vec<StructureRow>,
    pub fitness: FitnessStats,
    pub parameters: Vec<ParameterRow>,
}

/// Quantile by linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn fitness_stats(values: &[f64]) -> FitnessStats {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    FitnessStats {
        runs: v.len(),
        mean,
        std: var.sqrt(),
        min: v[0],
        q1: quantile(&v, 0.25),
        median: quantile(&v, 0.5),
        q3: quantile(&v, 0.75),
        max: v[v.len() - 1],
    }
}

impl Report {
    pub fn from_records(records: Vec<RunRecord>) -> Self {
        assert!(!records.is_empty(), "a report needs at least one record");
        let runs = records.len();
        let mut counts = [0usize; 10];
        for r in &records {
            counts[working_bin(r.working_connections, r.total_connections) - 1] += 1;
        }
        let histogram = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| HistogramRow {
                bin_upper_percent: 10 * (k + 1),
                runs: c,
                fraction: c as f64 / runs as f64,
            })
            .collect();

        let mut by_class: BTreeMap<StructureClass, usize> = BTreeMap::new();
        for r in &records {
            *by_class.entry(r.structure).or_default() += 1;
        }
        let structures = by_class
            .into_iter()
            .map(|(s, runs)| StructureRow {
                structure: s.to_string(),
                runs,
            })
            .collect();

        let fitness = fitness_stats(&records.iter().map(|r| r.fitness).collect::<Vec<_>>());
        Report {
            records,
            histogram,
            structures,
            fitness,
            parameters: parameter_table(50),
        }
    }

    /// Writes `working_histogram.csv`, `structures.csv`, `fitness.csv`,
    /// `parameters.csv` and a per-run `summary.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fn table<R: Serialize>(path: PathBuf, rows: impl IntoIterator<Item = R>) -> Result<PathBuf> {
            let mut w = csv::Writer::from_path(&path)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            Ok(path)
        }

        #[derive(Serialize)]
        struct SummaryRow {
            run: Option<usize>,
            model: String,
            task: String,
            fitness: f64,
            pre_prune_mean: Option<f64>,
            post_prune_mean: f64,
            prune_boost: Option<f64>,
            working_connections: usize,
            total_connections: usize,
            working_percentage: f64,
            structure: String,
        }

        let summary = self.records.iter().map(|r| SummaryRow {
            run: r.run.map(|i| i.run),
            model: r.model.to_string(),
            task: r.task.to_string(),
            fitness: r.fitness,
            pre_prune_mean: r.pre_prune_mean,
            post_prune_mean: r.post_prune_mean,
            prune_boost: r.prune_boost(),
            working_connections: r.working_connections,
            total_connections: r.total_connections,
            working_percentage: r.working_percentage,
            structure: r.structure.to_string(),
        });
        Ok(vec![
            table(dir.join("summary.csv"), summary)?,
            table(dir.join("working_histogram.csv"), &self.histogram)?,
            table(dir.join("structures.csv"), &self.structures)?,
            table(dir.join("fitness.csv"), [self.fitness])?,
            table(dir.join("parameters.csv"), &self.parameters)?,
        ])
    }
}

/// Collects every `run_record.json` one level below `dir` (or in `dir`
/// itself), in directory-name order.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths = Vec::new();
    let direct = dir.join("run_record.json");
    if direct.is_file() {
        paths.push(direct);
    }
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut subdirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir() && !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
        .collect();
    subdirs.sort();
    paths.extend(
        subdirs
            .into_iter()
            .map(|d| d.join("run_record.json"))
            .filter(|p| p.is_file()),
    );
    if paths.is_empty() {
        return Err(Error::EmptyRunDirectory(dir.to_path_buf()));
    }
    paths.iter().map(|p| RunRecord::load(p)).collect()
}

/// Reads the runs under `dir`, writes the report tables next to them and
/// returns the report.
pub fn analysis_report(dir: &Path) -> Result<Report> {
    let report = Report::from_records(load_records(dir)?);
    report.write(dir)?;
    Ok(report)
}
