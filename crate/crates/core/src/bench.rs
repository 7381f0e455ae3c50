//! Experiment grid: family x qubit count x shot budget x restarts.
//!
//! Every restart gets a seed derived from `(master_seed, family, n, restart)`.
//! The shot budget is deliberately left out of that path, so the same restart
//! index starts from the same parameters under every budget and the
//! shot-budget curves are paired with the analytic one.
//!
//! Each finished cell is checkpointed as a one-line JSONL file under
//! `<dir>/results/<family>/<n>/<shots>.jsonl`; a rerun with the same config
//! reuses matching checkpoints instead of recomputing them.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::Family;
use crate::error::{Error, Result};
use crate::hamiltonian::build_heisenberg;
use crate::par::{map_indexed, Jobs};
use crate::rng::derive_seed;
use crate::shots::ShotBudget;
use crate::spectrum::{ground_energy, separable_energy, SeparableOptions, ORACLE_LIMIT};
use crate::vqe::{minimize, OptimizerConfig, OptimizerTrace};
use crate::witness::{detect, stage1_separable_energy, EsepSource, Stage1Config};

pub const SCHEMA_VERSION: u32 = 1;
/// A cell fails when more than this fraction of its runs abort.
pub const MAX_ABORT_FRACTION: f64 = 0.10;

const STAGE1_STREAM: u64 = 0x5747_4531;

fn default_families() -> Vec<Family> {
    Family::ENTANGLING.to_vec()
}

fn default_qubits() -> Vec<usize> {
    (2..=15).collect()
}

fn default_shots() -> Vec<u32> {
    vec![10, 50, 100, 300]
}

fn default_restarts() -> usize {
    250
}

fn default_coupling() -> f64 {
    -1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_families")]
    pub families: Vec<Family>,
    #[serde(default = "default_qubits")]
    pub qubit_range: Vec<usize>,
    /// Shots per measurement setting; 0 is the analytic reference.
    #[serde(default = "default_shots")]
    pub shot_list: Vec<u32>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads (0 = all). Does not affect results.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default)]
    pub esep_source: EsepSource,
    /// HESA restarts for the reported stage-1 estimate; 0 skips stage 1
    /// unless `esep_source` needs it.
    #[serde(default)]
    pub stage1_restarts: usize,
    #[serde(default = "default_coupling", rename = "J")]
    pub coupling: f64,
    #[serde(default, rename = "h")]
    pub field: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            families: default_families(),
            qubit_range: default_qubits(),
            shot_list: default_shots(),
            restarts: default_restarts(),
            optimizer: OptimizerConfig::default(),
            master_seed: 0,
            parallelism: 0,
            esep_source: EsepSource::default(),
            stage1_restarts: 0,
            coupling: default_coupling(),
            field: 0.0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::invalid("families: list is empty"));
        }
        if self.qubit_range.is_empty() {
            return Err(Error::invalid("qubit_range: list is empty"));
        }
        if self.shot_list.is_empty() {
            return Err(Error::invalid("shot_list: list is empty"));
        }
        if let Some(n) = self.qubit_range.iter().find(|&&n| !(2..=ORACLE_LIMIT).contains(&n)) {
            return Err(Error::invalid(format!(
                "qubit_range: {n} outside 2..={ORACLE_LIMIT}"
            )));
        }
        for &s in &self.shot_list {
            ShotBudget::new(s).map_err(|e| Error::invalid(format!("shot_list: {e}")))?;
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts: must be at least 1"));
        }
        if self.esep_source == EsepSource::VqeHesa && self.stage1_restarts == 0 {
            return Err(Error::invalid(
                "stage1_restarts: must be positive when esep_source is vqe-hesa",
            ));
        }
        self.optimizer
            .validate()
            .map_err(|e| Error::invalid(format!("optimizer: {e}")))
    }

    pub fn jobs(&self) -> Jobs {
        Jobs(self.parallelism)
    }

    /// Grid cells in output order.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut cells = Vec::new();
        for &family in &self.families {
            for &n in &self.qubit_range {
                for &shots in &self.shot_list {
                    cells.push(CellKey { family, n_qubits: n, shots });
                }
            }
        }
        cells
    }

    /// SHA-256 of the canonical JSON of every result-affecting field.
    pub fn fingerprint(&self) -> String {
        let mut canonical = self.clone();
        canonical.parallelism = 0;
        let text = serde_json::to_string(&canonical).expect("config serializes");
        hex(&Sha256::digest(text.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub family: Family,
    pub n_qubits: usize,
    pub shots: u32,
}

impl CellKey {
    pub fn checkpoint_path(&self, dir: &Path) -> PathBuf {
        dir.join("results")
            .join(self.family.slug())
            .join(self.n_qubits.to_string())
            .join(format!("{}.jsonl", self.shots))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// More than 10% of runs aborted; statistics are over the survivors.
    Failed,
}

/// Aggregate statistics of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub schema_version: u32,
    #[serde(flatten)]
    pub key: CellKey,
    pub shot_semantics: String,
    pub status: CellStatus,
    pub restarts: usize,
    pub aborted_runs: usize,
    pub e_sep: f64,
    pub e_sep_source: EsepSource,
    pub e_sep_oracle: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_sep_vqe: Option<f64>,
    pub e0: f64,
    pub mean_energy_curve: Vec<f64>,
    pub std_energy_curve: Vec<f64>,
    pub mean_analytic_curve: Vec<f64>,
    pub std_analytic_curve: Vec<f64>,
    pub detection_rate: f64,
    /// Mean first-detection iteration over the runs that detected.
    pub mean_detection_iteration: Option<f64>,
    /// Detection rate judged on exact energies; the gap to `detection_rate`
    /// measures shot-noise false positives.
    pub analytic_detection_rate: f64,
    pub mean_final_energy: f64,
    pub std_final_energy: f64,
    pub normalized_final_energy: f64,
    pub config_fingerprint: String,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Pointwise mean and population standard deviation over completed traces,
/// plus detection statistics against `e_sep`.
pub fn aggregate(
    key: CellKey,
    traces: &[OptimizerTrace],
    e_sep: f64,
    e_sep_source: EsepSource,
    e0: f64,
) -> Result<BenchmarkRecord> {
    let total = traces.len();
    let done: Vec<&OptimizerTrace> = traces.iter().filter(|t| !t.is_aborted()).collect();
    if done.is_empty() {
        return Err(Error::invalid("aggregate needs at least one completed trace"));
    }
    let len = done[0].records.len();
    if done.iter().any(|t| t.records.len() != len) {
        return Err(Error::invalid("traces have different lengths"));
    }
    let aborted = total - done.len();
    let curve = |pick: fn(&crate::vqe::TraceRecord) -> f64| -> (Vec<f64>, Vec<f64>) {
        (0..len)
            .map(|i| mean_std(done.iter().map(move |t| pick(&t.records[i]))))
            .unzip()
    };
    let (mean_energy_curve, std_energy_curve) = curve(|r| r.energy);
    let (mean_analytic_curve, std_analytic_curve) = curve(|r| r.analytic_energy);

    let witnesses: Vec<_> = done.iter().map(|t| detect(t, e_sep, e_sep_source)).collect();
    let hits: Vec<f64> = witnesses
        .iter()
        .filter_map(|w| w.detection_iteration.map(|i| i as f64))
        .collect();
    let runs = done.len() as f64;
    let analytic_hits = witnesses
        .iter()
        .filter(|w| w.analytic_detection_iteration.is_some())
        .count();
    let mean_final_energy = *mean_energy_curve.last().expect("nonempty");
    let std_final_energy = *std_energy_curve.last().expect("nonempty");

    Ok(BenchmarkRecord {
        schema_version: SCHEMA_VERSION,
        key,
        shot_semantics: "per_setting".into(),
        status: if aborted as f64 > MAX_ABORT_FRACTION * total as f64 {
            CellStatus::Failed
        } else {
            CellStatus::Ok
        },
        restarts: total,
        aborted_runs: aborted,
        e_sep,
        e_sep_source,
        e_sep_oracle: e_sep,
        e_sep_vqe: None,
        e0,
        mean_energy_curve,
        std_energy_curve,
        mean_analytic_curve,
        std_analytic_curve,
        detection_rate: hits.len() as f64 / runs,
        mean_detection_iteration: (!hits.is_empty()).then(|| hits.iter().sum::<f64>() / hits.len() as f64),
        analytic_detection_rate: analytic_hits as f64 / runs,
        mean_final_energy,
        std_final_energy,
        normalized_final_energy: mean_final_energy / e0,
        config_fingerprint: String::new(),
    })
}

/// Reference energies for one chain length.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Reference {
    e0: f64,
    e_sep_oracle: f64,
    e_sep_vqe: Option<f64>,
}

fn family_code(f: Family) -> u64 {
    Family::ALL.iter().position(|&x| x == f).expect("listed") as u64
}

/// Seed of restart `restart` in cells of `(family, n)`.
pub fn restart_seed(master: u64, family: Family, n_qubits: usize, restart: usize) -> u64 {
    derive_seed(master, &[family_code(family), n_qubits as u64, restart as u64])
}

/// Runs every restart of one cell.
pub fn run_cell_traces(config: &SweepConfig, key: CellKey) -> Result<Vec<OptimizerTrace>> {
    let h = build_heisenberg(key.n_qubits, config.coupling, config.field)?;
    let descriptor = key.family.build(key.n_qubits, 1)?;
    let shots = ShotBudget::new(key.shots)?;
    map_indexed(config.restarts, config.jobs(), |r| {
        let opt = OptimizerConfig {
            shots,
            seed: restart_seed(config.master_seed, key.family, key.n_qubits, r),
            ..config.optimizer.clone()
        };
        minimize(&descriptor, &h, &opt)
    })
    .into_iter()
    .collect()
}

/// Hook called after each cell; the flag is true when the cell came from a
/// checkpoint.
pub type CellCallback<'a> = &'a mut dyn FnMut(&BenchmarkRecord, bool);

/// Executes the grid. With `checkpoint_dir`, finished cells are persisted and
/// matching checkpoints are reused.
pub fn run_sweep(
    config: &SweepConfig,
    checkpoint_dir: Option<&Path>,
    mut on_cell: Option<CellCallback<'_>>,
) -> Result<Vec<BenchmarkRecord>> {
    config.validate()?;
    let fingerprint = config.fingerprint();
    let mut references: BTreeMap<usize, Reference> = BTreeMap::new();
    let mut records = Vec::new();

    for key in config.cells() {
        if let Some(dir) = checkpoint_dir {
            if let Some(rec) = load_checkpoint(&key.checkpoint_path(dir), &key, &fingerprint)? {
                if let Some(cb) = on_cell.as_deref_mut() {
                    cb(&rec, true);
                }
                records.push(rec);
                continue;
            }
        }
        let reference = match references.get(&key.n_qubits) {
            Some(r) => *r,
            None => {
                let r = compute_reference(config, key.n_qubits)?;
                references.insert(key.n_qubits, r);
                r
            }
        };
        let e_sep = match config.esep_source {
            EsepSource::AnalyticOracle => reference.e_sep_oracle,
            EsepSource::VqeHesa => reference.e_sep_vqe.expect("validated"),
        };
        let traces = run_cell_traces(config, key)?;
        let mut rec = aggregate(key, &traces, e_sep, config.esep_source, reference.e0)?;
        rec.e_sep_oracle = reference.e_sep_oracle;
        rec.e_sep_vqe = reference.e_sep_vqe;
        rec.config_fingerprint = fingerprint.clone();
        if let Some(dir) = checkpoint_dir {
            write_jsonl(&key.checkpoint_path(dir), std::slice::from_ref(&rec))?;
        }
        if let Some(cb) = on_cell.as_deref_mut() {
            cb(&rec, false);
        }
        records.push(rec);
    }
    Ok(records)
}

fn compute_reference(config: &SweepConfig, n: usize) -> Result<Reference> {
    let h = build_heisenberg(n, config.coupling, config.field)?;
    let e0 = ground_energy(&h)?;
    let e_sep_oracle = separable_energy(
        &h,
        &SeparableOptions {
            jobs: config.jobs(),
            ..Default::default()
        },
    )?
    .energy;
    let e_sep_vqe = if config.stage1_restarts > 0 {
        let stage1 = stage1_separable_energy(
            &h,
            &Stage1Config {
                restarts: config.stage1_restarts,
                optimizer: OptimizerConfig {
                    seed: derive_seed(config.master_seed, &[STAGE1_STREAM, n as u64]),
                    shots: ShotBudget::ANALYTIC,
                    ..config.optimizer.clone()
                },
                jobs: config.jobs(),
            },
        )?;
        Some(stage1.e_sep)
    } else {
        None
    };
    Ok(Reference {
        e0,
        e_sep_oracle,
        e_sep_vqe,
    })
}

fn load_checkpoint(path: &Path, key: &CellKey, fingerprint: &str) -> Result<Option<BenchmarkRecord>> {
    if !path.exists() {
        return Ok(None);
    }
    let recs = match read_jsonl(path) {
        Ok(r) => r,
        // a half-written file from an interrupted run is recomputed
        Err(Error::Json { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(recs
        .into_iter()
        .next()
        .filter(|r| r.key == *key && r.config_fingerprint == fingerprint))
}

/// Writes records as JSON lines, atomically replacing `path`.
pub fn write_jsonl(path: &Path, records: &[BenchmarkRecord]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        for r in records {
            let line = serde_json::to_string(r).map_err(|e| Error::Json {
                context: "serializing record".into(),
                source: e,
            })?;
            writeln!(f, "{line}").map_err(|e| Error::io(&tmp, e))?;
        }
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<BenchmarkRecord>> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Json {
            context: format!("{}:{}", path.display(), i + 1),
            source: e,
        })?);
    }
    Ok(out)
}
