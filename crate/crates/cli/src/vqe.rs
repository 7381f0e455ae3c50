use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use witness_vqe::bench::{aggregate, restart_seed, CellKey};
use witness_vqe::par::{map_indexed, Jobs};
use witness_vqe::rng::derive_seed;
use witness_vqe::shots::ShotBudget;
use witness_vqe::spectrum::{ground_energy, separable_energy, SeparableOptions};
use witness_vqe::vqe::{minimize, OptimizerConfig, RunStatus, TraceRecord};
use witness_vqe::witness::{detect, stage1_separable_energy, EsepSource, Stage1Config};

use crate::{default_out_dir, io_error, load_chain, CliError, VqeArgs};

const STAGE1_STREAM: u64 = 1;

#[derive(Serialize)]
struct TraceLine<'a> {
    restart: usize,
    #[serde(flatten)]
    record: &'a TraceRecord,
}

#[derive(Serialize)]
struct RunSummary {
    restart: usize,
    seed: u64,
    #[serde(flatten)]
    status: RunStatus,
    detection_iteration: Option<usize>,
    analytic_detection_iteration: Option<usize>,
    final_energy: Option<f64>,
    gap_certificate: f64,
}

#[derive(Serialize)]
struct Summary {
    family: String,
    n_qubits: usize,
    shots: u32,
    restarts: usize,
    seed: u64,
    e0: f64,
    e_sep_oracle: f64,
    e_sep_vqe: Option<f64>,
    oracle_discrepancy: Option<bool>,
    e_sep_used: f64,
    esep_source: EsepSource,
    detection_rate: f64,
    mean_detection_iteration: Option<f64>,
    mean_final_energy: f64,
    std_final_energy: f64,
    runs: Vec<RunSummary>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub(crate) fn run(args: &VqeArgs, jobs: Jobs, out: &mut dyn Write) -> Result<(), CliError> {
    let h = load_chain(&args.chain)?;
    let n = h.n_qubits();
    let descriptor = args.family.build(n, 1)?;
    let source = EsepSource::from(args.esep_source);
    if source == EsepSource::VqeHesa && args.stage1_restarts == 0 {
        return Err(CliError::Usage("--esep-source vqe-hesa needs --stage1-restarts > 0".into()));
    }
    let optimizer = OptimizerConfig {
        max_iterations: args.iterations,
        step_size: args.step_size,
        shots: ShotBudget::new(args.shots)?,
        init_low: args.init_low,
        init_high: args.init_high,
        seed: args.seed,
        ..Default::default()
    };
    optimizer.validate()?;
    if args.restarts == 0 {
        return Err(CliError::Usage("--restarts must be at least 1".into()));
    }

    let e0 = ground_energy(&h)?;
    let e_sep_oracle = separable_energy(&h, &SeparableOptions { jobs, ..Default::default() })?.energy;
    let stage1 = if args.stage1_restarts > 0 {
        Some(stage1_separable_energy(
            &h,
            &Stage1Config {
                restarts: args.stage1_restarts,
                optimizer: OptimizerConfig {
                    shots: ShotBudget::ANALYTIC,
                    seed: derive_seed(args.seed, &[STAGE1_STREAM]),
                    ..optimizer.clone()
                },
                jobs,
            },
        )?)
    } else {
        None
    };
    let e_sep = match source {
        EsepSource::AnalyticOracle => e_sep_oracle,
        EsepSource::VqeHesa => stage1.as_ref().expect("checked above").e_sep,
    };

    let seeds: Vec<u64> = (0..args.restarts)
        .map(|r| restart_seed(args.seed, args.family, n, r))
        .collect();
    let traces = map_indexed(args.restarts, jobs, |r| {
        minimize(&descriptor, &h, &OptimizerConfig { seed: seeds[r], ..optimizer.clone() })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let dir = args.out.clone().unwrap_or_else(|| {
        default_out_dir()
            .join("vqe")
            .join(format!("{}-n{n}-s{}", args.family.slug(), args.shots))
    });
    fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
    write_json(&dir.join("descriptor.json"), &descriptor)?;

    let trace_path = dir.join("trace.jsonl");
    let file = fs::File::create(&trace_path).map_err(|e| io_error(&trace_path, e))?;
    let mut w = BufWriter::new(file);
    for (restart, t) in traces.iter().enumerate() {
        for record in &t.records {
            let line = serde_json::to_string(&TraceLine { restart, record })
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| io_error(&trace_path, e))?;
        }
    }
    w.flush().map_err(|e| io_error(&trace_path, e))?;

    let key = CellKey { family: args.family, n_qubits: n, shots: args.shots };
    let record = aggregate(key, &traces, e_sep, source, e0)?;
    let runs: Vec<RunSummary> = traces
        .iter()
        .enumerate()
        .map(|(restart, t)| {
            let w = detect(t, e_sep, source);
            RunSummary {
                restart,
                seed: seeds[restart],
                status: t.status.clone(),
                detection_iteration: w.detection_iteration,
                analytic_detection_iteration: w.analytic_detection_iteration,
                final_energy: t.final_energy(),
                gap_certificate: w.gap_certificate,
            }
        })
        .collect();
    let summary = Summary {
        family: args.family.slug().to_string(),
        n_qubits: n,
        shots: args.shots,
        restarts: args.restarts,
        seed: args.seed,
        e0,
        e_sep_oracle,
        e_sep_vqe: stage1.as_ref().map(|s| s.e_sep),
        oracle_discrepancy: stage1.as_ref().map(|s| s.oracle_discrepancy),
        e_sep_used: e_sep,
        esep_source: source,
        detection_rate: record.detection_rate,
        mean_detection_iteration: record.mean_detection_iteration,
        mean_final_energy: record.mean_final_energy,
        std_final_energy: record.std_final_energy,
        runs,
    };
    write_json(&dir.join("summary.json"), &summary)?;

    let mut text = format!(
        "{} n={n} shots={} E_0={e0:.6} E_sep={e_sep:.6}\n",
        args.family.display_name(),
        args.shots
    );
    if let Some(s) = &stage1 {
        text += &format!("stage 1 (HESA, {} restarts): E_sep={:.6}\n", args.stage1_restarts, s.e_sep);
        if s.oracle_discrepancy {
            text += "warning: stage-1 estimate differs from the oracle by more than 5%\n";
        }
    }
    for r in &summary.runs {
        let det = r.detection_iteration.map_or("none".to_string(), |i| i.to_string());
        let fin = r.final_energy.map_or("aborted".to_string(), |e| format!("{e:.6}"));
        text += &format!("restart {}: detection_iteration {det} final_energy {fin}\n", r.restart);
    }
    text += &format!(
        "detection_rate {:.3} mean_final_energy {:.6}\nwrote {}\n",
        summary.detection_rate,
        summary.mean_final_energy,
        dir.display()
    );
    out.write_all(text.as_bytes()).map_err(|e| CliError::Runtime(e.to_string()))
}
