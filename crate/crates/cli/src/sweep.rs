use std::fs;
use std::io::Write;

use witness_vqe::bench::{run_sweep, write_jsonl, CellStatus, SweepConfig};

use crate::manifest::RunManifest;
use crate::{default_out_dir, io_error, CliError, SweepArgs};

pub(crate) fn load_config(path: &std::path::Path) -> Result<SweepConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let config: SweepConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        CliError::Usage(format!("{}: field `{at}`: {}", path.display(), e.inner()))
    })?;
    Ok(config)
}

pub(crate) fn run(
    args: &SweepArgs,
    jobs: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(j) = jobs {
        config.parallelism = j;
    }
    config
        .validate()
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;

    let dir = args.out.clone().unwrap_or_else(default_out_dir);
    fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
    let total = config.cells().len();
    let mut done = 0;
    let mut progress = |rec: &witness_vqe::bench::BenchmarkRecord, resumed: bool| {
        done += 1;
        let _ = writeln!(
            err,
            "[{done}/{total}] {} n={} shots={}{}",
            rec.key.family.slug(),
            rec.key.n_qubits,
            rec.key.shots,
            if resumed { " (checkpoint)" } else { "" }
        );
    };
    let records = run_sweep(&config, Some(&dir), Some(&mut progress))?;

    let results_path = dir.join("results.jsonl");
    write_jsonl(&results_path, &records)?;
    let bytes = fs::read(&results_path).map_err(|e| io_error(&results_path, e))?;
    let manifest = RunManifest::new(&config, &bytes, records.len());
    let manifest_path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(&manifest_path, text).map_err(|e| io_error(&manifest_path, e))?;

    let failed = records.iter().filter(|r| r.status == CellStatus::Failed).count();
    writeln!(
        out,
        "{} records -> {}\nmanifest {} ({})",
        records.len(),
        results_path.display(),
        manifest_path.display(),
        manifest.content_hash
    )
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    if failed > 0 {
        return Err(CliError::Runtime(format!(
            "{failed} cell(s) had more than 10% aborted runs"
        )));
    }
    Ok(())
}
