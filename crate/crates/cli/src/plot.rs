//! Figure tables. Every figure is a flat list of points tagged with a series
//! label; the same table feeds the SVG renderer and the CSV twin, so a CSV
//! reloaded from disk renders to the same bytes.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use witness_vqe::ansatz::Family;
use witness_vqe::bench::{read_jsonl, BenchmarkRecord};

use crate::{io_error, svg, CliError, Figure, PlotArgs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub series: String,
    pub x: f64,
    pub y: f64,
    /// Lower and upper band edges (mean -/+ std) where the figure has a band.
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Filter {
    pub family: Option<Family>,
    pub n: Option<usize>,
    pub shots: Option<u32>,
}

impl Filter {
    fn keeps(&self, r: &BenchmarkRecord) -> bool {
        self.family.is_none_or(|f| f == r.key.family)
            && self.n.is_none_or(|n| n == r.key.n_qubits)
            && self.shots.is_none_or(|s| s == r.key.shots)
    }
}

fn shots_label(shots: u32) -> String {
    if shots == 0 {
        "analytic".into()
    } else {
        format!("S={shots}")
    }
}

fn cell_label(r: &BenchmarkRecord) -> String {
    format!(
        "{} n={} {}",
        r.key.family.display_name(),
        r.key.n_qubits,
        shots_label(r.key.shots)
    )
}

fn family_label(r: &BenchmarkRecord) -> String {
    format!("{} {}", r.key.family.display_name(), shots_label(r.key.shots))
}

fn curve(label: String, ys: &[f64], band: Option<&[f64]>) -> Vec<Point> {
    ys.iter()
        .enumerate()
        .map(|(i, &y)| Point {
            series: label.clone(),
            x: i as f64,
            y,
            lo: band.map(|s| y - s[i]),
            hi: band.map(|s| y + s[i]),
        })
        .collect()
}

fn available(records: &[BenchmarkRecord]) -> String {
    let keys: BTreeSet<String> = records
        .iter()
        .map(|r| format!("{}/{}/{}", r.key.family.slug(), r.key.n_qubits, r.key.shots))
        .collect();
    keys.into_iter().collect::<Vec<_>>().join(", ")
}

/// Points of `figure` for the records that pass `filter`.
pub fn figure_points(records: &[BenchmarkRecord], figure: Figure, filter: &Filter) -> Result<Vec<Point>, CliError> {
    let chosen: Vec<&BenchmarkRecord> = records.iter().filter(|r| filter.keeps(r)).collect();
    let mut points = Vec::new();
    match figure {
        Figure::Shots => {
            for r in &chosen {
                points.extend(curve(cell_label(r), &r.mean_energy_curve, None));
            }
        }
        Figure::Convergence => {
            for r in &chosen {
                points.extend(curve(cell_label(r), &r.mean_energy_curve, Some(&r.std_energy_curve)));
            }
        }
        Figure::Detection | Figure::Normalized => {
            let mut labels: Vec<String> = Vec::new();
            for r in &chosen {
                let label = family_label(r);
                if !labels.contains(&label) {
                    labels.push(label);
                }
            }
            for label in labels {
                let mut series: Vec<Point> = chosen
                    .iter()
                    .filter(|r| family_label(r) == label)
                    .filter_map(|r| {
                        let y = match figure {
                            Figure::Detection => r.mean_detection_iteration?,
                            _ => r.normalized_final_energy,
                        };
                        Some(Point {
                            series: label.clone(),
                            x: r.key.n_qubits as f64,
                            y,
                            lo: None,
                            hi: None,
                        })
                    })
                    .collect();
                series.sort_by(|a, b| a.x.total_cmp(&b.x));
                points.extend(series);
            }
        }
    }
    if points.is_empty() {
        return Err(CliError::Usage(format!(
            "no series for this selection; available family/n/shots keys: {}",
            if records.is_empty() { "none".to_string() } else { available(records) }
        )));
    }
    Ok(points)
}

pub fn write_csv(path: &Path, points: &[Point]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    for p in points {
        w.serialize(p)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<Point>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .collect::<Result<Vec<Point>, _>>()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn csv_twin(svg_path: &Path) -> PathBuf {
    svg_path.with_extension("csv")
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub(crate) fn run(args: &PlotArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let points = if is_csv(&args.results) {
        let points = read_csv(&args.results)?;
        if points.is_empty() {
            return Err(CliError::Usage(format!("{}: no rows", args.results.display())));
        }
        points
    } else {
        let records = read_jsonl(&args.results)?;
        let filter = Filter {
            family: args.family,
            n: args.n,
            shots: args.shots,
        };
        figure_points(&records, args.figure, &filter)?
    };
    let doc = svg::render(args.figure, &points);
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(&args.out, doc).map_err(|e| io_error(&args.out, e))?;
    let twin = csv_twin(&args.out);
    if twin != args.results {
        write_csv(&twin, &points)?;
    }
    writeln!(out, "wrote {} and {}", args.out.display(), twin.display()).map_err(|e| CliError::Runtime(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_is_exact() {
        let points = vec![
            Point {
                series: "HEA(a) n=4, \"quoted\"".into(),
                x: 0.0,
                y: -2.0000000000000004,
                lo: Some(-3.1e-300),
                hi: Some(1.0 / 3.0),
            },
            Point {
                series: "HVA S=10".into(),
                x: 15.0,
                y: 0.98,
                lo: None,
                hi: None,
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&path, &points).unwrap();
        assert_eq!(read_csv(&path).unwrap(), points);
    }
}
