use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::commands::{MonitorRow, RoundRow, METRICS_FILE, MONITOR_FILE, PREDICTIONS_FILE, ROUNDS_FILE, SUMMARY_FILE};
use super::svg::{extent, Panel, Svg, PALETTE};
use crate::optim::StepMetric;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    pub epoch: usize,
    pub steps: usize,
    pub mean_loss: f64,
    pub mean_batch_accuracy: f64,
    pub monitor_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub steps: usize,
    pub final_loss: Option<f64>,
    pub epochs: Vec<EpochReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub samples: usize,
    pub member_accuracy: Vec<f64>,
    pub ensemble_accuracy: f64,
}

/// Everything in here is recomputed from the run's CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub training: Option<TrainingReport>,
    pub rounds: Option<Vec<RoundRow>>,
    pub predictions: Option<PredictionReport>,
    pub figures: Vec<String>,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

struct PredictionTable {
    labels: Vec<usize>,
    coords: Vec<Option<(f64, f64)>>,
    members: Vec<Vec<usize>>,
    ensemble: Vec<usize>,
}

fn read_predictions(path: &Path) -> Result<PredictionTable> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let n_members = header.iter().filter(|h| h.starts_with("member_")).count();
    let mut t = PredictionTable {
        labels: Vec::new(),
        coords: Vec::new(),
        members: vec![Vec::new(); n_members],
        ensemble: Vec::new(),
    };
    let bad = |line: usize, what: &str| Error::Format {
        path: path.display().to_string(),
        offset: line as u64,
        message: format!("row {line}: bad {what}"),
    };
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize, what: &str| -> Result<usize> {
            rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| bad(line, what))
        };
        t.labels.push(num(1, "label")?);
        let h1 = rec.get(2).and_then(|s| s.parse::<f64>().ok());
        let h2 = rec.get(3).and_then(|s| s.parse::<f64>().ok());
        t.coords.push(h1.zip(h2));
        for (l, m) in t.members.iter_mut().enumerate() {
            m.push(num(4 + l, "member prediction")?);
        }
        t.ensemble.push(num(4 + n_members, "ensemble prediction")?);
    }
    Ok(t)
}

fn frac_equal(a: &[usize], b: &[usize]) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / b.len() as f64
}

fn training_report(metrics: &[StepMetric], monitor: &[MonitorRow]) -> TrainingReport {
    let n_epochs = metrics.iter().map(|m| m.epoch + 1).max().unwrap_or(0);
    let epochs = (0..n_epochs)
        .map(|e| {
            let rows: Vec<&StepMetric> = metrics.iter().filter(|m| m.epoch == e).collect();
            let n = rows.len().max(1) as f64;
            EpochReport {
                epoch: e,
                steps: rows.len(),
                mean_loss: rows.iter().map(|m| m.loss).sum::<f64>() / n,
                mean_batch_accuracy: rows.iter().map(|m| m.train_accuracy).sum::<f64>() / n,
                monitor_accuracy: monitor.iter().find(|m| m.epoch == e).map(|m| m.accuracy),
            }
        })
        .collect();
    TrainingReport { steps: metrics.len(), final_loss: metrics.last().map(|m| m.loss), epochs }
}

fn training_figure(metrics: &[StepMetric], monitor: &[MonitorRow]) -> String {
    let mut svg = Svg::new(720.0, 560.0);
    let steps = extent(metrics.iter().map(|m| m.step as f64));
    let loss = Panel::new((80.0, 40.0, 600.0, 190.0), steps, extent(metrics.iter().map(|m| m.loss)));
    loss.axes(&mut svg, "Training loss", "step", "batch loss");
    let pts: Vec<(f64, f64)> = metrics.iter().map(|m| (m.step as f64, m.loss)).collect();
    loss.polyline(&mut svg, &pts, PALETTE[0]);

    let acc = Panel::new((80.0, 310.0, 600.0, 190.0), steps, (0.0, 1.0));
    acc.axes(&mut svg, "Accuracy", "step", "accuracy");
    let pts: Vec<(f64, f64)> = metrics.iter().map(|m| (m.step as f64, m.train_accuracy)).collect();
    acc.polyline(&mut svg, &pts, PALETTE[0]);
    let mon: Vec<(f64, f64)> = monitor.iter().map(|m| (m.step as f64, m.accuracy)).collect();
    acc.markers(&mut svg, &mon, PALETTE[1], 4.0);
    acc.legend(&mut svg, &[("batch", PALETTE[0]), ("monitor", PALETTE[1])]);
    svg.finish()
}

fn rounds_figure(rows: &[RoundRow]) -> String {
    let mut svg = Svg::new(720.0, 560.0);
    let xs = extent(rows.iter().map(|r| r.round as f64));
    let xs = (xs.0 - 0.5, xs.1 + 0.5);
    let ens: Vec<(f64, f64, f64)> =
        rows.iter().filter_map(|r| Some((r.round as f64, r.test_accuracy?, r.test_std.unwrap_or(0.0)))).collect();
    let member: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.round as f64, r.member_test_accuracy?))).collect();
    let ys = extent(ens.iter().flat_map(|p| [p.1 - p.2, p.1 + p.2]).chain(member.iter().map(|p| p.1)));
    let acc = Panel::new((80.0, 40.0, 600.0, 190.0), xs, ys);
    acc.axes(&mut svg, "Test accuracy vs ensemble size", "round L", "accuracy");
    let line: Vec<(f64, f64)> = ens.iter().map(|p| (p.0, p.1)).collect();
    acc.polyline(&mut svg, &line, PALETTE[0]);
    acc.error_bars(&mut svg, &ens, PALETTE[0]);
    acc.markers(&mut svg, &line, PALETTE[0], 3.5);
    acc.markers(&mut svg, &member, PALETTE[1], 3.0);
    acc.legend(&mut svg, &[("ensemble", PALETTE[0]), ("member", PALETTE[1])]);

    let alphas: Vec<(f64, f64)> = rows.iter().map(|r| (r.round as f64, r.alpha)).collect();
    let ay = extent(alphas.iter().map(|a| a.1).chain([0.0]));
    let bars = Panel::new((80.0, 310.0, 600.0, 190.0), xs, ay);
    bars.axes(&mut svg, "Classifier weight per round", "round", "alpha");
    bars.bars(&mut svg, &alphas, 0.4, PALETTE[2]);
    svg.finish()
}

fn phase_figure(t: &PredictionTable) -> String {
    let pts: Vec<((f64, f64), usize)> =
        t.coords.iter().zip(&t.ensemble).filter_map(|(c, &p)| Some(((*c)?, p))).collect();
    let mut svg = Svg::new(720.0, 520.0);
    let panel =
        Panel::new((80.0, 40.0, 520.0, 400.0), extent(pts.iter().map(|p| p.0 .0)), extent(pts.iter().map(|p| p.0 .1)));
    panel.axes(&mut svg, "Predicted phase", "h1", "h2");
    for (k, colour) in PALETTE.iter().enumerate().take(3) {
        let sel: Vec<(f64, f64)> = pts.iter().filter(|p| p.1 == k).map(|p| p.0).collect();
        panel.markers(&mut svg, &sel, colour, 4.0);
    }
    let names = [("SPT", PALETTE[0]), ("PM", PALETTE[1]), ("Ising", PALETTE[2])];
    let legend = Panel::new((620.0, 40.0, 100.0, 60.0), (0.0, 1.0), (0.0, 1.0));
    legend.legend(&mut svg, &names);
    svg.finish()
}

/// Render figures and `report/summary.json` from a run directory.
pub fn cmd_report(run: &Path) -> Result<ReportSummary> {
    let metrics_path = run.join("train").join(METRICS_FILE);
    let rounds_path = run.join("boost").join(ROUNDS_FILE);
    if !metrics_path.exists() && !rounds_path.exists() {
        return Err(Error::MissingInput {
            path: run.to_path_buf(),
            hint: format!("no metrics found; expected {} or {}", metrics_path.display(), rounds_path.display()),
        });
    }
    let out = run.join("report");
    fs::create_dir_all(&out)?;
    let mut figures = Vec::new();
    let mut emit = |name: &str, doc: String| -> Result<()> {
        fs::write(out.join(name), doc)?;
        figures.push(name.to_string());
        Ok(())
    };

    let training = if metrics_path.exists() {
        let metrics: Vec<StepMetric> = read_rows(&metrics_path)?;
        let monitor_path = run.join("train").join(MONITOR_FILE);
        let monitor: Vec<MonitorRow> = if monitor_path.exists() { read_rows(&monitor_path)? } else { Vec::new() };
        emit("training.svg", training_figure(&metrics, &monitor))?;
        Some(training_report(&metrics, &monitor))
    } else {
        None
    };
    let rounds = if rounds_path.exists() {
        let rows: Vec<RoundRow> = read_rows(&rounds_path)?;
        emit("rounds.svg", rounds_figure(&rows))?;
        Some(rows)
    } else {
        None
    };
    let pred_path = run.join("boost").join(PREDICTIONS_FILE);
    let predictions = if pred_path.exists() {
        let t = read_predictions(&pred_path)?;
        if t.coords.iter().any(Option::is_some) {
            emit("phase_diagram.svg", phase_figure(&t))?;
        }
        Some(PredictionReport {
            samples: t.labels.len(),
            member_accuracy: t.members.iter().map(|m| frac_equal(m, &t.labels)).collect(),
            ensemble_accuracy: frac_equal(&t.ensemble, &t.labels),
        })
    } else {
        None
    };
    let summary = ReportSummary { training, rounds, predictions, figures };
    fs::write(out.join(SUMMARY_FILE), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}
