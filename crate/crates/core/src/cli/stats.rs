use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{derive, Stream};
use crate::{Error, Result};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divisor `n`).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Accuracies of `resamples` bootstrap draws (with replacement) of the
/// per-sample correctness table.
pub fn bootstrap_accuracies(correct: &[bool], resamples: usize, seed: u64) -> Vec<f64> {
    let n = correct.len();
    if n == 0 {
        return vec![0.0; resamples];
    }
    let mut rng = derive(seed, Stream::Bootstrap, 0);
    (0..resamples).map(|_| (0..n).filter(|_| correct[rng.random_range(0..n)]).count() as f64 / n as f64).collect()
}

/// Standard deviation of the bootstrap accuracy distribution.
pub fn bootstrap_std(correct: &[bool], resamples: usize, seed: u64) -> f64 {
    std_dev(&bootstrap_accuracies(correct, resamples, seed))
}

/// Bootstrap of the mean of paired differences `a_i - b_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedBootstrap {
    pub mean_difference: f64,
    /// 2.5th and 97.5th percentiles of the resampled mean difference.
    pub lower: f64,
    pub upper: f64,
    /// Fraction of resamples whose mean difference is not positive.
    pub fraction_not_positive: f64,
}

impl PairedBootstrap {
    /// `a` beats `b` at 95% confidence: the whole interval is positive.
    pub fn significant(&self) -> bool {
        self.lower > 0.0
    }
}

pub fn paired_bootstrap(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> Result<PairedBootstrap> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::domain(format!(
            "paired bootstrap needs equal non-empty samples, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if resamples == 0 {
        return Err(Error::domain("paired bootstrap needs at least one resample"));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len();
    let mut rng = derive(seed, Stream::Bootstrap, 1);
    let mut means: Vec<f64> =
        (0..resamples).map(|_| (0..n).map(|_| d[rng.random_range(0..n)]).sum::<f64>() / n as f64).collect();
    means.sort_by(f64::total_cmp);
    let pick = |q: f64| means[((q * resamples as f64).floor() as usize).min(resamples - 1)];
    Ok(PairedBootstrap {
        mean_difference: mean(&d),
        lower: pick(0.025),
        upper: pick(0.975),
        fraction_not_positive: means.iter().filter(|&&m| m <= 0.0).count() as f64 / resamples as f64,
    })
}

/// Accuracy breakdown of a prediction table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub samples: usize,
    pub accuracy: f64,
    pub bootstrap_resamples: usize,
    pub bootstrap_std: f64,
    /// Accuracy on the samples of each true class; `None` for absent classes.
    pub per_class_accuracy: Vec<Option<f64>>,
    /// `confusion[y][p]` counts samples of class `y` predicted as `p`.
    pub confusion: Vec<Vec<usize>>,
}

pub fn evaluate_predictions(
    predictions: &[usize],
    labels: &[usize],
    n_classes: usize,
    resamples: usize,
    seed: u64,
) -> Result<Evaluation> {
    if predictions.len() != labels.len() {
        return Err(Error::domain(format!("{} predictions for {} labels", predictions.len(), labels.len())));
    }
    if let Some(&bad) = predictions.iter().chain(labels).find(|&&c| c >= n_classes) {
        return Err(Error::domain(format!("class {bad} outside {n_classes} classes")));
    }
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    for (&p, &y) in predictions.iter().zip(labels) {
        confusion[y][p] += 1;
    }
    let per_class_accuracy = confusion
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let total: usize = row.iter().sum();
            (total > 0).then(|| row[k] as f64 / total as f64)
        })
        .collect();
    let correct: Vec<bool> = predictions.iter().zip(labels).map(|(p, y)| p == y).collect();
    let hits = correct.iter().filter(|&&c| c).count();
    Ok(Evaluation {
        samples: labels.len(),
        accuracy: if labels.is_empty() { 0.0 } else { hits as f64 / labels.len() as f64 },
        bootstrap_resamples: resamples,
        bootstrap_std: bootstrap_std(&correct, resamples, seed),
        per_class_accuracy,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_classifier() {
        let y = [0, 1, 2, 2, 1];
        let e = evaluate_predictions(&y, &y, 3, 200, 1).unwrap();
        assert_eq!(e.accuracy, 1.0);
        assert_eq!(e.bootstrap_std, 0.0);
        assert_eq!(e.per_class_accuracy, vec![Some(1.0); 3]);
    }

    #[test]
    fn confusion_rows_count_classes() {
        let y = [0, 0, 1, 1, 1, 3];
        let p = [0, 1, 1, 0, 1, 2];
        let e = evaluate_predictions(&p, &y, 4, 10, 0).unwrap();
        let rows: Vec<usize> = e.confusion.iter().map(|r| r.iter().sum()).collect();
        assert_eq!(rows, vec![2, 3, 0, 1]);
        assert_eq!(e.per_class_accuracy[2], None);
        assert!(evaluate_predictions(&p, &y, 3, 10, 0).is_err());
    }

    #[test]
    fn paired_bootstrap_orders_clear_gaps() {
        let a: Vec<f64> = (0..30).map(|i| 0.05 + 0.001 * i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| 0.01 - 0.0005 * i as f64).collect();
        let r = paired_bootstrap(&a, &b, 2000, 3).unwrap();
        assert!(r.significant() && r.fraction_not_positive == 0.0);
        let r = paired_bootstrap(&b, &a, 2000, 3).unwrap();
        assert!(!r.significant());
    }
}
