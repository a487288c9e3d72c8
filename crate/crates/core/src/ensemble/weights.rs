use crate::{Error, Result};

/// Default magnitude cap on classifier weights, `ln 10⁶`.
pub const DEFAULT_ALPHA_CAP: f64 = 13.815_510_557_964_274;

pub fn init_weights(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("cannot weight an empty training set"));
    }
    Ok(vec![1.0 / n as f64; n])
}

fn check_lengths(n: usize, others: &[usize]) -> Result<()> {
    if others.iter().any(|&m| m != n) {
        return Err(Error::domain(format!("per-sample arrays disagree in length: {n} vs {others:?}")));
    }
    Ok(())
}

fn normalize(mut w: Vec<f64>) -> Result<Vec<f64>> {
    let z: f64 = w.iter().sum();
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Numerical(format!("sample weights lost their mass (Z = {z})")));
    }
    w.iter_mut().for_each(|x| *x /= z);
    Ok(w)
}

/// Confidence-weighted reweighting: correct samples shrink by `e^{-P}`,
/// wrong ones grow by `e^{P}`, then the vector is renormalized.
pub fn update_weights(w: &[f64], predictions: &[usize], confidences: &[f64], labels: &[usize]) -> Result<Vec<f64>> {
    check_lengths(w.len(), &[predictions.len(), confidences.len(), labels.len()])?;
    let next = w
        .iter()
        .zip(predictions.iter().zip(labels))
        .zip(confidences)
        .map(|((&wi, (p, y)), &conf)| wi * if p == y { (-conf).exp() } else { conf.exp() })
        .collect();
    normalize(next)
}

/// Confidence mass on correct and on wrong predictions.
pub fn confidence_masses(w: &[f64], predictions: &[usize], confidences: &[f64], labels: &[usize]) -> (f64, f64) {
    let mut masses = (0.0, 0.0);
    for i in 0..w.len() {
        let m = w[i] * confidences[i];
        if predictions[i] == labels[i] {
            masses.0 += m;
        } else {
            masses.1 += m;
        }
    }
    masses
}

/// `ln(c · P_true / P_false)`, clamped to `[-cap, cap]`.
pub fn alpha_from_masses(p_true: f64, p_false: f64, c: f64, cap: f64) -> f64 {
    if p_false <= 0.0 {
        log::warn!("no confidence mass on wrong predictions; classifier weight capped at {cap:.3}");
        return cap;
    }
    if p_true <= 0.0 {
        log::warn!("no confidence mass on correct predictions; classifier weight capped at {:.3}", -cap);
        return -cap;
    }
    (c * p_true / p_false).ln().clamp(-cap, cap)
}

pub fn classifier_weight(
    w: &[f64],
    predictions: &[usize],
    confidences: &[f64],
    labels: &[usize],
    c: f64,
    cap: f64,
) -> Result<f64> {
    check_lengths(w.len(), &[predictions.len(), confidences.len(), labels.len()])?;
    let (t, f) = confidence_masses(w, predictions, confidences, labels);
    Ok(alpha_from_masses(t, f, c, cap))
}

/// Weighted error of hard predictions.
pub fn weighted_error(w: &[f64], predictions: &[usize], labels: &[usize]) -> f64 {
    w.iter().zip(predictions.iter().zip(labels)).filter(|(_, (p, y))| p != y).map(|(wi, _)| wi).sum()
}

/// `ln((1 − e)/e) + ln(K − 1)`, clamped to `[-cap, cap]`.
pub fn samme_alpha(error: f64, n_classes: usize, cap: f64) -> f64 {
    let k_term = ((n_classes.max(2) - 1) as f64).ln();
    if error <= 0.0 {
        log::warn!("weak classifier has zero weighted error; weight capped at {cap:.3}");
        return cap;
    }
    if error >= 1.0 {
        return -cap;
    }
    (((1.0 - error) / error).ln() + k_term).clamp(-cap, cap)
}

/// Misclassified samples grow by `e^α`, then renormalize.
pub fn update_weights_m1(w: &[f64], predictions: &[usize], labels: &[usize], alpha: f64) -> Result<Vec<f64>> {
    check_lengths(w.len(), &[predictions.len(), labels.len()])?;
    let grow = alpha.exp();
    normalize(
        w.iter().zip(predictions.iter().zip(labels)).map(|(&wi, (p, y))| if p == y { wi } else { wi * grow }).collect(),
    )
}

/// Shannon entropy `-Σ w ln w` in nats.
pub fn weight_entropy(w: &[f64]) -> f64 {
    -w.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_init() {
        assert_eq!(init_weights(4).unwrap(), vec![0.25; 4]);
        assert_eq!(init_weights(1).unwrap(), vec![1.0]);
        assert!(init_weights(0).is_err());
        let w = init_weights(3600).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_sample_update() {
        let w = update_weights(&[0.5, 0.5], &[1, 0], &[0.8, 0.6], &[1, 1]).unwrap();
        let (a, b) = (0.5 * (-0.8f64).exp(), 0.5 * 0.6f64.exp());
        assert!((w[0] - a / (a + b)).abs() < 1e-15);
        assert!((w[1] - b / (a + b)).abs() < 1e-15);
    }

    #[test]
    fn neutral_updates() {
        let w = vec![0.1, 0.2, 0.7];
        let same = update_weights(&w, &[0, 1, 2], &[0.4; 3], &[0, 1, 2]).unwrap();
        let zero = update_weights(&w, &[1, 1, 1], &[0.0; 3], &[0, 1, 2]).unwrap();
        for (a, b) in w.iter().zip(same.iter().zip(&zero)) {
            assert!((a - b.0).abs() < 1e-15 && (a - b.1).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_cases() {
        let a = classifier_weight(&[0.5, 0.5], &[0, 0], &[0.7, 0.7], &[0, 1], 1.0, DEFAULT_ALPHA_CAP).unwrap();
        assert!(a.abs() < 1e-15);
        let a = classifier_weight(&[0.25; 4], &[0, 0, 0, 0], &[1.0; 4], &[0, 0, 0, 1], 1.0, DEFAULT_ALPHA_CAP).unwrap();
        assert!((a - 3f64.ln()).abs() < 1e-15);
        assert_eq!(alpha_from_masses(0.3, 0.0, 1.0, DEFAULT_ALPHA_CAP), DEFAULT_ALPHA_CAP);
        assert_eq!(alpha_from_masses(0.0, 0.3, 1.0, DEFAULT_ALPHA_CAP), -DEFAULT_ALPHA_CAP);
        assert!((DEFAULT_ALPHA_CAP - 1e6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn samme_cases() {
        assert!((samme_alpha(0.25, 2, 50.0) - 3f64.ln()).abs() < 1e-15);
        assert!(samme_alpha(0.9, 10, 50.0).abs() < 1e-12);
        assert_eq!(samme_alpha(0.0, 10, 7.0), 7.0);
        let w = update_weights_m1(&[0.5, 0.5], &[0, 0], &[0, 1], 2f64.ln()).unwrap();
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-15);
    }
}
