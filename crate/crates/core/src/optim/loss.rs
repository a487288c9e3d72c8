use log::warn;

/// Probabilities below this are clamped before taking a logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

/// Clamp `p` to [`PROB_FLOOR`], warning when the floor is hit.
pub fn clamp_probability(p: f64) -> f64 {
    if p <= PROB_FLOOR || !p.is_finite() {
        warn!("label probability {p:e} at or below floor {PROB_FLOOR:e}; circuit output is degenerate");
        PROB_FLOOR
    } else {
        p
    }
}

/// Weighted cross-entropy of one sample: `-w · ln P_y`.
pub fn sample_loss(class_probs: &[f64], label: usize, weight: f64) -> f64 {
    if weight == 0.0 {
        return 0.0;
    }
    -weight * clamp_probability(class_probs[label]).ln()
}

/// Sum of [`sample_loss`] over a batch.
pub fn batch_loss<'a>(items: impl IntoIterator<Item = (&'a [f64], usize, f64)>) -> f64 {
    items.into_iter().map(|(p, y, w)| sample_loss(p, y, w)).sum()
}
