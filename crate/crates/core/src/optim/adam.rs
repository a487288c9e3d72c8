use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Denominator floor in the Adam family updates.
pub const ADAM_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Adam,
    /// Adam with a Nesterov look-ahead on the first moment.
    Nadam,
}

/// Moment estimates and hyperparameters of an Adam-family optimizer.
///
/// [`step`](Self::step) returns the *descent* delta to add to the
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub kind: OptimizerKind,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub learning_rate: f64,
    pub epsilon: f64,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, n: usize, learning_rate: f64, beta1: f64, beta2: f64) -> Self {
        Self { kind, m: vec![0.0; n], v: vec![0.0; n], t: 0, beta1, beta2, learning_rate, epsilon: ADAM_EPSILON }
    }

    pub fn adam(n: usize, learning_rate: f64) -> Self {
        Self::new(OptimizerKind::Adam, n, learning_rate, 0.9, 0.999)
    }

    pub fn nadam(n: usize, learning_rate: f64) -> Self {
        Self::new(OptimizerKind::Nadam, n, learning_rate, 0.9, 0.999)
    }

    /// Consume one gradient and return the parameter delta. A gradient with
    /// a non-finite entry is rejected and leaves the state untouched.
    pub fn step(&mut self, grad: &[f64]) -> Result<Vec<f64>> {
        if grad.len() != self.m.len() {
            return Err(Error::domain(format!(
                "gradient has {} entries, optimizer tracks {}",
                grad.len(),
                self.m.len()
            )));
        }
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::Numerical(format!("non-finite gradient entry {i}: {}", grad[i])));
        }
        self.t += 1;
        let t = self.t as i32;
        let (b1, b2) = (self.beta1, self.beta2);
        let bias1 = 1.0 - b1.powi(t);
        let bias2 = 1.0 - b2.powi(t);
        let next_bias1 = 1.0 - b1.powi(t + 1);
        let mut delta = Vec::with_capacity(grad.len());
        for ((m, v), &g) in self.m.iter_mut().zip(self.v.iter_mut()).zip(grad) {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let v_hat = *v / bias2;
            let m_hat = match self.kind {
                OptimizerKind::Adam => *m / bias1,
                OptimizerKind::Nadam => b1 * *m / next_bias1 + (1.0 - b1) * g / bias1,
            };
            delta.push(-self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon));
        }
        Ok(delta)
    }
}

/// Functional form of an Adam update.
pub fn adam_step(mut state: OptimizerState, grad: &[f64]) -> Result<(OptimizerState, Vec<f64>)> {
    state.kind = OptimizerKind::Adam;
    let delta = state.step(grad)?;
    Ok((state, delta))
}

/// Functional form of a Nadam update.
pub fn nadam_step(mut state: OptimizerState, grad: &[f64]) -> Result<(OptimizerState, Vec<f64>)> {
    state.kind = OptimizerKind::Nadam;
    let delta = state.step(grad)?;
    Ok((state, delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_zero_delta() {
        let (_, d) = adam_step(OptimizerState::adam(3, 0.5), &[0.0; 3]).unwrap();
        assert_eq!(d, vec![0.0; 3]);
        let (_, d) = nadam_step(OptimizerState::nadam(3, 0.5), &[0.0; 3]).unwrap();
        assert_eq!(d, vec![0.0; 3]);
    }

    #[test]
    fn first_adam_step_is_learning_rate() {
        // m̂ = g, v̂ = g² at t = 1, so delta = -γ g/(|g| + 1e-8).
        let (s, d) = adam_step(OptimizerState::adam(1, 0.5), &[1.0]).unwrap();
        assert!((d[0] + 0.5 / (1.0 + 1e-8)).abs() < 1e-15);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn two_constant_steps_stay_in_band() {
        let mut s = OptimizerState::adam(1, 0.5);
        for _ in 0..2 {
            let d = s.step(&[0.3]).unwrap();
            assert!(d[0] < 0.0);
            assert!(d[0].abs() >= 0.9 * 0.5 && d[0].abs() <= 0.5);
        }
    }

    #[test]
    fn nadam_first_step_is_scaled_adam() {
        // t = 1: m̄ = β1 (1-β1) g/(1-β1²) + g = (β1/(1+β1) + 1) g.
        let g = 0.7;
        let (_, adam) = adam_step(OptimizerState::adam(1, 0.1), &[g]).unwrap();
        let (_, nadam) = nadam_step(OptimizerState::nadam(1, 0.1), &[g]).unwrap();
        let factor = 0.9 / 1.9 + 1.0;
        assert!((nadam[0] - factor * adam[0]).abs() < 1e-15);
    }

    #[test]
    fn non_finite_gradient_rejected_without_side_effects() {
        let mut s = OptimizerState::adam(2, 0.1);
        assert!(s.step(&[1.0, f64::NAN]).is_err());
        assert_eq!(s.t, 0);
        assert_eq!(s.m, vec![0.0, 0.0]);
        assert!(s.step(&[1.0]).is_err());
    }

    fn quadratic_grad(x: &[f64], centre: &[f64], scale: &[f64]) -> Vec<f64> {
        x.iter().zip(centre).zip(scale).map(|((x, c), s)| 2.0 * s * (x - c)).collect()
    }

    fn quadratic(x: &[f64], centre: &[f64], scale: &[f64]) -> f64 {
        x.iter().zip(centre).zip(scale).map(|((x, c), s)| s * (x - c).powi(2)).sum()
    }

    #[test]
    fn nadam_converges_on_bowl() {
        let centre = [1.5, -0.5, 0.25];
        let scale = [1.0, 3.0, 0.5];
        let mut x = vec![0.0; 3];
        let mut s = OptimizerState::nadam(3, 0.01);
        for _ in 0..20_000 {
            let d = s.step(&quadratic_grad(&x, &centre, &scale)).unwrap();
            x.iter_mut().zip(&d).for_each(|(x, d)| *x += d);
        }
        for (xi, ci) in x.iter().zip(&centre) {
            assert!((xi - ci).abs() < 1e-6, "{xi} vs {ci}");
        }
    }

    #[test]
    fn descent_is_monotone_after_burn_in() {
        let centre = [2.0, -1.0];
        let scale = [1.0, 2.0];
        for kind in [OptimizerKind::Adam, OptimizerKind::Nadam] {
            let mut x = vec![0.0; 2];
            let mut s = OptimizerState::new(kind, 2, 0.01, 0.9, 0.999);
            let mut prev = quadratic(&x, &centre, &scale);
            for step in 0..150 {
                let d = s.step(&quadratic_grad(&x, &centre, &scale)).unwrap();
                x.iter_mut().zip(&d).for_each(|(x, d)| *x += d);
                let now = quadratic(&x, &centre, &scale);
                if step >= 10 {
                    assert!(now < prev, "{kind:?} step {step}: {now} >= {prev}");
                }
                prev = now;
            }
        }
    }
}
