//! L2-regularized binary logistic regression, fit by deterministic
//! full-batch gradient descent.
//!
//! The trainer is shared by the attribute classifier behind RNSB and by the
//! bag-of-embeddings stand-in hate-speech classifier. The loss is the mean
//! log-loss plus `reg/2 * ||w||^2` (bias unregularized); the step starts at
//! 0.1 and is halved whenever a step would increase the loss, so the loss
//! trace is non-increasing. Training stops when the gradient max-norm drops
//! below 1e-6 or after 10000 iterations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 10_000;
const GRADIENT_TOLERANCE: f64 = 1e-6;
const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-12;
/// Predicted probabilities are clamped into this open interval.
const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub regularization: f64,
    pub seed: u64,
}

impl LogisticRegression {
    /// Fit on dense feature rows with binary labels (`true` = class 1).
    pub fn train(features: &[Vec<f64>], labels: &[bool], reg: f64, seed: u64) -> Result<Self> {
        Self::train_traced(features, labels, reg, seed).map(|(model, _)| model)
    }

    /// Like [`train`], returning the per-iteration loss trace as well.
    ///
    /// [`train`]: LogisticRegression::train
    pub fn train_traced(
        features: &[Vec<f64>],
        labels: &[bool],
        reg: f64,
        seed: u64,
    ) -> Result<(Self, Vec<f64>)> {
        if features.is_empty() {
            return Err(Error::DegenerateInput("no training examples".into()));
        }
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: labels.len(),
            });
        }
        if reg <= 0.0 || !reg.is_finite() {
            return Err(Error::InvalidParameter(
                "regularization strength must be positive".into(),
            ));
        }
        let dim = features[0].len();
        if features.iter().any(|f| f.len() != dim) {
            return Err(Error::DegenerateInput(
                "feature rows have mixed dimensions".into(),
            ));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.01..0.01)).collect();
        let mut bias: f64 = rng.gen_range(-0.01..0.01);

        let n_inv = 1.0 / features.len() as f64;
        let loss_of = |w: &[f64], b: f64| -> f64 {
            let mut loss = 0.0;
            for (x, &y) in features.iter().zip(labels) {
                let z = dot(w, x) + b;
                // log(1 + e^z) - y*z, the numerically stable log-loss
                loss += softplus(z) - if y { z } else { 0.0 };
            }
            loss * n_inv + 0.5 * reg * dot(w, w)
        };

        let mut step = INITIAL_STEP;
        let mut loss = loss_of(&weights, bias);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss);
        }
        let mut trace = vec![loss];

        let mut grad_w = vec![0.0; dim];
        for _ in 0..MAX_ITERATIONS {
            grad_w.iter_mut().for_each(|g| *g = 0.0);
            let mut grad_b = 0.0;
            for (x, &y) in features.iter().zip(labels) {
                let p = sigmoid(dot(&weights, x) + bias);
                let residual = p - if y { 1.0 } else { 0.0 };
                for (g, v) in grad_w.iter_mut().zip(x) {
                    *g += residual * v;
                }
                grad_b += residual;
            }
            for (g, w) in grad_w.iter_mut().zip(&weights) {
                *g = *g * n_inv + reg * w;
            }
            grad_b *= n_inv;

            let grad_max = grad_w
                .iter()
                .chain(std::iter::once(&grad_b))
                .fold(0.0f64, |m, g| m.max(g.abs()));
            if grad_max < GRADIENT_TOLERANCE {
                break;
            }

            // backtrack until the step does not increase the loss
            loop {
                let cand_w: Vec<f64> = weights
                    .iter()
                    .zip(&grad_w)
                    .map(|(w, g)| w - step * g)
                    .collect();
                let cand_b = bias - step * grad_b;
                let cand_loss = loss_of(&cand_w, cand_b);
                if !cand_loss.is_finite() {
                    return Err(Error::NonFiniteLoss);
                }
                if cand_loss <= loss || step < MIN_STEP {
                    weights = cand_w;
                    bias = cand_b;
                    loss = cand_loss;
                    break;
                }
                step *= 0.5;
            }
            trace.push(loss);
        }

        Ok((
            Self {
                weights,
                bias,
                regularization: reg,
                seed,
            },
            trace,
        ))
    }

    /// P(class 1 | x), clamped into the open interval (0, 1).
    pub fn predict_probability(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.predict_probability(x) >= 0.5
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow for large z.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}
