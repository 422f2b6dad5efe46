//! Deterministic soft-margin linear classifier.
//!
//! Minimizes (1/2)‖w‖² + C·Σ max(0, 1 − yᵢ(w·fᵢ + b)) by dual coordinate
//! descent with a seeded permutation order, so identical inputs and seed
//! give bit-identical weights. The bias is folded in as a constant extra
//! feature (and therefore regularized, as in common linear solvers).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::LabelMap;
use crate::error::{Result, SistError};
use crate::transform::FeatureMatrix;

/// Weight vector, bias and training provenance of the linear classifier.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub reg_c: f64,
    pub label_map: LabelMap,
    pub train_meta: TrainMeta,
}

#[derive(Debug, Clone)]
pub struct TrainMeta {
    /// Epochs actually performed.
    pub iterations: usize,
    /// Final dual objective value.
    pub final_objective: f64,
    pub seed: u64,
    /// Dual objective after each epoch; non-increasing by construction.
    pub objective_curve: Vec<f64>,
}

impl LinearModel {
    /// Raw decision value w·f + b.
    pub fn decision(&self, features: &[f64]) -> f64 {
        let dot: f64 = self.weights.iter().zip(features).map(|(w, f)| w * f).sum();
        dot + self.bias
    }
}

/// Trains the classifier. `labels` are canonical ±1 values aligned with the
/// feature rows. Stops when the largest projected dual gradient falls below
/// `tol` or after `max_iter` epochs.
pub fn train_linear(
    features: &FeatureMatrix,
    labels: &[i8],
    reg_c: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<LinearModel> {
    let n = features.rows();
    if n != labels.len() {
        return Err(SistError::LengthMismatch { left: n, right: labels.len() });
    }
    if !labels.contains(&1) || !labels.contains(&-1) {
        return Err(SistError::SingleClass);
    }
    assert!(reg_c > 0.0, "regularization constant must be positive");
    let dim = features.cols();

    // augmented vectors: [f, 1] so the last weight acts as the bias
    let q_diag: Vec<f64> = (0..n)
        .map(|i| features.row(i).iter().map(|v| v * v).sum::<f64>() + 1.0)
        .collect();

    let mut w = vec![0.0; dim + 1];
    let mut alpha = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curve = Vec::new();
    let mut epochs = 0;

    for _ in 0..max_iter {
        epochs += 1;
        order.shuffle(&mut rng);
        let mut max_violation = 0.0f64;
        for &i in &order {
            let row = features.row(i);
            let y = f64::from(labels[i]);
            let margin: f64 =
                w[..dim].iter().zip(row).map(|(wj, fj)| wj * fj).sum::<f64>() + w[dim];
            let grad = y * margin - 1.0;
            let projected = if alpha[i] <= 0.0 {
                grad.min(0.0)
            } else if alpha[i] >= reg_c {
                grad.max(0.0)
            } else {
                grad
            };
            max_violation = max_violation.max(projected.abs());
            if projected.abs() > 1e-14 {
                let next = (alpha[i] - grad / q_diag[i]).clamp(0.0, reg_c);
                let delta = next - alpha[i];
                if delta != 0.0 {
                    for (wj, fj) in w[..dim].iter_mut().zip(row) {
                        *wj += delta * y * fj;
                    }
                    w[dim] += delta * y;
                    alpha[i] = next;
                }
            }
        }
        curve.push(dual_objective(&w, &alpha));
        if max_violation < tol {
            break;
        }
    }

    let bias = w[dim];
    w.truncate(dim);
    Ok(LinearModel {
        weights: w,
        bias,
        reg_c,
        label_map: LabelMap::new("-1", "+1"),
        train_meta: TrainMeta {
            iterations: epochs,
            final_objective: curve.last().copied().unwrap_or(0.0),
            seed,
            objective_curve: curve,
        },
    })
}

/// Dual objective (1/2)‖w‖² − Σαᵢ; each coordinate update minimizes this in
/// one variable, so the recorded curve never increases.
fn dual_objective(w: &[f64], alpha: &[f64]) -> f64 {
    0.5 * w.iter().map(|v| v * v).sum::<f64>() - alpha.iter().sum::<f64>()
}

/// Per-row sign(w·f + b) as canonical labels; sign(0) maps to +1.
pub fn predict(model: &LinearModel, features: &FeatureMatrix) -> Result<Vec<i8>> {
    if features.cols() != model.weights.len() {
        return Err(SistError::DimensionMismatch {
            got: features.cols(),
            expected: model.weights.len(),
        });
    }
    Ok((0..features.rows())
        .map(|i| if model.decision(features.row(i)) >= 0.0 { 1 } else { -1 })
        .collect())
}

/// Fraction of exact matches between two label vectors.
pub fn accuracy(pred: &[i8], truth: &[i8]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(SistError::LengthMismatch { left: pred.len(), right: truth.len() });
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pred.len() as f64)
}
