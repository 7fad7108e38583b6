//! Binary cross-entropy, as a value plus the gradient wrt the inputs.

use crate::error::{NnError, Result};
use crate::tensor::Tensor4;

/// Clamp for probabilities so the logs stay finite.
const P_CLAMP: f64 = 1e-12;

/// BCE over probabilities in (0,1): `-mean(t*ln(p) + (1-t)*ln(1-p))`.
///
/// Returns the scalar loss and `dL/dp`.
pub fn bce(probs: &Tensor4, targets: &Tensor4) -> Result<(f64, Tensor4)> {
    if probs.data.len() != targets.data.len() {
        return Err(NnError::ShapeMismatch {
            layer: "bce".into(),
            expected: format!("{} values", probs.data.len()),
            actual: format!("{} values", targets.data.len()),
        });
    }
    let n = probs.data.len() as f64;
    let mut loss = 0.0;
    let mut grad = Tensor4::zeros(probs.n, probs.c, probs.h, probs.w);
    for (i, (&p, &t)) in probs.data.iter().zip(&targets.data).enumerate() {
        let pc = p.clamp(P_CLAMP, 1.0 - P_CLAMP);
        loss -= t * pc.ln() + (1.0 - t) * (1.0 - pc).ln();
        grad.data[i] = (-t / pc + (1.0 - t) / (1.0 - pc)) / n;
    }
    Ok((loss / n, grad))
}

/// BCE against raw scores: numerically stable
/// `mean(softplus(z) - t*z)`, gradient `(sigmoid(z) - t)/n`.
pub fn bce_with_logits(logits: &Tensor4, targets: &Tensor4) -> Result<(f64, Tensor4)> {
    if logits.data.len() != targets.data.len() {
        return Err(NnError::ShapeMismatch {
            layer: "bce_with_logits".into(),
            expected: format!("{} values", logits.data.len()),
            actual: format!("{} values", targets.data.len()),
        });
    }
    let n = logits.data.len() as f64;
    let mut loss = 0.0;
    let mut grad = Tensor4::zeros(logits.n, logits.c, logits.h, logits.w);
    for (i, (&z, &t)) in logits.data.iter().zip(&targets.data).enumerate() {
        // softplus(z) = max(z, 0) + ln(1 + exp(-|z|))
        loss += z.max(0.0) + (1.0 + (-z.abs()).exp()).ln() - t * z;
        let sig = 1.0 / (1.0 + (-z).exp());
        grad.data[i] = (sig - t) / n;
    }
    Ok((loss / n, grad))
}
