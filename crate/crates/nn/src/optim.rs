//! Adam and plain SGD over lists of parameter arrays.

use crate::error::{NnError, Result};

/// Adam with bias correction. Defaults follow the DCGAN recipe:
/// lr 2e-4, beta1 0.5, beta2 0.999, eps 1e-8.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(lr: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        Adam {
            lr,
            beta1,
            beta2,
            eps,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn dcgan(lr: f64) -> Self {
        Adam::new(lr, 0.5, 0.999, 1e-8)
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One update. `params` and `grads` must be aligned; moment buffers
    /// are created lazily on the first call.
    pub fn step(&mut self, params: &mut [&mut Vec<f64>], grads: &[&[f64]]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(NnError::ShapeMismatch {
                layer: "adam".into(),
                expected: format!("{} arrays", params.len()),
                actual: format!("{} arrays", grads.len()),
            });
        }
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.v = params.iter().map(|p| vec![0.0; p.len()]).collect();
        }
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            if p.len() != g.len() {
                return Err(NnError::ShapeMismatch {
                    layer: "adam".into(),
                    expected: format!("{} values in array {}", p.len(), k),
                    actual: format!("{} values", g.len()),
                });
            }
            if !g.iter().all(|v| v.is_finite()) {
                return Err(NnError::NonFinite(format!("gradient array {}", k)));
            }
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            for i in 0..g.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let mhat = m[i] / bc1;
                let vhat = v[i] / bc2;
                p[i] -= self.lr * mhat / (vhat.sqrt() + self.eps);
            }
        }
        Ok(())
    }
}

/// Plain gradient descent.
#[derive(Debug, Clone)]
pub struct Sgd {
    pub lr: f64,
}

impl Sgd {
    pub fn new(lr: f64) -> Self {
        Sgd { lr }
    }

    pub fn step(&self, params: &mut [&mut Vec<f64>], grads: &[&[f64]]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(NnError::ShapeMismatch {
                layer: "sgd".into(),
                expected: format!("{} arrays", params.len()),
                actual: format!("{} arrays", grads.len()),
            });
        }
        for (p, g) in params.iter_mut().zip(grads) {
            if !g.iter().all(|v| v.is_finite()) {
                return Err(NnError::NonFinite("gradient".into()));
            }
            for (pi, gi) in p.iter_mut().zip(*g) {
                *pi -= self.lr * gi;
            }
        }
        Ok(())
    }
}
