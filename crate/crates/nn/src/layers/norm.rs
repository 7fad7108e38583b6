use super::{Cache, LayerGrads};
use crate::error::{NnError, Result};
use crate::tensor::Tensor4;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Per-channel batch normalization over (batch, height, width).
///
/// Training mode normalizes by batch statistics (biased variance) and
/// folds them into the running estimates; eval mode normalizes by the
/// running estimates.
#[derive(Debug, Clone)]
pub struct BatchNorm2d {
    pub channels: usize,
    pub eps: f64,
    pub momentum: f64,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BnCache {
    xhat: Tensor4,
    inv_std: Vec<f64>,
    training: bool,
}

impl BatchNorm2d {
    pub fn new<R: Rng>(channels: usize, rng: &mut R) -> Self {
        let normal = Normal::new(1.0, 0.02).unwrap();
        BatchNorm2d {
            channels,
            eps: 1e-5,
            momentum: 0.1,
            gamma: (0..channels).map(|_| normal.sample(rng)).collect(),
            beta: vec![0.0; channels],
            running_mean: vec![0.0; channels],
            running_var: vec![1.0; channels],
        }
    }

    pub(super) fn forward(&mut self, x: &Tensor4, training: bool) -> Result<(Tensor4, Cache)> {
        if x.c != self.channels {
            return Err(NnError::ShapeMismatch {
                layer: "batchnorm".into(),
                expected: format!("{} channels", self.channels),
                actual: format!("{} channels", x.c),
            });
        }
        let (n, c, hw) = (x.n, x.c, x.h * x.w);
        let m = (n * hw) as f64;
        let mut xhat = Tensor4::zeros(x.n, x.c, x.h, x.w);
        let mut inv_std = vec![0.0; c];
        let mut y = Tensor4::zeros(x.n, x.c, x.h, x.w);

        for ch in 0..c {
            let (mean, var) = if training {
                let mut sum = 0.0;
                for b in 0..n {
                    let base = (b * c + ch) * hw;
                    for v in &x.data[base..base + hw] {
                        sum += v;
                    }
                }
                let mean = sum / m;
                let mut sq = 0.0;
                for b in 0..n {
                    let base = (b * c + ch) * hw;
                    for v in &x.data[base..base + hw] {
                        let d = v - mean;
                        sq += d * d;
                    }
                }
                let var = sq / m;
                self.running_mean[ch] =
                    (1.0 - self.momentum) * self.running_mean[ch] + self.momentum * mean;
                self.running_var[ch] =
                    (1.0 - self.momentum) * self.running_var[ch] + self.momentum * var;
                (mean, var)
            } else {
                (self.running_mean[ch], self.running_var[ch])
            };
            let istd = 1.0 / (var + self.eps).sqrt();
            inv_std[ch] = istd;
            let (g, be) = (self.gamma[ch], self.beta[ch]);
            for b in 0..n {
                let base = (b * c + ch) * hw;
                for j in base..base + hw {
                    let xh = (x.data[j] - mean) * istd;
                    xhat.data[j] = xh;
                    y.data[j] = g * xh + be;
                }
            }
        }
        Ok((
            y,
            Cache::BatchNorm(BnCache {
                xhat,
                inv_std,
                training,
            }),
        ))
    }

    pub(super) fn backward(&self, cache: &BnCache, gy: &Tensor4) -> (Tensor4, LayerGrads) {
        let (n, c, hw) = (gy.n, gy.c, gy.h * gy.w);
        let m = (n * hw) as f64;
        let mut gx = Tensor4::zeros(gy.n, gy.c, gy.h, gy.w);
        let mut dgamma = vec![0.0; c];
        let mut dbeta = vec![0.0; c];
        for ch in 0..c {
            let mut sg = 0.0; // sum gy * xhat
            let mut sb = 0.0; // sum gy
            for b in 0..n {
                let base = (b * c + ch) * hw;
                for j in base..base + hw {
                    sg += gy.data[j] * cache.xhat.data[j];
                    sb += gy.data[j];
                }
            }
            dgamma[ch] = sg;
            dbeta[ch] = sb;
            let scale = self.gamma[ch] * cache.inv_std[ch];
            if cache.training {
                // batch statistics couple every element of the channel
                for b in 0..n {
                    let base = (b * c + ch) * hw;
                    for j in base..base + hw {
                        gx.data[j] =
                            scale * (gy.data[j] - sb / m - cache.xhat.data[j] * sg / m);
                    }
                }
            } else {
                for b in 0..n {
                    let base = (b * c + ch) * hw;
                    for j in base..base + hw {
                        gx.data[j] = scale * gy.data[j];
                    }
                }
            }
        }
        (
            gx,
            LayerGrads {
                arrays: vec![dgamma, dbeta],
            },
        )
    }
}
