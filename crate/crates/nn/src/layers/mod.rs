//! Layer zoo: fully-connected, stride-2 conv/deconv, batch norm,
//! activations, and a shape-only reshape. Forward returns the output
//! plus an opaque cache; backward consumes the cache and produces the
//! input gradient and per-parameter gradients.

mod conv;
mod norm;

pub use conv::{Conv2d, Deconv2d};
pub use norm::{BatchNorm2d, BnCache};

use crate::error::{NnError, Result};
use crate::tensor::Tensor4;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Kernel side length shared by every conv/deconv layer.
pub const KERNEL: usize = 4;
/// Spatial stride shared by every conv/deconv layer.
pub const STRIDE: usize = 2;
/// Zero padding shared by every conv/deconv layer.
pub const PAD: usize = 1;

/// Gradients for one layer, aligned with [`Layer::param_arrays_mut`].
#[derive(Debug, Clone, Default)]
pub struct LayerGrads {
    pub arrays: Vec<Vec<f64>>,
}

impl LayerGrads {
    pub fn none() -> Self {
        LayerGrads { arrays: Vec::new() }
    }

    /// Elementwise accumulate (used when a step sums several backward passes).
    pub fn add_assign(&mut self, other: &LayerGrads) {
        debug_assert_eq!(self.arrays.len(), other.arrays.len());
        for (a, b) in self.arrays.iter_mut().zip(&other.arrays) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

/// Fully-connected layer. Flattens whatever spatial shape arrives.
#[derive(Debug, Clone)]
pub struct Fc {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major `[out_dim][in_dim]`.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Fc {
    pub fn new<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, 0.02).unwrap();
        Fc {
            in_dim,
            out_dim,
            weight: (0..in_dim * out_dim).map(|_| normal.sample(rng)).collect(),
            bias: vec![0.0; out_dim],
        }
    }

    fn forward(&self, x: &Tensor4) -> Result<Tensor4> {
        if x.stride_n() != self.in_dim {
            return Err(NnError::ShapeMismatch {
                layer: "fc".into(),
                expected: format!("{} features", self.in_dim),
                actual: format!("{}x{}x{} = {}", x.c, x.h, x.w, x.stride_n()),
            });
        }
        let n = x.n;
        let mut out = Tensor4::zeros(n, self.out_dim, 1, 1);
        let (w, bias, in_dim, out_dim) = (&self.weight, &self.bias, self.in_dim, self.out_dim);
        let xdata = &x.data;
        crate::par::for_each_chunk_mut(&mut out.data, out_dim, |b, yrow| {
            let xrow = &xdata[b * in_dim..(b + 1) * in_dim];
            for (o, y) in yrow.iter_mut().enumerate() {
                let wrow = &w[o * in_dim..(o + 1) * in_dim];
                let mut acc = bias[o];
                for (xi, wi) in xrow.iter().zip(wrow) {
                    acc += xi * wi;
                }
                *y = acc;
            }
        });
        Ok(out)
    }

    fn backward(&self, x: &Tensor4, gy: &Tensor4) -> (Tensor4, LayerGrads) {
        let n = x.n;
        let (in_dim, out_dim) = (self.in_dim, self.out_dim);
        let mut gx = Tensor4::zeros(x.n, x.c, x.h, x.w);
        let w = &self.weight;
        let gydata = &gy.data;
        crate::par::for_each_chunk_mut(&mut gx.data, in_dim, |b, gxrow| {
            let grow = &gydata[b * out_dim..(b + 1) * out_dim];
            for (o, g) in grow.iter().enumerate() {
                let wrow = &w[o * in_dim..(o + 1) * in_dim];
                for (gxi, wi) in gxrow.iter_mut().zip(wrow) {
                    *gxi += g * wi;
                }
            }
        });
        let mut dw = vec![0.0; in_dim * out_dim];
        let xdata = &x.data;
        crate::par::for_each_chunk_mut(&mut dw, in_dim, |o, dwrow| {
            for b in 0..n {
                let g = gydata[b * out_dim + o];
                let xrow = &xdata[b * in_dim..(b + 1) * in_dim];
                for (d, xi) in dwrow.iter_mut().zip(xrow) {
                    *d += g * xi;
                }
            }
        });
        let mut db = vec![0.0; out_dim];
        for b in 0..n {
            for o in 0..out_dim {
                db[o] += gydata[b * out_dim + o];
            }
        }
        (gx, LayerGrads { arrays: vec![dw, db] })
    }
}

/// One network layer. Conv and deconv are pinned to 4x4 kernels with
/// stride 2 and padding 1, so conv halves and deconv doubles the
/// spatial dimensions.
#[derive(Debug, Clone)]
pub enum Layer {
    Fc(Fc),
    Conv(Conv2d),
    Deconv(Deconv2d),
    BatchNorm(BatchNorm2d),
    LeakyRelu(f64),
    Sigmoid,
    Tanh,
    /// Reinterpret the per-batch payload as `(c, h, w)`.
    Reshape { c: usize, h: usize, w: usize },
}

/// Forward bookkeeping consumed by the matching backward call.
#[derive(Debug, Clone)]
pub enum Cache {
    Fc { x: Tensor4 },
    Conv { xp: Tensor4, h: usize, w: usize },
    Deconv { x: Tensor4 },
    BatchNorm(BnCache),
    /// Activations only need their own output.
    Act { y: Tensor4 },
    Reshape { c: usize, h: usize, w: usize },
}

impl Layer {
    pub fn kind(&self) -> &'static str {
        match self {
            Layer::Fc(_) => "fc",
            Layer::Conv(_) => "conv",
            Layer::Deconv(_) => "deconv",
            Layer::BatchNorm(_) => "batchnorm",
            Layer::LeakyRelu(_) => "leaky_relu",
            Layer::Sigmoid => "sigmoid",
            Layer::Tanh => "tanh",
            Layer::Reshape { .. } => "reshape",
        }
    }

    pub fn forward(&mut self, x: &Tensor4, training: bool) -> Result<(Tensor4, Cache)> {
        match self {
            Layer::Fc(fc) => {
                let y = fc.forward(x)?;
                Ok((y, Cache::Fc { x: x.clone() }))
            }
            Layer::Conv(c) => c.forward(x),
            Layer::Deconv(d) => {
                let y = d.forward(x)?;
                Ok((y, Cache::Deconv { x: x.clone() }))
            }
            Layer::BatchNorm(bn) => bn.forward(x, training),
            Layer::LeakyRelu(slope) => {
                let s = *slope;
                let mut y = x.clone();
                for v in &mut y.data {
                    if *v < 0.0 {
                        *v *= s;
                    }
                }
                Ok((y.clone(), Cache::Act { y }))
            }
            Layer::Sigmoid => {
                let mut y = x.clone();
                for v in &mut y.data {
                    *v = 1.0 / (1.0 + (-*v).exp());
                }
                Ok((y.clone(), Cache::Act { y }))
            }
            Layer::Tanh => {
                let mut y = x.clone();
                for v in &mut y.data {
                    *v = v.tanh();
                }
                Ok((y.clone(), Cache::Act { y }))
            }
            Layer::Reshape { c, h, w } => {
                let cache = Cache::Reshape { c: x.c, h: x.h, w: x.w };
                let y = x.clone().reshaped(*c, *h, *w)?;
                Ok((y, cache))
            }
        }
    }

    pub fn backward(&self, cache: &Cache, gy: &Tensor4) -> Result<(Tensor4, LayerGrads)> {
        match (self, cache) {
            (Layer::Fc(fc), Cache::Fc { x }) => Ok(fc.backward(x, gy)),
            (Layer::Conv(c), Cache::Conv { xp, h, w }) => Ok(c.backward(xp, *h, *w, gy)),
            (Layer::Deconv(d), Cache::Deconv { x }) => Ok(d.backward(x, gy)),
            (Layer::BatchNorm(bn), Cache::BatchNorm(bc)) => Ok(bn.backward(bc, gy)),
            (Layer::LeakyRelu(slope), Cache::Act { y }) => {
                let mut gx = gy.clone();
                for (g, v) in gx.data.iter_mut().zip(&y.data) {
                    if *v < 0.0 {
                        *g *= slope;
                    }
                }
                Ok((gx, LayerGrads::none()))
            }
            (Layer::Sigmoid, Cache::Act { y }) => {
                let mut gx = gy.clone();
                for (g, v) in gx.data.iter_mut().zip(&y.data) {
                    *g *= v * (1.0 - v);
                }
                Ok((gx, LayerGrads::none()))
            }
            (Layer::Tanh, Cache::Act { y }) => {
                let mut gx = gy.clone();
                for (g, v) in gx.data.iter_mut().zip(&y.data) {
                    *g *= 1.0 - v * v;
                }
                Ok((gx, LayerGrads::none()))
            }
            (Layer::Reshape { .. }, Cache::Reshape { c, h, w }) => {
                let gx = gy.clone().reshaped(*c, *h, *w)?;
                Ok((gx, LayerGrads::none()))
            }
            _ => Err(NnError::MissingCache(self.kind().into())),
        }
    }

    /// Trainable parameter arrays in a fixed order (weights before biases,
    /// scale before shift). Running statistics are not trainable.
    pub fn param_arrays_mut(&mut self) -> Vec<&mut Vec<f64>> {
        match self {
            Layer::Fc(fc) => vec![&mut fc.weight, &mut fc.bias],
            Layer::Conv(c) => vec![&mut c.weight, &mut c.bias],
            Layer::Deconv(d) => vec![&mut d.weight, &mut d.bias],
            Layer::BatchNorm(bn) => vec![&mut bn.gamma, &mut bn.beta],
            _ => Vec::new(),
        }
    }

    pub fn param_arrays(&self) -> Vec<&Vec<f64>> {
        match self {
            Layer::Fc(fc) => vec![&fc.weight, &fc.bias],
            Layer::Conv(c) => vec![&c.weight, &c.bias],
            Layer::Deconv(d) => vec![&d.weight, &d.bias],
            Layer::BatchNorm(bn) => vec![&bn.gamma, &bn.beta],
            _ => Vec::new(),
        }
    }
}
