//! Stride-2 convolution and transposed convolution with 4x4 kernels.
//!
//! Both layers work on a zero-padded copy of their input (or, for the
//! transposed direction, a one-ring-larger output buffer) so the hot
//! loops carry no bounds branches. Batch elements and output channels
//! are processed on disjoint slices, which keeps the parallel build
//! bit-identical to the sequential one.

use super::{Cache, LayerGrads, KERNEL, PAD, STRIDE};
use crate::error::{NnError, Result};
use crate::tensor::Tensor4;
use rand::Rng;
use rand_distr::{Distribution, Normal};

fn pad_one(x: &Tensor4) -> Tensor4 {
    let (n, c, h, w) = (x.n, x.c, x.h, x.w);
    let (hp, wp) = (h + 2 * PAD, w + 2 * PAD);
    let mut xp = Tensor4::zeros(n, c, hp, wp);
    for b in 0..n {
        for ch in 0..c {
            for y in 0..h {
                let src = ((b * c + ch) * h + y) * w;
                let dst = ((b * c + ch) * hp + y + PAD) * wp + PAD;
                xp.data[dst..dst + w].copy_from_slice(&x.data[src..src + w]);
            }
        }
    }
    xp
}

/// Cross-correlation, 4x4 kernel, stride 2, pad 1: halves h and w.
#[derive(Debug, Clone)]
pub struct Conv2d {
    pub in_ch: usize,
    pub out_ch: usize,
    /// `[out_ch][in_ch][4][4]`.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Conv2d {
    pub fn new<R: Rng>(in_ch: usize, out_ch: usize, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, 0.02).unwrap();
        Conv2d {
            in_ch,
            out_ch,
            weight: (0..out_ch * in_ch * KERNEL * KERNEL)
                .map(|_| normal.sample(rng))
                .collect(),
            bias: vec![0.0; out_ch],
        }
    }

    fn check_input(&self, x: &Tensor4) -> Result<()> {
        if x.c != self.in_ch || x.h % STRIDE != 0 || x.w % STRIDE != 0 || x.h == 0 {
            return Err(NnError::ShapeMismatch {
                layer: "conv".into(),
                expected: format!("{} channels, even spatial dims", self.in_ch),
                actual: format!("{}x{}x{}", x.c, x.h, x.w),
            });
        }
        Ok(())
    }

    pub(super) fn forward(&self, x: &Tensor4) -> Result<(Tensor4, Cache)> {
        self.check_input(x)?;
        let (n, ic, h, w) = (x.n, x.c, x.h, x.w);
        let (oc, oh, ow) = (self.out_ch, h / STRIDE, w / STRIDE);
        let (hp, wp) = (h + 2 * PAD, w + 2 * PAD);
        let xp = pad_one(x);
        let mut out = Tensor4::zeros(n, oc, oh, ow);
        let (weight, bias, xpd) = (&self.weight, &self.bias, &xp.data);
        crate::par::for_each_chunk_mut(&mut out.data, oc * oh * ow, |b, chunk| {
            for o in 0..oc {
                let plane = &mut chunk[o * oh * ow..(o + 1) * oh * ow];
                plane.fill(bias[o]);
                for i in 0..ic {
                    for ky in 0..KERNEL {
                        for kx in 0..KERNEL {
                            let wv = weight[((o * ic + i) * KERNEL + ky) * KERNEL + kx];
                            for oy in 0..oh {
                                let xbase = ((b * ic + i) * hp + oy * STRIDE + ky) * wp + kx;
                                let prow = &mut plane[oy * ow..(oy + 1) * ow];
                                for (ox, p) in prow.iter_mut().enumerate() {
                                    *p += wv * xpd[xbase + ox * STRIDE];
                                }
                            }
                        }
                    }
                }
            }
        });
        Ok((out, Cache::Conv { xp, h, w }))
    }

    /// `xp` is the padded input cached by forward; `h`/`w` the unpadded dims.
    pub(super) fn backward(
        &self,
        xp: &Tensor4,
        h: usize,
        w: usize,
        gy: &Tensor4,
    ) -> (Tensor4, LayerGrads) {
        let (n, ic, oc) = (xp.n, self.in_ch, self.out_ch);
        let (oh, ow) = (gy.h, gy.w);
        let (hp, wp) = (h + 2 * PAD, w + 2 * PAD);
        let (weight, gyd, xpd) = (&self.weight, &gy.data, &xp.data);

        let mut gx = Tensor4::zeros(n, ic, h, w);
        crate::par::for_each_chunk_mut(&mut gx.data, ic * h * w, |b, chunk| {
            // scatter into a padded buffer, then crop the ring
            let mut gxp = vec![0.0; ic * hp * wp];
            for o in 0..oc {
                let gplane = &gyd[(b * oc + o) * oh * ow..(b * oc + o + 1) * oh * ow];
                for i in 0..ic {
                    for ky in 0..KERNEL {
                        for kx in 0..KERNEL {
                            let wv = weight[((o * ic + i) * KERNEL + ky) * KERNEL + kx];
                            for oy in 0..oh {
                                let gbase = (i * hp + oy * STRIDE + ky) * wp + kx;
                                let grow = &gplane[oy * ow..(oy + 1) * ow];
                                for (ox, g) in grow.iter().enumerate() {
                                    gxp[gbase + ox * STRIDE] += wv * g;
                                }
                            }
                        }
                    }
                }
            }
            for i in 0..ic {
                for y in 0..h {
                    let src = (i * hp + y + PAD) * wp + PAD;
                    let dst = (i * h + y) * w;
                    chunk[dst..dst + w].copy_from_slice(&gxp[src..src + w]);
                }
            }
        });

        let mut dw = vec![0.0; oc * ic * KERNEL * KERNEL];
        crate::par::for_each_chunk_mut(&mut dw, ic * KERNEL * KERNEL, |o, dwo| {
            for b in 0..n {
                let gplane = &gyd[(b * oc + o) * oh * ow..(b * oc + o + 1) * oh * ow];
                for i in 0..ic {
                    for ky in 0..KERNEL {
                        for kx in 0..KERNEL {
                            let mut acc = 0.0;
                            for oy in 0..oh {
                                let xbase = ((b * ic + i) * hp + oy * STRIDE + ky) * wp + kx;
                                let grow = &gplane[oy * ow..(oy + 1) * ow];
                                for (ox, g) in grow.iter().enumerate() {
                                    acc += g * xpd[xbase + ox * STRIDE];
                                }
                            }
                            dwo[(i * KERNEL + ky) * KERNEL + kx] += acc;
                        }
                    }
                }
            }
        });

        let mut db = vec![0.0; oc];
        for b in 0..n {
            for o in 0..oc {
                let sum: f64 = gyd[(b * oc + o) * oh * ow..(b * oc + o + 1) * oh * ow]
                    .iter()
                    .sum();
                db[o] += sum;
            }
        }
        (gx, LayerGrads { arrays: vec![dw, db] })
    }
}

/// Transposed convolution, 4x4 kernel, stride 2, pad 1: doubles h and w.
#[derive(Debug, Clone)]
pub struct Deconv2d {
    pub in_ch: usize,
    pub out_ch: usize,
    /// `[in_ch][out_ch][4][4]`.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Deconv2d {
    pub fn new<R: Rng>(in_ch: usize, out_ch: usize, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, 0.02).unwrap();
        Deconv2d {
            in_ch,
            out_ch,
            weight: (0..in_ch * out_ch * KERNEL * KERNEL)
                .map(|_| normal.sample(rng))
                .collect(),
            bias: vec![0.0; out_ch],
        }
    }

    pub(super) fn forward(&self, x: &Tensor4) -> Result<Tensor4> {
        if x.c != self.in_ch || x.h == 0 {
            return Err(NnError::ShapeMismatch {
                layer: "deconv".into(),
                expected: format!("{} channels", self.in_ch),
                actual: format!("{}x{}x{}", x.c, x.h, x.w),
            });
        }
        let (n, ic, h, w) = (x.n, x.c, x.h, x.w);
        let (oc, oh, ow) = (self.out_ch, h * STRIDE, w * STRIDE);
        // full (uncropped) transposed output is one ring larger
        let (hf, wf) = (oh + 2 * PAD, ow + 2 * PAD);
        let (weight, bias, xd) = (&self.weight, &self.bias, &x.data);
        let mut out = Tensor4::zeros(n, oc, oh, ow);
        crate::par::for_each_chunk_mut(&mut out.data, oc * oh * ow, |b, chunk| {
            let mut full = vec![0.0; hf * wf];
            for o in 0..oc {
                full.fill(0.0);
                for i in 0..ic {
                    let xplane = &xd[(b * ic + i) * h * w..(b * ic + i + 1) * h * w];
                    for ky in 0..KERNEL {
                        for kx in 0..KERNEL {
                            let wv = weight[((i * oc + o) * KERNEL + ky) * KERNEL + kx];
                            for iy in 0..h {
                                let fbase = (iy * STRIDE + ky) * wf + kx;
                                let xrow = &xplane[iy * w..(iy + 1) * w];
                                for (ix, xv) in xrow.iter().enumerate() {
                                    full[fbase + ix * STRIDE] += wv * xv;
                                }
                            }
                        }
                    }
                }
                let plane = &mut chunk[o * oh * ow..(o + 1) * oh * ow];
                for oy in 0..oh {
                    let src = (oy + PAD) * wf + PAD;
                    for (p, f) in plane[oy * ow..(oy + 1) * ow].iter_mut().zip(&full[src..src + ow]) {
                        *p = f + bias[o];
                    }
                }
            }
        });
        Ok(out)
    }

    pub(super) fn backward(&self, x: &Tensor4, gy: &Tensor4) -> (Tensor4, LayerGrads) {
        let (n, ic, h, w) = (x.n, x.c, x.h, x.w);
        let (oc, oh, ow) = (self.out_ch, gy.h, gy.w);
        let (hf, wf) = (oh + 2 * PAD, ow + 2 * PAD);
        let (weight, xd, gyd) = (&self.weight, &x.data, &gy.data);

        // gy embedded in the full frame makes the gathers branch-free
        let mut gyf = Tensor4::zeros(n, oc, hf, wf);
        for b in 0..n {
            for o in 0..oc {
                for y in 0..oh {
                    let src = ((b * oc + o) * oh + y) * ow;
                    let dst = ((b * oc + o) * hf + y + PAD) * wf + PAD;
                    gyf.data[dst..dst + ow].copy_from_slice(&gyd[src..src + ow]);
                }
            }
        }
        let gyfd = &gyf.data;

        let mut gx = Tensor4::zeros(n, ic, h, w);
        crate::par::for_each_chunk_mut(&mut gx.data, ic * h * w, |b, chunk| {
            for i in 0..ic {
                let plane = &mut chunk[i * h * w..(i + 1) * h * w];
                for o in 0..oc {
                    for ky in 0..KERNEL {
                        for kx in 0..KERNEL {
                            let wv = weight[((i * oc + o) * KERNEL + ky) * KERNEL + kx];
                            for iy in 0..h {
                                let gbase = ((b * oc + o) * hf + iy * STRIDE + ky) * wf + kx;
                                let prow = &mut plane[iy * w..(iy + 1) * w];
                                for (ix, p) in prow.iter_mut().enumerate() {
                                    *p += wv * gyfd[gbase + ix * STRIDE];
                                }
                            }
                        }
                    }
                }
            }
        });

        let mut dw = vec![0.0; ic * oc * KERNEL * KERNEL];
        crate::par::for_each_chunk_mut(&mut dw, oc * KERNEL * KERNEL, |i, dwi| {
            for b in 0..n {
                let xplane = &xd[(b * ic + i) * h * w..(b * ic + i + 1) * h * w];
                for o in 0..oc {
                    for ky in 0..KERNEL {
                        for kx in 0..KERNEL {
                            let mut acc = 0.0;
                            for iy in 0..h {
                                let gbase = ((b * oc + o) * hf + iy * STRIDE + ky) * wf + kx;
                                let xrow = &xplane[iy * w..(iy + 1) * w];
                                for (ix, xv) in xrow.iter().enumerate() {
                                    acc += xv * gyfd[gbase + ix * STRIDE];
                                }
                            }
                            dwi[(o * KERNEL + ky) * KERNEL + kx] += acc;
                        }
                    }
                }
            }
        });

        let mut db = vec![0.0; oc];
        for b in 0..n {
            for o in 0..oc {
                let sum: f64 = gyd[(b * oc + o) * oh * ow..(b * oc + o + 1) * oh * ow]
                    .iter()
                    .sum();
                db[o] += sum;
            }
        }
        (gx, LayerGrads { arrays: vec![dw, db] })
    }
}
