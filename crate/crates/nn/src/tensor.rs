use crate::error::{NnError, Result};

/// Dense batch-channel-height-width tensor of f64, row-major.
///
/// Fully-connected data rides in the same container with `h = w = 1`
/// and the feature count in `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    pub n: usize,
    pub c: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize, c: usize, h: usize, w: usize) -> Self {
        Tensor4 {
            n,
            c,
            h,
            w,
            data: vec![0.0; n * c * h * w],
        }
    }

    pub fn from_vec(n: usize, c: usize, h: usize, w: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * c * h * w {
            return Err(NnError::ShapeMismatch {
                layer: "tensor".into(),
                expected: format!("{} values for {}x{}x{}x{}", n * c * h * w, n, c, h, w),
                actual: format!("{} values", data.len()),
            });
        }
        Ok(Tensor4 { n, c, h, w, data })
    }

    #[inline]
    pub fn idx(&self, b: usize, ch: usize, y: usize, x: usize) -> usize {
        ((b * self.c + ch) * self.h + y) * self.w + x
    }

    #[inline]
    pub fn at(&self, b: usize, ch: usize, y: usize, x: usize) -> f64 {
        self.data[self.idx(b, ch, y, x)]
    }

    /// Values per batch element.
    #[inline]
    pub fn stride_n(&self) -> usize {
        self.c * self.h * self.w
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Same storage, new dims. Element count must match.
    pub fn reshaped(mut self, c: usize, h: usize, w: usize) -> Result<Self> {
        if self.n * c * h * w != self.data.len() {
            return Err(NnError::ShapeMismatch {
                layer: "reshape".into(),
                expected: format!("batch stride {}", self.stride_n()),
                actual: format!("{}x{}x{}", c, h, w),
            });
        }
        self.c = c;
        self.h = h;
        self.w = w;
        Ok(self)
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(NnError::NonFinite(context.to_string()))
        }
    }
}
