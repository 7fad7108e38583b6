use crate::error::{NnError, Result};
use crate::layers::{Cache, Layer, LayerGrads};
use crate::tensor::Tensor4;

/// A plain sequential stack of layers.
#[derive(Debug, Clone)]
pub struct Net {
    pub layers: Vec<Layer>,
}

impl Net {
    pub fn new(layers: Vec<Layer>) -> Self {
        Net { layers }
    }

    /// Run the stack, rejecting NaN/Inf at every layer boundary.
    pub fn forward(&mut self, x: &Tensor4, training: bool) -> Result<(Tensor4, Vec<Cache>)> {
        x.check_finite("net input")?;
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for layer in &mut self.layers {
            let (y, cache) = layer.forward(&cur, training)?;
            y.check_finite(layer.kind())?;
            caches.push(cache);
            cur = y;
        }
        Ok((cur, caches))
    }

    /// Backpropagate `grad_out` through the stack.
    ///
    /// Returns the input gradient and one [`LayerGrads`] per layer, in
    /// layer order.
    pub fn backward(&self, caches: &[Cache], grad_out: &Tensor4) -> Result<(Tensor4, Vec<LayerGrads>)> {
        if caches.len() != self.layers.len() {
            return Err(NnError::MissingCache("net".into()));
        }
        let mut grads = vec![LayerGrads::none(); self.layers.len()];
        let mut g = grad_out.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let (gx, lg) = layer.backward(&caches[i], &g)?;
            grads[i] = lg;
            g = gx;
        }
        Ok((g, grads))
    }

    /// All trainable parameter arrays, in deterministic order.
    pub fn param_arrays_mut(&mut self) -> Vec<&mut Vec<f64>> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.param_arrays_mut())
            .collect()
    }

    pub fn param_arrays(&self) -> Vec<&Vec<f64>> {
        self.layers.iter().flat_map(|l| l.param_arrays()).collect()
    }

    pub fn param_count(&self) -> usize {
        self.param_arrays().iter().map(|a| a.len()).sum()
    }

    /// Flatten per-layer gradients into the same order as [`Self::param_arrays_mut`].
    pub fn flatten_grads(grads: &[LayerGrads]) -> Vec<&[f64]> {
        grads
            .iter()
            .flat_map(|g| g.arrays.iter().map(|a| a.as_slice()))
            .collect()
    }

    /// Sum two gradient sets (e.g. real and fake discriminator passes).
    pub fn add_grads(a: &mut [LayerGrads], b: &[LayerGrads]) {
        for (x, y) in a.iter_mut().zip(b) {
            x.add_assign(y);
        }
    }
}
