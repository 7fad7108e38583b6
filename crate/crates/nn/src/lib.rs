//! Small dense-tensor neural network engine.
//!
//! Provides exactly what a DCGAN-style generator/discriminator pair over
//! k-by-k adjacency tiles needs: stride-2 convolution and transposed
//! convolution with 4x4 kernels, batch normalization, leaky ReLU /
//! sigmoid / tanh activations, fully-connected layers, binary
//! cross-entropy, and Adam / SGD optimizers. All gradients are analytic
//! and double precision; every layer is covered by central
//! finite-difference checks in `tests/gradient_check.rs`.
//!
//! Networks are deterministic: parameters are initialized from a caller
//! supplied RNG and a fixed seed reproduces training bit-for-bit. With
//! the `parallel` feature (default) the batch dimension of the heavy
//! layers is fanned out across a rayon pool; outputs are written to
//! disjoint slices so the result is identical to the sequential build.

pub mod checkpoint;
pub mod error;
pub mod gradcheck;
pub mod layers;
pub mod loss;
pub mod net;
pub mod optim;
pub(crate) mod par;
pub mod tensor;

pub use error::NnError;
pub use layers::{BatchNorm2d, Conv2d, Deconv2d, Fc, Layer, LayerGrads};
pub use net::Net;
pub use optim::{Adam, Sgd};
pub use tensor::Tensor4;
