//! Central finite-difference utilities for verifying analytic gradients.
//! Test infrastructure: the checks here only ever call a layer's
//! *forward* path, so they stay independent of the backward code they
//! validate.

/// Numeric gradient of `f` at `x` by central differences with step `h`.
pub fn central_diff_grad<F>(mut f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut grad = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let fp = f(&probe);
        probe[i] = orig - h;
        let fm = f(&probe);
        probe[i] = orig;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Worst relative disagreement between two gradients.
///
/// Per element: `|a - n| / max(floor, |a| + |n|)`; the floor keeps
/// near-zero entries from blowing up the ratio.
pub fn max_rel_err(analytic: &[f64], numeric: &[f64], floor: f64) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| (a - n).abs() / f64::max(floor, a.abs() + n.abs()))
        .fold(0.0, f64::max)
}
