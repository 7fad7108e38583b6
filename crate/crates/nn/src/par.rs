//! Data-parallel shims. With the `parallel` feature the closures run on
//! the ambient rayon pool; without it they run sequentially. Every call
//! site hands each closure invocation a disjoint output slice, so both
//! builds produce bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f(i, chunk)` to consecutive `chunk_len` slices of `data`.
pub(crate) fn for_each_chunk_mut<F>(data: &mut [f64], chunk_len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    debug_assert!(chunk_len > 0 && data.len() % chunk_len == 0);
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, c) in data.chunks_mut(chunk_len).enumerate() {
            f(i, c);
        }
    }
}
