//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it they fall back to plain sequential iteration. Results are
//! always produced in index order, so output does not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Calls `f` on each `size`-long chunk of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], size: usize, f: F)
where
    T: Send,
    F: Fn(&mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(size).for_each(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(size).for_each(f)
    }
}

/// Like [`for_each_chunk_mut`], passing each chunk's index.
pub fn for_each_chunk_mut_indexed<T, F>(data: &mut [T], size: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(size).enumerate().for_each(|(i, c)| f(i, c))
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(size).enumerate().for_each(|(i, c)| f(i, c))
    }
}

/// Whether the crate was built with rayon.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
