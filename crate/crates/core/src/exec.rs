//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers dispatch to rayon; without it they
//! run in order on the calling thread. Work is always split into fixed chunks
//! and partial results are combined in chunk order, so outputs are
//! bit-identical for any thread count.

use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces the sequential path at runtime even when `parallel` is compiled in.
pub fn set_force_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

/// True when work is dispatched to the rayon pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Evaluates `f(i)` for `i in 0..len`, returning results in index order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

/// Splits `0..len` into consecutive chunks of `chunk` indices and evaluates
/// `f` on each range, returning per-chunk results in order.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = len.div_ceil(chunk);
    map_indexed(count, |c| {
        let start = c * chunk;
        f(start..(start + chunk).min(len))
    })
}

/// Applies `f(index, chunk)` to consecutive `chunk`-sized pieces of `data`.
/// Below `min_len` elements the loop stays on the calling thread.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, min_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if is_parallel() && data.len() >= min_len {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = min_len;
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        let parts = map_chunks(10, 3, |r| r);
        assert_eq!(parts, vec![0..3, 3..6, 6..9, 9..10]);
    }

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(100, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }

    #[test]
    fn chunk_mut_sees_every_piece() {
        let mut v = vec![0usize; 10];
        for_each_chunk_mut(&mut v, 4, 0, |i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(v, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2]);
    }
}
