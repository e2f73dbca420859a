//! Deterministic chunked reductions.
//!
//! Work is split into fixed-size chunks whose boundaries depend only on the
//! input length. Each chunk is folded sequentially and the per-chunk partials
//! are combined by a balanced pairwise tree. Neither step depends on the
//! number of threads, so the parallel and sequential paths produce the same
//! bits.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Elements per chunk. Fixed so results do not depend on the thread pool.
pub const CHUNK: usize = 2048;

/// How the chunks are scheduled. `Parallel` falls back to `Sequential` when
/// the crate is built without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps every chunk of `0..len` through `chunk_fold` and combines the partials
/// with `combine` in a fixed pairwise order. Returns `None` when `len == 0`.
pub fn chunked_reduce<T, F, C>(len: usize, exec: Execution, chunk_fold: F, combine: C) -> Option<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
    C: Fn(T, T) -> T,
{
    let chunks = len.div_ceil(CHUNK);
    let range_of = |c: usize| c * CHUNK..((c + 1) * CHUNK).min(len);
    let partials: Vec<T> = if exec.is_parallel() {
        par_collect(chunks, &|c| chunk_fold(range_of(c)))
    } else {
        (0..chunks).map(|c| chunk_fold(range_of(c))).collect()
    };
    pairwise(partials, &combine)
}

/// Evaluates `f` on `0..count` and returns the results in index order.
pub fn map_indexed<T, F>(count: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if exec.is_parallel() {
        par_collect(count, &f)
    } else {
        (0..count).map(f).collect()
    }
}

#[cfg(feature = "parallel")]
fn par_collect<T: Send>(count: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_collect<T: Send>(count: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
    (0..count).map(f).collect()
}

/// Balanced pairwise combination: `((p0 p1) (p2 p3)) ...`.
pub fn pairwise<T, C: Fn(T, T) -> T>(mut items: Vec<T>, combine: &C) -> Option<T> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(x) = it.next() {
            match it.next() {
                Some(y) => next.push(combine(x, y)),
                None => next.push(x),
            }
        }
        items = next;
    }
    items.pop()
}
