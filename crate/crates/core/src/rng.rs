//! Counter-based random streams and order-fixed reductions.
//!
//! Every Monte-Carlo sample draws from its own ChaCha stream selected by the
//! sample index, so a result depends only on `(seed, n)` and never on how
//! rayon schedules the work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::opalg::ComplexMatrix;

/// Samples summed serially inside one parallel work item.
pub const BLOCK: usize = 256;

/// The generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Pairwise sum in a fixed tree shape.
pub fn tree_sum(mut parts: Vec<ComplexMatrix>) -> Option<ComplexMatrix> {
    if parts.is_empty() {
        return None;
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(&a + &b),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop()
}

/// Mean of `f(i)` over `i in 0..n`, computed in fixed blocks and reduced in a
/// fixed order so the floating-point result is independent of thread count.
pub fn deterministic_mean<F>(n: usize, f: F) -> Option<ComplexMatrix>
where
    F: Fn(usize) -> ComplexMatrix + Sync,
{
    if n == 0 {
        return None;
    }
    let blocks = n.div_ceil(BLOCK);
    let partials: Vec<ComplexMatrix> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n);
            let mut acc = f(lo);
            for i in lo + 1..hi {
                acc = &acc + &f(i);
            }
            acc
        })
        .collect();
    tree_sum(partials).map(|s| s.scale_real(1.0 / n as f64))
}
