//! Line-sweep parallelism control.
//!
//! `FRACADI_THREADS` caps how many threads the line sweeps may use; unset (or
//! anything unparsable) means single-threaded. Embedders can override the
//! environment programmatically with [`set_thread_override`]. All parallel
//! work partitions output by grid line, so results are bit-identical at any
//! thread count.

use std::sync::atomic::{AtomicUsize, Ordering};

/// 0 = no override, otherwise the forced thread count.
static OVERRIDE: AtomicUsize = AtomicUsize::new(0);

/// Force (`Some(n)`) or release (`None`) the sweep thread count, taking
/// precedence over `FRACADI_THREADS`.
pub fn set_thread_override(n: Option<usize>) {
    OVERRIDE.store(n.unwrap_or(0), Ordering::SeqCst);
}

/// Number of threads the sweeps may use.
pub fn thread_count() -> usize {
    let forced = OVERRIDE.load(Ordering::SeqCst);
    if forced >= 1 {
        return forced;
    }
    std::env::var("FRACADI_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Contiguous `(start, len)` line ranges for at most [`thread_count`] workers.
pub fn split_lines(n_lines: usize) -> Vec<(usize, usize)> {
    let t = thread_count().min(n_lines.max(1));
    let base = n_lines / t;
    let extra = n_lines % t;
    let mut out = Vec::with_capacity(t);
    let mut start = 0;
    for i in 0..t {
        let len = base + usize::from(i < extra);
        out.push((start, len));
        start += len;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::split_lines;

    #[test]
    fn split_covers_everything_once() {
        for n in [1usize, 2, 7, 100] {
            let parts = split_lines(n);
            let total: usize = parts.iter().map(|(_, l)| l).sum();
            assert_eq!(total, n);
            let mut cursor = 0;
            for (s, l) in parts {
                assert_eq!(s, cursor);
                cursor += l;
            }
        }
    }
}
