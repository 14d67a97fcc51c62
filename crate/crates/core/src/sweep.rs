//! Grid-line traversal: apply a per-line matrix or a factored line solve
//! along one axis of a flattened field.
//!
//! Fields are x-fastest. Sweeps along y or z first permute the array so the
//! sweep axis becomes fastest (one O(N) pass each way), which keeps the inner
//! kernels contiguous and lets threads own disjoint line ranges safely.

use crate::linalg::{DenseMatrix, LuFactors};
use crate::threads;

/// What to do with each grid line.
pub(crate) enum LineKernel<'a> {
    /// `out_line = M * in_line`, given M transposed (rows of `mt` are columns
    /// of M) so the inner loop is a contiguous axpy.
    Apply(&'a DenseMatrix),
}

/// Lines solved per scratch block; bounds the transpose buffer to
/// `64 * q` values so it stays cache-resident.
const SOLVE_BLOCK: usize = 64;

/// Apply `kernel` along `axis` of `input`, writing `output` (same layout).
pub(crate) fn sweep(
    input: &[f64],
    output: &mut [f64],
    extents: &[usize],
    axis: usize,
    kernel: LineKernel,
) {
    let q = extents[axis];
    if axis == 0 {
        run_lines_apply(input, output, q, &kernel);
    } else {
        let mut scratch_in = vec![0.0; input.len()];
        let mut scratch_out = vec![0.0; input.len()];
        permute_to_fastest(input, &mut scratch_in, extents, axis);
        run_lines_apply(&scratch_in, &mut scratch_out, q, &kernel);
        permute_from_fastest(&scratch_out, output, extents, axis);
    }
}

/// Solve `(I - M) w = data` line-wise along `axis`, in place.
pub(crate) fn sweep_in_place(
    data: &mut [f64],
    extents: &[usize],
    axis: usize,
    factors: &LuFactors,
) {
    let q = extents[axis];
    if axis == 0 {
        run_lines_solve(data, q, factors);
    } else {
        let mut scratch = vec![0.0; data.len()];
        permute_to_fastest(data, &mut scratch, extents, axis);
        run_lines_solve(&mut scratch, q, factors);
        permute_from_fastest(&scratch, data, extents, axis);
    }
}

fn run_lines_apply(input: &[f64], output: &mut [f64], q: usize, kernel: &LineKernel) {
    let n_lines = input.len() / q;
    let parts = threads::split_lines(n_lines);
    if parts.len() == 1 {
        apply_chunk(input, output, q, kernel);
        return;
    }
    std::thread::scope(|scope| {
        let mut rest_out = output;
        let mut rest_in = input;
        for &(_, len) in &parts {
            let (out_chunk, tail_out) = rest_out.split_at_mut(len * q);
            let (in_chunk, tail_in) = rest_in.split_at(len * q);
            rest_out = tail_out;
            rest_in = tail_in;
            scope.spawn(move || apply_chunk(in_chunk, out_chunk, q, kernel));
        }
    });
}

fn apply_chunk(input: &[f64], output: &mut [f64], q: usize, kernel: &LineKernel) {
    let LineKernel::Apply(mt) = kernel;
    for (in_line, out_line) in input.chunks_exact(q).zip(output.chunks_exact_mut(q)) {
        out_line.fill(0.0);
        for (j, &c) in in_line.iter().enumerate() {
            if c != 0.0 {
                for (o, m) in out_line.iter_mut().zip(mt.row(j)) {
                    *o += c * m;
                }
            }
        }
    }
}

fn run_lines_solve(data: &mut [f64], q: usize, factors: &LuFactors) {
    let n_lines = data.len() / q;
    let parts = threads::split_lines(n_lines);
    if parts.len() == 1 {
        solve_chunk(data, q, factors);
        return;
    }
    std::thread::scope(|scope| {
        let mut rest = data;
        for &(_, len) in &parts {
            let (chunk, tail) = rest.split_at_mut(len * q);
            rest = tail;
            scope.spawn(move || solve_chunk(chunk, q, factors));
        }
    });
}

fn solve_chunk(data: &mut [f64], q: usize, factors: &LuFactors) {
    let mut block = vec![0.0; SOLVE_BLOCK * q];
    for lines in data.chunks_mut(SOLVE_BLOCK * q) {
        let w = lines.len() / q;
        let block = &mut block[..w * q];
        // transpose (w lines x q) -> (q x w) so each solve row is contiguous
        for l in 0..w {
            for k in 0..q {
                block[k * w + l] = lines[l * q + k];
            }
        }
        factors.solve_block(block, w);
        for l in 0..w {
            for k in 0..q {
                lines[l * q + k] = block[k * w + l];
            }
        }
    }
}

/// Copy `input` (x-fastest) into `out` with `axis` made the fastest index,
/// the remaining axes keeping their relative order.
fn permute_to_fastest(input: &[f64], out: &mut [f64], extents: &[usize], axis: usize) {
    match (extents.len(), axis) {
        (2, 1) => {
            let (ex, ey) = (extents[0], extents[1]);
            for y in 0..ey {
                for x in 0..ex {
                    out[x * ey + y] = input[y * ex + x];
                }
            }
        }
        (3, 1) => {
            let (ex, ey, ez) = (extents[0], extents[1], extents[2]);
            for z in 0..ez {
                for y in 0..ey {
                    let src = (z * ey + y) * ex;
                    for x in 0..ex {
                        out[(z * ex + x) * ey + y] = input[src + x];
                    }
                }
            }
        }
        (3, 2) => {
            let (ex, ey, ez) = (extents[0], extents[1], extents[2]);
            for z in 0..ez {
                for y in 0..ey {
                    let src = (z * ey + y) * ex;
                    for x in 0..ex {
                        out[(y * ex + x) * ez + z] = input[src + x];
                    }
                }
            }
        }
        _ => unreachable!("sweep axis {axis} for {}d field", extents.len()),
    }
}

/// Inverse of [`permute_to_fastest`].
fn permute_from_fastest(input: &[f64], out: &mut [f64], extents: &[usize], axis: usize) {
    match (extents.len(), axis) {
        (2, 1) => {
            let (ex, ey) = (extents[0], extents[1]);
            for x in 0..ex {
                for y in 0..ey {
                    out[y * ex + x] = input[x * ey + y];
                }
            }
        }
        (3, 1) => {
            let (ex, ey, ez) = (extents[0], extents[1], extents[2]);
            for z in 0..ez {
                for x in 0..ex {
                    let src = (z * ex + x) * ey;
                    for y in 0..ey {
                        out[(z * ey + y) * ex + x] = input[src + y];
                    }
                }
            }
        }
        (3, 2) => {
            let (ex, ey, ez) = (extents[0], extents[1], extents[2]);
            for y in 0..ey {
                for x in 0..ex {
                    let src = (y * ex + x) * ez;
                    for z in 0..ez {
                        out[(z * ey + y) * ex + x] = input[src + z];
                    }
                }
            }
        }
        _ => unreachable!(),
    }
}
