//! Dense linear algebra kernel: LU with partial pivoting, triangular solves,
//! a cyclic-Jacobi symmetric eigensolver, and 2-norm estimation.
//!
//! Everything is hand-rolled and sized for the line lengths this solver
//! actually meets (q up to a few hundred); no external numerical library.

use crate::error::{Error, Result};

/// Relative pivot threshold below which a factorization is declared singular.
const PIVOT_TOL: f64 = 1e-14;

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a != 0.0 {
                    let (or_, br) = (out.row_mut(i), other.row(k));
                    for (o, b) in or_.iter_mut().zip(br) {
                        *o += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Matrix infinity norm (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == 0.0 {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out[(i * other.rows + p, j * other.cols + q)] = a * other[(p, q)];
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Combined L\U storage plus the pivot permutation of a PA = LU factorization.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    piv: Vec<usize>,
}

/// Partial-pivoting LU. Reports singularity when a pivot falls below
/// `1e-14 * ||A||_inf`.
pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    assert!(a.is_square(), "lu_factor needs a square matrix");
    let n = a.rows();
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let scale = a.inf_norm().max(f64::MIN_POSITIVE);

    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best < PIVOT_TOL * scale {
            return Err(Error::Singular {
                context: "lu_factor".into(),
                index: k,
                pivot: lu[(p, k)],
            });
        }
        if p != k {
            piv.swap(p, k);
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            lu[(i, k)] /= pivot;
            let m = lu[(i, k)];
            if m != 0.0 {
                for j in k + 1..n {
                    lu[(i, j)] -= m * lu[(k, j)];
                }
            }
        }
    }
    Ok(LuFactors { lu, piv })
}

impl LuFactors {
    pub fn size(&self) -> usize {
        self.lu.rows()
    }

    /// Solve `A x = b` for a single right-hand side.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.size() {
            return Err(Error::ShapeMismatch {
                expected: vec![self.size()],
                got: vec![b.len()],
            });
        }
        let n = self.size();
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu.row(i)[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu.row(i)[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Solve `A X = B` for a block `B` stored as `n` rows of `width` values
    /// (each column of the block is an independent right-hand side).
    /// In place; rows must be contiguous.
    pub fn solve_block(&self, block: &mut [f64], width: usize) {
        let n = self.size();
        assert_eq!(block.len(), n * width);
        // gather the pivot permutation: row i <- row piv[i]
        let mut perm = vec![0.0; n * width];
        for i in 0..n {
            let src = self.piv[i];
            perm[i * width..(i + 1) * width]
                .copy_from_slice(&block[src * width..(src + 1) * width]);
        }
        block.copy_from_slice(&perm);
        // forward: L has unit diagonal
        for k in 0..n {
            let (done, rest) = block.split_at_mut((k + 1) * width);
            let bk = &done[k * width..];
            for i in k + 1..n {
                let m = self.lu[(i, k)];
                if m != 0.0 {
                    let bi = &mut rest[(i - k - 1) * width..(i - k) * width];
                    for (x, y) in bi.iter_mut().zip(bk) {
                        *x -= m * y;
                    }
                }
            }
        }
        // backward
        for k in (0..n).rev() {
            let inv = 1.0 / self.lu[(k, k)];
            let (head, tail) = block.split_at_mut(k * width);
            let bk = &mut tail[..width];
            for x in bk.iter_mut() {
                *x *= inv;
            }
            let bk = &tail[..width];
            for i in 0..k {
                let m = self.lu[(i, k)];
                if m != 0.0 {
                    let bi = &mut head[i * width..(i + 1) * width];
                    for (x, y) in bi.iter_mut().zip(bk) {
                        *x -= m * y;
                    }
                }
            }
        }
    }

    /// Determinant from the factorization (sign from the permutation parity).
    pub fn det(&self) -> f64 {
        let n = self.size();
        let mut d = 1.0;
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        // permutation parity
        let mut perm = self.piv.clone();
        let mut swaps = 0usize;
        for i in 0..n {
            while perm[i] != i {
                let j = perm[i];
                perm.swap(i, j);
                swaps += 1;
            }
        }
        if swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }
}

/// Ascending eigenvalues of a symmetric matrix via cyclic Jacobi rotations.
///
/// The input must be symmetric to `1e-12` relative.
pub fn sym_eigs(h: &DenseMatrix) -> Result<Vec<f64>> {
    sym_eigs_full(h).map(|(vals, _)| vals)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors (columns).
pub fn sym_eigs_full(h: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    assert!(h.is_square(), "sym_eigs needs a square matrix");
    let n = h.rows();
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = h.clone();
    // exact symmetrization so rotations stay consistent
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let mut v = DenseMatrix::identity(n);

    let off = |a: &DenseMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += a[(i, j)] * a[(i, j)];
            }
        }
        s.sqrt()
    };

    let tol = 1e-15 * scale * n as f64;
    for _sweep in 0..64 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((vals, vecs))
}

/// Largest singular value: sqrt of the top eigenvalue of `A^T A`.
pub fn two_norm(a: &DenseMatrix) -> f64 {
    let ata = a.transpose().matmul(a);
    // A^T A is symmetric up to rounding; sym_eigs symmetrizes internally.
    let vals = sym_eigs(&ata).expect("A^T A is symmetric by construction");
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng_mat(n: usize, seed: u64) -> DenseMatrix {
        // small xorshift so tests need no external RNG
        let mut s = seed.max(1);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        DenseMatrix::from_fn(n, n, |_, _| next())
    }

    #[test]
    fn lu_identity_is_trivial() {
        let i = DenseMatrix::identity(5);
        let f = lu_factor(&i).unwrap();
        let b = vec![1.0, -2.0, 3.0, 0.5, 0.0];
        assert_eq!(f.solve(&b).unwrap(), b);
    }

    #[test]
    fn lu_pivots_through_zero_diagonal() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let f = lu_factor(&a).unwrap();
        let x = f.solve(&[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        match lu_factor(&a) {
            Err(Error::Singular { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn lu_reconstructs_pa() {
        // PA = LU on a batch of random well-conditioned matrices
        for seed in 1..=100u64 {
            let n = 4 + (seed as usize % 61);
            let mut a = rng_mat(n, seed);
            for i in 0..n {
                a[(i, i)] += n as f64; // diagonally dominant => well-conditioned
            }
            let f = lu_factor(&a).unwrap();
            let mut l = DenseMatrix::identity(n);
            let mut u = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if i > j {
                        l[(i, j)] = f.lu[(i, j)];
                    } else {
                        u[(i, j)] = f.lu[(i, j)];
                    }
                }
            }
            let pa = DenseMatrix::from_fn(n, n, |i, j| a[(f.piv[i], j)]);
            let err = pa.sub(&l.matmul(&u)).max_abs();
            assert!(
                err <= 1e-12 * a.inf_norm(),
                "seed {seed}: reconstruction error {err:e}"
            );
        }
    }

    #[test]
    fn lu_solve_residual_random_20x20() {
        let n = 20;
        let mut a = rng_mat(n, 7);
        for i in 0..n {
            a[(i, i)] += 10.0;
        }
        let f = lu_factor(&a).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = f.solve(&b).unwrap();
        let r: Vec<f64> = a
            .matvec(&x)
            .iter()
            .zip(&b)
            .map(|(ax, bi)| ax - bi)
            .collect();
        let rn = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bn = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(rn <= 1e-12 * bn, "residual {rn:e}");
    }

    #[test]
    fn lu_solve_is_deterministic_across_rhs_reuse() {
        let n = 12;
        let mut a = rng_mat(n, 3);
        for i in 0..n {
            a[(i, i)] += 6.0;
        }
        let f = lu_factor(&a).unwrap();
        let b: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let x1 = f.solve(&b).unwrap();
        let x2 = f.solve(&b).unwrap();
        assert_eq!(x1, x2);
    }

    #[test]
    fn solve_block_matches_single_solves() {
        let n = 17;
        let mut a = rng_mat(n, 11);
        for i in 0..n {
            a[(i, i)] += 8.0;
        }
        let f = lu_factor(&a).unwrap();
        let width = 5;
        let mut block = vec![0.0; n * width];
        for c in 0..width {
            for r in 0..n {
                block[r * width + c] = ((r * 7 + c * 3) as f64 * 0.11).cos();
            }
        }
        let cols: Vec<Vec<f64>> = (0..width)
            .map(|c| {
                let b: Vec<f64> = (0..n).map(|r| block[r * width + c]).collect();
                f.solve(&b).unwrap()
            })
            .collect();
        f.solve_block(&mut block, width);
        for c in 0..width {
            for r in 0..n {
                assert!(
                    (block[r * width + c] - cols[c][r]).abs() <= 1e-13,
                    "mismatch at ({r},{c})"
                );
            }
        }
    }

    #[test]
    fn sym_eigs_diagonal() {
        let d = DenseMatrix::from_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ]);
        let e = sym_eigs(&d).unwrap();
        assert_eq!(e, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn sym_eigs_swap_matrix() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let e = sym_eigs(&a).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sym_eigs_rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(sym_eigs(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn sym_eigs_trace_det_and_residual() {
        let n = 24;
        let r = rng_mat(n, 5);
        let h = r.add(&r.transpose()).scale(0.5);
        let (vals, vecs) = sym_eigs_full(&h).unwrap();
        let trace: f64 = (0..n).map(|i| h[(i, i)]).sum();
        let sum: f64 = vals.iter().sum();
        assert!((trace - sum).abs() <= 1e-8 * trace.abs().max(1.0));
        let det_lu = lu_factor(&h).map(|f| f.det()).unwrap_or(0.0);
        let det_eig: f64 = vals.iter().product();
        assert!(
            (det_lu - det_eig).abs() <= 1e-8 * det_lu.abs().max(1e-300),
            "det mismatch {det_lu} vs {det_eig}"
        );
        // backward error per pair
        let hn = two_norm(&h);
        for k in 0..n {
            let v: Vec<f64> = (0..n).map(|i| vecs[(i, k)]).collect();
            let hv = h.matvec(&v);
            let err = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - vals[k] * b).abs())
                .fold(0.0f64, f64::max);
            assert!(err <= 1e-10 * hn, "pair {k}: residual {err:e}");
        }
    }

    #[test]
    fn two_norm_basics() {
        assert!((two_norm(&DenseMatrix::identity(7)) - 1.0).abs() < 1e-10);
        let d = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -4.0]]);
        assert!((two_norm(&d) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn two_norm_transpose_invariant() {
        let a = rng_mat(15, 9);
        let n1 = two_norm(&a);
        let n2 = two_norm(&a.transpose());
        assert!((n1 - n2).abs() <= 1e-10 * n1.max(1.0));
    }

    #[test]
    fn kron_shape_and_values() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        let b = DenseMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        assert_eq!(k[(0, 3)], 2.0);
        assert_eq!(k[(1, 4)], 2.0);
        assert_eq!(k[(5, 2)], 0.0);
    }
}
