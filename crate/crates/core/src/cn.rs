//! Unsplit Crank-Nicolson solvers.
//!
//! 1D stepping is production-grade: one factored line operator advances
//! `(I - M) u' = (I + M) u + tau f`. The 2D/3D unsplit forms are assembled
//! explicitly as dense Kronecker sums and exist as oracles for the splitting
//! schemes - they are capped at 1000 total unknowns by design.

use crate::error::{Error, Result};
use crate::frac::{apply_operator, build_direction_operator, solve_lines, DirectionOperator};
use crate::linalg::{lu_factor, DenseMatrix, LuFactors};
use crate::model::{Field, Problem};

/// Unknown-count ceiling for the dense Kronecker assembly.
pub const KRONECKER_CAP: usize = 1000;

/// One 1D Crank-Nicolson step: `(I - M) u' = (I + M) u + tau f_half`.
pub fn step_cn_1d(op: &DirectionOperator, u: &Field, f_half: &Field) -> Result<Field> {
    u.same_shape(f_half)?;
    let mut rhs = apply_operator(op, u)?;
    rhs.axpy(1.0, u);
    rhs.axpy(op.tau(), f_half);
    let out = solve_lines(op, &rhs)?;
    out.ensure_finite("step_cn_1d")?;
    Ok(out)
}

/// Dense unsplit Crank-Nicolson system `(I - M) u' = (I + M) u + tau f` with
/// `M` the Kronecker sum of the per-axis operators.
pub struct CnSystem {
    extents: Vec<usize>,
    tau: f64,
    m: DenseMatrix,
    factors: LuFactors,
}

/// Embed one axis operator into the full tensor-product space:
/// x gets `I (x) ... (x) M`, the last axis `M (x) I (x) ... (x) I`
/// (x-fastest vectorization).
pub fn kron_axis_matrix(ops: &[DirectionOperator], axis: usize) -> DenseMatrix {
    let mut m = ops[axis].matrix().clone();
    // identities on faster axes multiply from the right of the kron chain
    for op in ops.iter().take(axis) {
        m = m.kron(&DenseMatrix::identity(op.interior_len()));
    }
    for op in ops.iter().skip(axis + 1) {
        m = DenseMatrix::identity(op.interior_len()).kron(&m);
    }
    m
}

/// Per-axis operators for a problem at time step `tau`.
pub fn build_axis_operators(problem: &Problem, tau: f64) -> Result<Vec<DirectionOperator>> {
    problem
        .axes()
        .iter()
        .enumerate()
        .map(|(i, ax)| build_direction_operator(ax, i, tau))
        .collect()
}

/// Assemble and factor the unsplit system. The Kronecker sum is verified
/// against the per-line operator application on construction.
pub fn assemble_cn(problem: &Problem, tau: f64) -> Result<CnSystem> {
    let total = problem.unknowns();
    if total > KRONECKER_CAP {
        return Err(Error::SizeCap {
            got: total,
            cap: KRONECKER_CAP,
        });
    }
    let ops = build_axis_operators(problem, tau)?;
    let mut m = DenseMatrix::zeros(total, total);
    for axis in 0..ops.len() {
        m = m.add(&kron_axis_matrix(&ops, axis));
    }

    // cross-check columns against line-wise application of each axis operator
    let extents = problem.extents();
    let scale = m.max_abs().max(1e-30);
    for col in 0..total {
        let mut basis = Field::zeros(&extents);
        basis.values_mut()[col] = 1.0;
        let mut applied = Field::zeros(&extents);
        for op in &ops {
            applied.axpy(1.0, &apply_operator(op, &basis)?);
        }
        for row in 0..total {
            let diff = (m[(row, col)] - applied.values()[row]).abs();
            if diff > 1e-13 * scale {
                return Err(Error::InvalidProblem(format!(
                    "Kronecker assembly disagrees with line application at ({row},{col}) by {diff:e}"
                )));
            }
        }
    }

    let n = total;
    let i_minus_m = DenseMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - m[(i, j)]
    });
    let factors = lu_factor(&i_minus_m)?;
    Ok(CnSystem {
        extents,
        tau,
        m,
        factors,
    })
}

impl CnSystem {
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.m
    }

    fn check(&self, f: &Field) -> Result<()> {
        if f.extents() == self.extents.as_slice() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.extents.clone(),
                got: f.extents().to_vec(),
            })
        }
    }
}

/// One unsplit step `(I - M) u' = (I + M) u + tau f_half` at oracle size.
pub fn step_cn_full(sys: &CnSystem, u: &Field, f_half: &Field) -> Result<Field> {
    sys.check(u)?;
    sys.check(f_half)?;
    let mut rhs = sys.m.matvec(u.values());
    for ((r, ui), fi) in rhs.iter_mut().zip(u.values()).zip(f_half.values()) {
        *r += ui + sys.tau * fi;
    }
    let x = sys.factors.solve(&rhs)?;
    let out = Field::from_values(&sys.extents, x);
    out.ensure_finite("step_cn_full")?;
    Ok(out)
}
