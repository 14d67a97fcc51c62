//! Error measurement and numerical verification of the stability theory:
//! negative definiteness of the symmetric part, Gerschgorin bounds, the
//! norm bounds `||(I-M)^-1|| <= 1` and `||(I-M)^-1(I+M)|| <= 1`, iteration
//! spectral radii, and the two-step companion-matrix root condition
//! `|b| < 1 + c < 2`.
//!
//! Verification is sampling-based: each report records exactly which
//! `(mu, q)` or problem it covers. Explicit inverses are formed only at
//! diagnostic sizes.

use crate::adi::SchemeKind;
use crate::cn::{build_axis_operators, kron_axis_matrix};
use crate::error::{Error, Result};
use crate::frac::{coefficient, left_matrix, DirectionOperator};
use crate::linalg::{lu_factor, sym_eigs, sym_eigs_full, two_norm, DenseMatrix};
use crate::model::{Field, FracOrder, Problem};

/// Tolerance on the norm bounds of the stability theorems.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on iteration spectral radii.
pub const RADIUS_TOL: f64 = 1e-8;

/// Maximum error (5.1): infinity norm of the node-wise difference.
pub fn max_error(numeric: &Field, exact: &Field) -> Result<f64> {
    numeric.same_shape(exact)?;
    let mut worst = 0.0f64;
    for (a, b) in numeric.values().iter().zip(exact.values()) {
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

/// Observed convergence order under halving: `log2(e_coarse / e_fine)`.
pub fn observed_rate(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(Error::InvalidProblem(format!(
            "observed_rate needs positive errors, got {e_coarse} and {e_fine}"
        )));
    }
    Ok((e_coarse / e_fine).log2())
}

/// Symmetric part `(A + A^T)/2`.
pub fn hermitian_part(a: &DenseMatrix) -> DenseMatrix {
    assert!(a.is_square());
    a.add(&a.transpose()).scale(0.5)
}

/// One verification record; flat key-value serializable for the harness.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub label: String,
    pub q: usize,
    pub mu: Option<f64>,
    pub lambda_max_h: Option<f64>,
    /// min over rows of `(-g_1) - r_i`; positive means every Gerschgorin
    /// disk lies strictly in the left half-line.
    pub gerschgorin_margin: Option<f64>,
    pub inv_norm: Option<f64>,
    pub cayley_norm: Option<f64>,
    pub spectral_radius: Option<f64>,
    pub power_iterations: Option<usize>,
    pub root_condition_ok: Option<bool>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl SpectralReport {
    fn new(label: impl Into<String>, q: usize) -> Self {
        Self {
            label: label.into(),
            q,
            mu: None,
            lambda_max_h: None,
            gerschgorin_margin: None,
            inv_norm: None,
            cayley_norm: None,
            spectral_radius: None,
            power_iterations: None,
            root_condition_ok: None,
            notes: Vec::new(),
            pass: true,
        }
    }

    /// Flat `key = value` text block.
    pub fn to_kv_block(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("label", self.label.clone());
        push("q", self.q.to_string());
        if let Some(v) = self.mu {
            push("mu", format!("{v}"));
        }
        if let Some(v) = self.lambda_max_h {
            push("lambda_max_h", format!("{v:.6e}"));
        }
        if let Some(v) = self.gerschgorin_margin {
            push("gerschgorin_margin", format!("{v:.6e}"));
        }
        if let Some(v) = self.inv_norm {
            push("inv_norm", format!("{v:.12}"));
        }
        if let Some(v) = self.cayley_norm {
            push("cayley_norm", format!("{v:.12}"));
        }
        if let Some(v) = self.spectral_radius {
            push("spectral_radius", format!("{v:.12}"));
        }
        if let Some(v) = self.power_iterations {
            push("power_iterations", v.to_string());
        }
        if let Some(v) = self.root_condition_ok {
            push("root_condition_ok", v.to_string());
        }
        for (i, n) in self.notes.iter().enumerate() {
            push(&format!("note_{i}"), n.clone());
        }
        push("pass", self.pass.to_string());
        out
    }
}

/// Negative definiteness of `H = (A_mu + A_mu^T)/2` plus the Gerschgorin
/// bound `r_i < -g_1` from the theory. Failure yields a failing report, not
/// an error.
pub fn verify_definiteness(mu: FracOrder, q: usize) -> SpectralReport {
    assert!(q <= 256, "definiteness checks are diagnostic-sized");
    let mut rep = SpectralReport::new(format!("definiteness mu={} q={q}", mu.value()), q);
    rep.mu = Some(mu.value());
    let a = left_matrix(mu, q);
    let h = hermitian_part(&a);
    match sym_eigs(&h) {
        Ok(vals) => {
            let lmax = *vals.last().unwrap();
            rep.lambda_max_h = Some(lmax);
            if lmax >= 0.0 {
                rep.pass = false;
                rep.notes.push("lambda_max(H) not negative".into());
            }
        }
        Err(e) => {
            rep.pass = false;
            rep.notes.push(format!("eigensolve failed: {e}"));
        }
    }
    let neg_g1 = -coefficient(mu.value(), 1);
    let mut margin = f64::INFINITY;
    for i in 0..q {
        let mut r = 0.0;
        for j in 0..q {
            if i != j {
                r += h[(i, j)].abs();
            }
        }
        margin = margin.min(neg_g1 - r);
    }
    rep.gerschgorin_margin = Some(margin);
    if margin <= 0.0 {
        rep.pass = false;
        rep.notes.push("Gerschgorin radius reached -g_1".into());
    }
    rep
}

/// Explicit inverse of `I - M` via the cached factorization.
fn explicit_inverse(op: &DirectionOperator) -> DenseMatrix {
    let q = op.interior_len();
    let mut inv = DenseMatrix::zeros(q, q);
    for j in 0..q {
        let mut e = vec![0.0; q];
        e[j] = 1.0;
        let col = op.factors().solve(&e).expect("factored operator solves");
        for i in 0..q {
            inv[(i, j)] = col[i];
        }
    }
    inv
}

/// Norm bounds of the stability theorem for one constant-coefficient axis
/// operator: `||(I-M)^-1||` and `||(I-M)^-1 (I+M)||`, both <= 1 (+1e-10).
pub fn verify_norm_bounds(op: &DirectionOperator) -> Result<SpectralReport> {
    if !op.is_constant_coefficient() {
        return Err(Error::NotAdmissible(
            "norm bounds are guaranteed only for constant coefficients".into(),
        ));
    }
    let q = op.interior_len();
    assert!(q <= 128, "norm checks are diagnostic-sized");
    let mut rep = SpectralReport::new(format!("norm-bounds q={q}"), q);
    let inv = explicit_inverse(op);
    let eye = DenseMatrix::identity(q);
    let cayley = inv.matmul(&eye.add(op.matrix()));
    let n1 = two_norm(&inv);
    let n2 = two_norm(&cayley);
    rep.inv_norm = Some(n1);
    rep.cayley_norm = Some(n2);
    if n1 > 1.0 + NORM_TOL {
        rep.pass = false;
        rep.notes.push(format!("||(I-M)^-1|| = {n1} exceeds 1"));
    }
    if n2 > 1.0 + NORM_TOL {
        rep.pass = false;
        rep.notes
            .push(format!("||(I-M)^-1(I+M)|| = {n2} exceeds 1"));
    }
    Ok(rep)
}

/// Windowed power iteration: geometric mean of the norm growth ratios over a
/// sliding window, declared converged when two disjoint windows agree to
/// `tol`. Handles complex dominant pairs (whose raw ratios oscillate).
pub fn power_iteration(a: &DenseMatrix, tol: f64, cap: usize) -> Result<(f64, usize)> {
    assert!(a.is_square());
    let n = a.rows();
    const WINDOW: usize = 64;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 1e-3).collect();
    let norm = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>().sqrt();
    let mut nv = norm(&v);
    if nv == 0.0 {
        return Ok((0.0, 0));
    }
    for x in v.iter_mut() {
        *x /= nv;
    }
    let mut log_ratios: Vec<f64> = Vec::with_capacity(cap.min(4096));
    let mut prefix: Vec<f64> = vec![0.0];
    for k in 1..=cap {
        let w = a.matvec(&v);
        nv = norm(&w);
        if nv == 0.0 {
            return Ok((0.0, k));
        }
        log_ratios.push(nv.ln());
        prefix.push(prefix.last().unwrap() + nv.ln());
        v = w;
        for x in v.iter_mut() {
            *x /= nv;
        }
        if k >= 2 * WINDOW {
            let mean = |lo: usize, hi: usize| (prefix[hi] - prefix[lo]) / (hi - lo) as f64;
            let recent = mean(k - WINDOW, k).exp();
            let older = mean(k - 2 * WINDOW, k - WINDOW).exp();
            if (recent - older).abs() <= tol * recent.max(1.0) {
                return Ok((recent, k));
            }
        }
    }
    Err(Error::PowerIterationStalled(cap))
}

fn dense_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = m.rows();
    let f = lu_factor(m)?;
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = f.solve(&e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Spectral radius of the one-step iteration matrix at oracle size:
/// `(I-M)^-1 (I+M)` for unsplit CN, the product of per-axis Cayley factors
/// for the ADI schemes, and the 2x2-block companion matrix for the two-step
/// corrected schemes (whose radius comes from the per-eigenpair quadratic
/// `lambda^2 - b lambda + c`, the root condition `|b| < 1 + c < 2`).
pub fn verify_iteration_spectrum(problem: &Problem, scheme: SchemeKind) -> Result<SpectralReport> {
    let total = problem.unknowns();
    if total > 500 {
        return Err(Error::SizeCap {
            got: total,
            cap: 500,
        });
    }
    let tau = problem.time().tau();
    let ops = build_axis_operators(problem, tau)?;
    let eye = DenseMatrix::identity(total);
    let mut rep = SpectralReport::new(
        format!("iteration-spectrum scheme={} n={total}", scheme.name()),
        total,
    );

    let cayley = |axis: usize| -> Result<DenseMatrix> {
        let b = kron_axis_matrix(&ops, axis);
        let inv = dense_inverse(&eye.sub(&b))?;
        Ok(inv.matmul(&eye.add(&b)))
    };

    match scheme {
        SchemeKind::CnFull => {
            let mut m = DenseMatrix::zeros(total, total);
            for axis in 0..ops.len() {
                m = m.add(&kron_axis_matrix(&ops, axis));
            }
            let t = dense_inverse(&eye.sub(&m))?.matmul(&eye.add(&m));
            radius_via_power(&mut rep, &t);
        }
        SchemeKind::PrAdi | SchemeKind::DAdi | SchemeKind::Fs => {
            let mut t = cayley(0)?;
            for axis in 1..ops.len() {
                t = t.matmul(&cayley(axis)?);
            }
            radius_via_power(&mut rep, &t);
        }
        SchemeKind::DAdiII | SchemeKind::FsII => {
            scheme.check_admissible(problem)?;
            let bx = kron_axis_matrix(&ops, 0);
            let by = kron_axis_matrix(&ops, 1);
            let ix = dense_inverse(&eye.sub(&bx))?;
            let iy = dense_inverse(&eye.sub(&by))?;
            let p = ix.matmul(&eye.add(&bx)).matmul(&iy).matmul(&eye.add(&by));
            let q = ix.matmul(&bx).matmul(&iy).matmul(&by);
            companion_radius(&mut rep, &p, &q)?;
        }
    }
    Ok(rep)
}

fn radius_via_power(rep: &mut SpectralReport, t: &DenseMatrix) {
    match power_iteration(t, RADIUS_TOL, 10_000) {
        Ok((radius, iters)) => {
            rep.spectral_radius = Some(radius);
            rep.power_iterations = Some(iters);
            if radius >= 1.0 + RADIUS_TOL {
                rep.pass = false;
                rep.notes.push(format!("spectral radius {radius} >= 1"));
            } else if (radius - 1.0).abs() <= RADIUS_TOL {
                rep.notes.push(
                    "radius at the unit boundary (zero operator iterates identically)".into(),
                );
            }
        }
        Err(e) => {
            rep.pass = false;
            rep.notes.push(format!("power iteration: {e}"));
        }
    }
}

/// Radius and root condition of `[[P+Q, -Q], [I, 0]]`. `P + Q` and `Q` are
/// simultaneously diagonalizable symmetric matrices in the Riesz case; the
/// blocks act per shared eigenpair `(b, c)` as the quadratic
/// `lambda^2 - b lambda + c = 0`, all of whose roots lie inside the unit
/// circle iff `|b| < 1 + c < 2`. A power-iteration estimate is reported as a
/// diagnostic; near-unit complex clusters make it stall, which is noted but
/// not failed.
fn companion_radius(rep: &mut SpectralReport, p: &DenseMatrix, q: &DenseMatrix) -> Result<()> {
    let n = p.rows();
    let pq = p.add(q);
    // the proof rests on P+Q and Q being symmetric (hence real spectra)
    let asym = |m: &DenseMatrix| m.sub(&m.transpose()).max_abs();
    let sym_tol = 1e-9 * pq.max_abs().max(q.max_abs()).max(1e-30);
    if asym(&pq) > sym_tol || asym(q) > sym_tol {
        rep.pass = false;
        rep.notes.push(format!(
            "P+Q or Q not symmetric (asymmetry {:e}, {:e})",
            asym(&pq),
            asym(q)
        ));
    }
    // generic combination splits degenerate eigenspaces so the eigenvectors
    // diagonalize both matrices at once
    let combo = hermitian_part(&pq).add(&hermitian_part(q).scale(std::f64::consts::FRAC_1_PI));
    let (_, vecs) = sym_eigs_full(&combo)?;
    let pq_scale = two_norm(&pq).max(1e-30);
    let q_scale = two_norm(q).max(1e-30);

    let mut radius: f64 = 0.0;
    let mut condition_ok = true;
    for k in 0..n {
        let v: Vec<f64> = (0..n).map(|i| vecs[(i, k)]).collect();
        let pqv = pq.matvec(&v);
        let qv = q.matvec(&v);
        let b: f64 = pqv.iter().zip(&v).map(|(a, b)| a * b).sum();
        let c: f64 = qv.iter().zip(&v).map(|(a, b)| a * b).sum();
        // certify (b, c) really are a shared eigenpair
        let rb = pqv
            .iter()
            .zip(&v)
            .map(|(a, x)| (a - b * x).abs())
            .fold(0.0f64, f64::max);
        let rc = qv
            .iter()
            .zip(&v)
            .map(|(a, x)| (a - c * x).abs())
            .fold(0.0f64, f64::max);
        if rb > 1e-8 * pq_scale || rc > 1e-8 * q_scale {
            rep.pass = false;
            rep.notes.push(format!(
                "eigenpair {k} not simultaneous: residuals {rb:e}, {rc:e}"
            ));
            continue;
        }
        if !(b.abs() < 1.0 + c && 1.0 + c < 2.0) {
            condition_ok = false;
        }
        let disc = b * b - 4.0 * c;
        let r = if disc >= 0.0 {
            let s = disc.sqrt();
            (0.5 * (b + s)).abs().max((0.5 * (b - s)).abs())
        } else {
            c.max(0.0).sqrt() // complex pair: |lambda| = sqrt(c)
        };
        radius = radius.max(r);
    }
    rep.spectral_radius = Some(radius);
    rep.root_condition_ok = Some(condition_ok);
    if !condition_ok {
        rep.pass = false;
        rep.notes
            .push("root condition |b| < 1 + c < 2 violated".into());
    }
    if radius >= 1.0 + RADIUS_TOL {
        rep.pass = false;
        rep.notes.push(format!("companion radius {radius} >= 1"));
    }

    // diagnostic only: the raw companion defeats plain power iteration when
    // many complex pairs share nearly the same modulus
    let two = DenseMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n && j < n {
            pq[(i, j)]
        } else if i < n {
            -q[(i, j - n)]
        } else if j < n {
            if i - n == j {
                1.0
            } else {
                0.0
            }
        } else {
            0.0
        }
    });
    match power_iteration(&two, RADIUS_TOL, 10_000) {
        Ok((est, iters)) => {
            rep.power_iterations = Some(iters);
            rep.notes.push(format!("power-iteration estimate {est:.6}"));
        }
        Err(_) => rep
            .notes
            .push("power iteration stalled on the companion (complex cluster); radius taken from the root condition".into()),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::{advection_matrix, build_direction_operator, coefficients};
    use crate::model::{AxisSpec, Forcing, TimeSpec};
    use std::sync::Arc;

    fn order(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    #[test]
    fn max_error_basics() {
        let a = Field::from_values(&[3], vec![1.0, 2.0, 3.0]);
        assert_eq!(max_error(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        b.values_mut()[1] += 1e-3;
        assert!((max_error(&a, &b).unwrap() - 1e-3).abs() < 1e-15);
        let c = Field::zeros(&[4]);
        assert!(matches!(
            max_error(&a, &c),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn observed_rate_examples() {
        let e = 1.7e-4;
        assert!((observed_rate(4.0 * e, e).unwrap() - 2.0).abs() < 1e-14);
        assert!((observed_rate(0.0011, 2.6284e-4).unwrap() - 2.0652).abs() < 1e-3);
        assert!((observed_rate(1.2063e-2, 3.0047e-3).unwrap() - 2.0053).abs() < 1e-3);
        assert!(observed_rate(0.0, 1.0).is_err());
    }

    #[test]
    fn observed_rate_scale_invariant() {
        for s in [1e-6, 1.0, 1e6] {
            let r = observed_rate(3.1e-3 * s, 7.7e-4 * s).unwrap();
            let r0 = observed_rate(3.1e-3, 7.7e-4).unwrap();
            assert!((r - r0).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_part_basics() {
        let b = advection_matrix(5);
        assert_eq!(hermitian_part(&b).max_abs(), 0.0);
        let s = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        assert_eq!(hermitian_part(&s), s);
    }

    #[test]
    fn hermitian_part_of_a_matches_theory_structure() {
        // H of A_1.5, q = 3: diagonal g_1, first off-diagonal (g_0+g_2)/2
        let g = coefficients(1.5, 4);
        let h = hermitian_part(&left_matrix(order(1.5), 3));
        assert!((h[(0, 0)] - g[1]).abs() < 1e-15);
        assert!((h[(0, 1)] - 0.5 * (g[0] + g[2])).abs() < 1e-15);
        assert!((h[(2, 1)] - 0.5 * (g[0] + g[2])).abs() < 1e-15);
        assert!((h[(0, 2)] - 0.5 * g[3]).abs() < 1e-15);
    }

    #[test]
    fn definiteness_mu_15_q8() {
        let rep = verify_definiteness(order(1.5), 8);
        assert!(rep.pass, "{:?}", rep.notes);
        let lmax = rep.lambda_max_h.unwrap();
        // frozen from an independent dense eigensolve
        assert!((lmax + 0.15621000480142).abs() < 1e-10, "lambda {lmax}");
    }

    #[test]
    fn definiteness_gerschgorin_mu19_q4() {
        let rep = verify_definiteness(order(1.9), 4);
        assert!(rep.pass);
        assert!(rep.gerschgorin_margin.unwrap() > 0.0);
    }

    #[test]
    fn weighted_symmetric_part_scales() {
        // d1 A + d2 A^T has symmetric part (d1 + d2) H
        let a = left_matrix(order(1.5), 6);
        let weighted = a.scale(2.0).add(&a.transpose().scale(0.5));
        let h = hermitian_part(&a);
        let hw = hermitian_part(&weighted);
        assert!(hw.sub(&h.scale(2.5)).max_abs() < 1e-14);
        let vals = sym_eigs(&hw).unwrap();
        assert!(*vals.last().unwrap() < 0.0);
    }

    #[test]
    fn norm_bounds_zero_operator_is_exactly_one() {
        let ax = AxisSpec::constant(0.0, 1.0, 9, order(1.5), 0.0, 0.0, 0.0).unwrap();
        let op = build_direction_operator(&ax, 0, 0.1).unwrap();
        let rep = verify_norm_bounds(&op).unwrap();
        assert!(rep.pass);
        assert!((rep.inv_norm.unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.cayley_norm.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_bounds_bench_operator_q16() {
        let ax = AxisSpec::constant(0.0, 1.0, 17, order(1.5), 1.0, 1.0, 1.0).unwrap();
        let op = build_direction_operator(&ax, 0, 1.0 / 17.0).unwrap();
        let rep = verify_norm_bounds(&op).unwrap();
        assert!(rep.pass, "{:?}", rep.notes);
        assert!(rep.inv_norm.unwrap() <= 1.0 + NORM_TOL);
        assert!(rep.cayley_norm.unwrap() <= 1.0 + NORM_TOL);
    }

    #[test]
    fn norm_bounds_riesz_q32() {
        let ax = AxisSpec::constant(0.0, 1.0, 33, order(1.9), 1.0, 1.0, 0.0).unwrap();
        let op = build_direction_operator(&ax, 0, 1.0 / 33.0).unwrap();
        let rep = verify_norm_bounds(&op).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn norm_bounds_reject_variable_coefficients() {
        let ax = AxisSpec::new(
            0.0,
            1.0,
            9,
            order(1.5),
            Arc::new(|x| 1.0 + x),
            Arc::new(|_| 1.0),
            Arc::new(|_| 0.0),
        )
        .unwrap();
        let op = build_direction_operator(&ax, 0, 0.1).unwrap();
        assert!(matches!(
            verify_norm_bounds(&op),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn power_iteration_on_diagonal() {
        let d = DenseMatrix::from_rows(&[
            vec![0.9, 0.0, 0.0],
            vec![0.0, -0.5, 0.0],
            vec![0.0, 0.0, 0.2],
        ]);
        let (r, _) = power_iteration(&d, 1e-10, 10_000).unwrap();
        assert!((r - 0.9).abs() < 1e-6);
    }

    fn bench_problem_1d(n: usize) -> Problem {
        let ax = AxisSpec::constant(0.0, 1.0, n, order(1.5), 1.0, 1.0, 1.0).unwrap();
        Problem::new(
            vec![ax],
            TimeSpec::new(1.0, n).unwrap(),
            Forcing::Analytic(Arc::new(|_, _| 0.0)),
            Arc::new(|_: &[f64]| 0.0),
            None,
        )
        .unwrap()
    }

    #[test]
    fn iteration_radius_1d_below_one() {
        let rep = verify_iteration_spectrum(&bench_problem_1d(17), SchemeKind::CnFull).unwrap();
        assert!(rep.pass, "{:?}", rep.notes);
        let r = rep.spectral_radius.unwrap();
        assert!(r < 1.0, "radius {r}");
        // frozen from a dense eigensolve of the q=16 iteration matrix
        assert!((r - 0.7038).abs() < 5e-3, "radius {r}");
    }

    #[test]
    fn iteration_radius_zero_operator_flags_boundary() {
        let ax = AxisSpec::constant(0.0, 1.0, 9, order(1.5), 0.0, 0.0, 0.0).unwrap();
        let p = Problem::new(
            vec![ax],
            TimeSpec::new(1.0, 4).unwrap(),
            Forcing::Analytic(Arc::new(|_, _| 0.0)),
            Arc::new(|_: &[f64]| 0.0),
            None,
        )
        .unwrap();
        let rep = verify_iteration_spectrum(&p, SchemeKind::CnFull).unwrap();
        assert!(rep.pass);
        assert!((rep.spectral_radius.unwrap() - 1.0).abs() <= RADIUS_TOL);
        assert!(!rep.notes.is_empty(), "boundary case should carry a note");
    }

    #[test]
    fn axis_embeddings_commute_at_oracle_size() {
        // Bx By = By Bx even with axis-dependent coefficients (each factor
        // lives on its own tensor leg)
        use crate::cn::{build_axis_operators, kron_axis_matrix};
        use crate::frac::coeff_fn;
        let axx = AxisSpec::new(
            0.0,
            2.0,
            7,
            order(1.4),
            coeff_fn(|x| 0.5 * x),
            coeff_fn(|x| 0.5 * (2.0 - x)),
            coeff_fn(|x| 0.25 * x),
        )
        .unwrap();
        let axy = AxisSpec::constant(0.0, 1.0, 6, order(1.8), 1.0, 0.4, 0.1).unwrap();
        let p = Problem::new(
            vec![axx, axy],
            TimeSpec::new(1.0, 5).unwrap(),
            Forcing::Analytic(Arc::new(|_, _| 0.0)),
            Arc::new(|_: &[f64]| 0.0),
            None,
        )
        .unwrap();
        let ops = build_axis_operators(&p, 0.2).unwrap();
        let bx = kron_axis_matrix(&ops, 0);
        let by = kron_axis_matrix(&ops, 1);
        let comm = bx.matmul(&by).sub(&by.matmul(&bx)).max_abs();
        let scale = bx.matmul(&by).max_abs().max(1.0);
        assert!(comm <= 1e-13 * scale, "commutator {comm:e}");
    }

    #[test]
    fn companion_8x8_riesz() {
        let mk =
            |axis| AxisSpec::constant(0.0, 1.0, 9, order(1.9), 1.0, 1.0, 0.0).map(|ax| (ax, axis));
        let (axx, _) = mk(0).unwrap();
        let (axy, _) = mk(1).unwrap();
        let p = Problem::new(
            vec![axx, axy],
            TimeSpec::new(10.0 / 9.0, 1).unwrap(), // tau = 10 dx
            Forcing::Analytic(Arc::new(|_, _| 0.0)),
            Arc::new(|_: &[f64]| 0.0),
            None,
        )
        .unwrap();
        let rep = verify_iteration_spectrum(&p, SchemeKind::DAdiII).unwrap();
        assert!(rep.pass, "{:?}", rep.notes);
        assert_eq!(rep.root_condition_ok, Some(true));
        let r = rep.spectral_radius.unwrap();
        assert!(r < 1.0, "radius {r}");
        // frozen from a dense eigensolve of the 128x128 companion matrix
        assert!((r - 0.99585356).abs() < 1e-4, "radius {r}");
    }
}
