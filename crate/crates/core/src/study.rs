//! Convergence studies and the splitting-error comparison.
//!
//! A study runs one benchmark problem over a ladder of meshes (halving the
//! spacing each level, time step locked to `tau = nt_ratio * dx`), records
//! the maximum error at the final time, and the observed order between
//! consecutive levels. The splitting comparison reproduces the published
//! scheme table: fixed mesh, a list of `tau/dx` ratios, three schemes.

use crate::adi::run;
pub use crate::adi::SchemeKind;
use crate::config::RunConfig;
use crate::diagnostics::{max_error, observed_rate};
use crate::error::{Error, Result};
use crate::model::{Sample, TimeSpec};

/// One row of a convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub scheme: SchemeKind,
    pub problem: String,
    pub orders: Vec<f64>,
    pub level: usize,
    pub n: usize,
    pub delta: f64,
    pub tau: f64,
    pub error: Option<f64>,
    pub rate: Option<f64>,
    /// Failure description when the run did not finish.
    pub note: Option<String>,
}

/// Number of time steps for mesh `n` under the `tau = ratio * dx` lock.
/// Must land on an integer (within rounding slack), otherwise the ratio is
/// incompatible with the mesh.
pub fn steps_for(t_end: f64, dx: f64, ratio: f64) -> Result<usize> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::Config(format!("nt_ratio must be > 0, got {ratio}")));
    }
    let tau = ratio * dx;
    let steps = t_end / tau;
    let rounded = steps.round();
    if rounded < 1.0 || (steps - rounded).abs() > 1e-9 * steps.max(1.0) {
        return Err(Error::Config(format!(
            "tau = {ratio} * dx gives a non-integer step count {steps} for T = {t_end}"
        )));
    }
    Ok(rounded as usize)
}

/// Solve one configuration and measure its error against the exact solution.
pub fn solve_once(cfg: &RunConfig) -> Result<ConvergenceRecord> {
    let entry = cfg.catalog_entry();
    let t_end = cfg.t_end.unwrap_or(entry.id.t_end());
    let (lo, hi) = entry.id.domain();
    let dx = (hi - lo) / cfg.n as f64;
    let n_steps = steps_for(t_end, dx, cfg.nt_ratio)?;
    let problem = entry.build_with_time(cfg.n, TimeSpec::new(t_end, n_steps)?)?;
    let (field, _) = run(&problem, cfg.scheme)?;
    let exact = problem.sample_field(Sample::Exact, t_end)?;
    let error = max_error(&field, &exact)?;
    Ok(ConvergenceRecord {
        scheme: cfg.scheme,
        problem: entry.id.name().into(),
        orders: cfg.orders(),
        level: 0,
        n: cfg.n,
        delta: dx,
        tau: t_end / n_steps as f64,
        error: Some(error),
        rate: None,
        note: None,
    })
}

/// Run `cfg.levels` refinement levels, halving the spacing each time.
/// Failed levels are recorded in their row and the study continues.
pub fn run_convergence_study(cfg: &RunConfig) -> Result<Vec<ConvergenceRecord>> {
    if cfg.levels < 2 {
        return Err(Error::Config(format!(
            "a convergence study needs at least 2 levels, got {}",
            cfg.levels
        )));
    }
    let entry = cfg.catalog_entry();
    let t_end = cfg.t_end.unwrap_or(entry.id.t_end());
    let (lo, hi) = entry.id.domain();
    let mut records = Vec::with_capacity(cfg.levels);
    let mut prev_error: Option<f64> = None;

    for level in 0..cfg.levels {
        let n = cfg.n << level;
        let dx = (hi - lo) / n as f64;
        let mut rec = ConvergenceRecord {
            scheme: cfg.scheme,
            problem: entry.id.name().into(),
            orders: cfg.orders(),
            level,
            n,
            delta: dx,
            tau: f64::NAN,
            error: None,
            rate: None,
            note: None,
        };
        let outcome = (|| -> Result<f64> {
            let n_steps = steps_for(t_end, dx, cfg.nt_ratio)?;
            rec.tau = t_end / n_steps as f64;
            let problem = entry.build_with_time(n, TimeSpec::new(t_end, n_steps)?)?;
            let (field, _) = run(&problem, cfg.scheme)?;
            let exact = problem.sample_field(Sample::Exact, t_end)?;
            max_error(&field, &exact)
        })();
        match outcome {
            Ok(e) => {
                rec.error = Some(e);
                if let Some(pe) = prev_error {
                    rec.rate = Some(observed_rate(pe, e)?);
                }
                prev_error = Some(e);
            }
            Err(err) => {
                rec.note = Some(err.to_string());
                prev_error = None;
            }
        }
        records.push(rec);
    }
    Ok(records)
}

/// One row of the splitting comparison.
#[derive(Debug, Clone)]
pub struct SplittingRow {
    pub scheme: SchemeKind,
    pub ratio: f64,
    pub tau: f64,
    pub error: f64,
}

/// The published comparison protocol: `tau/dx` in {10, 5, 5/2, 1}.
pub const SPLITTING_RATIOS: [f64; 4] = [10.0, 5.0, 2.5, 1.0];

/// Fixed-mesh scheme comparison on the Riesz benchmark: D-ADI, FS-II and
/// D-ADI-II at each `tau/dx` ratio. The D-ADI-II and FS-II trajectories must
/// agree to 1e-13 in the final field; a violation is an algebra bug and
/// fails hard.
pub fn run_splitting_comparison(cfg: &RunConfig, ratios: &[f64]) -> Result<Vec<SplittingRow>> {
    let entry = cfg.catalog_entry();
    if entry.id != crate::catalog::ProblemId::Riesz2d {
        return Err(Error::NotAdmissible(
            "the splitting comparison is defined on the riesz2d benchmark".into(),
        ));
    }
    let t_end = cfg.t_end.unwrap_or(entry.id.t_end());
    let (lo, hi) = entry.id.domain();
    let dx = (hi - lo) / cfg.n as f64;
    let mut rows = Vec::new();
    for &ratio in ratios {
        let n_steps = steps_for(t_end, dx, ratio)?;
        let tau = t_end / n_steps as f64;
        let problem = entry.build_with_time(cfg.n, TimeSpec::new(t_end, n_steps)?)?;
        let exact = problem.sample_field(Sample::Exact, t_end)?;

        let (u_dadi, _) = run(&problem, SchemeKind::DAdi)?;
        let (u_dadi2, _) = run(&problem, SchemeKind::DAdiII)?;
        let (u_fs2, _) = run(&problem, SchemeKind::FsII)?;

        let equiv = max_error(&u_dadi2, &u_fs2)?;
        if equiv > 1e-13 {
            return Err(Error::InvalidProblem(format!(
                "D-ADI-II and FS-II disagree by {equiv:e} at ratio {ratio} (algebra bug)"
            )));
        }
        for (scheme, field) in [
            (SchemeKind::DAdi, &u_dadi),
            (SchemeKind::FsII, &u_fs2),
            (SchemeKind::DAdiII, &u_dadi2),
        ] {
            rows.push(SplittingRow {
                scheme,
                ratio,
                tau,
                error: max_error(field, &exact)?,
            });
        }
    }
    Ok(rows)
}
