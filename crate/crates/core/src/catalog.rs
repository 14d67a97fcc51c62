//! The four manufactured benchmark problems.
//!
//! * `p1d` - two-sided fractional convection-diffusion on (0,1), T = 1,
//!   constant unit coefficients, exact `e^{-t} x^2 (1-x)^2`.
//! * `p2d` - two-sided problem on (0,2)^2, T = 2, variable coefficients
//!   `d1 = Gamma(3-mu) s^mu`, `d2 = Gamma(3-mu) (2-s)^mu`, `kappa = s/4`
//!   per axis, exact `4 e^{-t} x^2(2-x)^2 y^2(2-y)^2`.
//! * `p3d` - the 3D analogue on (0,2)^3 with the forcing derived in closed
//!   form by the Riemann-Liouville power rule (see [`build_forcing_3d`]).
//! * `riesz2d` - Riesz diffusion on (0,1)^2, T = 1, d = 1, kappa = 0, exact
//!   `e^{-t} sin((2x)^4) sin((2-2x)^4) sin((2y)^4) sin((2-2y)^4)`; its
//!   forcing has no closed form and comes from the refined-grid oracle,
//!   cached per (n, alpha, beta).
//!
//! All four share the time factor `e^{-t}`, so forcing profiles are spatial.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::frac::gamma;
use crate::model::{AxisSpec, Forcing, FracOrder, Problem, SpaceFn, SpaceTimeFn, TimeSpec};
use crate::oracle::{forcing_oracle, DEFAULT_GATE, DEFAULT_REFINEMENT};

/// Benchmark problem identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    P1d,
    P2d,
    P3d,
    Riesz2d,
}

impl ProblemId {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p1d" => Ok(Self::P1d),
            "p2d" => Ok(Self::P2d),
            "p3d" => Ok(Self::P3d),
            "riesz2d" => Ok(Self::Riesz2d),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::P1d => "p1d",
            Self::P2d => "p2d",
            Self::P3d => "p3d",
            Self::Riesz2d => "riesz2d",
        }
    }

    pub fn dims(self) -> usize {
        match self {
            Self::P1d => 1,
            Self::P2d | Self::Riesz2d => 2,
            Self::P3d => 3,
        }
    }

    /// Domain endpoints (all axes share them).
    pub fn domain(self) -> (f64, f64) {
        match self {
            Self::P1d | Self::Riesz2d => (0.0, 1.0),
            Self::P2d | Self::P3d => (0.0, 2.0),
        }
    }

    pub fn t_end(self) -> f64 {
        match self {
            Self::P1d | Self::Riesz2d => 1.0,
            Self::P2d | Self::P3d => 2.0,
        }
    }
}

impl std::fmt::Display for ProblemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One catalog row: problem id plus its fractional-order slots.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub id: ProblemId,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma_order: Option<f64>,
}

impl CatalogEntry {
    pub fn new(id: ProblemId, alpha: f64, beta: Option<f64>, gamma_order: Option<f64>) -> Self {
        Self {
            id,
            alpha,
            beta,
            gamma_order,
        }
    }

    /// Instantiate the problem on an `n`-interval-per-axis mesh with
    /// `n_steps` time steps at the problem's canonical final time.
    pub fn build(&self, n: usize, n_steps: usize) -> Result<Problem> {
        self.build_with_time(n, TimeSpec::new(self.id.t_end(), n_steps)?)
    }

    /// Same, with an explicit time grid.
    pub fn build_with_time(&self, n: usize, time: TimeSpec) -> Result<Problem> {
        let need = self.id.dims();
        let beta = self.beta.unwrap_or(self.alpha);
        let gamma_order = self.gamma_order.unwrap_or(beta);
        if need < 2 && self.beta.is_some() {
            return Err(Error::Config("p1d takes only alpha".into()));
        }
        match self.id {
            ProblemId::P1d => p1d(self.alpha, n, time),
            ProblemId::P2d => p2d(self.alpha, beta, n, time),
            ProblemId::P3d => p3d(self.alpha, beta, gamma_order, n, time),
            ProblemId::Riesz2d => riesz2d(self.alpha, beta, n, time),
        }
    }
}

/// Closed-form forcing of the 1D benchmark.
pub fn forcing_1d(alpha: f64) -> SpaceTimeFn {
    Arc::new(move |p: &[f64], t: f64| {
        let x = p[0];
        let a = alpha;
        -(-t).exp()
            * ((x * (1.0 - x)).powi(2)
                + (4.0 * x.powi(3) - 6.0 * x.powi(2) + 2.0 * x)
                + gamma(3.0) / gamma(3.0 - a) * (x.powf(2.0 - a) + (1.0 - x).powf(2.0 - a))
                - 2.0 * gamma(4.0) / gamma(4.0 - a) * (x.powf(3.0 - a) + (1.0 - x).powf(3.0 - a))
                + gamma(5.0) / gamma(5.0 - a) * (x.powf(4.0 - a) + (1.0 - x).powf(4.0 - a)))
    })
}

/// Closed-form forcing of the 2D benchmark.
pub fn forcing_2d(alpha: f64, beta: f64) -> SpaceTimeFn {
    Arc::new(move |p: &[f64], t: f64| {
        let (x, y) = (p[0], p[1]);
        let et = (-t).exp();
        let t1 = -4.0
            * et
            * x.powi(2)
            * y.powi(2)
            * (x - 2.0)
            * (y - 2.0)
            * (3.0 * x * y - 5.0 * x - 5.0 * y + 8.0);
        let t2 = -32.0 * et * (y * (2.0 - y)).powi(2) * diffusion_bracket(x, alpha);
        let t3 = -32.0 * et * (x * (2.0 - x)).powi(2) * diffusion_bracket(y, beta);
        t1 + t2 + t3
    })
}

/// `s^2 + (2-s)^2 - 3 (s^3 + (2-s)^3)/(3-mu) + 3 (s^4 + (2-s)^4)/((3-mu)(4-mu))`
/// - what `d1 D_L + d2 D_R` applied to `s^2 (2-s)^2` collapses to (divided by
/// 8) once the power rule meets the `Gamma(3-mu) s^mu` coefficients.
fn diffusion_bracket(s: f64, mu: f64) -> f64 {
    let sm = 2.0 - s;
    s.powi(2) + sm.powi(2) - 3.0 * (s.powi(3) + sm.powi(3)) / (3.0 - mu)
        + 3.0 * (s.powi(4) + sm.powi(4)) / ((3.0 - mu) * (4.0 - mu))
}

/// Closed-form forcing of the 3D benchmark, derived termwise with the
/// Riemann-Liouville power rule `D^mu s^p = Gamma(p+1)/Gamma(p+1-mu) s^(p-mu)`
/// applied to `4 s^2 (2-s)^2 = 16 s^2 - 16 s^3 + 4 s^4` (and its mirror for
/// the right derivative): with `X = x^2(2-x)^2` etc.,
///
/// ```text
/// f = -e^{-t} [ 4 X Y Z
///             + 4 x^2 (2-x)(1-x) Y Z + (y, z analogues)      // advection
///             + 32 (Y Z P_a(x) + X Z P_b(y) + X Y P_c(z)) ]  // diffusion
/// ```
///
/// where `P_mu` is the same bracket as in the 2D forcing. With all
/// coefficients zero only the time derivative survives: `f = u_t = -u`.
pub fn build_forcing_3d(alpha: f64, beta: f64, gamma_order: f64) -> SpaceTimeFn {
    forcing_3d_with_switches(alpha, beta, gamma_order, true)
}

fn forcing_3d_with_switches(
    alpha: f64,
    beta: f64,
    gamma_order: f64,
    with_operator: bool,
) -> SpaceTimeFn {
    Arc::new(move |p: &[f64], t: f64| {
        let (x, y, z) = (p[0], p[1], p[2]);
        let bump = |s: f64| (s * (2.0 - s)).powi(2);
        let (bx, by, bz) = (bump(x), bump(y), bump(z));
        let mut total = 4.0 * bx * by * bz;
        if with_operator {
            let adv = |s: f64| 4.0 * s.powi(2) * (2.0 - s) * (1.0 - s);
            total += adv(x) * by * bz + adv(y) * bx * bz + adv(z) * bx * by;
            total += 32.0
                * (by * bz * diffusion_bracket(x, alpha)
                    + bx * bz * diffusion_bracket(y, beta)
                    + bx * by * diffusion_bracket(z, gamma_order));
        }
        -(-t).exp() * total
    })
}

/// 3D forcing with the spatial operator switched off (`f = u_t`), used to
/// check the zero-coefficient degeneration.
pub fn forcing_3d_time_derivative_only() -> SpaceTimeFn {
    forcing_3d_with_switches(0.0, 0.0, 0.0, false)
}

fn order(v: f64) -> Result<FracOrder> {
    FracOrder::new(v)
}

/// 1D benchmark problem.
pub fn p1d(alpha: f64, n: usize, time: TimeSpec) -> Result<Problem> {
    let ax = AxisSpec::constant(0.0, 1.0, n, order(alpha)?, 1.0, 1.0, 1.0)?;
    Problem::new(
        vec![ax],
        time,
        Forcing::Analytic(forcing_1d(alpha)),
        Arc::new(|p: &[f64]| (p[0] * (1.0 - p[0])).powi(2)),
        Some(Arc::new(|p: &[f64], t: f64| {
            (-t).exp() * (p[0] * (1.0 - p[0])).powi(2)
        })),
    )
}

fn benchmark_axis_2d3d(mu: f64, n: usize) -> Result<AxisSpec> {
    let ord = order(mu)?;
    AxisSpec::new(
        0.0,
        2.0,
        n,
        ord,
        Arc::new(move |s| gamma(3.0 - mu) * s.powf(mu)),
        Arc::new(move |s| gamma(3.0 - mu) * (2.0 - s).powf(mu)),
        Arc::new(|s| 0.25 * s),
    )
}

/// 2D benchmark problem.
pub fn p2d(alpha: f64, beta: f64, n: usize, time: TimeSpec) -> Result<Problem> {
    let axes = vec![
        benchmark_axis_2d3d(alpha, n)?,
        benchmark_axis_2d3d(beta, n)?,
    ];
    Problem::new(
        axes,
        time,
        Forcing::Analytic(forcing_2d(alpha, beta)),
        Arc::new(|p: &[f64]| 4.0 * (p[0] * (2.0 - p[0])).powi(2) * (p[1] * (2.0 - p[1])).powi(2)),
        Some(Arc::new(|p: &[f64], t: f64| {
            4.0 * (-t).exp() * (p[0] * (2.0 - p[0])).powi(2) * (p[1] * (2.0 - p[1])).powi(2)
        })),
    )
}

/// 3D benchmark problem.
pub fn p3d(alpha: f64, beta: f64, gamma_order: f64, n: usize, time: TimeSpec) -> Result<Problem> {
    let axes = vec![
        benchmark_axis_2d3d(alpha, n)?,
        benchmark_axis_2d3d(beta, n)?,
        benchmark_axis_2d3d(gamma_order, n)?,
    ];
    let bump = |s: f64| (s * (2.0 - s)).powi(2);
    Problem::new(
        axes,
        time,
        Forcing::Analytic(build_forcing_3d(alpha, beta, gamma_order)),
        Arc::new(move |p: &[f64]| 4.0 * bump(p[0]) * bump(p[1]) * bump(p[2])),
        Some(Arc::new(move |p: &[f64], t: f64| {
            4.0 * (-t).exp() * bump(p[0]) * bump(p[1]) * bump(p[2])
        })),
    )
}

/// Spatial factor of the Riesz benchmark's exact solution, one axis.
pub fn riesz_profile_1d(s: f64) -> f64 {
    ((2.0 * s).powi(4)).sin() * ((2.0 - 2.0 * s).powi(4)).sin()
}

type RieszKey = (usize, u64, u64);
static RIESZ_CACHE: OnceLock<Mutex<HashMap<RieszKey, Arc<Vec<f64>>>>> = OnceLock::new();

/// Riesz diffusion benchmark. The forcing profile is computed once per
/// `(n, alpha, beta)` by the refined-grid oracle and cached for the process.
pub fn riesz2d(alpha: f64, beta: f64, n: usize, time: TimeSpec) -> Result<Problem> {
    let mk_axis = |mu: f64| -> Result<AxisSpec> {
        AxisSpec::constant(0.0, 1.0, n, order(mu)?, 1.0, 1.0, 0.0)
    };
    let axes = vec![mk_axis(alpha)?, mk_axis(beta)?];

    let key: RieszKey = (n, alpha.to_bits(), beta.to_bits());
    let cache = RIESZ_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let profile = {
        let hit = cache.lock().unwrap().get(&key).cloned();
        match hit {
            Some(p) => p,
            None => {
                let spatial: SpaceFn =
                    Arc::new(|p: &[f64]| riesz_profile_1d(p[0]) * riesz_profile_1d(p[1]));
                let f = forcing_oracle(&axes, &spatial, DEFAULT_REFINEMENT, DEFAULT_GATE)?;
                let p = Arc::new(f.profile);
                cache.lock().unwrap().insert(key, p.clone());
                p
            }
        }
    };

    Problem::new(
        axes,
        time,
        Forcing::SeparableGrid {
            profile,
            time: Arc::new(|t: f64| (-t).exp()),
        },
        Arc::new(|p: &[f64]| riesz_profile_1d(p[0]) * riesz_profile_1d(p[1])),
        Some(Arc::new(|p: &[f64], t: f64| {
            (-t).exp() * riesz_profile_1d(p[0]) * riesz_profile_1d(p[1])
        })),
    )
}
