//! Domain types shared by all solver modules: fractional orders, axes,
//! time grids, fields over interior mesh nodes, and problem definitions.
//!
//! Boundaries are homogeneous Dirichlet throughout, so boundary nodes are
//! never stored: a [`Field`] holds interior values only, flattened x-fastest
//! (the linear index of interior node `(i, j, m)`, 1-based per axis, is
//! `(i-1) + (Nx-1)*((j-1) + (Ny-1)*(m-1))`).

use std::sync::Arc;

use crate::error::{Error, Result};

/// A fractional exponent strictly inside (1, 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && 1.0 < value && value < 2.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidOrder(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Coefficient function of one axis coordinate.
pub type CoeffFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One spatial axis: endpoints, node count, fractional order, and the
/// coefficient functions `d1`, `d2` (diffusion, non-negative) and `kappa`
/// (advection) evaluated node-wise.
#[derive(Clone)]
pub struct AxisSpec {
    lo: f64,
    hi: f64,
    n: usize,
    order: FracOrder,
    d1: CoeffFn,
    d2: CoeffFn,
    kappa: CoeffFn,
}

impl AxisSpec {
    pub fn new(
        lo: f64,
        hi: f64,
        n: usize,
        order: FracOrder,
        d1: CoeffFn,
        d2: CoeffFn,
        kappa: CoeffFn,
    ) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidAxis(format!(
                "need hi > lo, got [{lo}, {hi}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidAxis(format!("need n >= 2, got {n}")));
        }
        let axis = Self {
            lo,
            hi,
            n,
            order,
            d1,
            d2,
            kappa,
        };
        for (name, f) in [("d1", &axis.d1), ("d2", &axis.d2)] {
            for i in 1..n {
                let x = axis.node(i);
                let v = f(x);
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidAxis(format!(
                        "{name}({x}) = {v}; diffusion coefficients must be finite and >= 0"
                    )));
                }
            }
        }
        Ok(axis)
    }

    /// Constant-coefficient convenience constructor.
    pub fn constant(
        lo: f64,
        hi: f64,
        n: usize,
        order: FracOrder,
        d1: f64,
        d2: f64,
        kappa: f64,
    ) -> Result<Self> {
        Self::new(
            lo,
            hi,
            n,
            order,
            Arc::new(move |_| d1),
            Arc::new(move |_| d2),
            Arc::new(move |_| kappa),
        )
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    /// Uniform spacing `(hi - lo) / n`.
    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    /// Node coordinate `lo + i * step`, `0 <= i <= n`.
    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step()
    }

    /// Number of interior unknowns `n - 1`.
    pub fn interior_len(&self) -> usize {
        self.n - 1
    }

    /// Interior node coordinates `x_1 .. x_{n-1}`.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.n).map(|i| self.node(i)).collect()
    }

    pub fn d1_at(&self, x: f64) -> f64 {
        (self.d1)(x)
    }

    pub fn d2_at(&self, x: f64) -> f64 {
        (self.d2)(x)
    }

    pub fn kappa_at(&self, x: f64) -> f64 {
        (self.kappa)(x)
    }
}

impl std::fmt::Debug for AxisSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AxisSpec")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("n", &self.n)
            .field("order", &self.order.value())
            .finish()
    }
}

/// All node coordinates of an axis, `lo` to `hi` inclusive.
pub fn build_mesh(axis: &AxisSpec) -> Vec<f64> {
    (0..=axis.n()).map(|i| axis.node(i)).collect()
}

/// Time grid: final time `T` and number of steps, `tau = T / n_steps`.
#[derive(Debug, Clone, Copy)]
pub struct TimeSpec {
    t_end: f64,
    n_steps: usize,
}

impl TimeSpec {
    /// `n_steps = 0` is allowed and means "do not advance" (drivers then
    /// return the sampled initial state); `tau` requires `n_steps >= 1`.
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidTime(format!("need T > 0, got {t_end}")));
        }
        Ok(Self { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn tau(&self) -> f64 {
        assert!(self.n_steps > 0, "tau undefined without steps");
        self.t_end / self.n_steps as f64
    }
}

/// Grid function over interior mesh nodes, dense, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    extents: Vec<usize>,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(extents: &[usize]) -> Self {
        assert!(
            (1..=3).contains(&extents.len()) && extents.iter().all(|&e| e > 0),
            "field needs 1-3 positive extents"
        );
        Self {
            extents: extents.to_vec(),
            values: vec![0.0; extents.iter().product()],
        }
    }

    pub fn from_values(extents: &[usize], values: Vec<f64>) -> Self {
        assert_eq!(values.len(), extents.iter().product::<usize>());
        assert!((1..=3).contains(&extents.len()));
        Self {
            extents: extents.to_vec(),
            values,
        }
    }

    pub fn dims(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Linear index of the interior node with 1-based per-axis indices.
    pub fn index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims());
        let mut lin = 0usize;
        for d in (0..self.dims()).rev() {
            debug_assert!((1..=self.extents[d]).contains(&idx[d]));
            lin = lin * self.extents[d] + (idx[d] - 1);
        }
        lin
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn two_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Hard error when any entry is NaN or infinite.
    pub fn ensure_finite(&self, context: &str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(context.into()))
        }
    }

    pub fn same_shape(&self, other: &Field) -> Result<()> {
        if self.extents == other.extents {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.extents.clone(),
                got: other.extents.clone(),
            })
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Field) {
        debug_assert_eq!(self.extents, other.extents);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in self.values.iter_mut() {
            *a *= s;
        }
    }
}

/// Pointwise function of (point, t).
pub type SpaceTimeFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
/// Pointwise function of a point.
pub type SpaceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Scalar function of time.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How a problem's forcing term is evaluated.
#[derive(Clone)]
pub enum Forcing {
    /// Pointwise closure `f(point, t)`.
    Analytic(SpaceTimeFn),
    /// Time-separable gridded profile: `f(node, t) = time(t) * profile[node]`.
    /// Valid only for the mesh it was computed on; `profile` is interior,
    /// x-fastest. Used for forcings derived numerically on a fixed grid.
    SeparableGrid {
        profile: Arc<Vec<f64>>,
        time: TimeFn,
    },
}

/// Which sampled function [`Problem::sample_field`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sample {
    Initial,
    Exact,
}

/// A complete initial-boundary-value problem on a 1-3D box with homogeneous
/// Dirichlet boundaries.
#[derive(Clone)]
pub struct Problem {
    axes: Vec<AxisSpec>,
    time: TimeSpec,
    forcing: Forcing,
    initial: SpaceFn,
    exact: Option<SpaceTimeFn>,
}

impl Problem {
    pub fn new(
        axes: Vec<AxisSpec>,
        time: TimeSpec,
        forcing: Forcing,
        initial: SpaceFn,
        exact: Option<SpaceTimeFn>,
    ) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::InvalidProblem(format!(
                "need 1-3 axes, got {}",
                axes.len()
            )));
        }
        let p = Self {
            axes,
            time,
            forcing,
            initial,
            exact,
        };
        p.check_boundary_initial()?;
        p.check_exact_matches_initial()?;
        Ok(p)
    }

    /// Homogeneous Dirichlet data: the initial condition must vanish on the
    /// whole boundary.
    fn check_boundary_initial(&self) -> Result<()> {
        let mut worst: f64 = 0.0;
        self.for_each_boundary_node(|point| {
            worst = worst.max((self.initial)(point).abs());
        });
        if worst > 1e-12 {
            return Err(Error::InvalidProblem(format!(
                "initial condition does not vanish on the boundary (max |u0| = {worst:e})"
            )));
        }
        Ok(())
    }

    fn check_exact_matches_initial(&self) -> Result<()> {
        let Some(exact) = &self.exact else {
            return Ok(());
        };
        let init = self.sample_field(Sample::Initial, 0.0)?;
        let mut worst = 0.0f64;
        let mut point = vec![0.0; self.dims()];
        self.for_each_interior(|lin, p| {
            point.copy_from_slice(p);
            let d = (exact(&point, 0.0) - init.values()[lin]).abs();
            if d > worst {
                worst = d;
            }
        });
        if worst > 1e-12 {
            return Err(Error::InvalidProblem(format!(
                "exact(., 0) disagrees with the initial condition (max diff {worst:e})"
            )));
        }
        Ok(())
    }

    fn for_each_boundary_node(&self, mut f: impl FnMut(&[f64])) {
        // walk the full node lattice, visiting only points with some index at 0 or n
        let dims = self.dims();
        let counts: Vec<usize> = self.axes.iter().map(|a| a.n() + 1).collect();
        let mut idx = vec![0usize; dims];
        let mut point = vec![0.0; dims];
        loop {
            let on_boundary = idx
                .iter()
                .zip(&self.axes)
                .any(|(&i, a)| i == 0 || i == a.n());
            if on_boundary {
                for d in 0..dims {
                    point[d] = self.axes[d].node(idx[d]);
                }
                f(&point);
            }
            // lexicographic advance
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < counts[d] {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == dims {
                    return;
                }
            }
        }
    }

    /// Visit every interior node: `(linear index, point coordinates)`.
    pub fn for_each_interior(&self, mut f: impl FnMut(usize, &[f64])) {
        let dims = self.dims();
        let ext = self.extents();
        let mut idx = vec![1usize; dims];
        let mut point: Vec<f64> = (0..dims).map(|d| self.axes[d].node(1)).collect();
        let mut lin = 0usize;
        loop {
            f(lin, &point);
            lin += 1;
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] <= ext[d] {
                    point[d] = self.axes[d].node(idx[d]);
                    break;
                }
                idx[d] = 1;
                point[d] = self.axes[d].node(1);
                d += 1;
                if d == dims {
                    return;
                }
            }
        }
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn time(&self) -> TimeSpec {
        self.time
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Interior extents per axis.
    pub fn extents(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.interior_len()).collect()
    }

    /// Total interior unknowns.
    pub fn unknowns(&self) -> usize {
        self.extents().iter().product()
    }

    /// Sample the initial or exact function on the interior mesh at time `t`.
    pub fn sample_field(&self, which: Sample, t: f64) -> Result<Field> {
        let ext = self.extents();
        let mut field = Field::zeros(&ext);
        match which {
            Sample::Initial => {
                let init = self.initial.clone();
                self.for_each_interior(|lin, p| field.values_mut()[lin] = init(p));
            }
            Sample::Exact => {
                let exact = self.exact.clone().ok_or(Error::MissingExact)?;
                self.for_each_interior(|lin, p| field.values_mut()[lin] = exact(p, t));
            }
        }
        Ok(field)
    }

    /// Sample the forcing on the interior mesh at time `t`.
    pub fn sample_forcing(&self, t: f64) -> Field {
        let ext = self.extents();
        let mut field = Field::zeros(&ext);
        match &self.forcing {
            Forcing::Analytic(f) => {
                let f = f.clone();
                self.for_each_interior(|lin, p| field.values_mut()[lin] = f(p, t));
            }
            Forcing::SeparableGrid { profile, time } => {
                assert_eq!(
                    profile.len(),
                    field.len(),
                    "gridded forcing was computed for a different mesh"
                );
                let s = time(t);
                for (v, g) in field.values_mut().iter_mut().zip(profile.iter()) {
                    *v = s * g;
                }
            }
        }
        field
    }
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("axes", &self.axes)
            .field("time", &self.time)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}
