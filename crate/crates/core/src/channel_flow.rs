//! Implicit-Euler, central-difference discretization of pressure-driven
//! channel flow between two no-slip walls:
//!
//! ```text
//! du/dt = -(1/rho) dp/dx + nu d2u/dy2,   u(0) = u(h) = 0
//! ```
//!
//! Wall values are eliminated, so the unknowns are the `Ngp - 2` interior
//! grid values and each step solves a symmetric tridiagonal system.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Physical and numerical parameters of the channel-flow problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowParams {
    /// Channel width `h`; the domain is `[0, h]`.
    pub height: f64,
    pub density: f64,
    pub dynamic_viscosity: f64,
    /// Constant pressure gradient `dp/dx`.
    pub pressure_gradient: f64,
    /// Carried for completeness; the momentum balance has no body force.
    pub body_force: f64,
    /// Diffusion number `nu * dt / dy^2`. Prescribed; `dt` is derived from it.
    pub alpha: f64,
    pub n_steps: usize,
    /// Grid points including both walls.
    pub grid_points: usize,
}

impl Default for FlowParams {
    /// The reference configuration: unit channel, rho=0.5, mu=0.6,
    /// dp/dx=-2, alpha=0.4, ten steps on a five point grid.
    fn default() -> Self {
        Self {
            height: 1.0,
            density: 0.5,
            dynamic_viscosity: 0.6,
            pressure_gradient: -2.0,
            body_force: 0.4,
            alpha: 0.4,
            n_steps: 10,
            grid_points: 5,
        }
    }
}

impl FlowParams {
    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("height", self.height),
            ("density", self.density),
            ("viscosity", self.dynamic_viscosity),
            ("alpha", self.alpha),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if !self.pressure_gradient.is_finite() || !self.body_force.is_finite() {
            return Err(Error::Config("forcing terms must be finite".into()));
        }
        if self.grid_points < 3 {
            return Err(Error::Config(format!(
                "need at least 3 grid points, got {}",
                self.grid_points
            )));
        }
        Ok(())
    }

    /// `nu = mu / rho`.
    pub fn kinematic_viscosity(&self) -> f64 {
        self.dynamic_viscosity / self.density
    }

    pub fn dy(&self) -> f64 {
        self.height / (self.grid_points - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        let dy = self.dy();
        self.alpha * dy * dy / self.kinematic_viscosity()
    }

    pub fn interior_points(&self) -> usize {
        self.grid_points - 2
    }

    /// Wall-normal coordinate of grid point `i`.
    pub fn y(&self, i: usize) -> f64 {
        i as f64 * self.dy()
    }

    /// Steady Poiseuille profile `-(dp/dx)/(2 mu) * y (h - y)`.
    pub fn analytic_steady_profile(&self, y: f64) -> f64 {
        -self.pressure_gradient / (2.0 * self.dynamic_viscosity) * y * (self.height - y)
    }
}

/// Velocity at every grid point, walls included.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionProfile {
    pub values: Vec<f64>,
    pub time_index: usize,
}

impl SolutionProfile {
    pub fn zeros(grid_points: usize) -> Self {
        Self {
            values: vec![0.0; grid_points],
            time_index: 0,
        }
    }

    /// Surround interior values with the two zero wall values.
    pub fn from_interior(interior: &[f64], time_index: usize) -> Self {
        let mut values = Vec::with_capacity(interior.len() + 2);
        values.push(0.0);
        values.extend_from_slice(interior);
        values.push(0.0);
        Self { values, time_index }
    }

    pub fn interior(&self) -> &[f64] {
        let n = self.values.len();
        &self.values[1..n - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_walls(&self, grid_points: usize) -> Result<()> {
        if self.values.len() != grid_points {
            return Err(Error::Dimension(format!(
                "profile has {} points, grid has {grid_points}",
                self.values.len()
            )));
        }
        if self.values[0] != 0.0 || self.values[grid_points - 1] != 0.0 {
            return Err(Error::Config("profile violates the no-slip walls".into()));
        }
        Ok(())
    }
}

/// Tridiagonal system `A u = b` stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    /// `A[i+1][i]`
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// `A[i][i+1]`
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || rhs.len() != n || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::Dimension(format!(
                "tridiagonal bands {}/{}/{} with rhs {}",
                lower.len(),
                n,
                upper.len(),
                rhs.len()
            )));
        }
        Ok(Self {
            lower,
            diag,
            upper,
            rhs,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = self.diag[i];
            if i + 1 < n {
                a[(i + 1, i)] = self.lower[i];
                a[(i, i + 1)] = self.upper[i];
            }
        }
        a
    }

    /// `A u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * u[i];
                if i > 0 {
                    s += self.lower[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * u[i + 1];
                }
                s
            })
            .collect()
    }

    /// `max_i |(A u - b)_i|`.
    pub fn residual_inf(&self, u: &[f64]) -> f64 {
        self.apply(u)
            .iter()
            .zip(&self.rhs)
            .map(|(au, b)| (au - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Assemble the implicit step from `prev` to the next time level.
pub fn assemble_system(params: &FlowParams, prev: &SolutionProfile) -> Result<LinearSystem> {
    params.validate()?;
    prev.check_walls(params.grid_points)?;
    let n = params.interior_points();
    let alpha = params.alpha;
    let forcing = params.dt() / params.density * params.pressure_gradient;
    let rhs = prev.interior().iter().map(|u| u - forcing).collect();
    LinearSystem::new(
        vec![-alpha; n - 1],
        vec![1.0 + 2.0 * alpha; n],
        vec![-alpha; n - 1],
        rhs,
    )
}

/// Direct tridiagonal elimination (Thomas algorithm).
pub fn classical_solve(sys: &LinearSystem) -> Result<Vec<f64>> {
    let n = sys.dim();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];

    let mut pivot = sys.diag[0];
    if pivot == 0.0 {
        return Err(Error::Singular { row: 0 });
    }
    if n > 1 {
        c[0] = sys.upper[0] / pivot;
    }
    d[0] = sys.rhs[0] / pivot;
    for i in 1..n {
        pivot = sys.diag[i] - sys.lower[i - 1] * c[i - 1];
        if pivot == 0.0 {
            return Err(Error::Singular { row: i });
        }
        if i + 1 < n {
            c[i] = sys.upper[i] / pivot;
        }
        d[i] = (sys.rhs[i] - sys.lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// One implicit-Euler step in double precision.
pub fn step_classical(params: &FlowParams, prev: &SolutionProfile) -> Result<SolutionProfile> {
    let sys = assemble_system(params, prev)?;
    let interior = classical_solve(&sys)?;
    Ok(SolutionProfile::from_interior(
        &interior,
        prev.time_index + 1,
    ))
}

/// Step until the max-norm change between consecutive profiles drops below
/// `tol`. Returns the final profile; errors if `max_steps` is reached first.
pub fn iterate_to_steady(
    params: &FlowParams,
    initial: &SolutionProfile,
    tol: f64,
    max_steps: usize,
) -> Result<SolutionProfile> {
    let mut current = initial.clone();
    for _ in 0..max_steps {
        let next = step_classical(params, &current)?;
        let change = next
            .values
            .iter()
            .zip(&current.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        current = next;
        if change < tol {
            return Ok(current);
        }
    }
    Err(Error::Config(format!(
        "no steady state within {max_steps} steps at tolerance {tol}"
    )))
}
