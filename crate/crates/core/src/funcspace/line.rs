use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::CompensatedSum;

pub type LineEval = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Centered uniform grid `u_j = (j − n/2)·spacing`, `j = 0..n`, on the
/// truncated line `[−L, L)` with `L = n·spacing/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    n: usize,
    spacing: f64,
}

impl LineGrid {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("grid size {n} must be a power of two >= 16")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Grid(format!("half width {half_width} must be positive")));
        }
        Ok(LineGrid { n, spacing: 2.0 * half_width / n as f64 })
    }

    /// Default transform grid: `2¹⁴` points on `[−40, 40)`.
    pub fn standard() -> Self {
        LineGrid::new(1 << 14, 40.0).expect("valid default grid")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.n as f64 * self.spacing
    }

    pub fn point(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }

    /// Frequency grid paired with this one: `Δu·Δs = 2π/n`.
    pub fn dual(&self) -> LineGrid {
        LineGrid { n: self.n, spacing: 2.0 * PI / (self.n as f64 * self.spacing) }
    }
}

/// A complex-valued function on `ℝ`.
#[derive(Clone)]
pub enum LineFn {
    Analytic(LineEval),
    Sampled { grid: LineGrid, values: Vec<Complex64> },
}

impl fmt::Debug for LineFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineFn::Analytic(_) => write!(f, "LineFn::Analytic"),
            LineFn::Sampled { grid, .. } => write!(f, "LineFn::Sampled({grid:?})"),
        }
    }
}

const STENCIL: usize = 8;

impl LineFn {
    pub fn analytic(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        LineFn::Analytic(Arc::new(f))
    }

    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::analytic(move |u| Complex64::new(f(u), 0.0))
    }

    pub fn sampled(grid: LineGrid, values: Vec<Complex64>) -> Self {
        assert_eq!(grid.len(), values.len());
        LineFn::Sampled { grid, values }
    }

    pub fn zero() -> Self {
        Self::analytic(|_| Complex64::new(0.0, 0.0))
    }

    /// Pointwise value; sampled functions use an 8-point centered Lagrange
    /// stencil and vanish outside the grid.
    pub fn eval(&self, u: f64) -> Complex64 {
        match self {
            LineFn::Analytic(f) => f(u),
            LineFn::Sampled { grid, values } => interpolate_uniform(grid, values, u),
        }
    }

    /// Values on `grid`, interpolating if sampled on another grid.
    pub fn samples_on(&self, grid: &LineGrid) -> Result<Vec<Complex64>> {
        match self {
            LineFn::Sampled { grid: g, values } if g == grid => Ok(values.clone()),
            _ => {
                let mut out = Vec::with_capacity(grid.len());
                for u in grid.points() {
                    let v = self.eval(u);
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err(Error::Evaluation { x: u });
                    }
                    out.push(v);
                }
                Ok(out)
            }
        }
    }

    pub fn sample(&self, grid: &LineGrid) -> Result<LineFn> {
        Ok(LineFn::sampled(*grid, self.samples_on(grid)?))
    }

    pub fn grid(&self) -> Option<&LineGrid> {
        match self {
            LineFn::Sampled { grid, .. } => Some(grid),
            LineFn::Analytic(_) => None,
        }
    }
}

fn interpolate_uniform(grid: &LineGrid, values: &[Complex64], u: f64) -> Complex64 {
    let n = grid.len();
    let pos = u / grid.spacing + (n / 2) as f64;
    if pos < -0.5 || pos > n as f64 - 0.5 {
        return Complex64::new(0.0, 0.0);
    }
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-13 {
        return values[(nearest as usize).min(n - 1)];
    }
    let start = (pos.floor() as isize - (STENCIL as isize / 2 - 1)).clamp(0, (n - STENCIL) as isize) as usize;
    // Barycentric weights for equispaced nodes: (−1)^j C(7, j).
    const W: [f64; STENCIL] = [1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0];
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (j, w) in W.iter().enumerate() {
        let t = w / (pos - (start + j) as f64);
        num += values[start + j] * t;
        den += t;
    }
    num / den
}

/// Trapezoid inner product on the grid.
pub fn line_inner(f: &LineFn, g: &LineFn, grid: &LineGrid) -> Result<Complex64> {
    let a = f.samples_on(grid)?;
    let b = g.samples_on(grid)?;
    let mut acc = CompensatedSum::new();
    for (x, y) in a.iter().zip(&b) {
        acc.add(x * y.conj());
    }
    Ok(acc.value() * grid.spacing())
}

pub fn line_norm(f: &LineFn, grid: &LineGrid) -> Result<f64> {
    Ok(line_inner(f, f, grid)?.re.max(0.0).sqrt())
}

/// `L²` norm restricted to `|u| ≤ window`.
pub fn line_norm_windowed(f: &LineFn, grid: &LineGrid, window: f64) -> Result<f64> {
    let v = f.samples_on(grid)?;
    let mut acc = CompensatedSum::new();
    for (u, x) in grid.points().zip(&v) {
        if u.abs() <= window {
            acc.add(Complex64::new(x.norm_sqr(), 0.0));
        }
    }
    Ok((acc.value().re * grid.spacing()).max(0.0).sqrt())
}
