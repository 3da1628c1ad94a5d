//! The unitary change of variables `Φ: L²(0,1) → L²(ℝ)`, the Fourier
//! transform, convolution with `G(t) = e^{t/2}·χ_{t<0}`, and the
//! multiplier `m(x) = 1/(½ − ix)` that `C` becomes under `ℱ∘Φ`.
//!
//! The Fourier transform uses `(ℱg)(s) = (2π)^{-1/2} ∫ g(u) e^{−ius} du`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Result;
use crate::funcspace::{line_norm, LineFn, LineGrid, UnitFn, UnitPoint, UnitScheme};
use crate::operators::{apply_fn, KernelSpec};
use crate::quadrature::gauss_legendre;

/// `(Φf)(u) = √(x(1−x))·f(x)` with `x = 1/(1 + eᵘ)`.
pub fn phi(f: &UnitFn) -> LineFn {
    let f = f.clone();
    LineFn::analytic(move |u| {
        let p = UnitPoint::from_log_odds(u);
        f.eval(p) * (p.x * p.xc).sqrt()
    })
}

/// `(Φ⁻¹g)(x) = g(log((1−x)/x)) / √(x(1−x))`.
pub fn phi_inv(g: &LineFn) -> UnitFn {
    let g = g.clone();
    UnitFn::point(move |p| g.eval(p.log_odds()) / (p.x * p.xc).sqrt())
}

/// `ℱg` sampled on `grid.dual()`, from samples of `g` on `grid`.
pub fn fourier(g: &LineFn, grid: &LineGrid) -> Result<LineFn> {
    let values = g.samples_on(grid)?;
    let scale = grid.spacing() / (2.0 * PI).sqrt();
    Ok(LineFn::sampled(grid.dual(), centered_dft(values, scale, false)))
}

/// `ℱ⁻¹G` sampled on `grid`, from samples of `G` on `grid.dual()`.
pub fn fourier_inv(big_g: &LineFn, grid: &LineGrid) -> Result<LineFn> {
    let dual = grid.dual();
    let values = big_g.samples_on(&dual)?;
    let scale = dual.spacing() / (2.0 * PI).sqrt();
    Ok(LineFn::sampled(*grid, centered_dft(values, scale, true)))
}

// With u_j = (j − n/2)h and s_k = (k − n/2)Δs, hΔs = 2π/n and n/2 even,
// e^{∓i u_j s_k} = (−1)^{j+k} e^{∓2πijk/n}.
fn centered_dft(mut values: Vec<Complex64>, scale: f64, inverse: bool) -> Vec<Complex64> {
    let n = values.len();
    let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
    for (j, v) in values.iter_mut().enumerate() {
        *v *= sign(j);
    }
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    fft.process(&mut values);
    for (k, v) in values.iter_mut().enumerate() {
        *v *= sign(k) * scale;
    }
    values
}

/// `G(t) = e^{t/2}` for `t < 0`, zero otherwise.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConvolutionKernel;

impl ConvolutionKernel {
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            (0.5 * t).exp()
        } else {
            0.0
        }
    }

    /// Value used on a grid: the midpoint of the jump at `t = 0`.
    pub fn grid_value(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.5
        } else {
            self.eval(t)
        }
    }

    /// `∫G = 2`.
    pub fn integral(&self) -> f64 {
        2.0
    }

    /// `(ℱG)(x) = (2π)^{-1/2}/(½ − ix)`.
    pub fn fourier(&self, x: f64) -> Complex64 {
        MultiplierSymbol.eval(x) / (2.0 * PI).sqrt()
    }

    pub fn as_line_fn(&self) -> LineFn {
        let k = *self;
        LineFn::real(move |t| k.grid_value(t))
    }
}

/// `(G∗g)(u) = ∫ᵤ^∞ e^{(u−s)/2} g(s) ds`, by backward recursion over the
/// cells of `grid` with a 4-point Gauss rule per cell. The integral beyond
/// the right end of the grid is dropped.
pub fn convolve_g(g: &LineFn, grid: &LineGrid) -> Result<LineFn> {
    let n = grid.len();
    let h = grid.spacing();
    let (nodes, weights) = gauss_legendre(4);
    let decay = (-0.5 * h).exp();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (0..n - 1).rev() {
        let u = grid.point(j);
        let mut cell = Complex64::new(0.0, 0.0);
        for (s, w) in nodes.iter().zip(&weights) {
            let t = 0.5 * h * (s + 1.0);
            cell += g.eval(u + t) * (0.5 * h * w * (-0.5 * t).exp());
        }
        acc = acc * decay + cell;
        out[j] = acc;
    }
    Ok(LineFn::sampled(*grid, out))
}

/// `m(x) = 1/(½ − ix)`, mapping `ℝ` onto `∂D(1,1) ∖ {0}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MultiplierSymbol;

impl MultiplierSymbol {
    pub fn eval(&self, x: f64) -> Complex64 {
        Complex64::new(0.5, -x).inv()
    }

    /// `m⁻¹(z) = −Im(1/z)`, valid on the circle where `Re(1/z) = ½`.
    pub fn inverse(&self, z: Complex64) -> f64 {
        -z.inv().im
    }

    /// `1 − m(x)`, the symbol of `I − C`.
    pub fn complement(&self, x: f64) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.eval(x)
    }

    /// `conj(m(x)) = m(−x)`, the symbol of `C*`.
    pub fn conjugate(&self, x: f64) -> Complex64 {
        self.eval(x).conj()
    }
}

/// Pointwise product `m·g`.
pub fn multiplier_apply(g: &LineFn) -> LineFn {
    match g {
        LineFn::Sampled { grid, values } => {
            let values = values.iter().enumerate().map(|(k, v)| v * MultiplierSymbol.eval(grid.point(k))).collect();
            LineFn::sampled(*grid, values)
        }
        LineFn::Analytic(f) => {
            let f = Arc::clone(f);
            LineFn::analytic(move |x| f(x) * MultiplierSymbol.eval(x))
        }
    }
}

/// `‖ℱΦ(Cf) − m·ℱΦf‖ / ‖f‖` on the dual grid, with `Cf` evaluated by
/// running integrals on `scheme`.
pub fn conjugation_defect(f: &UnitFn, scheme: &Arc<UnitScheme>, grid: &LineGrid) -> Result<f64> {
    let cf = apply_fn(KernelSpec::Cesaro, f, scheme)?;
    let lhs = fourier(&phi(&cf), grid)?;
    let rhs = multiplier_apply(&fourier(&phi(f), grid)?);
    let dual = grid.dual();
    let a = lhs.samples_on(&dual)?;
    let b = rhs.samples_on(&dual)?;
    let diff = LineFn::sampled(dual, a.iter().zip(&b).map(|(x, y)| x - y).collect());
    let denom = line_norm(&phi(f), grid)?;
    Ok(if denom == 0.0 { line_norm(&diff, &dual)? } else { line_norm(&diff, &dual)? / denom })
}

/// Eigenvalues of the periodic (circulant) realization of `g ↦ G∗g` on
/// `grid`, indexed by DFT frequency `k`, via one FFT of the kernel column.
/// The circulant is normal, so its singular values after a shift `λ` are
/// `|λ − eigenvalue|`.
pub fn circulant_symbol(grid: &LineGrid) -> Vec<Complex64> {
    let n = grid.len();
    let h = grid.spacing();
    // column entries c_d = h·G(d·h) for periodic offsets d
    let mut col: Vec<Complex64> = (0..n)
        .map(|d| {
            let offset = if d <= n / 2 { d as f64 } else { d as f64 - n as f64 };
            Complex64::new(h * ConvolutionKernel.grid_value(offset * h), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut col);
    col
}

/// Smallest singular value of `λI − (circulant realization of C)`.
pub fn circulant_smallest_singular_value(grid: &LineGrid, lambda: Complex64) -> f64 {
    circulant_symbol(grid).iter().map(|e| (lambda - e).norm()).fold(f64::INFINITY, f64::min)
}
