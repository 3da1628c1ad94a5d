//! The Cesàro operator, its adjoint, the Volterra and Hardy operators, the
//! kernels of `CC*` and `C*C`, and dense matrix realizations.
//!
//! Each kernel is separable on its triangular support,
//! `K(x,t) = outer(x)·inner(t)`, so applying it to node samples costs one
//! running integral instead of a dense product.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::{
    cumulative, local_rule, panel_coefficients, running_integral_fn, Direction, Samples, UnitFn, UnitPoint,
    UnitScheme,
};
use crate::linalg::{embedding, DiscretizedOperator, IterationOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelSpec {
    /// `K(x,t) = 1/(x(1−t))` for `t ≤ x`.
    Cesaro,
    /// `K(x,t) = 1/(t(1−x))` for `t ≥ x`.
    CesaroAdjoint,
    /// `K(x,t) = 1` for `t ≤ x`.
    Volterra,
    /// `K(x,t) = 1/x` for `t ≤ x`.
    Hardy,
}

impl KernelSpec {
    pub const ALL: [KernelSpec; 4] =
        [KernelSpec::Cesaro, KernelSpec::CesaroAdjoint, KernelSpec::Volterra, KernelSpec::Hardy];

    /// True when the support is `t ≤ x`.
    pub fn is_lower(&self) -> bool {
        !matches!(self, KernelSpec::CesaroAdjoint)
    }

    pub fn outer(&self, x: UnitPoint) -> f64 {
        match self {
            KernelSpec::Cesaro | KernelSpec::Hardy => 1.0 / x.x,
            KernelSpec::CesaroAdjoint => 1.0 / x.xc,
            KernelSpec::Volterra => 1.0,
        }
    }

    pub fn inner(&self, t: UnitPoint) -> f64 {
        match self {
            KernelSpec::Cesaro => 1.0 / t.xc,
            KernelSpec::CesaroAdjoint => 1.0 / t.x,
            KernelSpec::Volterra | KernelSpec::Hardy => 1.0,
        }
    }

    pub fn eval(&self, x: UnitPoint, t: UnitPoint) -> f64 {
        let on_support = if self.is_lower() { t.x <= x.x } else { t.x >= x.x };
        if on_support {
            self.outer(x) * self.inner(t)
        } else {
            0.0
        }
    }

    fn direction(&self) -> Direction {
        if self.is_lower() {
            Direction::FromLeft
        } else {
            Direction::FromRight
        }
    }
}

/// Applies an integral operator to `f`, returning node samples on `scheme`.
pub fn apply(kernel: KernelSpec, f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    let inner = move |t: UnitPoint| Complex64::new(kernel.inner(t), 0.0);
    let running = cumulative(f, scheme, &inner, kernel.direction())?;
    Ok(running.map_points(|p, v| v * kernel.outer(p)))
}

/// Off-grid evaluator of the operator applied to `f`; agrees with
/// [`apply`] at the nodes.
pub fn apply_fn(kernel: KernelSpec, f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<UnitFn> {
    running_integral_fn(
        f,
        scheme,
        Arc::new(move |t| Complex64::new(kernel.inner(t), 0.0)),
        Arc::new(move |x| Complex64::new(kernel.outer(x), 0.0)),
        kernel.direction(),
    )
}

/// `(Cf)(x) = (1/x)∫₀ˣ f(t)/(1−t) dt`
pub fn apply_c(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    apply(KernelSpec::Cesaro, f, scheme)
}

/// `(C*f)(x) = (1/(1−x))∫ₓ¹ f(t)/t dt`
pub fn apply_cstar(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    apply(KernelSpec::CesaroAdjoint, f, scheme)
}

/// `(Vf)(x) = ∫₀ˣ f`
pub fn apply_v(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    apply(KernelSpec::Volterra, f, scheme)
}

/// `(Hf)(x) = (1/x)∫₀ˣ f`
pub fn apply_h(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    apply(KernelSpec::Hardy, f, scheme)
}

/// `n`-fold application of `C`; index 0 is `f` itself.
pub fn orbit(f: &UnitFn, n: usize, scheme: &Arc<UnitScheme>) -> Result<Vec<Samples>> {
    let mut out = vec![f.samples_on(scheme)?];
    for _ in 0..n {
        let next = apply_c(&out.last().unwrap().clone().into(), scheme)?;
        out.push(next);
    }
    Ok(out)
}

fn check_open_unit(v: f64, name: &str) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} is outside (0,1)")))
    }
}

/// Kernel of `CC*`: `(1/(tx))·(1/(1−min(x,t)) − 1)`.
pub fn kernel_ccstar(x: f64, t: f64) -> Result<f64> {
    check_open_unit(x, "x")?;
    check_open_unit(t, "t")?;
    let lo = x.min(t);
    Ok(lo / ((1.0 - lo) * t * x))
}

/// Kernel of `C*C`: `(1/((1−t)(1−x)))·(1/max(x,t) − 1)`.
pub fn kernel_cstarc(x: f64, t: f64) -> Result<f64> {
    check_open_unit(x, "x")?;
    check_open_unit(t, "t")?;
    let hi = x.max(t);
    Ok((1.0 - hi) / (hi * (1.0 - t) * (1.0 - x)))
}

/// Galerkin matrix of `kernel` on the piecewise polynomials of the scheme,
/// in the orthonormal basis `ℓ_j/√w_j` of panel Lagrange polynomials.
///
/// Because the basis is orthonormal, the matrix acts on `√w_i·f(x_i)` and
/// its conjugate transpose is the discrete adjoint. Blocks away from the
/// diagonal are rank one per panel pair and reduce to the symmetric Nyström
/// values `K(x_i, x_j)·√(w_i w_j)` up to quadrature error; diagonal blocks
/// are integrated with a doubled-order rule. As a compression of the
/// operator, the matrix never exceeds the operator norm.
pub fn discretize(kernel: KernelSpec, scheme: &Arc<UnitScheme>) -> DiscretizedOperator {
    let n = scheme.nodes_per_panel();
    let size = scheme.len();
    let panels = scheme.panels().len();
    let rule = scheme.rule();
    let sw: Vec<f64> = scheme.weights().iter().map(|w| w.sqrt()).collect();
    let inner = move |t: UnitPoint| Complex64::new(kernel.inner(t), 0.0);
    let fine = 2 * n;

    // c[k][j] = ∫_{panel k} φ_j·inner,  e[k][i] = ∫_{panel k} φ_i·outer
    let mut c = Vec::with_capacity(panels);
    let mut e = Vec::with_capacity(panels);
    for k in 0..panels {
        let coef = panel_coefficients(scheme, k, &inner);
        c.push((0..n).map(|j| coef[j].re / sw[k * n + j]).collect::<Vec<_>>());
        let panel = &scheme.panels()[k];
        let mut ek = vec![0.0; n];
        for (sigma, v) in local_rule(scheme, k, -1.0, 1.0, fine) {
            let o = kernel.outer(panel.point(sigma)) * v;
            for (i, b) in rule.basis(sigma).into_iter().enumerate() {
                ek[i] += o * b;
            }
        }
        e.push((0..n).map(|i| ek[i] / sw[k * n + i]).collect::<Vec<_>>());
    }

    let mut m = DMatrix::<f64>::zeros(size, size);
    for k in 0..panels {
        let others: Vec<usize> = if kernel.is_lower() { (0..k).collect() } else { (k + 1..panels).collect() };
        for &k2 in &others {
            for i in 0..n {
                for j in 0..n {
                    m[(k * n + i, k2 * n + j)] = c[k2][j] * e[k][i];
                }
            }
        }
        let panel = &scheme.panels()[k];
        for (sigma, v) in local_rule(scheme, k, -1.0, 1.0, fine) {
            let (a, b) = if kernel.is_lower() { (-1.0, sigma) } else { (sigma, 1.0) };
            let mut partial = vec![0.0; n];
            for (tau, u) in local_rule(scheme, k, a, b, fine) {
                let wv = kernel.inner(panel.point(tau)) * u;
                for (j, bj) in rule.basis(tau).into_iter().enumerate() {
                    partial[j] += wv * bj;
                }
            }
            let o = kernel.outer(panel.point(sigma)) * v;
            let bi = rule.basis(sigma);
            for i in 0..n {
                for j in 0..n {
                    m[(k * n + i, k * n + j)] += o * bi[i] * partial[j] / (sw[k * n + i] * sw[k * n + j]);
                }
            }
        }
    }
    DiscretizedOperator::new(m, scheme.clone())
}

/// Largest singular value of a discretized operator.
pub fn operator_norm(op: &DiscretizedOperator, opts: IterationOptions) -> Result<f64> {
    op.norm(opts)
}

/// Norms of the discrete self-commutator `[Ĉ, Ĉᵀ]` restricted to the
/// piecewise polynomials of `base`, on `levels` successive panel
/// refinements of `base`. Restricting to a fixed subspace isolates the
/// approximation of `[C, C*] = 0` from grid-scale effects.
pub fn commutator_refinement(base: &Arc<UnitScheme>, levels: usize, opts: IterationOptions) -> Result<Vec<f64>> {
    let mut fine = (**base).clone();
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        fine = fine.refined();
        let shared = Arc::new(fine.clone());
        let c = discretize(KernelSpec::Cesaro, &shared);
        let e = embedding(base, &fine)?;
        out.push(c.restricted_commutator_norm(&e, opts)?);
    }
    Ok(out)
}

/// Largest residuals of the algebraic identities over a function set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdentityReport {
    /// `‖(I−C)(I−C*)f − f‖`
    pub left_inverse: f64,
    /// `‖(I−C*)(I−C)f − f‖`
    pub right_inverse: f64,
    /// `‖CC*f − (C+C*)f‖`
    pub product_sum: f64,
    /// `‖C*Cf − CC*f‖`
    pub normality: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.left_inverse.max(self.right_inverse).max(self.product_sum).max(self.normality)
    }
}

pub fn verify_identities(scheme: &Arc<UnitScheme>, fs: &[UnitFn]) -> Result<IdentityReport> {
    let one = Complex64::new(1.0, 0.0);
    let mut report = IdentityReport::default();
    for f in fs {
        let fs = f.samples_on(scheme)?;
        let cf = apply_c(f, scheme)?;
        let csf = apply_cstar(f, scheme)?;
        let i_cs: UnitFn = fs.combine(one, &csf, -one).into();
        let i_c: UnitFn = fs.combine(one, &cf, -one).into();
        let left = apply_c(&i_cs, scheme)?;
        let left = i_cs.samples_on(scheme)?.combine(one, &left, -one).combine(one, &fs, -one);
        let right = apply_cstar(&i_c, scheme)?;
        let right = i_c.samples_on(scheme)?.combine(one, &right, -one).combine(one, &fs, -one);
        let ccs = apply_c(&csf.clone().into(), scheme)?;
        let csc = apply_cstar(&cf.clone().into(), scheme)?;
        let sum = cf.combine(one, &csf, one);
        report.left_inverse = report.left_inverse.max(left.norm());
        report.right_inverse = report.right_inverse.max(right.norm());
        report.product_sum = report.product_sum.max(ccs.combine(one, &sum, -one).norm());
        report.normality = report.normality.max(csc.combine(one, &ccs, -one).norm());
    }
    Ok(report)
}

/// Schur-test ratio `(∫ K(x,t) p(t) dt) / p(x)` with `p = 1/√(x(1−x))`,
/// at every node; identically 2 for the Cesàro kernel.
pub fn schur_ratio(scheme: &Arc<UnitScheme>) -> Result<Samples> {
    let weight = |t: UnitPoint| Complex64::new(1.0 / (t.xc * (t.x * t.xc).sqrt()), 0.0);
    let running = cumulative(&UnitFn::indicator(), scheme, &weight, Direction::FromLeft)?;
    Ok(running.map_points(|p, v| v * ((p.x * p.xc).sqrt() / p.x)))
}
