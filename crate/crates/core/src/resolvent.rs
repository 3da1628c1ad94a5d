//! Closed-form resolvents of `C` on both components of `ℂ ∖ ∂D(1,1)` and of
//! the semigroup generator `A f = −(1−x)(x f)′`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::{running_integral_fn, Direction, LineGrid, Samples, UnitFn, UnitPoint, UnitScheme};
use crate::operators::{apply_fn, discretize, KernelSpec};
use crate::transforms::circulant_smallest_singular_value;

/// Distance to the circle below which a point is flagged as ill conditioned.
pub const ILL_CONDITIONED_DISTANCE: f64 = 1e-3;

const CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    InsideDisk,
    OutsideDisk,
    OnCircle,
}

/// A complex number together with its position relative to `∂D(1,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub region: Region,
}

impl SpectralPoint {
    /// `dist(λ, ∂D(1,1)) = ||1 − λ| − 1|`.
    pub fn distance_to_circle(&self) -> f64 {
        ((Complex64::new(1.0, 0.0) - self.lambda).norm() - 1.0).abs()
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.distance_to_circle() < ILL_CONDITIONED_DISTANCE
    }
}

/// `λ ∈ D(1,1)` iff `Re(1/λ) > ½`. Points within `1e-12` of the circle,
/// and `λ = 0`, count as on it.
pub fn classify(lambda: Complex64) -> SpectralPoint {
    let region = if ((lambda - 1.0).norm() - 1.0).abs() <= CIRCLE_TOL || lambda.norm() == 0.0 {
        Region::OnCircle
    } else if lambda.inv().re > 0.5 {
        Region::InsideDisk
    } else {
        Region::OutsideDisk
    };
    SpectralPoint { lambda, region }
}

/// `exp(p·log x + q·log(1−x))`, principal branch on the positive reals.
fn power(x: UnitPoint, p: Complex64, q: Complex64) -> Complex64 {
    (p * x.x.ln() + q * x.xc.ln()).exp()
}

/// `(λI − C)⁻¹ g`. With `a = 1/λ`:
/// inside the disk `a·g(x) − a²·x^{a−1}(1−x)^{−a}·∫ₓ¹ g(t) t^{−a}(1−t)^{a−1} dt`,
/// outside it `a·g(x) + a²·x^{a−1}(1−x)^{−a}·∫₀ˣ g(t) t^{−a}(1−t)^{a−1} dt`.
pub fn resolve_c(point: &SpectralPoint, g: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<UnitFn> {
    let (dir, sign) = match point.region {
        Region::OnCircle => return Err(on_circle(point.lambda)),
        Region::InsideDisk => (Direction::FromRight, -1.0),
        Region::OutsideDisk => (Direction::FromLeft, 1.0),
    };
    let a = point.lambda.inv();
    let one = Complex64::new(1.0, 0.0);
    let integral = running_integral_fn(
        g,
        scheme,
        Arc::new(move |t| power(t, -a, a - one)),
        Arc::new(move |x| power(x, a - one, -a)),
        dir,
    )?;
    let g = g.clone();
    let coef = a * a * sign;
    Ok(UnitFn::point(move |x| a * g.eval(x) + coef * integral.eval(x)))
}

/// `‖(λI − C)⁻¹‖ = 1/||1 − λ| − 1|`.
pub fn resolvent_norm_c(point: &SpectralPoint) -> Result<f64> {
    match point.region {
        Region::OnCircle => Err(on_circle(point.lambda)),
        _ => Ok(1.0 / point.distance_to_circle()),
    }
}

fn on_circle(lambda: Complex64) -> Error {
    Error::SingularPoint { re: lambda.re, im: lambda.im }
}

/// `(λI − A)⁻¹ f`. For `Re λ > −½` this is
/// `((1−x)^λ / x^{λ+1})·∫₀ˣ f(t) t^λ (1−t)^{−λ−1} dt`; for `Re λ < −½` the
/// same outer factor times `−∫ₓ¹`.
pub fn resolve_a(lambda: Complex64, f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<UnitFn> {
    let offset = lambda.re + 0.5;
    if offset.abs() <= CIRCLE_TOL {
        return Err(Error::Spectrum(format!("Re λ = −½ lies in the spectrum of the generator (λ = {lambda})")));
    }
    let one = Complex64::new(1.0, 0.0);
    let (dir, sign) = if offset > 0.0 { (Direction::FromLeft, 1.0) } else { (Direction::FromRight, -1.0) };
    running_integral_fn(
        f,
        scheme,
        Arc::new(move |t| power(t, lambda, -lambda - one)),
        Arc::new(move |x| sign * power(x, -lambda - one, lambda)),
        dir,
    )
}

/// Relative residuals `‖(λI−C)R g − g‖/‖g‖` and `‖R(λI−C)g − g‖/‖g‖` measured
/// on the nodes of `scheme`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub left: f64,
    pub right: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.left.max(self.right)
    }
}

/// `λ·h − C h` as an evaluator.
fn shifted_c(lambda: Complex64, h: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<UnitFn> {
    let ch = apply_fn(KernelSpec::Cesaro, h, scheme)?;
    let h = h.clone();
    Ok(UnitFn::point(move |x| lambda * h.eval(x) - ch.eval(x)))
}

fn relative_distance(a: &UnitFn, b: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<f64> {
    let sa = a.samples_on(scheme)?;
    let sb = b.samples_on(scheme)?;
    let scale = sb.norm();
    let diff = sa.combine(Complex64::new(1.0, 0.0), &sb, Complex64::new(-1.0, 0.0)).norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

pub fn resolvent_residuals(point: &SpectralPoint, g: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<ResidualReport> {
    let rg = resolve_c(point, g, scheme)?;
    let left = relative_distance(&shifted_c(point.lambda, &rg, scheme)?, g, scheme)?;
    let shifted = shifted_c(point.lambda, g, scheme)?;
    let right = relative_distance(&resolve_c(point, &shifted, scheme)?, g, scheme)?;
    Ok(ResidualReport { left, right })
}

/// `‖λ·R f − A R f − f‖/‖f‖` with `A R f = −(1−x)(x·R f)′` obtained by
/// differentiating the panel interpolant of `x·R f`.
pub fn generator_residual(lambda: Complex64, f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<f64> {
    let r = resolve_a(lambda, f, scheme)?;
    let xr = r.samples_on(scheme)?.map_points(|p, v| v * p.x);
    let d = crate::funcspace::differentiate(&xr);
    let rs = r.samples_on(scheme)?;
    let fs = f.samples_on(scheme)?;
    let lhs = Samples::new(
        scheme.clone(),
        rs.values().iter().zip(d.values()).zip(scheme.points()).map(|((rv, dv), p)| lambda * rv + dv * p.xc).collect(),
    );
    let diff = lhs.combine(Complex64::new(1.0, 0.0), &fs, Complex64::new(-1.0, 0.0)).norm();
    let scale = fs.norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Finite-dimensional model used to estimate `‖(λI − C)⁻¹‖` as `1/σ_min`.
#[derive(Debug, Clone, PartialEq)]
pub enum Realization {
    /// Galerkin matrix on a unit-interval scheme. Triangular, so its
    /// pseudospectrum fills the open disk and it is only meaningful outside.
    Galerkin(Arc<UnitScheme>),
    /// Circulant convolution by `G` on a periodic line grid. Normal, so it
    /// is meaningful on both sides of the circle.
    Circulant(LineGrid),
}

pub fn discrete_resolvent_norm(lambda: Complex64, realization: &Realization) -> f64 {
    let smin = match realization {
        Realization::Galerkin(scheme) => discretize(KernelSpec::Cesaro, scheme).shifted_smallest_singular_value(lambda),
        Realization::Circulant(grid) => circulant_smallest_singular_value(grid, lambda),
    };
    1.0 / smin
}

/// Lower estimate of `‖(λI − A)⁻¹‖` at `λ = −½ + ε + iω` from a windowed
/// approximate eigenfunction `x^{−μ−1}(1−x)^μ` with `μ = −½ + iω`. In the
/// variable `u = log((1−x)/x)` the window is `exp(−(u/width)²)`.
pub fn generator_resolvent_growth(eps: f64, omega: f64, width: f64, scheme: &Arc<UnitScheme>) -> Result<f64> {
    let mu = Complex64::new(-0.5, omega);
    let one = Complex64::new(1.0, 0.0);
    let f = UnitFn::point(move |x| {
        let u = x.log_odds();
        power(x, -mu - one, mu) * (-(u / width).powi(2)).exp()
    });
    let r = resolve_a(Complex64::new(-0.5 + eps, omega), &f, scheme)?;
    Ok(r.samples_on(scheme)?.norm() / f.samples_on(scheme)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::Grading;

    fn scheme() -> Arc<UnitScheme> {
        UnitScheme::graded(Grading::default()).unwrap().shared()
    }

    fn ln_x(p: &UnitPoint) -> f64 {
        if p.x < 0.5 { p.x.ln() } else { (-p.xc).ln_1p() }
    }

    fn ln_xc(p: &UnitPoint) -> f64 {
        if p.xc < 0.5 { p.xc.ln() } else { (-p.x).ln_1p() }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classification() {
        assert_eq!(classify(c(0.5, 0.0)).region, Region::InsideDisk);
        assert_eq!(classify(c(3.0, 0.0)).region, Region::OutsideDisk);
        assert_eq!(classify(c(1.0, 1.0)).region, Region::OnCircle);
        assert_eq!(classify(c(0.0, 0.0)).region, Region::OnCircle);
        assert_eq!(classify(c(-1.0, 0.0)).region, Region::OutsideDisk);
        assert!(classify(c(2.0005, 0.0)).is_ill_conditioned());
        assert!(!classify(c(3.0, 0.0)).is_ill_conditioned());
    }

    #[test]
    fn norm_formula() {
        for (l, expect) in [(c(3.0, 0.0), 1.0), (c(1.0, 0.0), 1.0), (c(1.0, 2.0), 1.0), (c(0.5, 0.0), 2.0)] {
            assert!((resolvent_norm_c(&classify(l)).unwrap() - expect).abs() < 1e-15);
        }
        assert!(matches!(resolvent_norm_c(&classify(c(2.0, 0.0))), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn on_circle_is_rejected() {
        let s = scheme();
        let r = resolve_c(&classify(c(1.0, 1.0)), &UnitFn::indicator(), &s);
        assert!(matches!(r, Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn unit_shift_gives_identity_minus_adjoint() {
        let s = scheme();
        let r = resolve_c(&classify(c(1.0, 0.0)), &UnitFn::indicator(), &s).unwrap();
        for p in s.points() {
            let exact = 1.0 + ln_x(p) / p.xc;
            assert!((r.eval(*p) - exact).norm() < 1e-6, "x = {}", p.x);
        }
    }

    #[test]
    fn two_sided_residuals() {
        let s = scheme();
        let cases = [
            (c(3.0, 0.0), UnitFn::indicator()),
            (c(0.5, 0.1), UnitFn::real(|x| x)),
            (c(0.5, 0.0), UnitFn::real(|x| (2.0 * x).cos())),
            (c(1.0, 2.0), UnitFn::real(|x| x * x)),
            (c(-1.0, 0.0), UnitFn::indicator()),
        ];
        for (l, g) in cases {
            let rep = resolvent_residuals(&classify(l), &g, &s).unwrap();
            assert!(rep.max() < 1e-6, "λ = {l}: {rep:?}");
        }
    }

    #[test]
    fn generator_resolvent_special_values() {
        let s = scheme();
        let chi = UnitFn::indicator();
        let r0 = resolve_a(c(0.0, 0.0), &chi, &s).unwrap();
        let r1 = resolve_a(c(-1.0, 0.0), &chi, &s).unwrap();
        for p in s.points() {
            let cchi = -ln_xc(p) / p.x;
            let cstar_chi = -ln_x(p) / p.xc;
            assert!((r0.eval(*p) - cchi).norm() < 1e-6 * cchi);
            assert!((r1.eval(*p) + cstar_chi).norm() < 1e-6 * cstar_chi);
        }
        let z = resolve_a(c(0.3, 1.0), &UnitFn::zero(), &s).unwrap();
        assert_eq!(z.eval(UnitPoint::new(0.4)), c(0.0, 0.0));
        assert!(matches!(resolve_a(c(-0.5, 2.0), &chi, &s), Err(Error::Spectrum(_))));
    }

    #[test]
    fn generator_residual_is_small() {
        let s = scheme();
        for l in [c(0.0, 0.0), c(1.0, 0.5), c(-2.0, 0.0)] {
            let r = generator_residual(l, &UnitFn::real(|x| x * (1.0 - x)), &s).unwrap();
            assert!(r < 1e-6, "λ = {l}: {r}");
        }
    }

    #[test]
    fn discrete_norms_outside() {
        let s = UnitScheme::graded(Grading { graded_per_side: 12, ..Grading::default() }).unwrap().shared();
        let d = discrete_resolvent_norm(c(3.0, 0.0), &Realization::Galerkin(s));
        assert!((d - 1.0).abs() < 0.15);
        let grid = LineGrid::standard();
        let d = discrete_resolvent_norm(c(0.5, 0.0), &Realization::Circulant(grid));
        assert!((d - 2.0).abs() < 0.3);
    }

    #[test]
    fn generator_resolvent_grows_like_inverse_distance() {
        let s = scheme();
        let g = generator_resolvent_growth(0.05, 1.0, 10.0, &s).unwrap();
        assert!(g * 0.05 > 0.5 && g * 0.05 <= 1.0 + 1e-6, "{g}");
    }
}
