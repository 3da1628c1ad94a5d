//! The weighted composition semigroup `S_t f = ψ_t·(f∘φ_t)` with
//! `φ_t(x) = e^{−t}x / ((e^{−t} − 1)x + 1)` and `ψ_t = φ_t/x`, its adjoint,
//! the unitary group `U_t = e^{t/2} S_t`, and the generator
//! `A f = −(1−x)(x f)′`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::{differentiate, LineFn, Samples, UnitFn, UnitPoint, UnitScheme};
use crate::operators::apply_c;
use crate::quadrature::gauss_legendre;

/// `S_t` for a fixed real `t`; negative `t` gives the inverse map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupElement {
    pub t: f64,
}

impl SemigroupElement {
    pub fn new(t: f64) -> Self {
        SemigroupElement { t }
    }

    /// `φ_t(x)`, with its complement `(1−x)/(e^{−t}x + 1 − x)` computed
    /// directly. In log-odds coordinates `φ_t` is the shift `u ↦ u + t`.
    pub fn phi(&self, p: UnitPoint) -> UnitPoint {
        let e = (-self.t).exp();
        let d = e * p.x + p.xc;
        UnitPoint { x: e * p.x / d, xc: p.xc / d }
    }

    /// `ψ_t(x) = φ_t(x)/x = e^{−t}/(e^{−t}x + 1 − x)`.
    pub fn psi(&self, p: UnitPoint) -> f64 {
        let e = (-self.t).exp();
        e / (e * p.x + p.xc)
    }

    pub fn apply(&self, f: &UnitFn) -> UnitFn {
        let s = *self;
        let f = f.clone();
        UnitFn::point(move |p| f.eval(s.phi(p)) * s.psi(p))
    }
}

/// `S_t f`, for any real `t`. Sampled `f` is evaluated off grid through its
/// panel interpolant.
pub fn apply_s(t: f64, f: &UnitFn) -> UnitFn {
    SemigroupElement::new(t).apply(f)
}

/// `(S_t* g)(x) = e^{−t}/((1−e^{−t})x + e^{−t})·g(x/((1−e^{−t})x + e^{−t}))`.
pub fn apply_sstar(t: f64, g: &UnitFn) -> Result<UnitFn> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Parameter(format!("adjoint semigroup needs t >= 0, got {t}")));
    }
    let e = (-t).exp();
    let g = g.clone();
    Ok(UnitFn::point(move |p| {
        let d = p.x + e * p.xc;
        g.eval(UnitPoint { x: p.x / d, xc: e * p.xc / d }) * (e / d)
    }))
}

/// `U_t f = e^{t/2} S_t f`.
pub fn apply_u(t: f64, f: &UnitFn) -> UnitFn {
    let s = SemigroupElement::new(t);
    let scale = (0.5 * t).exp();
    let f = f.clone();
    UnitFn::point(move |p| f.eval(s.phi(p)) * (s.psi(p) * scale))
}

/// `(T_t g)(u) = g(u + t)`.
pub fn translate(t: f64, g: &LineFn) -> LineFn {
    let g = g.clone();
    LineFn::analytic(move |u| g.eval(u + t))
}

/// `(1−x)(x f)′` at the nodes, from the closed-form derivative when present
/// and the panel interpolant otherwise.
fn weighted_derivative(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    let v = f.samples_on(scheme)?;
    let d = f.derivative_on(scheme)?;
    let values = v.values().iter().zip(d.values()).zip(scheme.points()).map(|((v, d), p)| (v + d * p.x) * p.xc).collect();
    Ok(Samples::new(scheme.clone(), values))
}

/// `‖(1−x)(x f)′‖` with the membership probe for the generator's domain:
/// the norm must be finite and stable when the grading is deepened.
pub fn domain_probe(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<f64> {
    let level = |s: &Arc<UnitScheme>| -> Result<f64> {
        let n = match weighted_derivative(f, s) {
            Ok(w) => w.norm(),
            Err(Error::Evaluation { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        Ok(n * n)
    };
    let deeper = scheme.deepened(4).shared();
    let deepest = deeper.deepened(4).shared();
    let (n0, n1, n2) = (level(scheme)?, level(&deeper)?, level(&deepest)?);
    let (inc1, inc2) = (n1 - n0, n2 - n1);
    if !n2.is_finite() || (inc1.abs() > 1e-8 * n0.max(1e-300) && inc2.abs() > 0.5 * inc1.abs()) {
        return Err(Error::DomainOfGenerator(format!("‖(1−x)(xf)′‖² {n0:.6e} -> {n1:.6e} -> {n2:.6e}")));
    }
    Ok(n0.sqrt())
}

/// `A f = −(1−x)(f + x f′)` at the nodes.
pub fn generator_apply(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    domain_probe(f, scheme)?;
    Ok(weighted_derivative(f, scheme)?.scale(Complex64::new(-1.0, 0.0)))
}

/// `‖(S_h f − f)/h − A f‖ / ‖f‖`.
pub fn difference_quotient_error(f: &UnitFn, h: f64, scheme: &Arc<UnitScheme>) -> Result<f64> {
    let af = generator_apply(f, scheme)?;
    let sf = apply_s(h, f).samples_on(scheme)?;
    let fs = f.samples_on(scheme)?;
    let quotient = sf.combine(Complex64::new(1.0 / h, 0.0), &fs, Complex64::new(-1.0 / h, 0.0));
    let err = quotient.combine(Complex64::new(1.0, 0.0), &af, Complex64::new(-1.0, 0.0)).norm();
    Ok(err / fs.norm().max(f64::MIN_POSITIVE))
}

/// Discretization of `∫₀^T e^{−λt} S_t f dt`: `steps` uniform panels with
/// 8-point Gauss each. Without `lambda` the weight is 1 and the integral
/// approximates `C f` up to the tail `2e^{−T/2}‖f‖`.
pub fn laplace_reconstruct(f: &UnitFn, horizon: f64, steps: usize, lambda: Option<Complex64>) -> Result<UnitFn> {
    if !(horizon >= 0.0 && horizon.is_finite()) || steps == 0 {
        return Err(Error::Parameter(format!("need a finite horizon >= 0 and steps > 0, got {horizon}, {steps}")));
    }
    let (nodes, weights) = gauss_legendre(8);
    let h = horizon / steps as f64;
    let lambda = lambda.unwrap_or(Complex64::new(0.0, 0.0));
    let rule: Vec<(SemigroupElement, Complex64)> = (0..steps)
        .flat_map(|k| {
            let a = k as f64 * h;
            nodes.iter().zip(&weights).map(move |(s, w)| (a + 0.5 * h * (s + 1.0), 0.5 * h * w)).collect::<Vec<_>>()
        })
        .map(|(t, w)| (SemigroupElement::new(t), (-lambda * t).exp() * w))
        .collect();
    let f = f.clone();
    Ok(UnitFn::point(move |p| rule.iter().map(|(s, w)| f.eval(s.phi(p)) * (w * s.psi(p))).sum()))
}

/// `‖(Ã − I)(I − C)f − (Ã + I)f‖/‖f‖` with `Ã = 2A + I`, which vanishes
/// because `I − C` is the cogenerator of `{U_t}`. `A` acts through the
/// panel interpolant of `x·(I − C)f`, which is log-singular at `x = 1`, so
/// everything is evaluated on the once-refined scheme.
pub fn cogenerator_defect(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<f64> {
    let scheme = &scheme.refined().shared();
    let fs = f.samples_on(scheme)?;
    let cf = apply_c(f, scheme)?;
    let v = fs.combine(Complex64::new(1.0, 0.0), &cf, Complex64::new(-1.0, 0.0));
    let xv = v.map_points(|p, val| val * p.x);
    // (Ã − I)V f = 2A V f = −2(1−x)(x V f)′
    let lhs = differentiate(&xv).map_points(|p, d| -2.0 * d * p.xc);
    let af = weighted_derivative(f, scheme)?;
    // (Ã + I)f = 2A f + 2f
    let rhs = fs.combine(Complex64::new(2.0, 0.0), &af, Complex64::new(-2.0, 0.0));
    let err = lhs.combine(Complex64::new(1.0, 0.0), &rhs, Complex64::new(-1.0, 0.0)).norm();
    Ok(err / fs.norm().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{inner_product, norm, Grading};
    use crate::resolvent::resolve_a;
    use crate::transforms::phi;
    use std::f64::consts::PI;

    fn scheme() -> Arc<UnitScheme> {
        UnitScheme::graded(Grading::default()).unwrap().shared()
    }

    fn smooth_set() -> Vec<UnitFn> {
        vec![
            UnitFn::indicator(),
            UnitFn::real(|x| x),
            UnitFn::real(|x| (PI * x).sin()),
            UnitFn::real(|x| (-x).exp() * (3.0 * x).cos()),
            UnitFn::point(|p| Complex64::new(p.x * p.xc, p.x * p.x)),
        ]
    }

    #[test]
    fn phi_properties() {
        let one = SemigroupElement::new(1.0);
        let v = one.phi(UnitPoint::new(0.5));
        assert!((v.x - 1.0 / (1.0 + 1f64.exp())).abs() < 1e-15);
        assert!((v.x + v.xc - 1.0).abs() < 1e-15);
        for x in [0.0, 1e-9, 0.3, 0.9, 1.0] {
            let p = UnitPoint::new(x);
            assert!(one.phi(p).x <= x + 1e-300);
            assert!(SemigroupElement::new(-1.0).phi(p).x >= x);
        }
        assert_eq!(one.phi(UnitPoint::new(0.0)).x, 0.0);
        assert_eq!(one.phi(UnitPoint::new(1.0)).x, 1.0);
        let a = SemigroupElement::new(0.7);
        let b = SemigroupElement::new(1.9);
        let ab = SemigroupElement::new(2.6);
        for x in [1e-12, 0.2, 0.77, 1.0 - 1e-10] {
            let p = UnitPoint::new(x);
            assert!((a.phi(b.phi(p)).x - ab.phi(p).x).abs() < 1e-15 * ab.phi(p).x.max(1e-300) * 10.0);
        }
        let u: f64 = 0.3;
        let t = 1.2;
        assert!((SemigroupElement::new(t).phi(UnitPoint::from_log_odds(u)).x - UnitPoint::from_log_odds(u + t).x).abs() < 1e-12);
    }

    #[test]
    fn norm_scaling() {
        let s = scheme();
        let f = UnitFn::real(|x| x);
        let r = norm(&apply_s(2.0, &f), &s).unwrap() / norm(&f, &s).unwrap();
        assert!((r - (-1.0f64).exp()).abs() < 1e-7 * r);
        let sampled = UnitFn::from(f.samples_on(&s).unwrap());
        let r = norm(&apply_s(2.0, &sampled), &s).unwrap() / norm(&f, &s).unwrap();
        assert!((r - (-1.0f64).exp()).abs() < 1e-7 * r);
        let g = UnitFn::real(|x| (PI * x).sin());
        let r = norm(&apply_u(3.0, &g), &s).unwrap() / norm(&g, &s).unwrap();
        assert!((r - 1.0).abs() < 1e-7);
        let r = norm(&apply_sstar(2.0, &g).unwrap(), &s).unwrap() / norm(&g, &s).unwrap();
        assert!((r - (-1.0f64).exp()).abs() < 1e-6 * r);
    }

    #[test]
    fn identities_at_zero() {
        let s = scheme();
        let f = UnitFn::real(|x| x * x + 1.0);
        let fs = f.samples_on(&s).unwrap();
        for g in [apply_s(0.0, &f), apply_u(0.0, &f), apply_sstar(0.0, &f).unwrap()] {
            assert_eq!(g.samples_on(&s).unwrap().values(), fs.values());
        }
        assert!(matches!(apply_sstar(-1.0, &f), Err(Error::Parameter(_))));
    }

    #[test]
    fn adjoints() {
        let s = scheme();
        let f = UnitFn::real(|x| (2.0 * x).cos() + x);
        let g = UnitFn::point(|p| Complex64::new(p.x * p.x, (5.0 * p.x).sin()));
        let scale = norm(&f, &s).unwrap() * norm(&g, &s).unwrap();
        let lhs = inner_product(&apply_s(1.0, &f), &g, &s).unwrap();
        let rhs = inner_product(&f, &apply_sstar(1.0, &g).unwrap(), &s).unwrap();
        assert!((lhs - rhs).norm() < 1e-8 * scale);
        let lhs = inner_product(&apply_u(1.5, &f), &g, &s).unwrap();
        let rhs = inner_product(&f, &apply_u(-1.5, &g), &s).unwrap();
        assert!((lhs - rhs).norm() < 1e-8 * scale);
        let a = apply_sstar(0.8, &g).unwrap().samples_on(&s).unwrap();
        let b = apply_s(-0.8, &g).samples_on(&s).unwrap().scale(Complex64::new((-0.8f64).exp(), 0.0));
        assert!(a.combine(Complex64::new(1.0, 0.0), &b, Complex64::new(-1.0, 0.0)).norm() < 1e-9);
        let back = apply_u(-2.0, &apply_u(2.0, &f)).samples_on(&s).unwrap();
        let fs = f.samples_on(&s).unwrap();
        assert!(back.combine(Complex64::new(1.0, 0.0), &fs, Complex64::new(-1.0, 0.0)).norm() < 1e-7 * fs.norm());
    }

    #[test]
    fn semigroup_law_and_continuity() {
        let s = scheme();
        for f in smooth_set() {
            let nf = norm(&f, &s).unwrap();
            for (a, b) in [(0.5, 0.5), (1.0, 2.0), (0.1, 3.0)] {
                let lhs = apply_s(a, &apply_s(b, &f)).samples_on(&s).unwrap();
                let rhs = apply_s(a + b, &f).samples_on(&s).unwrap();
                assert!(lhs.combine(Complex64::new(1.0, 0.0), &rhs, Complex64::new(-1.0, 0.0)).norm() < 1e-7 * nf);
            }
            let fs = f.samples_on(&s).unwrap();
            let dist: Vec<f64> = [1e-1, 1e-2, 1e-3]
                .iter()
                .map(|&t| apply_s(t, &f).samples_on(&s).unwrap().combine(Complex64::new(1.0, 0.0), &fs, Complex64::new(-1.0, 0.0)).norm())
                .collect();
            assert!(dist[0] > dist[1] && dist[1] > dist[2]);
        }
    }

    #[test]
    fn generator_examples() {
        let s = scheme();
        let x = UnitFn::real(|x| x).with_derivative(|_| Complex64::new(1.0, 0.0));
        let ax = generator_apply(&x, &s).unwrap();
        for (p, v) in s.points().iter().zip(ax.values()) {
            assert!((v.re - (2.0 * p.x * p.x - 2.0 * p.x)).abs() < 1e-14);
        }
        let achi = generator_apply(&UnitFn::indicator(), &s).unwrap();
        for (p, v) in s.points().iter().zip(achi.values()) {
            assert!((v.re + p.xc).abs() < 1e-15);
        }
        let e2 = difference_quotient_error(&UnitFn::indicator(), 1e-2, &s).unwrap();
        let e3 = difference_quotient_error(&UnitFn::indicator(), 1e-3, &s).unwrap();
        assert!(e3 < 0.05 && e3 < e2);
        assert!((e2 / e3 - 10.0).abs() < 1.0, "first order: {e2} {e3}");
    }

    #[test]
    fn rough_function_leaves_the_domain() {
        let s = scheme();
        let f = UnitFn::real(|x| x.powf(0.2) * (1.0 / x).sin())
            .with_derivative(|p| {
                let x = p.x;
                Complex64::new(0.2 * x.powf(-0.8) * (1.0 / x).sin() - x.powf(-1.8) * (1.0 / x).cos(), 0.0)
            });
        assert!(matches!(generator_apply(&f, &s), Err(Error::DomainOfGenerator(_))));
        assert!(domain_probe(&UnitFn::real(|x| x.sin()), &s).is_ok());
    }

    #[test]
    fn laplace_transform_of_semigroup() {
        let s = scheme();
        let chi = UnitFn::indicator();
        let cchi = apply_c(&chi, &s).unwrap();
        let rec = laplace_reconstruct(&chi, 40.0, 400, None).unwrap().samples_on(&s).unwrap();
        assert!(rec.combine(Complex64::new(1.0, 0.0), &cchi, Complex64::new(-1.0, 0.0)).norm() < 1e-5);
        let empty = laplace_reconstruct(&chi, 0.0, 1, None).unwrap().samples_on(&s).unwrap();
        assert!(empty.norm() == 0.0);
        let weighted = laplace_reconstruct(&chi, 40.0, 400, Some(Complex64::new(1.0, 0.0))).unwrap().samples_on(&s).unwrap();
        let r1 = resolve_a(Complex64::new(1.0, 0.0), &chi, &s).unwrap().samples_on(&s).unwrap();
        assert!(weighted.combine(Complex64::new(1.0, 0.0), &r1, Complex64::new(-1.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn conjugate_to_translation() {
        let f = UnitFn::real(|x| x * (1.0 - x));
        let lhs = phi(&apply_s(1.0, &f));
        let rhs = translate(1.0, &phi(&f));
        let grid = crate::funcspace::LineGrid::standard();
        let scale = (-0.5f64).exp();
        let err = grid.points().map(|u| (lhs.eval(u) - rhs.eval(u) * scale).norm_sqr()).sum::<f64>() * grid.spacing();
        assert!(err.sqrt() < 1e-7);
        assert_eq!(translate(0.0, &phi(&f)).eval(0.4), phi(&f).eval(0.4));
    }

    #[test]
    fn cogenerator() {
        let s = scheme();
        for f in [UnitFn::indicator(), UnitFn::real(|x| x).with_derivative(|_| Complex64::new(1.0, 0.0))] {
            let d = cogenerator_defect(&f, &s).unwrap();
            assert!(d < 1e-5, "{d}");
        }
    }
}
