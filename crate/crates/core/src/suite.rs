//! Shared test material: a fixed smooth suite, seeded random smooth
//! functions, and the probe set used by invariance checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::funcspace::UnitFn;
use crate::invariant::bump;

pub const DEFAULT_SEED: u64 = 20_240_617;

/// Ten bounded smooth functions on `[0, 1]`, real and complex.
pub fn smooth_suite() -> Vec<(&'static str, UnitFn)> {
    vec![
        ("one", UnitFn::indicator()),
        ("x", UnitFn::real(|x| x)),
        ("x(1-x)", UnitFn::point(|p| Complex64::new(p.x * p.xc, 0.0))),
        ("sin(pi x)", UnitFn::real(|x| (PI * x).sin())),
        ("exp(-x)cos(3x)", UnitFn::real(|x| (-x).exp() * (3.0 * x).cos())),
        ("1/(1+x^2)", UnitFn::real(|x| 1.0 / (1.0 + x * x))),
        ("x^3-x/2", UnitFn::real(|x| x.powi(3) - 0.5 * x)),
        ("exp(2 pi i x)", UnitFn::point(|p| Complex64::from_polar(1.0, 2.0 * PI * p.x))),
        ("(1-x)^2+ix", UnitFn::point(|p| Complex64::new(p.xc * p.xc, p.x))),
        ("cos(5x)exp(x)", UnitFn::real(|x| (5.0 * x).cos() * x.exp())),
    ]
}

/// `Σ_k c_k e^{iπkx}` with complex coefficients of size `O(1/(1+k)²)`,
/// carrying its exact derivative.
pub fn random_smooth(rng: &mut impl Rng) -> UnitFn {
    const MODES: usize = 6;
    let coeffs: Vec<Complex64> = (0..MODES)
        .map(|k| {
            let damp = 1.0 / ((1 + k) * (1 + k)) as f64;
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * damp
        })
        .collect();
    let dcoeffs: Vec<Complex64> =
        coeffs.iter().enumerate().map(|(k, c)| c * Complex64::new(0.0, PI * k as f64)).collect();
    let series = |cs: Vec<Complex64>| {
        move |x: f64| cs.iter().enumerate().map(|(k, c)| c * Complex64::from_polar(1.0, PI * k as f64 * x)).sum()
    };
    let value = series(coeffs);
    let derivative = series(dcoeffs);
    UnitFn::point(move |p| value(p.x)).with_derivative(move |p| derivative(p.x))
}

pub fn random_smooth_set(seed: u64, count: usize) -> Vec<UnitFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_smooth(&mut rng)).collect()
}

/// Probe functions for invariance defects: bumps at several locations plus
/// random smooth functions. Subspace projections are applied by the caller.
pub fn probe_set(seed: u64) -> Vec<UnitFn> {
    let mut probes = vec![bump(0.7, 0.2), bump(0.3, 0.25), bump(0.55, 0.4), bump(0.85, 0.1)];
    probes.extend(random_smooth_set(seed, 4));
    probes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{Grading, UnitPoint, UnitScheme};

    #[test]
    fn suite_has_ten_finite_members() {
        let s = smooth_suite();
        assert_eq!(s.len(), 10);
        let scheme = UnitScheme::graded(Grading::default()).unwrap().shared();
        for (name, f) in s {
            assert!(f.samples_on(&scheme).unwrap().norm() > 0.1, "{name}");
        }
    }

    #[test]
    fn random_functions_are_reproducible_and_carry_derivatives() {
        let a = random_smooth_set(3, 2);
        let b = random_smooth_set(3, 2);
        let p = UnitPoint::new(0.37);
        assert_eq!(a[1].eval(p), b[1].eval(p));

        let scheme = UnitScheme::uniform(4, 8).shared();
        let d = a[0].derivative_on(&scheme).unwrap();
        let (k, q) = (13, scheme.points()[13]);
        let h = 1e-6;
        let fd = (a[0].eval(UnitPoint::new(q.x + h)) - a[0].eval(UnitPoint::new(q.x - h))) / (2.0 * h);
        let exact = d.values()[k];
        assert!((fd - exact).norm() < 1e-6, "{fd} vs {exact}");
    }
}
