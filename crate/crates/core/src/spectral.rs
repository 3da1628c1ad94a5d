//! The spectral measure of `C`: `dν = (π/2)sech²(πx) dx` on `ℝ` and its
//! pushforward `μ` under `m(x) = 1/(½ − ix)` onto `∂D(1,1)`, moments of the
//! orbit of `χ`, and least-squares cyclicity experiments.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::{LineGrid, Samples, UnitFn, UnitScheme};
use crate::operators::orbit;
use crate::quadrature::{gauss_legendre, CompensatedSum};
use crate::transforms::MultiplierSymbol;

/// Below this modulus a point of the circle is treated as the excluded `z = 0`.
const ORIGIN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CircleMeasure;

impl CircleMeasure {
    /// `(π/2)sech²(πx)`.
    pub fn pullback_density(&self, x: f64) -> f64 {
        let s = 1.0 / (PI * x).cosh();
        0.5 * PI * s * s
    }

    pub fn circle_map(&self, x: f64) -> Complex64 {
        MultiplierSymbol.eval(x)
    }

    /// `dμ/|dz|` at `z = 1 + e^{iθ}`: `(π/2)sech²(π m⁻¹(z))/|z|²`.
    pub fn arclength_density(&self, theta: f64) -> Result<f64> {
        let z = circle_point(theta);
        if z.norm() < ORIGIN_TOL {
            return Err(Error::SingularPoint { re: z.re, im: z.im });
        }
        Ok(self.pullback_density(MultiplierSymbol.inverse(z)) / z.norm_sqr())
    }

    /// The same density written as `(π/2)·csc²(π/(1 + e^{iθ}))/(2 + 2cos θ)`.
    pub fn arclength_density_csc(&self, theta: f64) -> Result<f64> {
        let z = circle_point(theta);
        if z.norm() < ORIGIN_TOL {
            return Err(Error::SingularPoint { re: z.re, im: z.im });
        }
        let s = (Complex64::new(PI, 0.0) / z).sin();
        Ok((0.5 * PI / (s * s)).re / (2.0 + 2.0 * theta.cos()))
    }

    /// `∫ dμ` over the circle, integrating the arclength density in `θ` with
    /// 64 Gauss panels of 16 points.
    pub fn total_mass(&self) -> Result<f64> {
        let (nodes, weights) = gauss_legendre(16);
        let panels = 64;
        let h = 2.0 * PI / panels as f64;
        let mut acc = CompensatedSum::new();
        for k in 0..panels {
            let a = -PI + k as f64 * h;
            for (s, w) in nodes.iter().zip(&weights) {
                let theta = a + 0.5 * h * (s + 1.0);
                acc.add(Complex64::new(self.arclength_density(theta)? * 0.5 * h * w, 0.0));
            }
        }
        Ok(acc.value().re)
    }
}

fn circle_point(theta: f64) -> Complex64 {
    Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, theta)
}

/// `∫ g dν` by the trapezoid rule on `grid`. The neglected tail is at most
/// `2e^{−2πL}/π·sup|g|` for half width `L`.
pub fn nu_integrate(g: impl Fn(f64) -> Complex64, grid: &LineGrid) -> Complex64 {
    let mut acc = CompensatedSum::new();
    for x in grid.points() {
        acc.add(g(x) * CircleMeasure.pullback_density(x));
    }
    acc.value() * grid.spacing()
}

/// Grid used for `ν`-integrals: the density is analytic in `|Im x| < ½`, so
/// the trapezoid rule converges geometrically and a modest grid suffices.
pub fn measure_grid() -> LineGrid {
    LineGrid::new(1 << 12, 16.0).expect("valid measure grid")
}

/// Orbit Gram matrix `⟨Cᵐχ, Cⁿχ⟩` next to the moments `∫ zᵐ z̄ⁿ dμ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub orbit: DMatrix<Complex64>,
    pub spectral: DMatrix<Complex64>,
}

impl MomentTable {
    pub fn max_discrepancy(&self) -> f64 {
        (&self.orbit - &self.spectral).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub fn moment_match(max_power: usize, scheme: &Arc<UnitScheme>) -> Result<MomentTable> {
    if max_power > 6 {
        return Err(Error::Parameter(format!("moment order {max_power} exceeds 6")));
    }
    let vs = orbit(&UnitFn::indicator(), max_power, scheme)?;
    let n = max_power + 1;
    let orbit = DMatrix::from_fn(n, n, |i, j| vs[i].inner(&vs[j]));
    let grid = measure_grid();
    let spectral = DMatrix::from_fn(n, n, |i, j| {
        nu_integrate(
            |x| {
                let z = MultiplierSymbol.eval(x);
                z.powu(i as u32) * z.conj().powu(j as u32)
            },
            &grid,
        )
    });
    Ok(MomentTable { orbit, spectral })
}

/// Gram matrices with a larger condition number are solved with jitter.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// Distances `dist(xʲ, span{Cⁿχ : n ≤ N})`, indexed `[N][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicityReport {
    /// From modified Gram–Schmidt with reorthogonalization.
    pub distances: Vec<Vec<f64>>,
    /// Condition number of the full Gram matrix.
    pub condition: f64,
    /// Normal-equation distances when the Gram matrix was well enough
    /// conditioned; otherwise those obtained with `1e−12` diagonal jitter.
    pub gram_distances: Vec<Vec<f64>>,
    pub regularized: bool,
}

pub fn cyclicity_probe(max_power: usize, degree: usize, scheme: &Arc<UnitScheme>) -> Result<CyclicityReport> {
    if max_power > 8 || degree > 6 {
        return Err(Error::Parameter(format!("need N <= 8 and d <= 6, got {max_power}, {degree}")));
    }
    let vs = orbit(&UnitFn::indicator(), max_power, scheme)?;
    let targets: Vec<Samples> = (0..=degree)
        .map(|j| UnitFn::real(move |x| x.powi(j as i32)).samples_on(scheme))
        .collect::<Result<_>>()?;

    let mut basis: Vec<Samples> = Vec::new();
    let mut distances = Vec::with_capacity(max_power + 1);
    for v in &vs {
        let mut q = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = q.inner(b);
                q = q.combine(Complex64::new(1.0, 0.0), b, -c);
            }
        }
        let nq = q.norm();
        if nq > 0.0 {
            basis.push(q.scale(Complex64::new(1.0 / nq, 0.0)));
        }
        distances.push(targets.iter().map(|p| residual_norm(p, &basis)).collect());
    }

    let (condition, gram_distances, regularized) = match gram_distances(&vs, &targets, false) {
        Ok((cond, d)) => (cond, d, false),
        Err(Error::IllConditioned(cond)) => (cond, gram_distances(&vs, &targets, true)?.1, true),
        Err(e) => return Err(e),
    };
    Ok(CyclicityReport { distances, condition, gram_distances, regularized })
}

fn residual_norm(p: &Samples, basis: &[Samples]) -> f64 {
    let mut r = p.clone();
    for _ in 0..2 {
        for b in basis {
            let c = r.inner(b);
            r = r.combine(Complex64::new(1.0, 0.0), b, -c);
        }
    }
    r.norm()
}

/// Least squares through the normal equations of each nested span. Fails
/// with [`Error::IllConditioned`] unless `jitter` is set.
fn gram_distances(vs: &[Samples], targets: &[Samples], jitter: bool) -> Result<(f64, Vec<Vec<f64>>)> {
    let n = vs.len();
    let gram = DMatrix::from_fn(n, n, |i, j| vs[j].inner(&vs[i]));
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > GRAM_CONDITION_LIMIT && !jitter {
        return Err(Error::IllConditioned(condition));
    }
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut g = gram.view((0, 0), (k, k)).into_owned();
        if jitter {
            let scale = 1e-12 * hi;
            for i in 0..k {
                g[(i, i)] += Complex64::new(scale, 0.0);
            }
        }
        let chol = Cholesky::new(g).ok_or(Error::IllConditioned(condition))?;
        let row = targets
            .iter()
            .map(|p| {
                let b = DVector::from_fn(k, |i, _| p.inner(&vs[i]));
                let c = chol.solve(&b);
                let captured = b.iter().zip(c.iter()).map(|(bi, ci)| bi.conj() * ci).sum::<Complex64>().re;
                (p.norm().powi(2) - captured).max(0.0).sqrt()
            })
            .collect();
        out.push(row);
    }
    Ok((condition, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::Grading;

    fn scheme() -> Arc<UnitScheme> {
        UnitScheme::graded(Grading::default()).unwrap().shared()
    }

    #[test]
    fn nu_mass_and_moments() {
        let grid = measure_grid();
        assert!((nu_integrate(|_| Complex64::new(1.0, 0.0), &grid).re - 1.0).abs() < 1e-12);
        assert!(nu_integrate(|x| Complex64::new(x, 0.0), &grid).norm() < 1e-14);
        let first = nu_integrate(|x| MultiplierSymbol.eval(x), &grid);
        assert!((first - PI * PI / 6.0).norm() < 1e-12);
        let second = nu_integrate(|x| Complex64::new(MultiplierSymbol.eval(x).norm_sqr(), 0.0), &grid);
        assert!((second.re - PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn arclength_density() {
        let m = CircleMeasure;
        assert!((m.arclength_density(0.0).unwrap() - PI / 8.0).abs() < 1e-15);
        for theta in [0.3, 1.7, 2.9] {
            assert_eq!(m.arclength_density(theta).unwrap(), m.arclength_density(-theta).unwrap());
        }
        assert!((m.total_mass().unwrap() - 1.0).abs() < 1e-8);
        assert!(matches!(m.arclength_density(PI), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn csc_form_agrees() {
        let m = CircleMeasure;
        for theta in [-2.5, 0.4, 1.9] {
            let a = m.arclength_density(theta).unwrap();
            let b = m.arclength_density_csc(theta).unwrap();
            assert!((a - b).abs() < 1e-12 * a, "{theta}: {a} vs {b}");
        }
    }

    #[test]
    fn support_on_the_circle() {
        let m = CircleMeasure;
        for x in measure_grid().points() {
            assert!(((m.circle_map(x) - 1.0).norm() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn moments_intertwine() {
        let table = moment_match(4, &scheme()).unwrap();
        assert!((table.orbit[(0, 0)].re - 1.0).abs() < 1e-13);
        assert!((table.orbit[(1, 0)].re - PI * PI / 6.0).abs() < 1e-8);
        assert!((table.orbit[(1, 1)].re - PI * PI / 3.0).abs() < 1e-8);
        for i in 0..5 {
            for j in 0..5 {
                assert!((table.spectral[(i, j)] - table.spectral[(j, i)].conj()).norm() < 1e-12);
            }
        }
        assert!(table.max_discrepancy() < 1e-4, "{}", table.max_discrepancy());
        assert!(matches!(moment_match(7, &scheme()), Err(Error::Parameter(_))));
    }

    #[test]
    fn cyclicity() {
        let rep = cyclicity_probe(6, 3, &scheme()).unwrap();
        for row in &rep.distances {
            assert!(row[0] < 1e-12);
        }
        for j in 0..=3 {
            for n in 1..rep.distances.len() {
                assert!(rep.distances[n][j] <= rep.distances[n - 1][j] + 1e-12);
            }
        }
        assert!(rep.distances[6][1] < 0.05, "{}", rep.distances[6][1]);
    }
}
