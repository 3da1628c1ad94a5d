use std::sync::Arc;

use num_complex::Complex64;

use super::{Samples, UnitFn, UnitPoint, UnitScheme};
use crate::error::Result;
use crate::quadrature::{gauss_legendre, CompensatedSum};

/// Which end of `(0,1)` a running integral starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `∫₀^{x_i}`
    FromLeft,
    /// `∫_{x_i}^1`
    FromRight,
}

/// Running integrals `∫ f(t)·w(t) dt` from one endpoint to every node.
///
/// Whole panels use the parent Gauss rule. The partial panel containing the
/// target node gets its own Gauss rule, with `w` evaluated exactly and `f`
/// evaluated exactly when analytic or through the panel interpolant when
/// sampled. The two terminal panels, where `w` or `f` may be singular, use
/// a composite rule graded toward both ends instead.
pub fn cumulative(
    f: &UnitFn,
    scheme: &Arc<UnitScheme>,
    weight: &dyn Fn(UnitPoint) -> Complex64,
    dir: Direction,
) -> Result<Samples> {
    let samples = f.samples_on(scheme)?;
    let vals = samples.values();
    let rule = scheme.rule();
    let n = rule.len();
    let panels = scheme.panels();

    let integrate = |k: usize, nodes: &[(f64, f64)]| -> Complex64 {
        let panel = &panels[k];
        let local = &vals[k * n..(k + 1) * n];
        let mut acc = CompensatedSum::new();
        for &(sigma, wt) in nodes {
            let p = panel.point(sigma);
            let fv = match f {
                UnitFn::Analytic { value, .. } => value(p),
                UnitFn::Sampled(_) => rule.interpolate(local, sigma),
            };
            acc.add(fv * weight(p) * wt);
        }
        acc.value()
    };

    let mut out = vec![Complex64::new(0.0, 0.0); scheme.len()];
    let order: Vec<usize> = match dir {
        Direction::FromLeft => (0..panels.len()).collect(),
        Direction::FromRight => (0..panels.len()).rev().collect(),
    };
    let mut running = CompensatedSum::new();
    for k in order {
        for i in 0..n {
            let mut total = running;
            total.add(integrate(k, &partial_rule(scheme, k, i, dir)));
            out[k * n + i] = total.value();
        }
        let whole = if is_terminal(scheme, k) {
            integrate(k, &graded_rule(scheme, k, -1.0, 1.0))
        } else {
            let mut acc = CompensatedSum::new();
            for j in k * n..(k + 1) * n {
                acc.add(vals[j] * weight(scheme.points()[j]) * scheme.weights()[j]);
            }
            acc.value()
        };
        running.add(whole);
    }
    Ok(Samples::new(scheme.clone(), out))
}

/// Off-grid evaluator of `x ↦ outer(x)·∫ f·w` over `[0, x]` or `[x, 1]`:
/// whole panels come from precomputed running sums, the partial panel is
/// integrated at the requested point.
pub fn running_integral_fn(
    f: &UnitFn,
    scheme: &Arc<UnitScheme>,
    weight: Arc<dyn Fn(UnitPoint) -> Complex64 + Send + Sync>,
    outer: Arc<dyn Fn(UnitPoint) -> Complex64 + Send + Sync>,
    dir: Direction,
) -> Result<UnitFn> {
    let samples = f.samples_on(scheme)?;
    let panels = scheme.panels().len();
    let n = scheme.nodes_per_panel();
    // before[k]: integral over the panels preceding panel k in direction `dir`
    let mut before = vec![Complex64::new(0.0, 0.0); panels];
    let order: Vec<usize> = match dir {
        Direction::FromLeft => (0..panels).collect(),
        Direction::FromRight => (0..panels).rev().collect(),
    };
    let mut running = CompensatedSum::new();
    for k in order {
        before[k] = running.value();
        let coef = panel_coefficients(scheme, k, weight.as_ref());
        let mut acc = CompensatedSum::new();
        for (c, v) in coef.iter().zip(&samples.values()[k * n..(k + 1) * n]) {
            acc.add(c * v);
        }
        // analytic integrands on terminal panels are integrated exactly
        if let (true, UnitFn::Analytic { value, .. }) = (is_terminal(scheme, k), f) {
            let panel = &scheme.panels()[k];
            acc = CompensatedSum::new();
            for (sigma, wt) in graded_rule(scheme, k, -1.0, 1.0) {
                let p = panel.point(sigma);
                acc.add(value(p) * weight(p) * wt);
            }
        }
        running.add(acc.value());
    }
    let scheme = scheme.clone();
    let f = f.clone();
    Ok(UnitFn::point(move |p| {
        let k = scheme.panel_of(p);
        let panel = &scheme.panels()[k];
        let sigma = panel.local(p).clamp(-1.0, 1.0);
        let (a, b) = match dir {
            Direction::FromLeft => (-1.0, sigma),
            Direction::FromRight => (sigma, 1.0),
        };
        let local = &samples.values()[k * n..(k + 1) * n];
        let mut acc = CompensatedSum::new();
        acc.add(before[k]);
        for (tau, wt) in local_rule(&scheme, k, a, b, n) {
            let q = panel.point(tau);
            let fv = match &f {
                UnitFn::Analytic { value, .. } => value(q),
                UnitFn::Sampled(_) => scheme.rule().interpolate(local, tau),
            };
            acc.add(fv * weight(q) * wt);
        }
        outer(p) * acc.value()
    }))
}

/// Coefficients `c_j` with `∫_{panel k} f·w ≈ Σ_j c_j f(x_{k,j})` for the
/// panel interpolant of `f`.
pub fn panel_coefficients(scheme: &UnitScheme, k: usize, weight: &dyn Fn(UnitPoint) -> Complex64) -> Vec<Complex64> {
    let n = scheme.nodes_per_panel();
    if is_terminal(scheme, k) {
        return coefficients(scheme, k, &graded_rule(scheme, k, -1.0, 1.0), weight);
    }
    (k * n..(k + 1) * n).map(|j| weight(scheme.points()[j]) * scheme.weights()[j]).collect()
}

/// Coefficients of the partial-panel integral from the panel end given by
/// `dir` to node `i` of panel `k`.
pub fn partial_coefficients(
    scheme: &UnitScheme,
    k: usize,
    i: usize,
    dir: Direction,
    weight: &dyn Fn(UnitPoint) -> Complex64,
) -> Vec<Complex64> {
    coefficients(scheme, k, &partial_rule(scheme, k, i, dir), weight)
}

fn coefficients(
    scheme: &UnitScheme,
    k: usize,
    nodes: &[(f64, f64)],
    weight: &dyn Fn(UnitPoint) -> Complex64,
) -> Vec<Complex64> {
    let rule = scheme.rule();
    let panel = &scheme.panels()[k];
    let mut c = vec![Complex64::new(0.0, 0.0); rule.len()];
    for &(sigma, wt) in nodes {
        let wv = weight(panel.point(sigma)) * wt;
        for (cj, b) in c.iter_mut().zip(rule.basis(sigma)) {
            *cj += wv * b;
        }
    }
    c
}

/// Quadrature on the local sub-interval `[a, b]` of panel `k`, as pairs of
/// local coordinate and physical weight: `points`-node Gauss on interior
/// panels, the doubly graded composite rule on terminal ones.
pub fn local_rule(scheme: &UnitScheme, k: usize, a: f64, b: f64, points: usize) -> Vec<(f64, f64)> {
    if is_terminal(scheme, k) {
        return graded_rule(scheme, k, a, b);
    }
    let (nodes, weights) = gauss_legendre(points);
    let half = 0.5 * scheme.panels()[k].width();
    let h = 0.5 * (b - a);
    nodes.iter().zip(&weights).map(|(s, w)| (a + h * (s + 1.0), half * h * w)).collect()
}

pub fn is_terminal(scheme: &UnitScheme, k: usize) -> bool {
    k == 0 || k + 1 == scheme.panels().len()
}

/// Local coordinates and physical weights for the partial panel.
fn partial_rule(scheme: &UnitScheme, k: usize, i: usize, dir: Direction) -> Vec<(f64, f64)> {
    let rule = scheme.rule();
    let si = rule.nodes[i];
    let (a, b) = match dir {
        Direction::FromLeft => (-1.0, si),
        Direction::FromRight => (si, 1.0),
    };
    if is_terminal(scheme, k) {
        return graded_rule(scheme, k, a, b);
    }
    let half = 0.5 * scheme.panels()[k].width();
    let sub = match dir {
        Direction::FromLeft => rule.sub_prefix(i),
        Direction::FromRight => rule.sub_suffix(i),
    };
    sub.points.iter().zip(&sub.weights).map(|(&s, &w)| (s, half * w)).collect()
}

fn graded_rule(scheme: &UnitScheme, k: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    if b <= a {
        return Vec::new();
    }
    let rule = scheme.rule();
    let half = 0.5 * scheme.panels()[k].width();
    let mut out = Vec::new();
    for (lo, hi) in graded_pieces(a, b, TERMINAL_LEVELS) {
        let h = 0.5 * (hi - lo);
        for (sk, wk) in rule.nodes.iter().zip(&rule.weights) {
            let sigma = lo + h * (sk + 1.0);
            // nodes rounded onto an end of the panel carry negligible weight
            // and may sit on a singularity
            if sigma > -1.0 && sigma < 1.0 {
                out.push((sigma, half * h * wk));
            }
        }
    }
    out
}

const TERMINAL_LEVELS: usize = 40;

// Smallest graded piece in local coordinates; finer pieces would put nodes
// within rounding distance of the panel ends.
const MIN_PIECE: f64 = 1e-13;

/// Splits `[a, b]` into pieces that halve geometrically toward both ends.
fn graded_pieces(a: f64, b: f64, levels: usize) -> Vec<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = mid - a;
    let depth = if half > MIN_PIECE { (half / MIN_PIECE).log2().floor() as usize } else { 0 };
    let levels = levels.min(depth);
    let mut pieces = Vec::with_capacity(2 * levels + 2);
    let mut lo = a;
    for j in (1..=levels).rev() {
        let hi = a + half * 0.5f64.powi(j as i32);
        pieces.push((lo, hi));
        lo = hi;
    }
    pieces.push((lo, mid));
    let mut hi_pieces = Vec::with_capacity(levels + 1);
    let mut hi = b;
    for j in (1..=levels).rev() {
        let lo = b - half * 0.5f64.powi(j as i32);
        hi_pieces.push((lo, hi));
        hi = lo;
    }
    hi_pieces.push((mid, hi));
    pieces.extend(hi_pieces.into_iter().rev());
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::Grading;

    fn scheme() -> Arc<UnitScheme> {
        UnitScheme::graded(Grading::default()).unwrap().shared()
    }

    #[test]
    fn running_integral_of_polynomial() {
        let s = scheme();
        let one = |_| Complex64::new(1.0, 0.0);
        let f = UnitFn::real(|x| 3.0 * x * x);
        let pre = cumulative(&f, &s, &one, Direction::FromLeft).unwrap();
        let suf = cumulative(&f, &s, &one, Direction::FromRight).unwrap();
        for (i, p) in s.points().iter().enumerate() {
            assert!((pre.values()[i].re - p.x.powi(3)).abs() < 1e-14);
            assert!((suf.values()[i].re - (1.0 - p.x.powi(3))).abs() < 1e-14);
        }
    }

    #[test]
    fn sampled_and_analytic_paths_agree() {
        let s = scheme();
        let w = |p: UnitPoint| Complex64::new(1.0 / p.xc, 0.0);
        let f = UnitFn::real(|x| (3.0 * x).cos());
        let sampled: UnitFn = f.samples_on(&s).unwrap().into();
        let a = cumulative(&f, &s, &w, Direction::FromLeft).unwrap();
        let b = cumulative(&sampled, &s, &w, Direction::FromLeft).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= 1e-10 * x.norm().max(1.0));
        }
    }

    #[test]
    fn log_weight_near_right_end_keeps_relative_accuracy() {
        // ∫_x^1 dt/t tends to (1−x) as x → 1
        let s = scheme();
        let w = |p: UnitPoint| Complex64::new(1.0 / p.x, 0.0);
        let suf = cumulative(&UnitFn::indicator(), &s, &w, Direction::FromRight).unwrap();
        // the first panel touches the singularity of 1/t and is skipped
        for (v, p) in suf.values().iter().zip(s.points()).skip(s.nodes_per_panel()) {
            let exact = if p.x < 0.5 { -p.x.ln() } else { -(-p.xc).ln_1p() };
            assert!((v.re - exact).abs() <= 1e-11 * exact, "{} {}", v.re, exact);
        }
    }
}
