//! Gauss–Legendre rules on `[−1, 1]` and the per-panel matrices built from
//! them: barycentric interpolation, partial (prefix/suffix) integration and
//! differentiation of the panel interpolant.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Reference rule for one panel, with everything needed to integrate and
/// differentiate the degree `n−1` interpolant through the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    bary: Vec<f64>,
    /// `prefix[i][j] = ∫_{−1}^{s_i} ℓ_j(s) ds`
    prefix: Vec<Vec<f64>>,
    /// `suffix[i][j] = ∫_{s_i}^{1} ℓ_j(s) ds`
    suffix: Vec<Vec<f64>>,
    /// `diff[i][j] = ℓ_j'(s_i)`
    diff: Vec<Vec<f64>>,
    /// Gauss rules on `[−1, s_i]`, one per node.
    sub_prefix: Vec<SubRule>,
    /// Gauss rules on `[s_i, 1]`, one per node.
    sub_suffix: Vec<SubRule>,
}

/// Gauss rule on a sub-interval of the reference panel, with the Lagrange
/// basis of the parent nodes evaluated at each sub-node.
#[derive(Debug, Clone, PartialEq)]
pub struct SubRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// `basis[q][j] = ℓ_j(points[q])`
    pub basis: Vec<Vec<f64>>,
}

impl PanelRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                let prod: f64 = (0..n)
                    .filter(|&k| k != j)
                    .map(|k| nodes[j] - nodes[k])
                    .product();
                1.0 / prod
            })
            .collect();

        let mut rule = PanelRule {
            nodes,
            weights,
            bary,
            prefix: vec![vec![0.0; n]; n],
            suffix: vec![vec![0.0; n]; n],
            diff: vec![vec![0.0; n]; n],
            sub_prefix: Vec::new(),
            sub_suffix: Vec::new(),
        };

        for i in 0..n {
            let si = rule.nodes[i];
            let (lo, hi) = (rule.integrate_basis(-1.0, si), rule.integrate_basis(si, 1.0));
            rule.prefix[i] = lo;
            rule.suffix[i] = hi;
        }
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let d = (rule.bary[j] / rule.bary[i]) / (rule.nodes[i] - rule.nodes[j]);
                    rule.diff[i][j] = d;
                    diag -= d;
                }
            }
            rule.diff[i][i] = diag;
        }
        for i in 0..n {
            let si = rule.nodes[i];
            let pre = rule.sub_rule(-1.0, si);
            let suf = rule.sub_rule(si, 1.0);
            rule.sub_prefix.push(pre);
            rule.sub_suffix.push(suf);
        }
        rule
    }

    fn sub_rule(&self, a: f64, b: f64) -> SubRule {
        let half = 0.5 * (b - a);
        let points: Vec<f64> = self.nodes.iter().map(|sk| a + half * (sk + 1.0)).collect();
        let weights = self.weights.iter().map(|w| half * w).collect();
        let basis = points.iter().map(|&s| self.basis(s)).collect();
        SubRule { points, weights, basis }
    }

    /// Gauss rule on `[−1, s_i]`.
    pub fn sub_prefix(&self, i: usize) -> &SubRule {
        &self.sub_prefix[i]
    }

    /// Gauss rule on `[s_i, 1]`.
    pub fn sub_suffix(&self, i: usize) -> &SubRule {
        &self.sub_suffix[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    // Exact for the basis polynomials: the rule has degree 2n−1.
    fn integrate_basis(&self, a: f64, b: f64) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        let half = 0.5 * (b - a);
        for (sk, wk) in self.nodes.iter().zip(&self.weights) {
            let s = a + half * (sk + 1.0);
            let basis = self.basis(s);
            for j in 0..n {
                out[j] += half * wk * basis[j];
            }
        }
        out
    }

    /// Values of all Lagrange basis polynomials at `s`.
    pub fn basis(&self, s: f64) -> Vec<f64> {
        let n = self.len();
        if let Some(j) = self.nodes.iter().position(|&x| x == s) {
            let mut v = vec![0.0; n];
            v[j] = 1.0;
            return v;
        }
        let terms: Vec<f64> = (0..n).map(|j| self.bary[j] / (s - self.nodes[j])).collect();
        let denom: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / denom).collect()
    }

    /// Evaluates the interpolant of `values` at local coordinate `s`.
    pub fn interpolate(&self, values: &[Complex64], s: f64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..self.len() {
            let d = s - self.nodes[j];
            if d == 0.0 {
                return values[j];
            }
            let t = self.bary[j] / d;
            num += values[j] * t;
            den += t;
        }
        num / den
    }

    pub fn prefix_row(&self, i: usize) -> &[f64] {
        &self.prefix[i]
    }

    pub fn suffix_row(&self, i: usize) -> &[f64] {
        &self.suffix[i]
    }

    pub fn diff_row(&self, i: usize) -> &[f64] {
        &self.diff[i]
    }
}

/// Neumaier-compensated accumulator with a fixed (caller-defined) order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Complex64) {
        self.sum.re = neumaier(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, v.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

/// Compensated sum of a real sequence.
pub fn sum_real<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for v in it {
        s = neumaier(s, v, &mut c);
    }
    s + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in 1..=16 {
            let (_, w) = gauss_legendre(n);
            assert!((sum_real(w) - 2.0).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn exact_through_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(8);
        for deg in 0..=15 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn prefix_and_suffix_rows_integrate_monomials() {
        let rule = PanelRule::new(8);
        for i in 0..8 {
            let s = rule.nodes[i];
            for deg in 0..8 {
                let vals: Vec<f64> = rule.nodes.iter().map(|x| x.powi(deg)).collect();
                let pre: f64 = rule.prefix_row(i).iter().zip(&vals).map(|(a, b)| a * b).sum();
                let suf: f64 = rule.suffix_row(i).iter().zip(&vals).map(|(a, b)| a * b).sum();
                let p = deg + 1;
                let anti = |t: f64| t.powi(p) / p as f64;
                assert!((pre - (anti(s) - anti(-1.0))).abs() < 1e-14);
                assert!((suf - (anti(1.0) - anti(s))).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn differentiation_is_exact_for_polynomials() {
        let rule = PanelRule::new(8);
        let vals: Vec<f64> = rule.nodes.iter().map(|x| x.powi(5) - 2.0 * x).collect();
        for i in 0..8 {
            let d: f64 = rule.diff_row(i).iter().zip(&vals).map(|(a, b)| a * b).sum();
            let exact = 5.0 * rule.nodes[i].powi(4) - 2.0;
            assert!((d - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let rule = PanelRule::new(8);
        let vals: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        for i in 0..8 {
            assert_eq!(rule.interpolate(&vals, rule.nodes[i]), vals[i]);
        }
    }
}
