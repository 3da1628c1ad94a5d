//! Square-integrable functions on `(0,1)` and on `ℝ`: representations,
//! sampling, interpolation, inner products and norms.

mod cumulative;
mod line;
mod scheme;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::CompensatedSum;

pub use cumulative::{
    cumulative, is_terminal, local_rule, panel_coefficients, partial_coefficients, running_integral_fn, Direction,
};
pub use line::{line_inner, line_norm, line_norm_windowed, LineFn, LineGrid};
pub use scheme::{Grading, Panel, UnitPoint, UnitScheme};

pub type UnitEval = Arc<dyn Fn(UnitPoint) -> Complex64 + Send + Sync>;

/// Node values of a function on a fixed scheme.
#[derive(Clone, PartialEq)]
pub struct Samples {
    scheme: Arc<UnitScheme>,
    values: Vec<Complex64>,
}

impl fmt::Debug for Samples {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Samples").field("len", &self.values.len()).finish()
    }
}

impl Samples {
    pub fn new(scheme: Arc<UnitScheme>, values: Vec<Complex64>) -> Self {
        assert_eq!(scheme.len(), values.len(), "one value per node");
        Samples { scheme, values }
    }

    pub fn zeros(scheme: &Arc<UnitScheme>) -> Self {
        Samples::new(scheme.clone(), vec![Complex64::new(0.0, 0.0); scheme.len()])
    }

    pub fn scheme(&self) -> &Arc<UnitScheme> {
        &self.scheme
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Interpolant through the node values of the containing panel.
    pub fn eval(&self, p: UnitPoint) -> Complex64 {
        let k = self.scheme.panel_of(p);
        let n = self.scheme.nodes_per_panel();
        let panel = &self.scheme.panels()[k];
        let s = panel.local(p);
        self.scheme.rule().interpolate(&self.values[k * n..(k + 1) * n], s)
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Samples, b: Complex64) -> Samples {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Samples::new(self.scheme.clone(), values)
    }

    pub fn scale(&self, a: Complex64) -> Samples {
        Samples::new(self.scheme.clone(), self.values.iter().map(|v| a * v).collect())
    }

    pub fn map_points(&self, f: impl Fn(UnitPoint, Complex64) -> Complex64) -> Samples {
        let values = self.scheme.points().iter().zip(&self.values).map(|(p, v)| f(*p, *v)).collect();
        Samples::new(self.scheme.clone(), values)
    }

    pub fn norm(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for (v, w) in self.values.iter().zip(self.scheme.weights()) {
            acc.add(Complex64::new(v.norm_sqr() * w, 0.0));
        }
        acc.value().re.max(0.0).sqrt()
    }

    pub fn inner(&self, other: &Samples) -> Complex64 {
        let mut acc = CompensatedSum::new();
        for ((f, g), w) in self.values.iter().zip(&other.values).zip(self.scheme.weights()) {
            acc.add(f * g.conj() * *w);
        }
        acc.value()
    }
}

/// A complex-valued function on `(0,1)`.
#[derive(Clone)]
pub enum UnitFn {
    /// Closed-form evaluator, optionally with its derivative in `x`.
    Analytic { value: UnitEval, derivative: Option<UnitEval> },
    Sampled(Samples),
}

impl fmt::Debug for UnitFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitFn::Analytic { derivative, .. } => {
                write!(f, "UnitFn::Analytic {{ derivative: {} }}", derivative.is_some())
            }
            UnitFn::Sampled(s) => write!(f, "UnitFn::Sampled({s:?})"),
        }
    }
}

impl From<Samples> for UnitFn {
    fn from(s: Samples) -> Self {
        UnitFn::Sampled(s)
    }
}

impl UnitFn {
    /// Real-valued closed form in `x`.
    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::point(move |p| Complex64::new(f(p.x), 0.0))
    }

    /// Complex closed form evaluated on full [`UnitPoint`]s.
    pub fn point(f: impl Fn(UnitPoint) -> Complex64 + Send + Sync + 'static) -> Self {
        UnitFn::Analytic { value: Arc::new(f), derivative: None }
    }

    pub fn with_derivative(self, d: impl Fn(UnitPoint) -> Complex64 + Send + Sync + 'static) -> Self {
        match self {
            UnitFn::Analytic { value, .. } => UnitFn::Analytic { value, derivative: Some(Arc::new(d)) },
            sampled => sampled,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::point(move |_| c).with_derivative(|_| Complex64::new(0.0, 0.0))
    }

    /// `χ_[0,1]`.
    pub fn indicator() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, p: UnitPoint) -> Complex64 {
        match self {
            UnitFn::Analytic { value, .. } => value(p),
            UnitFn::Sampled(s) => s.eval(p),
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, UnitFn::Sampled(_))
    }

    /// Node values on `scheme`. Sampled functions must already live there.
    pub fn samples_on(&self, scheme: &Arc<UnitScheme>) -> Result<Samples> {
        match self {
            UnitFn::Sampled(s) => {
                if Arc::ptr_eq(&s.scheme, scheme) || *s.scheme == **scheme {
                    Ok(s.clone())
                } else {
                    Err(Error::Domain("function is sampled on a different scheme".into()))
                }
            }
            UnitFn::Analytic { value, .. } => sample_with(value.as_ref(), scheme),
        }
    }

    /// Node values on `scheme`, interpolating if sampled elsewhere.
    pub fn resample_on(&self, scheme: &Arc<UnitScheme>) -> Result<Samples> {
        match self {
            UnitFn::Sampled(s) if !Arc::ptr_eq(&s.scheme, scheme) && *s.scheme != **scheme => {
                sample_with(&|p| s.eval(p), scheme)
            }
            _ => self.samples_on(scheme),
        }
    }

    /// Node values of the derivative: the closed form when available,
    /// otherwise the derivative of the panel interpolant.
    pub fn derivative_on(&self, scheme: &Arc<UnitScheme>) -> Result<Samples> {
        if let UnitFn::Analytic { derivative: Some(d), .. } = self {
            return sample_with(d.as_ref(), scheme);
        }
        let s = self.samples_on(scheme)?;
        Ok(differentiate(&s))
    }
}

fn sample_with(f: &dyn Fn(UnitPoint) -> Complex64, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    let mut values = Vec::with_capacity(scheme.len());
    for p in scheme.points() {
        let v = f(*p);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation { x: p.x });
        }
        values.push(v);
    }
    Ok(Samples::new(scheme.clone(), values))
}

/// Samples an analytic function on `scheme`.
pub fn sample(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Samples> {
    match f {
        UnitFn::Analytic { .. } => f.samples_on(scheme),
        UnitFn::Sampled(_) => Err(Error::Domain("sample expects an analytic function".into())),
    }
}

/// Derivative of the per-panel interpolant at the nodes.
pub fn differentiate(s: &Samples) -> Samples {
    let scheme = s.scheme();
    let n = scheme.nodes_per_panel();
    let rule = scheme.rule();
    let mut out = vec![Complex64::new(0.0, 0.0); scheme.len()];
    for (k, panel) in scheme.panels().iter().enumerate() {
        let vals = &s.values()[k * n..(k + 1) * n];
        let scale = 2.0 / panel.width();
        for i in 0..n {
            let d: Complex64 = rule.diff_row(i).iter().zip(vals).map(|(a, v)| v * *a).sum();
            out[k * n + i] = d * scale;
        }
    }
    Samples::new(scheme.clone(), out)
}

/// `⟨f, g⟩ = ∫ f ḡ` over `scheme`.
pub fn inner_product(f: &UnitFn, g: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<Complex64> {
    Ok(f.samples_on(scheme)?.inner(&g.samples_on(scheme)?))
}

pub fn norm(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<f64> {
    Ok(f.samples_on(scheme)?.norm())
}

/// Norm with a square-integrability probe: the squared norm is recomputed
/// on two successively deeper gradings, and increments that fail to decay
/// geometrically signal a divergent integral.
pub fn checked_norm(f: &UnitFn, scheme: &Arc<UnitScheme>) -> Result<f64> {
    let base = norm(f, scheme)?;
    let step = 4;
    let deeper = scheme.deepened(step).shared();
    let deepest = deeper.deepened(step).shared();
    let n1 = f.resample_on(&deeper)?.norm().powi(2);
    let n2 = f.resample_on(&deepest)?.norm().powi(2);
    let n0 = base * base;
    let (inc1, inc2) = (n1 - n0, n2 - n1);
    if inc1 > 1e-10 * n0.max(1e-300) && inc2 > 0.95 * inc1 {
        return Err(Error::Integrability(format!(
            "squared norm {n0:.6e} -> {n1:.6e} -> {n2:.6e}"
        )));
    }
    Ok(base)
}
