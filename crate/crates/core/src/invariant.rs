//! Invariant subspaces of `C`: the cutoff spaces `M_a`, the Fourier-side
//! families `Φ⁻¹ℱ⁻¹(χ_A L²)` and `Φ⁻¹ℱ⁻¹(q·ℋ²)`, invariance defects, and the
//! block decomposition that turns `S_{−t}` into a weighted bilateral shift.
//!
//! Fourier-side subspaces are handled in the transformed picture on a line
//! grid, where `C` is one-sided convolution and `S_t = e^{−t/2}T_t`. Cutoff
//! and span subspaces are handled on `(0,1)` with the operators themselves.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::{LineFn, LineGrid, Samples, UnitFn, UnitPoint, UnitScheme};
use crate::operators::{apply_fn, KernelSpec};
use crate::quadrature::{gauss_legendre, CompensatedSum};
use crate::semigroup::{apply_s, apply_u, SemigroupElement};
use crate::transforms::{fourier, fourier_inv, phi};

/// Line grid for Fourier-side subspaces: spacing `0.005`, so shifts by
/// multiples of `0.005` are exact index moves.
pub fn band_grid() -> LineGrid {
    LineGrid::new(1 << 14, 40.96).expect("valid band grid")
}

pub type LineSymbol = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum SubspaceKind {
    /// `M_a = {f : f = 0 on [0, a]}`.
    Cutoff { a: f64 },
    /// `{f : f = 0 on [a, 1]}`, invariant for `C*` but not for `C`.
    CutoffBelow { a: f64 },
    /// `Φ⁻¹ℱ⁻¹(χ_A L²)` with `A` a finite union of intervals (endpoints may
    /// be infinite).
    FourierBand { intervals: Vec<(f64, f64)> },
    /// `Φ⁻¹ℱ⁻¹(q·ℋ²)` for unimodular `q`.
    SimplyInvariant { q: LineSymbol },
    /// `Φ⁻¹ℱ⁻¹(ℋ²_−)`, the conjugate Hardy space; invariant for `T_t` only
    /// when `t ≤ 0`.
    ConjugateHardy,
    /// The line spanned by one function.
    Span { e: UnitFn },
}

impl fmt::Debug for SubspaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspaceKind::Cutoff { a } => write!(f, "Cutoff({a})"),
            SubspaceKind::CutoffBelow { a } => write!(f, "CutoffBelow({a})"),
            SubspaceKind::FourierBand { intervals } => write!(f, "FourierBand({intervals:?})"),
            SubspaceKind::SimplyInvariant { .. } => write!(f, "SimplyInvariant"),
            SubspaceKind::ConjugateHardy => write!(f, "ConjugateHardy"),
            SubspaceKind::Span { .. } => write!(f, "Span"),
        }
    }
}

/// A closed subspace together with the discretization its projector uses.
#[derive(Debug, Clone)]
pub struct SubspaceHandle {
    pub kind: SubspaceKind,
    scheme: Arc<UnitScheme>,
    grid: LineGrid,
}

/// Operators whose invariance is probed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestOperator {
    Cesaro,
    CesaroAdjoint,
    Semigroup(f64),
    Unitary(f64),
    /// `T_t`; on `(0,1)` this is `U_t` by the conjugation `Φ S_t Φ⁻¹ = e^{−t/2}T_t`.
    Translation(f64),
}

/// Vectors of a subspace's working representation.
enum Repr {
    Unit(Samples),
    Line(Vec<Complex64>),
}

impl SubspaceHandle {
    fn with_kind(kind: SubspaceKind, scheme: &Arc<UnitScheme>) -> Self {
        let scheme = match &kind {
            SubspaceKind::Cutoff { a } | SubspaceKind::CutoffBelow { a } => {
                scheme.with_breakpoint(UnitPoint::new(*a)).shared()
            }
            _ => scheme.clone(),
        };
        SubspaceHandle { kind, scheme, grid: band_grid() }
    }

    pub fn cutoff(a: f64, scheme: &Arc<UnitScheme>) -> Result<Self> {
        check_cut(a)?;
        Ok(Self::with_kind(SubspaceKind::Cutoff { a }, scheme))
    }

    pub fn cutoff_below(a: f64, scheme: &Arc<UnitScheme>) -> Result<Self> {
        check_cut(a)?;
        Ok(Self::with_kind(SubspaceKind::CutoffBelow { a }, scheme))
    }

    pub fn conjugate_hardy(scheme: &Arc<UnitScheme>) -> Self {
        Self::with_kind(SubspaceKind::ConjugateHardy, scheme)
    }

    pub fn span(e: UnitFn, scheme: &Arc<UnitScheme>) -> Result<Self> {
        if e.samples_on(scheme)?.norm() == 0.0 {
            return Err(Error::Parameter("cannot span the zero function".into()));
        }
        Ok(Self::with_kind(SubspaceKind::Span { e }, scheme))
    }

    pub fn scheme(&self) -> &Arc<UnitScheme> {
        &self.scheme
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }

    fn on_line(&self) -> bool {
        matches!(
            self.kind,
            SubspaceKind::FourierBand { .. } | SubspaceKind::SimplyInvariant { .. } | SubspaceKind::ConjugateHardy
        )
    }

    fn represent(&self, f: &UnitFn) -> Result<Repr> {
        if self.on_line() {
            Ok(Repr::Line(phi(f).samples_on(&self.grid)?))
        } else {
            Ok(Repr::Unit(f.samples_on(&self.scheme)?))
        }
    }

    /// Orthogonal projection of samples on this handle's line grid. The
    /// cutoff kinds are represented by `χ_{u ≤ b}` and `χ_{u ≥ b}` with
    /// `a = 1/(1 + e^b)`; the grid point `u = b` belongs to the kept side.
    pub fn project_line(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        let grid = &self.grid;
        match &self.kind {
            SubspaceKind::Cutoff { a } => {
                let b = UnitPoint::new(*a).log_odds();
                Ok(mask(grid, values, |u| u <= b + 1e-9 * grid.spacing()))
            }
            SubspaceKind::CutoffBelow { a } => {
                let b = UnitPoint::new(*a).log_odds();
                Ok(mask(grid, values, |u| u >= b - 1e-9 * grid.spacing()))
            }
            SubspaceKind::FourierBand { intervals } => {
                let spectrum = to_frequency(values, grid)?;
                let dual = grid.dual();
                let kept = spectrum
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let s = dual.point(k);
                        if intervals.iter().any(|&(lo, hi)| s >= lo && s <= hi) {
                            *v
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                from_frequency(kept, grid)
            }
            SubspaceKind::SimplyInvariant { q } => {
                let dual = grid.dual();
                let spectrum = to_frequency(values, grid)?;
                let unwound: Vec<Complex64> =
                    spectrum.iter().enumerate().map(|(k, v)| v * q(dual.point(k)).conj()).collect();
                let hardy = hardy_project(&unwound, &dual, true)?;
                let wound = hardy.iter().enumerate().map(|(k, v)| v * q(dual.point(k))).collect();
                from_frequency(wound, grid)
            }
            SubspaceKind::ConjugateHardy => {
                let dual = grid.dual();
                let spectrum = to_frequency(values, grid)?;
                from_frequency(hardy_project(&spectrum, &dual, false)?, grid)
            }
            SubspaceKind::Span { .. } => Err(Error::Domain("span subspaces live on the unit interval".into())),
        }
    }

    fn project_repr(&self, r: &Repr) -> Result<Repr> {
        match r {
            Repr::Line(v) => Ok(Repr::Line(self.project_line(v)?)),
            Repr::Unit(s) => Ok(Repr::Unit(match &self.kind {
                SubspaceKind::Cutoff { a } => s.map_points(|p, v| if p.x > *a { v } else { Complex64::new(0.0, 0.0) }),
                SubspaceKind::CutoffBelow { a } => {
                    s.map_points(|p, v| if p.x < *a { v } else { Complex64::new(0.0, 0.0) })
                }
                SubspaceKind::Span { e } => {
                    let es = e.samples_on(&self.scheme)?;
                    let c = s.inner(&es) / es.inner(&es);
                    es.scale(c)
                }
                _ => unreachable!("line kinds use the line representation"),
            })),
        }
    }

    /// The projector as a map on functions. Line kinds return the
    /// interpolated pullback of the projected grid samples.
    pub fn project(&self, f: &UnitFn) -> Result<UnitFn> {
        match self.project_repr(&self.represent(f)?)? {
            Repr::Unit(s) => Ok(UnitFn::from(s)),
            Repr::Line(v) => Ok(crate::transforms::phi_inv(&LineFn::sampled(self.grid, v))),
        }
    }

    fn apply_op(&self, op: TestOperator, r: &Repr) -> Result<Repr> {
        match r {
            Repr::Line(v) => {
                let h = self.grid.spacing();
                Ok(Repr::Line(match op {
                    TestOperator::Cesaro => one_sided_convolution(v, h, true),
                    TestOperator::CesaroAdjoint => one_sided_convolution(v, h, false),
                    TestOperator::Semigroup(t) => {
                        shift(v, t, &self.grid)?.into_iter().map(|x| x * (-0.5 * t).exp()).collect()
                    }
                    TestOperator::Unitary(t) | TestOperator::Translation(t) => shift(v, t, &self.grid)?,
                }))
            }
            Repr::Unit(s) => {
                let f = UnitFn::from(s.clone());
                let out = match op {
                    TestOperator::Cesaro => apply_fn(KernelSpec::Cesaro, &f, &self.scheme)?,
                    TestOperator::CesaroAdjoint => apply_fn(KernelSpec::CesaroAdjoint, &f, &self.scheme)?,
                    TestOperator::Semigroup(t) => apply_s(t, &f),
                    TestOperator::Unitary(t) | TestOperator::Translation(t) => apply_u(t, &f),
                };
                Ok(Repr::Unit(out.samples_on(&self.scheme)?))
            }
        }
    }

    fn repr_norm(&self, r: &Repr) -> f64 {
        match r {
            Repr::Unit(s) => s.norm(),
            Repr::Line(v) => grid_norm(v, self.grid.spacing()),
        }
    }

    fn difference_norm(&self, a: &Repr, b: &Repr) -> f64 {
        match (a, b) {
            (Repr::Unit(x), Repr::Unit(y)) => x.combine(Complex64::new(1.0, 0.0), y, Complex64::new(-1.0, 0.0)).norm(),
            (Repr::Line(x), Repr::Line(y)) => {
                let d: Vec<Complex64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
                grid_norm(&d, self.grid.spacing())
            }
            _ => unreachable!("representations of one handle agree"),
        }
    }

    /// `max_f ‖(I − P)·Op·P f‖ / ‖f‖` over `tests`.
    pub fn invariance_defect(&self, op: TestOperator, tests: &[UnitFn]) -> Result<f64> {
        let mut worst = 0.0f64;
        for f in tests {
            let r = self.represent(f)?;
            let scale = self.repr_norm(&r);
            if scale == 0.0 {
                continue;
            }
            let image = self.apply_op(op, &self.project_repr(&r)?)?;
            let back = self.project_repr(&image)?;
            worst = worst.max(self.difference_norm(&image, &back) / scale);
        }
        Ok(worst)
    }

    /// `max_f ‖P² f − P f‖/‖f‖` and `max_f (‖P f‖ − ‖f‖)/‖f‖`.
    pub fn projector_defects(&self, tests: &[UnitFn]) -> Result<(f64, f64)> {
        let (mut idem, mut growth) = (0.0f64, f64::NEG_INFINITY);
        for f in tests {
            let r = self.represent(f)?;
            let scale = self.repr_norm(&r);
            if scale == 0.0 {
                continue;
            }
            let p = self.project_repr(&r)?;
            let pp = self.project_repr(&p)?;
            idem = idem.max(self.difference_norm(&p, &pp) / scale);
            growth = growth.max((self.repr_norm(&p) - scale) / scale);
        }
        Ok((idem, growth))
    }

    /// `max_f ‖(P − Q) f‖/‖f‖` for two handles sharing a line grid, compared
    /// in the transformed picture.
    pub fn projector_distance(&self, other: &SubspaceHandle, tests: &[UnitFn]) -> Result<f64> {
        let mut worst = 0.0f64;
        for f in tests {
            let g = phi(f).samples_on(&self.grid)?;
            let scale = grid_norm(&g, self.grid.spacing());
            if scale == 0.0 {
                continue;
            }
            let a = self.project_line(&g)?;
            let b = other.project_line(&g)?;
            worst = worst.max(self.difference_norm(&Repr::Line(a), &Repr::Line(b)) / scale);
        }
        Ok(worst)
    }
}

fn check_cut(a: f64) -> Result<()> {
    if (0.0..=1.0).contains(&a) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("cutoff {a} outside [0, 1]")))
    }
}

fn mask(grid: &LineGrid, values: &[Complex64], keep: impl Fn(f64) -> bool) -> Vec<Complex64> {
    values.iter().enumerate().map(|(j, v)| if keep(grid.point(j)) { *v } else { Complex64::new(0.0, 0.0) }).collect()
}

fn grid_norm(v: &[Complex64], h: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in v {
        acc.add(Complex64::new(x.norm_sqr(), 0.0));
    }
    (acc.value().re * h).sqrt()
}

fn to_frequency(values: &[Complex64], grid: &LineGrid) -> Result<Vec<Complex64>> {
    fourier(&LineFn::sampled(*grid, values.to_vec()), grid)?.samples_on(&grid.dual())
}

fn from_frequency(values: Vec<Complex64>, grid: &LineGrid) -> Result<Vec<Complex64>> {
    fourier_inv(&LineFn::sampled(grid.dual(), values), grid)?.samples_on(grid)
}

/// Projection of samples on `grid` onto `ℋ² = ℱ⁻¹(χ_{(0,∞)}L²)` (or onto its
/// conjugate when `upper` is false). The zero bin is kept by `ℋ²`.
pub fn hardy_project(values: &[Complex64], grid: &LineGrid, upper: bool) -> Result<Vec<Complex64>> {
    let transform_grid = grid.dual();
    let spectrum = fourier(&LineFn::sampled(*grid, values.to_vec()), grid)?.samples_on(&transform_grid)?;
    let kept = spectrum
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let y = transform_grid.point(k);
            if (upper && y >= 0.0) || (!upper && y < 0.0) {
                *v
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    fourier_inv(&LineFn::sampled(transform_grid, kept), grid)?.samples_on(grid)
}

/// Trapezoid discretization of `∫ᵤ^∞ e^{(u−s)/2} g(s) ds` (`upward`) or of
/// `∫_{−∞}^u e^{(s−u)/2} g(s) ds`, made periodic on the grid so that it is
/// diagonal in the discrete Fourier basis. Two sweeps settle the wraparound
/// since the kernel decays by `e^{−n h/2}` over one period.
fn one_sided_convolution(g: &[Complex64], h: f64, upward: bool) -> Vec<Complex64> {
    let n = g.len();
    let decay = (-0.5 * h).exp();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let step = |j: usize| if upward { (j + n - 1) % n } else { (j + 1) % n };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut prev = if upward { n - 1 } else { 0 };
    for _ in 0..2 * n {
        let cur = step(prev);
        acc = acc * decay + (g[cur] + g[prev] * decay) * (0.5 * h);
        out[cur] = acc;
        prev = cur;
    }
    out
}

/// Periodic `g ↦ g(· + t)` on the grid: an index rotation when `t` is a
/// multiple of the spacing, a Fourier phase otherwise.
fn shift(g: &[Complex64], t: f64, grid: &LineGrid) -> Result<Vec<Complex64>> {
    let steps = t / grid.spacing();
    let n = g.len();
    if (steps - steps.round()).abs() < 1e-9 {
        let m = (steps.round() as isize).rem_euclid(n as isize) as usize;
        return Ok((0..n).map(|j| g[(j + m) % n]).collect());
    }
    let dual = grid.dual();
    let phased = to_frequency(g, grid)?
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, dual.point(k) * t))
        .collect();
    from_frequency(phased, grid)
}

/// Doubly invariant `Φ⁻¹ℱ⁻¹(χ_A L²)` or simply invariant `Φ⁻¹ℱ⁻¹(q·ℋ²)`.
pub enum BeurlingData {
    Doubly(Vec<(f64, f64)>),
    Simply(LineSymbol),
}

pub fn beurling_construct(data: BeurlingData, scheme: &Arc<UnitScheme>) -> Result<SubspaceHandle> {
    let kind = match data {
        BeurlingData::Doubly(intervals) => {
            if intervals.iter().any(|&(lo, hi)| lo.is_nan() || hi.is_nan() || lo > hi) {
                return Err(Error::Parameter(format!("bad frequency intervals {intervals:?}")));
            }
            SubspaceKind::FourierBand { intervals }
        }
        BeurlingData::Simply(q) => {
            let dual = band_grid().dual();
            for x in dual.points() {
                let deviation = (1.0 - q(x).norm()).abs();
                if deviation.is_nan() || deviation > 1e-10 {
                    return Err(Error::Unimodular { x, deviation });
                }
            }
            SubspaceKind::SimplyInvariant { q }
        }
    };
    Ok(SubspaceHandle::with_kind(kind, scheme))
}

/// The six-subspace catalog: three invariant for `C` and three controls.
pub fn catalog(scheme: &Arc<UnitScheme>) -> Result<Vec<(String, SubspaceHandle, bool)>> {
    let blaschke: LineSymbol =
        Arc::new(|x| Complex64::new(x, -1.0) / Complex64::new(x, 1.0) * Complex64::from_polar(1.0, -0.5 * x));
    Ok(vec![
        ("cutoff a=1/2".into(), SubspaceHandle::cutoff(0.5, scheme)?, true),
        ("simply q=blaschke".into(), beurling_construct(BeurlingData::Simply(blaschke), scheme)?, true),
        ("doubly A=[-1,2]".into(), beurling_construct(BeurlingData::Doubly(vec![(-1.0, 2.0)]), scheme)?, true),
        ("cutoff below a=1/2".into(), SubspaceHandle::cutoff_below(0.5, scheme)?, false),
        ("conjugate hardy".into(), SubspaceHandle::conjugate_hardy(scheme), false),
        ("span x(1-x)".into(), SubspaceHandle::span(UnitFn::real(|x| x * (1.0 - x)), scheme)?, false),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRow {
    pub name: String,
    pub expected_invariant: bool,
    pub cesaro_defect: f64,
    /// `(t, defect under S_t)`
    pub semigroup_defects: Vec<(f64, f64)>,
}

impl CatalogRow {
    /// Whether the `C` and `{S_t}` verdicts agree at `threshold`.
    pub fn verdicts_agree(&self, threshold: f64) -> bool {
        let c = self.cesaro_defect <= threshold;
        let s = self.semigroup_defects.iter().all(|&(_, d)| d <= threshold);
        c == s
    }
}

/// Defects of every catalog subspace under `C` and `S_t`, one thread per
/// subspace.
pub fn catalog_sweep(scheme: &Arc<UnitScheme>, ts: &[f64], probes: &[UnitFn]) -> Result<Vec<CatalogRow>> {
    let entries = catalog(scheme)?;
    std::thread::scope(|scope| {
        let handles: Vec<_> = entries
            .iter()
            .map(|(name, sub, expected)| {
                scope.spawn(move || -> Result<CatalogRow> {
                    let cesaro_defect = sub.invariance_defect(TestOperator::Cesaro, probes)?;
                    let semigroup_defects = ts
                        .iter()
                        .map(|&t| Ok((t, sub.invariance_defect(TestOperator::Semigroup(t), probes)?)))
                        .collect::<Result<_>>()?;
                    Ok(CatalogRow { name: name.clone(), expected_invariant: *expected, cesaro_defect, semigroup_defects })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("catalog worker panicked")).collect()
    })
}

/// Smooth compactly supported bump on `[center − width, center + width]`.
pub fn bump(center: f64, width: f64) -> UnitFn {
    UnitFn::real(move |x| {
        let s = (x - center) / width;
        if s.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        } else {
            0.0
        }
    })
}

/// The blocks `(f∘φ_{−nt})·√(φ′_{−nt})` restricted to `[a₀, a₁]`, sampled
/// on a composite Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub t: f64,
    pub window: usize,
    /// `a_n = 1/(1 + e^{−nt})` for `n = −window ..= window + 1`.
    pub breakpoints: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Block `n` at index `n + window`.
    pub blocks: Vec<Vec<Complex64>>,
    /// Geometric estimate of `Σ_{|n| > window} ‖block_n‖²`.
    pub tail: f64,
}

impl BlockDecomposition {
    pub fn block(&self, n: isize) -> &[Complex64] {
        &self.blocks[(n + self.window as isize) as usize]
    }

    pub fn block_norm_sq(&self, n: isize) -> f64 {
        self.block(n).iter().zip(&self.weights).map(|(v, w)| v.norm_sqr() * w).sum()
    }

    pub fn total_norm_sq(&self) -> f64 {
        let w = self.window as isize;
        let mut acc = CompensatedSum::new();
        for n in -w..=w {
            acc.add(Complex64::new(self.block_norm_sq(n), 0.0));
        }
        acc.value().re
    }
}

pub const BLOCK_PANELS: usize = 16;

pub const DEFAULT_WINDOW: usize = 40;

/// Relative tail tolerance accepted by [`block_decompose`].
pub const BLOCK_TAIL_TOL: f64 = 1e-10;

pub fn block_decompose(t: f64, f: &UnitFn, window: usize) -> Result<BlockDecomposition> {
    let out = build_blocks(t, f, window)?;
    let total = out.total_norm_sq();
    if out.tail > BLOCK_TAIL_TOL * total.max(f64::MIN_POSITIVE) {
        let extra = ((out.tail / (BLOCK_TAIL_TOL * total)).ln() / t).ceil().max(1.0) as usize;
        return Err(Error::Window { tail: out.tail, suggested: window + extra });
    }
    Ok(out)
}

fn build_blocks(t: f64, f: &UnitFn, window: usize) -> Result<BlockDecomposition> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("block decomposition needs t > 0, got {t}")));
    }
    let a0 = 0.5;
    let a1 = 1.0 / (1.0 + (-t).exp());
    let (gn, gw) = gauss_legendre(8);
    let h = (a1 - a0) / BLOCK_PANELS as f64;
    let mut nodes = Vec::with_capacity(BLOCK_PANELS * 8);
    let mut weights = Vec::with_capacity(BLOCK_PANELS * 8);
    for k in 0..BLOCK_PANELS {
        let lo = a0 + k as f64 * h;
        for (s, w) in gn.iter().zip(&gw) {
            nodes.push(lo + 0.5 * h * (s + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    let w = window as isize;
    let blocks: Vec<Vec<Complex64>> = (-w..=w)
        .map(|n| {
            let nt = n as f64 * t;
            let s = SemigroupElement::new(-nt);
            nodes
                .iter()
                .map(|&x| {
                    let p = UnitPoint::new(x);
                    // √φ′_{−nt}(x) = e^{nt/2}/(e^{nt}x + 1 − x)
                    let root = (0.5 * nt).exp() / (nt.exp() * p.x + p.xc);
                    f.eval(s.phi(p)) * root
                })
                .collect()
        })
        .collect();
    let breakpoints = (-w..=w + 1).map(|n| 1.0 / (1.0 + (-(n as f64) * t).exp())).collect();
    let mut out = BlockDecomposition { t, window, breakpoints, nodes, weights, blocks, tail: 0.0 };
    let ratio = (-t).exp();
    out.tail = (out.block_norm_sq(-w) + out.block_norm_sq(w)) * ratio / (1.0 - ratio);
    Ok(out)
}

/// `|Σ‖block_n‖² − ‖f‖²| / ‖f‖²`, with `‖f‖` computed on `scheme`.
pub fn isometry_defect(t: f64, f: &UnitFn, window: usize, scheme: &Arc<UnitScheme>) -> Result<f64> {
    let norm_sq = f.samples_on(scheme)?.norm().powi(2);
    let blocks = block_decompose(t, f, window)?;
    Ok((blocks.total_norm_sq() - norm_sq).abs() / norm_sq)
}

/// `max_n ‖(V_t S_{−t} f)_n − e^{t/2}(V_t f)_{n+1}‖ / ‖f‖` over the window.
pub fn shift_relation_check(t: f64, f: &UnitFn, window: usize) -> Result<f64> {
    // blockwise comparison, so the tail size is irrelevant here
    let direct = build_blocks(t, f, window + 1)?;
    let shifted = build_blocks(t, &apply_s(-t, f), window)?;
    let scale = direct.total_norm_sq().sqrt();
    let gain = (0.5 * t).exp();
    let w = window as isize;
    let mut worst = 0.0f64;
    for n in -w..=w {
        let diff: f64 = shifted
            .block(n)
            .iter()
            .zip(direct.block(n + 1))
            .zip(&shifted.weights)
            .map(|((a, b), wt)| (a - b * gain).norm_sqr() * wt)
            .sum();
        worst = worst.max(diff.sqrt());
    }
    Ok(if scale == 0.0 { worst } else { worst / scale })
}
