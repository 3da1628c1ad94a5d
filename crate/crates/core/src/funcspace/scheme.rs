use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::PanelRule;

/// A point of `(0,1)` stored together with its complement `1 − x`.
///
/// Near `x = 1` the complement cannot be recovered from `x` in double
/// precision, so every constructor fills both fields from the most accurate
/// source available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    pub x: f64,
    pub xc: f64,
}

impl UnitPoint {
    pub fn new(x: f64) -> Self {
        UnitPoint { x, xc: 1.0 - x }
    }

    pub fn from_complement(xc: f64) -> Self {
        UnitPoint { x: 1.0 - xc, xc }
    }

    /// The point `x(u) = 1/(1 + eᵘ)`.
    pub fn from_log_odds(u: f64) -> Self {
        if u >= 0.0 {
            let e = (-u).exp();
            UnitPoint { x: e / (1.0 + e), xc: 1.0 / (1.0 + e) }
        } else {
            let e = u.exp();
            UnitPoint { x: 1.0 / (1.0 + e), xc: e / (1.0 + e) }
        }
    }

    /// `u = log((1 − x)/x)`, the inverse of [`UnitPoint::from_log_odds`].
    pub fn log_odds(&self) -> f64 {
        self.xc.ln() - self.x.ln()
    }

    pub fn is_interior(&self) -> bool {
        self.x > 0.0 && self.xc > 0.0
    }
}

/// One panel `[lo, hi]` of a scheme. Panels in the right half are laid out
/// in complement coordinates so their nodes keep relative precision in `1 − x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub lo: UnitPoint,
    pub hi: UnitPoint,
    right: bool,
}

impl Panel {
    fn new(lo: UnitPoint, hi: UnitPoint) -> Self {
        let right = lo.x >= 0.5;
        Panel { lo, hi, right }
    }

    pub fn width(&self) -> f64 {
        if self.right {
            self.lo.xc - self.hi.xc
        } else {
            self.hi.x - self.lo.x
        }
    }

    /// Point at local coordinate `s ∈ [−1, 1]`.
    pub fn point(&self, s: f64) -> UnitPoint {
        let h = 0.5 * (s + 1.0) * self.width();
        if self.right {
            UnitPoint::from_complement(self.lo.xc - h)
        } else {
            UnitPoint::new(self.lo.x + h)
        }
    }

    pub fn local(&self, p: UnitPoint) -> f64 {
        if self.right {
            ((self.lo.xc + self.hi.xc) - 2.0 * p.xc) / self.width()
        } else {
            (2.0 * p.x - (self.lo.x + self.hi.x)) / self.width()
        }
    }

    fn split(&self) -> (Panel, Panel) {
        let mid = self.point(0.0);
        (Panel::new(self.lo, mid), Panel::new(mid, self.hi))
    }

    /// Where `p` lies relative to this panel.
    fn locate(&self, p: UnitPoint) -> Ordering {
        if self.right {
            if p.xc > self.lo.xc {
                Ordering::Less
            } else if p.xc < self.hi.xc {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        } else if p.x < self.lo.x {
            Ordering::Less
        } else if p.x > self.hi.x {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }
}

/// Layout of the default endpoint-graded composite rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    /// Geometrically graded panels toward each endpoint.
    pub graded_per_side: usize,
    /// Uniform panels on `[transition, 1 − transition]`.
    pub interior_panels: usize,
    pub nodes_per_panel: usize,
    /// Ratio between consecutive graded panel boundaries.
    pub ratio: f64,
    pub transition: f64,
}

impl Default for Grading {
    fn default() -> Self {
        Grading {
            graded_per_side: 54,
            interior_panels: 16,
            nodes_per_panel: 8,
            ratio: 0.5,
            transition: 0.25,
        }
    }
}

/// Composite Gauss–Legendre rule on `(0,1)`; endpoints are never nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitScheme {
    panels: Vec<Panel>,
    rule: PanelRule,
    points: Vec<UnitPoint>,
    weights: Vec<f64>,
    grading: Option<Grading>,
}

impl UnitScheme {
    pub fn graded(g: Grading) -> Result<Self> {
        if g.nodes_per_panel < 2 || g.interior_panels == 0 {
            return Err(Error::Parameter("scheme needs >= 2 nodes and >= 1 interior panel".into()));
        }
        if !(g.ratio > 0.0 && g.ratio < 1.0) || !(g.transition > 0.0 && g.transition < 0.5) {
            return Err(Error::Parameter(format!("bad grading ratio/transition {g:?}")));
        }
        let mut left = Vec::new();
        if g.graded_per_side > 0 {
            left.push(0.0);
            for j in (0..g.graded_per_side - 1).rev() {
                left.push(g.transition * g.ratio.powi(j as i32 + 1));
            }
        }
        let mut breaks: Vec<UnitPoint> = left.iter().map(|&x| UnitPoint::new(x)).collect();
        let span = 1.0 - 2.0 * g.transition;
        for k in 0..=g.interior_panels {
            let x = g.transition + span * k as f64 / g.interior_panels as f64;
            breaks.push(if x <= 0.5 { UnitPoint::new(x) } else { UnitPoint::from_complement(1.0 - x) });
        }
        if g.graded_per_side == 0 {
            breaks[0] = UnitPoint::new(0.0);
            *breaks.last_mut().unwrap() = UnitPoint::from_complement(0.0);
        } else {
            for &xc in left.iter().rev() {
                breaks.push(UnitPoint::from_complement(xc));
            }
        }
        let panels = breaks.windows(2).map(|w| Panel::new(w[0], w[1])).collect();
        Ok(Self::from_panels(panels, g.nodes_per_panel, Some(g)))
    }

    /// `panels` equal panels on `[0, 1]`.
    pub fn uniform(panels: usize, nodes_per_panel: usize) -> Self {
        let panels = (0..panels)
            .map(|k| {
                let a = k as f64 / panels as f64;
                let b = (k + 1) as f64 / panels as f64;
                let p = |x: f64| if x <= 0.5 { UnitPoint::new(x) } else { UnitPoint::from_complement(1.0 - x) };
                Panel::new(p(a), p(b))
            })
            .collect();
        Self::from_panels(panels, nodes_per_panel, None)
    }

    fn from_panels(panels: Vec<Panel>, nodes_per_panel: usize, grading: Option<Grading>) -> Self {
        let rule = PanelRule::new(nodes_per_panel);
        let mut points = Vec::with_capacity(panels.len() * nodes_per_panel);
        let mut weights = Vec::with_capacity(points.capacity());
        for panel in &panels {
            let half = 0.5 * panel.width();
            for (s, w) in rule.nodes.iter().zip(&rule.weights) {
                points.push(panel.point(*s));
                weights.push(half * w);
            }
        }
        UnitScheme { panels, rule, points, weights, grading }
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    /// Splits every panel in two.
    pub fn refined(&self) -> Self {
        let panels = self
            .panels
            .iter()
            .flat_map(|p| {
                let (a, b) = p.split();
                [a, b]
            })
            .collect();
        Self::from_panels(panels, self.rule.len(), None)
    }

    /// Same layout with `extra` more graded panels on each side; falls back
    /// to [`UnitScheme::refined`] for schemes without a grading description.
    pub fn deepened(&self, extra: usize) -> Self {
        match self.grading {
            Some(g) => Self::graded(Grading { graded_per_side: g.graded_per_side + extra, ..g })
                .expect("deepening keeps a valid grading"),
            None => self.refined(),
        }
    }

    /// Adds a panel boundary at `x` (splitting the panel that contains it).
    pub fn with_breakpoint(&self, x: UnitPoint) -> Self {
        let mut panels = Vec::with_capacity(self.panels.len() + 1);
        for p in &self.panels {
            if p.locate(x) == Ordering::Equal && p.lo != x && p.hi != x {
                panels.push(Panel::new(p.lo, x));
                panels.push(Panel::new(x, p.hi));
            } else {
                panels.push(p.clone());
            }
        }
        Self::from_panels(panels, self.rule.len(), None)
    }

    pub fn grading(&self) -> Option<Grading> {
        self.grading
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn rule(&self) -> &PanelRule {
        &self.rule
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.rule.len()
    }

    pub fn points(&self) -> &[UnitPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the panel containing `p` (clamped to the end panels).
    pub fn panel_of(&self, p: UnitPoint) -> usize {
        let idx = self.panels.partition_point(|panel| panel.locate(p) == Ordering::Greater);
        idx.min(self.panels.len() - 1)
    }

    /// Composite-rule integral of sampled values.
    pub fn integrate(&self, values: &[num_complex::Complex64]) -> num_complex::Complex64 {
        let mut acc = crate::quadrature::CompensatedSum::new();
        for (v, w) in values.iter().zip(&self.weights) {
            acc.add(v * *w);
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sum_real;

    #[test]
    fn default_scheme_shape() {
        let s = UnitScheme::graded(Grading::default()).unwrap();
        assert_eq!(s.panels().len(), 2 * 54 + 16);
        assert_eq!(s.len(), 8 * (2 * 54 + 16));
        assert!((sum_real(s.weights().iter().copied()) - 1.0).abs() < 1e-12);
        assert!(s.weights().iter().all(|&w| w > 0.0));
        assert!(s.points().iter().all(|p| p.is_interior()));
        assert!(s.points().windows(2).all(|w| w[0].x < w[1].x || w[0].xc > w[1].xc));
        // Deepest right-end node keeps its complement.
        let last = s.points().last().unwrap();
        assert!(last.xc > 0.0 && last.xc < 1e-17);
    }

    #[test]
    fn panels_partition_the_interval() {
        let s = UnitScheme::graded(Grading::default()).unwrap();
        let p = s.panels();
        assert_eq!(p[0].lo.x, 0.0);
        assert_eq!(p.last().unwrap().hi.xc, 0.0);
        for w in p.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
    }

    #[test]
    fn polynomial_moments_are_exact() {
        let s = UnitScheme::graded(Grading::default()).unwrap();
        for deg in 0..=15 {
            let q = sum_real(s.points().iter().zip(s.weights()).map(|(p, w)| w * p.x.powi(deg)));
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!(((q - exact) / exact).abs() < 1e-12, "degree {deg}");
        }
    }

    #[test]
    fn locate_round_trips_nodes() {
        let s = UnitScheme::graded(Grading::default()).unwrap();
        let n = s.nodes_per_panel();
        for (i, p) in s.points().iter().enumerate() {
            assert_eq!(s.panel_of(*p), i / n);
        }
    }

    #[test]
    fn log_odds_round_trip() {
        for u in [-60.0, -20.0, -1.0, 0.0, 0.3, 5.0, 45.0] {
            let p = UnitPoint::from_log_odds(u);
            assert!((p.log_odds() - u).abs() < 1e-12 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn breakpoint_splits_panel() {
        let s = UnitScheme::graded(Grading::default()).unwrap();
        let a = UnitPoint::new(0.3);
        let t = s.with_breakpoint(a);
        assert_eq!(t.panels().len(), s.panels().len() + 1);
        assert!(t.panels().iter().any(|p| p.hi == a));
    }
}
