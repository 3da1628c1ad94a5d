//! Dense matrix realizations of operators on a [`UnitScheme`] and the
//! norm / smallest-singular-value estimators that act on them.

use std::sync::Arc;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcspace::{Samples, UnitScheme};

/// Matrix of a real-kernel operator in the orthonormal basis attached to
/// the scheme's nodes, acting on `√w_i·f(x_i)`; the discrete `L²` adjoint
/// is the transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator {
    pub matrix: DMatrix<f64>,
    pub scheme: Arc<UnitScheme>,
}

/// Stopping rule for the iterative estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions { tol: 1e-10, max_iter: 20_000, seed: 7 }
    }
}

impl DiscretizedOperator {
    pub fn new(matrix: DMatrix<f64>, scheme: Arc<UnitScheme>) -> Self {
        assert_eq!(matrix.nrows(), scheme.len());
        assert_eq!(matrix.ncols(), scheme.len());
        DiscretizedOperator { matrix, scheme }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn identity(scheme: &Arc<UnitScheme>) -> Self {
        Self::new(DMatrix::identity(scheme.len(), scheme.len()), scheme.clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.transpose(), self.scheme.clone())
    }

    /// `I − self`.
    pub fn identity_minus(&self) -> Self {
        Self::new(DMatrix::identity(self.dim(), self.dim()) - &self.matrix, self.scheme.clone())
    }

    /// `λI − self`, complex in general.
    pub fn shifted(&self, lambda: Complex64) -> DMatrix<Complex64> {
        let mut m = self.matrix.map(|v| Complex64::new(-v, 0.0));
        for i in 0..self.dim() {
            m[(i, i)] += lambda;
        }
        m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(&self.matrix * &other.matrix, self.scheme.clone())
    }

    /// Applies the operator to node samples.
    pub fn apply(&self, f: &Samples) -> Samples {
        let w = self.scheme.weights();
        let (re, im): (Vec<f64>, Vec<f64>) =
            f.values().iter().zip(w).map(|(x, w)| (x.re * w.sqrt(), x.im * w.sqrt())).unzip();
        let re = &self.matrix * DVector::from_vec(re);
        let im = &self.matrix * DVector::from_vec(im);
        let values = re.iter().zip(im.iter()).zip(w).map(|((a, b), w)| Complex64::new(*a, *b) / w.sqrt()).collect();
        Samples::new(self.scheme.clone(), values)
    }

    /// Largest singular value by power iteration on `MᵀM`.
    pub fn norm(&self, opts: IterationOptions) -> Result<f64> {
        power_norm(self.dim(), |v| &self.matrix * v, |v| self.matrix.tr_mul(v), opts)
    }

    /// Smallest singular value of `λI − self`.
    pub fn shifted_smallest_singular_value(&self, lambda: Complex64) -> f64 {
        smallest_singular_value(&self.shifted(lambda))
    }

    /// Norm of `[M, Mᵀ]` restricted to the range of an isometric embedding
    /// `E` (columns orthonormal), `‖[M, Mᵀ]·E‖`.
    pub fn restricted_commutator_norm(&self, embedding: &DMatrix<f64>, opts: IterationOptions) -> Result<f64> {
        let m = &self.matrix;
        let comm = |v: &DVector<f64>| -> DVector<f64> {
            let x = embedding * v;
            m * m.tr_mul(&x) - m.tr_mul(&(m * &x))
        };
        let comm_adj = |y: &DVector<f64>| -> DVector<f64> {
            // the commutator is symmetric
            let z = m * m.tr_mul(y) - m.tr_mul(&(m * y));
            embedding.tr_mul(&z)
        };
        power_norm(embedding.ncols(), comm, comm_adj, opts)
    }
}

fn start_vector<T: ComplexField<RealField = f64>>(n: usize, seed: u64) -> DVector<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = DVector::from_fn(n, |_, _| T::from_real(rng.gen::<f64>() - 0.5));
    let norm = v.norm();
    v.unscale(norm)
}

/// Largest singular value of an operator given by its action and the action
/// of its adjoint. Returns 0 for the zero operator.
pub fn power_norm<T: ComplexField<RealField = f64>>(
    n: usize,
    apply: impl Fn(&DVector<T>) -> DVector<T>,
    apply_adjoint: impl Fn(&DVector<T>) -> DVector<T>,
    opts: IterationOptions,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let mut v = start_vector::<T>(n, opts.seed);
    let mut estimate = 0.0;
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let w = apply(&v);
        let next = w.norm();
        if next == 0.0 {
            return Ok(0.0);
        }
        let back = apply_adjoint(&w);
        let back_norm = back.norm();
        if back_norm == 0.0 {
            return Ok(next);
        }
        v = back.unscale(back_norm);
        change = (next - estimate).abs() / next;
        estimate = next;
        if change < opts.tol {
            return Ok(estimate);
        }
    }
    Err(Error::Convergence { iterations: opts.max_iter, change })
}

/// Smallest singular value of a square matrix, from a full SVD.
pub fn smallest_singular_value(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().min()
}

/// Isometric embedding of the piecewise polynomials of `coarse` into those
/// of `fine`, in the orthonormal node bases of both. Requires every fine
/// panel to lie inside a coarse panel and equal polynomial degrees.
pub fn embedding(coarse: &UnitScheme, fine: &UnitScheme) -> Result<DMatrix<f64>> {
    let n = coarse.nodes_per_panel();
    if fine.nodes_per_panel() != n {
        return Err(Error::Grid("embedding needs equal nodes per panel".into()));
    }
    let mut e = DMatrix::zeros(fine.len(), coarse.len());
    for (i, (p, w)) in fine.points().iter().zip(fine.weights()).enumerate() {
        let k = coarse.panel_of(*p);
        let panel = &coarse.panels()[k];
        let basis = coarse.rule().basis(panel.local(*p));
        for (j, b) in basis.into_iter().enumerate() {
            e[(i, k * n + j)] = w.sqrt() * b / coarse.weights()[k * n + j].sqrt();
        }
    }
    Ok(e)
}
