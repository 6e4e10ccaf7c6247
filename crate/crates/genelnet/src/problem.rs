//! The regression instance the solvers operate on.

use ndarray::{Array1, Array2};

use crate::prox::NormKind;

/// A design matrix, a response, and (when known) the coefficients that
/// generated the response, used only for evaluation.
#[derive(Clone, Debug)]
pub struct ProblemData {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub beta_true: Option<Array1<f64>>,
}

impl ProblemData {
    pub fn new(x: Array2<f64>, y: Array1<f64>, beta_true: Option<Array1<f64>>) -> Self {
        assert_eq!(x.nrows(), y.len(), "row count of x must match length of y");
        if let Some(b) = &beta_true {
            assert_eq!(x.ncols(), b.len(), "beta_true length must match column count of x");
        }
        ProblemData { x, y, beta_true }
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of predictors.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// `X beta - y`.
    pub fn residual(&self, beta: &Array1<f64>) -> Array1<f64> {
        &self.x.dot(beta) - &self.y
    }

    /// Per-column norms `||X_i||_r`.
    pub fn column_norms(&self, kind: NormKind) -> Array1<f64> {
        Array1::from_iter(
            self.x
                .columns()
                .into_iter()
                .map(|c| kind.value(&c.to_owned())),
        )
    }
}
