//! Small dense linear-algebra kernels used by the solvers: a Cholesky
//! factorization for symmetric positive definite systems and a matrix-free
//! conjugate gradient loop.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    l: Array2<f64>,
}

impl CholeskyFactor {
    /// Factors `a = L L^T`. Fails if a pivot drops below a small positive
    /// floor, which signals an indefinite or numerically singular matrix.
    pub fn new(a: &Array2<f64>) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "cholesky needs a square matrix");
        let mut l = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::SolverFailure(format!(
                    "cholesky pivot {d:.3e} at column {j}: matrix is not positive definite"
                )));
            }
            let dj = d.sqrt();
            l[(j, j)] = dj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / dj;
            }
        }
        Ok(CholeskyFactor { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solves `A x = b` via the two triangular sweeps.
    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let l = &self.l;
        let mut x = b.clone();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= l[(i, k)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        x
    }
}

/// Direct solve of a symmetric positive definite system.
pub fn solve_spd(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    Ok(CholeskyFactor::new(a)?.solve(b))
}

/// Outcome of a conjugate gradient run.
#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub x: Array1<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Conjugate gradient for `A x = b` with `A` symmetric positive definite,
/// given only the matrix-vector product. Starts from zero, so the returned
/// iterate lies in the Krylov space and the residual is orthogonal to it.
pub fn conjugate_gradient<F>(
    apply: F,
    b: &Array1<f64>,
    rel_tol: f64,
    max_iters: usize,
) -> CgOutcome
where
    F: Fn(&Array1<f64>) -> Array1<f64>,
{
    let n = b.len();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return CgOutcome {
            x: Array1::zeros(n),
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let mut x = Array1::<f64>::zeros(n);
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.dot(&r);
    let tol_abs = rel_tol * b_norm;
    let mut iterations = 0;
    while iterations < max_iters {
        if rs.sqrt() <= tol_abs {
            break;
        }
        let ap = apply(&p);
        let pap = p.dot(&ap);
        if !(pap > 0.0) || !pap.is_finite() {
            // Curvature breakdown: give the caller what we have so far.
            break;
        }
        let alpha = rs / pap;
        x.scaled_add(alpha, &p);
        r.scaled_add(-alpha, &ap);
        let rs_new = r.dot(&r);
        let beta = rs_new / rs;
        p = &r + &(beta * &p);
        rs = rs_new;
        iterations += 1;
    }
    let relative_residual = rs.sqrt() / b_norm;
    CgOutcome {
        converged: relative_residual <= rel_tol,
        x,
        iterations,
        relative_residual,
    }
}

pub fn norm2(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

pub fn norm1(v: &Array1<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(v: &Array1<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn spd_3x3() -> Array2<f64> {
        array![[4.0, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 2.0]]
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = spd_3x3();
        let b = array![1.0, -2.0, 0.5];
        let x = solve_spd(&a, &b).unwrap();
        let r = &a.dot(&x) - &b;
        assert!(norm2(&r) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(CholeskyFactor::new(&a).is_err());
    }

    #[test]
    fn cg_matches_direct_solve() {
        let a = spd_3x3();
        let b = array![0.3, 1.0, -0.7];
        let out = conjugate_gradient(|v| a.dot(v), &b, 1e-12, 50);
        assert!(out.converged);
        let x = solve_spd(&a, &b).unwrap();
        assert!(norm2(&(&out.x - &x)) < 1e-9);
    }

    #[test]
    fn cg_zero_rhs_is_zero() {
        let a = spd_3x3();
        let b = Array1::zeros(3);
        let out = conjugate_gradient(|v| a.dot(v), &b, 1e-12, 50);
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, Array1::zeros(3));
    }
}
