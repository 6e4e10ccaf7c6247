//! Closed-form proximal mappings, ball projections, Moreau envelopes, and
//! generalized Jacobian elements for the l1, l2, and l_inf norms plus the
//! weighted l1 used by the reweighted subproblems.
//!
//! Conventions used throughout:
//! - `prox_*(x, t)` computes `Prox_{t f}(x) = argmin_y f(y) + ||y - x||^2 / (2t)`
//!   where `f` is the plain norm (the scale lives in `t` or in the weights).
//! - `Sign(0) = 0`.
//! - At branch boundaries (`|x_i| = t`, `||x||_2 = t`, `||x||_1 = t`) the
//!   shrink-to-zero branch is taken, and Jacobian elements pick the 0-branch.
//!   Any Clarke element is valid there; a fixed rule keeps results
//!   deterministic.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm1, norm2, norm_inf};

/// Which `l_r` norm a loss or prox refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    /// Norm value of a vector.
    pub fn value(self, v: &Array1<f64>) -> f64 {
        match self {
            NormKind::L1 => norm1(v),
            NormKind::L2 => norm2(v),
            NormKind::LInf => norm_inf(v),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        }
    }
}

/// Which branches were active when a prox was evaluated; enough information
/// to select the matching generalized Jacobian element.
#[derive(Clone, Debug)]
pub enum ActivePattern {
    /// l1 / weighted-l1: `true` where the coordinate stayed away from zero,
    /// i.e. strictly above its threshold.
    Elementwise(Vec<bool>),
    /// l2: whether the input was strictly outside the ball of radius `t`.
    Radial { outside: bool },
    /// l_inf: the input was inside the l1 ball (prox is zero there), or the
    /// sign-fold and active set of the underlying simplex projection.
    BallL1 {
        inside: bool,
        signs: Array1<f64>,
        active: Vec<usize>,
    },
}

/// A prox evaluation together with its branch bookkeeping.
#[derive(Clone, Debug)]
pub struct ProxResult {
    pub point: Array1<f64>,
    pub pattern: ActivePattern,
}

/// One Clarke-subdifferential element of a prox map, kept in a form that can
/// be applied as a matrix-vector product without densifying.
///
/// Every element is symmetric positive semidefinite with eigenvalues in
/// `[0, 1]`.
#[derive(Clone, Debug)]
pub enum JacobianElement {
    /// 0/1 diagonal (l1 and weighted-l1 proxes).
    Diagonal(Array1<f64>),
    /// `shrink * I + mix * unit unit^T` (l2 prox outside the ball).
    Radial {
        shrink: f64,
        mix: f64,
        unit: Array1<f64>,
    },
    /// l_inf prox outside the l1 ball: identity off the active set `A`, and
    /// `s_A s_A^T / |A|` on it (the complement of the folded simplex-projection
    /// Jacobian).
    SignedSimplex {
        signs: Array1<f64>,
        active: Vec<usize>,
    },
}

impl JacobianElement {
    pub fn dim(&self) -> usize {
        match self {
            JacobianElement::Diagonal(d) => d.len(),
            JacobianElement::Radial { unit, .. } => unit.len(),
            JacobianElement::SignedSimplex { signs, .. } => signs.len(),
        }
    }

    /// Matrix-vector product with the implicit matrix.
    pub fn apply(&self, d: &Array1<f64>) -> Array1<f64> {
        match self {
            JacobianElement::Diagonal(mask) => mask * d,
            JacobianElement::Radial { shrink, mix, unit } => {
                let along = unit.dot(d);
                let mut out = d * *shrink;
                out.scaled_add(mix * along, unit);
                out
            }
            JacobianElement::SignedSimplex { signs, active } => {
                let mut out = d.clone();
                if !active.is_empty() {
                    let mean = active.iter().map(|&i| signs[i] * d[i]).sum::<f64>()
                        / active.len() as f64;
                    for &i in active {
                        out[i] = signs[i] * mean;
                    }
                }
                out
            }
        }
    }

    /// Dense form, for tests and small explicit systems.
    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.dim();
        let mut m = Array2::<f64>::zeros((n, n));
        match self {
            JacobianElement::Diagonal(mask) => {
                for i in 0..n {
                    m[(i, i)] = mask[i];
                }
            }
            JacobianElement::Radial { shrink, mix, unit } => {
                for i in 0..n {
                    m[(i, i)] = *shrink;
                    for j in 0..n {
                        m[(i, j)] += mix * unit[i] * unit[j];
                    }
                }
            }
            JacobianElement::SignedSimplex { signs, active } => {
                for i in 0..n {
                    m[(i, i)] = 1.0;
                }
                let k = active.len() as f64;
                for &i in active {
                    for &j in active {
                        m[(i, j)] = signs[i] * signs[j] / k;
                    }
                    m[(i, i)] = signs[i] * signs[i] / k;
                }
            }
        }
        m
    }
}

/// A function whose prox the solvers need: a plain norm or a weighted l1
/// `f(x) = sum_i w_i |x_i|` with nonnegative weights.
#[derive(Clone, Debug)]
pub enum ProxFn {
    Norm(NormKind),
    WeightedL1(Array1<f64>),
}

impl ProxFn {
    /// `f(v)`.
    pub fn value(&self, v: &Array1<f64>) -> f64 {
        match self {
            ProxFn::Norm(kind) => kind.value(v),
            ProxFn::WeightedL1(w) => v.iter().zip(w.iter()).map(|(x, w)| w * x.abs()).sum(),
        }
    }

    /// `Prox_{t f}(x)`.
    pub fn prox(&self, x: &Array1<f64>, t: f64) -> Result<ProxResult> {
        match self {
            ProxFn::Norm(NormKind::L1) => prox_l1(x, t),
            ProxFn::Norm(NormKind::L2) => prox_l2(x, t),
            ProxFn::Norm(NormKind::LInf) => prox_linf(x, t),
            ProxFn::WeightedL1(w) => prox_weighted_l1(x, w, t),
        }
    }

    /// Moreau envelope value and gradient, see [`moreau_envelope`].
    pub fn moreau_envelope(&self, x: &Array1<f64>, t: f64) -> Result<(f64, Array1<f64>)> {
        moreau_envelope(self, x, t)
    }

    /// One generalized Jacobian element of the prox map, see [`jacobian_prox`].
    pub fn jacobian_prox(&self, x: &Array1<f64>, t: f64) -> Result<JacobianElement> {
        jacobian_prox(self, x, t)
    }
}

fn check_finite(x: &Array1<f64>, what: &str) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InputDomain(format!("{what} contains a non-finite entry")));
    }
    Ok(())
}

fn check_scale(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InputDomain(format!("prox scale t must be positive, got {t}")));
    }
    Ok(())
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Soft threshold: `Prox_{t||.||_1}(x)_i = sign(x_i) max(|x_i| - t, 0)`.
pub fn prox_l1(x: &Array1<f64>, t: f64) -> Result<ProxResult> {
    check_finite(x, "prox_l1 input")?;
    check_scale(t)?;
    let mut point = Array1::zeros(x.len());
    let mut above = vec![false; x.len()];
    for (i, &xi) in x.iter().enumerate() {
        let a = xi.abs();
        if a > t {
            point[i] = sign(xi) * (a - t);
            above[i] = true;
        }
    }
    Ok(ProxResult {
        point,
        pattern: ActivePattern::Elementwise(above),
    })
}

/// Block soft threshold: zero inside the l2 ball of radius `t`, radial
/// shrink by `1 - t/||x||_2` outside.
pub fn prox_l2(x: &Array1<f64>, t: f64) -> Result<ProxResult> {
    check_finite(x, "prox_l2 input")?;
    check_scale(t)?;
    let nx = norm2(x);
    if nx <= t {
        Ok(ProxResult {
            point: Array1::zeros(x.len()),
            pattern: ActivePattern::Radial { outside: false },
        })
    } else {
        Ok(ProxResult {
            point: x * (1.0 - t / nx),
            pattern: ActivePattern::Radial { outside: true },
        })
    }
}

/// Weighted soft threshold with per-coordinate levels `t * w_i`.
pub fn prox_weighted_l1(x: &Array1<f64>, weights: &Array1<f64>, t: f64) -> Result<ProxResult> {
    check_finite(x, "prox_weighted_l1 input")?;
    check_scale(t)?;
    assert_eq!(x.len(), weights.len(), "weights length mismatch");
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::InputDomain(
            "prox_weighted_l1 weights must be nonnegative and finite".into(),
        ));
    }
    let mut point = Array1::zeros(x.len());
    let mut above = vec![false; x.len()];
    for (i, &xi) in x.iter().enumerate() {
        let level = t * weights[i];
        let a = xi.abs();
        if a > level {
            point[i] = sign(xi) * (a - level);
            above[i] = true;
        }
    }
    Ok(ProxResult {
        point,
        pattern: ActivePattern::Elementwise(above),
    })
}

/// Euclidean projection onto the probability simplex `{z : sum z = 1, z >= 0}`.
///
/// Sort-based thresholding: sort descending, take the largest pivot index
/// whose running average keeps the coordinate positive.
pub fn project_simplex(x: &Array1<f64>) -> Result<Array1<f64>> {
    check_finite(x, "project_simplex input")?;
    if x.is_empty() {
        return Err(Error::InputDomain("project_simplex needs a nonempty vector".into()));
    }
    let mut sorted: Vec<f64> = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    let mut cumsum = 0.0;
    let mut theta = sorted[0] - 1.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    Ok(x.mapv(|v| (v - theta).max(0.0)))
}

/// Simplex projection plus the bookkeeping the l_inf prox Jacobian needs.
fn project_l1_ball_pattern(x: &Array1<f64>, t: f64) -> Result<(Array1<f64>, ActivePattern)> {
    check_finite(x, "project_l1_ball input")?;
    check_scale(t)?;
    let n = x.len();
    if norm1(x) <= t {
        return Ok((
            x.clone(),
            ActivePattern::BallL1 {
                inside: true,
                signs: Array1::zeros(n),
                active: Vec::new(),
            },
        ));
    }
    let signs = x.mapv(sign);
    let folded = x.mapv(|v| v.abs() / t);
    let z = project_simplex(&folded)?;
    let active: Vec<usize> = (0..n).filter(|&i| z[i] > 0.0).collect();
    let point = Array1::from_iter((0..n).map(|i| t * signs[i] * z[i]));
    Ok((
        point,
        ActivePattern::BallL1 {
            inside: false,
            signs,
            active,
        },
    ))
}

/// Euclidean projection onto the l1 ball of radius `t`: the identity inside
/// the ball, sign-folding plus a scaled simplex projection outside.
pub fn project_l1_ball(x: &Array1<f64>, t: f64) -> Result<Array1<f64>> {
    project_l1_ball_pattern(x, t).map(|(p, _)| p)
}

/// Clamp onto the l_inf ball of radius `t`.
pub fn project_linf_ball(x: &Array1<f64>, t: f64) -> Result<Array1<f64>> {
    check_finite(x, "project_linf_ball input")?;
    check_scale(t)?;
    Ok(x.mapv(|v| v.clamp(-t, t)))
}

/// Radial projection onto the l2 ball of radius `t`.
pub fn project_l2_ball(x: &Array1<f64>, t: f64) -> Result<Array1<f64>> {
    check_finite(x, "project_l2_ball input")?;
    check_scale(t)?;
    let nx = norm2(x);
    if nx <= t {
        Ok(x.clone())
    } else {
        Ok(x * (t / nx))
    }
}

/// `Prox_{t||.||_inf}(x) = x - proj_{l1 ball of radius t}(x)`.
pub fn prox_linf(x: &Array1<f64>, t: f64) -> Result<ProxResult> {
    let (projection, pattern) = project_l1_ball_pattern(x, t)?;
    Ok(ProxResult {
        point: x - &projection,
        pattern,
    })
}

/// Moreau envelope of `t f` at `x`: the value `f(p) + ||p - x||^2 / (2t)` at
/// the prox point `p`, and its gradient `(x - p) / t`.
pub fn moreau_envelope(f: &ProxFn, x: &Array1<f64>, t: f64) -> Result<(f64, Array1<f64>)> {
    let prox = f.prox(x, t)?;
    let diff = &prox.point - x;
    let value = f.value(&prox.point) + diff.dot(&diff) / (2.0 * t);
    let gradient = diff.mapv(|v| -v / t);
    Ok((value, gradient))
}

/// One Clarke generalized Jacobian element of `Prox_{t f}` at `x`, chosen by
/// the same branch rule the prox itself uses.
pub fn jacobian_prox(f: &ProxFn, x: &Array1<f64>, t: f64) -> Result<JacobianElement> {
    let prox = f.prox(x, t)?;
    jacobian_from_pattern(&prox.pattern, x, t)
}

/// Jacobian element matching an already-computed prox evaluation.
pub fn jacobian_from_pattern(
    pattern: &ActivePattern,
    x: &Array1<f64>,
    t: f64,
) -> Result<JacobianElement> {
    match pattern {
        ActivePattern::Elementwise(above) => Ok(JacobianElement::Diagonal(Array1::from_iter(
            above.iter().map(|&a| if a { 1.0 } else { 0.0 }),
        ))),
        ActivePattern::Radial { outside } => {
            if !outside {
                Ok(JacobianElement::Diagonal(Array1::zeros(x.len())))
            } else {
                let nx = norm2(x);
                Ok(JacobianElement::Radial {
                    shrink: 1.0 - t / nx,
                    mix: t / nx,
                    unit: x / nx,
                })
            }
        }
        ActivePattern::BallL1 {
            inside,
            signs,
            active,
        } => {
            if *inside {
                Ok(JacobianElement::Diagonal(Array1::zeros(x.len())))
            } else {
                Ok(JacobianElement::SignedSimplex {
                    signs: signs.clone(),
                    active: active.clone(),
                })
            }
        }
    }
}

/// Residual of the Moreau identity
/// `Prox_{t f}(x) + proj_{B}(x) = x`, where `B` is the dual-norm ball of
/// radius `t` (l1 <-> B_inf, l2 <-> B_2, l_inf <-> B_1).
pub fn moreau_identity_residual(kind: NormKind, x: &Array1<f64>, t: f64) -> Result<f64> {
    let prox = ProxFn::Norm(kind).prox(x, t)?;
    let ball = match kind {
        NormKind::L1 => project_linf_ball(x, t)?,
        NormKind::L2 => project_l2_ball(x, t)?,
        NormKind::LInf => project_l1_ball(x, t)?,
    };
    let recomposed = &prox.point + &ball - x;
    Ok(norm2(&recomposed))
}
