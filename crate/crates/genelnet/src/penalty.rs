//! The capped surrogate of the `l_q` penalty, the reweighting vector it
//! induces, admissibility and lower bounds for the approximation parameter,
//! objective evaluations, and first-order stationarity residuals.
//!
//! For `0 < q < 1` the penalty term `|b|^q` is replaced per coordinate by
//!
//! ```text
//! h(b) = min_{0 <= s <= u_eps} q * (|b| s - ((q-1)/q) s^{q/(q-1)})
//! ```
//!
//! with cap `u_eps = (eps / (p lambda1))^{(q-1)/q}`. The inner minimizer is
//! `s = |b|^{q-1}` clamped to the cap, which is exactly the reweighting rule
//! `w_i = min(u_eps, |b_i|^{q-1})`. `q = 1` is admitted as the plain
//! elastic-net degenerate case with unit weights; the surrogate is bypassed.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, norm_inf};
use crate::problem::ProblemData;
use crate::prox::NormKind;

/// Full description of the penalized model: loss norm `r`, penalty exponent
/// `q`, the two tuning parameters, the approximation parameter `eps`, and the
/// predictor count `p` it is tied to.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub r: NormKind,
    pub q: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub epsilon: f64,
    pub p: usize,
}

impl PenaltySpec {
    pub fn new(
        r: NormKind,
        q: f64,
        lambda1: f64,
        lambda2: f64,
        epsilon: f64,
        p: usize,
    ) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Config(format!("q must lie in (0, 1], got {q}")));
        }
        if !(lambda1 > 0.0) {
            return Err(Error::Config(format!("lambda1 must be positive, got {lambda1}")));
        }
        if lambda2 < 0.0 || !lambda2.is_finite() {
            return Err(Error::Config(format!("lambda2 must be nonnegative, got {lambda2}")));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        if p == 0 {
            return Err(Error::Config("dimension p must be at least 1".into()));
        }
        Ok(PenaltySpec {
            r,
            q,
            lambda1,
            lambda2,
            epsilon,
            p,
        })
    }

    /// Whether the degenerate convex case `q = 1` is in effect.
    pub fn is_convex_case(&self) -> bool {
        self.q == 1.0
    }

    /// The weight cap `u_eps`; strictly decreasing in `eps` when `q < 1`.
    pub fn u_epsilon(&self) -> Result<f64> {
        u_epsilon(self)
    }

    /// The magnitude below which the surrogate switches to its capped
    /// (linear) branch: `u_eps^{1/(q-1)}`.
    pub fn switch_point(&self) -> Result<f64> {
        let u = self.u_epsilon()?;
        Ok(u.powf(1.0 / (self.q - 1.0)))
    }
}

/// `u_eps = (eps / (p lambda1))^{(q-1)/q}`.
pub fn u_epsilon(spec: &PenaltySpec) -> Result<f64> {
    if spec.is_convex_case() {
        return Err(Error::Config(
            "u_epsilon is undefined for q = 1; unit weights are used instead".into(),
        ));
    }
    let base = spec.epsilon / (spec.p as f64 * spec.lambda1);
    let u = base.powf((spec.q - 1.0) / spec.q);
    debug_assert!(u.is_finite() && u > 0.0);
    Ok(u)
}

/// Capped surrogate of `|b|^q`: equals `|b|^q` above the switch point and the
/// tangent linearization `q u_eps |b| - (q - 1) u_eps^{q/(q-1)}` at or below
/// it. Continuous at the switch.
pub fn h_eps_value(beta_i: f64, spec: &PenaltySpec) -> f64 {
    assert!(!spec.is_convex_case(), "h_eps is only defined for q < 1");
    let q = spec.q;
    let u = u_epsilon(spec).expect("q < 1");
    let switch = u.powf(1.0 / (q - 1.0));
    let a = beta_i.abs();
    if a > switch {
        a.powf(q)
    } else {
        q * u * a - (q - 1.0) * u.powf(q / (q - 1.0))
    }
}

/// The Clarke subdifferential element of the surrogate, with `Sign(0) = 0`:
/// `q |b|^{q-1} Sign(b)` above the switch point, `q u_eps Sign(b)` at or
/// below it.
pub fn h_eps_subgradient(beta_i: f64, spec: &PenaltySpec) -> f64 {
    assert!(!spec.is_convex_case(), "h_eps is only defined for q < 1");
    let q = spec.q;
    let u = u_epsilon(spec).expect("q < 1");
    let switch = u.powf(1.0 / (q - 1.0));
    let a = beta_i.abs();
    let s = if beta_i > 0.0 {
        1.0
    } else if beta_i < 0.0 {
        -1.0
    } else {
        0.0
    };
    if a > switch {
        q * a.powf(q - 1.0) * s
    } else {
        q * u * s
    }
}

/// The diagonal of the reweighted-subproblem matrix `W_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    values: Array1<f64>,
}

impl WeightVector {
    pub fn from_values(values: Array1<f64>) -> Self {
        WeightVector { values }
    }

    pub fn ones(p: usize) -> Self {
        WeightVector {
            values: Array1::ones(p),
        }
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The weights scaled by a constant, e.g. `q * lambda1` when they enter
    /// a weighted-l1 prox.
    pub fn scaled(&self, c: f64) -> Array1<f64> {
        &self.values * c
    }
}

/// Reweighting rule `w_i = min(u_eps, |b_i|^{q-1})`; all ones when `q = 1`.
/// Zero coordinates hit the cap.
pub fn weights(beta: &Array1<f64>, spec: &PenaltySpec) -> WeightVector {
    if spec.is_convex_case() {
        return WeightVector::ones(beta.len());
    }
    let u = u_epsilon(spec).expect("q < 1");
    let q = spec.q;
    WeightVector {
        values: beta.mapv(|b| {
            let a = b.abs();
            if a == 0.0 {
                u
            } else {
                a.powf(q - 1.0).min(u)
            }
        }),
    }
}

/// Largest admissible approximation parameter:
/// `min_i p lambda1 (||X_i||_r / (q lambda1))^{q/(q-1)}`. Any `eps` strictly
/// below this keeps generalized stationary points of the surrogate problem
/// stationary for the original one.
pub fn epsilon_upper_bound(x: &Array2<f64>, spec: &PenaltySpec) -> Result<f64> {
    if spec.is_convex_case() {
        return Err(Error::Config(
            "epsilon admissibility is only defined for q < 1".into(),
        ));
    }
    let q = spec.q;
    let l1 = spec.lambda1;
    let mut bound = f64::INFINITY;
    for (i, col) in x.columns().into_iter().enumerate() {
        let norm = spec.r.value(&col.to_owned());
        if norm == 0.0 {
            return Err(Error::InputDomain(format!(
                "column {i} of the design matrix is identically zero; the admissibility bound degenerates"
            )));
        }
        let b = spec.p as f64 * l1 * (norm / (q * l1)).powf(q / (q - 1.0));
        bound = bound.min(b);
    }
    Ok(bound)
}

/// Per-column lower bound `(q lambda1 / ||X_i||_r)^{1/(1-q)}` that every
/// nonzero entry of a generalized stationary point must exceed.
pub fn lower_bound(x: &Array2<f64>, spec: &PenaltySpec) -> Result<Array1<f64>> {
    if spec.is_convex_case() {
        return Err(Error::Config(
            "the support lower bound is only defined for q < 1".into(),
        ));
    }
    let q = spec.q;
    let mut out = Array1::zeros(x.ncols());
    for (i, col) in x.columns().into_iter().enumerate() {
        let norm = spec.r.value(&col.to_owned());
        if norm == 0.0 {
            return Err(Error::InputDomain(format!(
                "column {i} of the design matrix is identically zero; the lower bound degenerates"
            )));
        }
        out[i] = (q * spec.lambda1 / norm).powf(1.0 / (1.0 - q));
    }
    Ok(out)
}

/// Distance-to-stationarity report for a candidate solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StationarityReport {
    /// Per-coordinate distance from zero to the achievable set of
    /// `b_i (g_i + 2 lambda2 b_i) + lambda1 q |b_i|^q` over subgradients `g`
    /// of the loss.
    pub residual_vector: Array1<f64>,
    pub max_abs_residual: f64,
    /// Indices with `b_i != 0`, exactly.
    pub support: Vec<usize>,
    /// Lower bound per support index (empty for `q = 1`, where no bound
    /// applies).
    pub lower_bound_vector: Vec<f64>,
    /// Whether every support entry strictly exceeds its lower bound.
    pub bound_satisfied: bool,
}

/// Per-coordinate interval of achievable values of `(X^T s)_i` over
/// subgradients `s` of `||.||_r` at the residual.
fn loss_subgradient_intervals(
    data: &ProblemData,
    kind: NormKind,
    residual: &Array1<f64>,
) -> Vec<(f64, f64)> {
    let x = &data.x;
    let (n, p) = (data.n(), data.p());
    match kind {
        NormKind::L1 => {
            let mut out = Vec::with_capacity(p);
            for i in 0..p {
                let mut fixed = 0.0;
                let mut slack = 0.0;
                for j in 0..n {
                    let xij = x[(j, i)];
                    if residual[j] > 0.0 {
                        fixed += xij;
                    } else if residual[j] < 0.0 {
                        fixed -= xij;
                    } else {
                        slack += xij.abs();
                    }
                }
                out.push((fixed - slack, fixed + slack));
            }
            out
        }
        NormKind::L2 => {
            let nr = norm2(residual);
            if nr > 0.0 {
                let g = x.t().dot(&(residual / nr));
                g.iter().map(|&v| (v, v)).collect()
            } else {
                (0..p)
                    .map(|i| {
                        let c = norm2(&x.column(i).to_owned());
                        (-c, c)
                    })
                    .collect()
            }
        }
        NormKind::LInf => {
            let m = norm_inf(residual);
            if m > 0.0 {
                // Active max-magnitude rows, with a relative tolerance so a
                // numerically tied maximum is not split by rounding.
                let tol = m * 1e-12;
                let active: Vec<usize> =
                    (0..n).filter(|&j| residual[j].abs() >= m - tol).collect();
                (0..p)
                    .map(|i| {
                        let mut lo = f64::INFINITY;
                        let mut hi = f64::NEG_INFINITY;
                        for &j in &active {
                            let v = residual[j].signum() * x[(j, i)];
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                        (lo, hi)
                    })
                    .collect()
            } else {
                (0..p)
                    .map(|i| {
                        let c = norm_inf(&x.column(i).to_owned());
                        (-c, c)
                    })
                    .collect()
            }
        }
    }
}

/// First-order stationarity residual of a candidate `beta`, together with the
/// support lower-bound certificate.
///
/// The check is existential: for each coordinate the nearest achievable value
/// of the stationarity expression over the loss subdifferential is found by
/// projecting onto the per-coordinate interval of `(X^T s)_i`.
pub fn stationarity_residual(
    beta: &Array1<f64>,
    data: &ProblemData,
    spec: &PenaltySpec,
) -> StationarityReport {
    assert_eq!(beta.len(), data.p(), "beta length mismatch");
    assert_eq!(spec.p, data.p(), "spec dimension mismatch");
    let residual = data.residual(beta);
    let intervals = loss_subgradient_intervals(data, spec.r, &residual);
    let mut residual_vector = Array1::zeros(beta.len());
    for (i, &b) in beta.iter().enumerate() {
        if b == 0.0 {
            continue;
        }
        let (lo, hi) = intervals[i];
        let (mut clo, mut chi) = (b * lo, b * hi);
        if clo > chi {
            std::mem::swap(&mut clo, &mut chi);
        }
        let shift = 2.0 * spec.lambda2 * b * b + spec.lambda1 * spec.q * b.abs().powf(spec.q);
        let (a, bb) = (clo + shift, chi + shift);
        residual_vector[i] = if a > 0.0 {
            a
        } else if bb < 0.0 {
            -bb
        } else {
            0.0
        };
    }
    let support: Vec<usize> = (0..beta.len()).filter(|&i| beta[i] != 0.0).collect();
    let (lower_bound_vector, bound_satisfied) = if spec.is_convex_case() {
        (Vec::new(), true)
    } else {
        match lower_bound(&data.x, spec) {
            Ok(bounds) => {
                let v: Vec<f64> = support.iter().map(|&i| bounds[i]).collect();
                let ok = support
                    .iter()
                    .zip(v.iter())
                    .all(|(&i, &b)| beta[i].abs() > b);
                (v, ok)
            }
            Err(_) => (Vec::new(), false),
        }
    };
    let max_abs_residual = norm_inf(&residual_vector);
    StationarityReport {
        residual_vector,
        max_abs_residual,
        support,
        lower_bound_vector,
        bound_satisfied,
    }
}

/// The exact model objective
/// `||X b - y||_r + lambda2 ||b||_2^2 + lambda1 sum |b_i|^q`.
pub fn objective_f(beta: &Array1<f64>, data: &ProblemData, spec: &PenaltySpec) -> f64 {
    assert_eq!(beta.len(), data.p(), "beta length mismatch");
    let loss = spec.r.value(&data.residual(beta));
    let ridge = spec.lambda2 * beta.dot(beta);
    let pen: f64 = beta.iter().map(|b| b.abs().powf(spec.q)).sum();
    loss + ridge + spec.lambda1 * pen
}

/// The surrogate objective with the capped penalty; coincides with
/// [`objective_f`] when `q = 1`.
pub fn objective_f_eps(beta: &Array1<f64>, data: &ProblemData, spec: &PenaltySpec) -> f64 {
    assert_eq!(beta.len(), data.p(), "beta length mismatch");
    if spec.is_convex_case() {
        return objective_f(beta, data, spec);
    }
    let loss = spec.r.value(&data.residual(beta));
    let ridge = spec.lambda2 * beta.dot(beta);
    let pen: f64 = beta.iter().map(|&b| h_eps_value(b, spec)).sum();
    loss + ridge + spec.lambda1 * pen
}

/// The weighted convex subproblem objective
/// `||X b - y||_r + lambda2 ||b||_2^2 + q lambda1 ||W b||_1`.
pub fn objective_f_weighted(
    beta: &Array1<f64>,
    data: &ProblemData,
    spec: &PenaltySpec,
    weights: &WeightVector,
) -> f64 {
    assert_eq!(beta.len(), data.p(), "beta length mismatch");
    assert_eq!(weights.len(), beta.len(), "weights length mismatch");
    let loss = spec.r.value(&data.residual(beta));
    let ridge = spec.lambda2 * beta.dot(beta);
    let wl1: f64 = beta
        .iter()
        .zip(weights.values().iter())
        .map(|(b, w)| w * b.abs())
        .sum();
    loss + ridge + spec.q * spec.lambda1 * wl1
}

/// The joint function `F(b, w)` whose partial minimization over feasible `w`
/// recovers the surrogate objective: the weighted objective plus the
/// `lambda1 (1 - q) sum w_i^{q/(q-1)}` offset.
pub fn objective_f_pair(
    beta: &Array1<f64>,
    data: &ProblemData,
    spec: &PenaltySpec,
    weights: &WeightVector,
) -> f64 {
    assert!(!spec.is_convex_case(), "the pair objective needs q < 1");
    let e = spec.q / (spec.q - 1.0);
    let offset: f64 = weights.values().iter().map(|w| w.powf(e)).sum();
    objective_f_weighted(beta, data, spec, weights) + spec.lambda1 * (1.0 - spec.q) * offset
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn spec(q: f64, lambda1: f64, epsilon: f64, p: usize) -> PenaltySpec {
        PenaltySpec::new(NormKind::L2, q, lambda1, 1e-4, epsilon, p).unwrap()
    }

    #[test]
    fn u_epsilon_matches_closed_forms() {
        // exponent (q-1)/q = -1 at q = 0.5, so u_eps = p*lambda1/eps
        let s = spec(0.5, 0.02, 1e-3, 1000);
        assert!((u_epsilon(&s).unwrap() - 2.0e4).abs() < 1e-9);
        let s = spec(0.5, 0.1, 1e-2, 100);
        assert!((u_epsilon(&s).unwrap() - 1000.0).abs() < 1e-9);
        // base 1 gives 1 for any q
        for q in [0.2, 0.5, 0.9] {
            let s = spec(q, 0.1, 0.1 * 50.0, 50);
            assert!((u_epsilon(&s).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn u_epsilon_decreases_in_epsilon() {
        let a = u_epsilon(&spec(0.5, 0.1, 1e-3, 10)).unwrap();
        let b = u_epsilon(&spec(0.5, 0.1, 1e-2, 10)).unwrap();
        assert!(a > b);
    }

    #[test]
    fn u_epsilon_rejects_q_one() {
        assert!(u_epsilon(&spec(1.0, 0.1, 1e-3, 10)).is_err());
    }

    /// Grid-search oracle for the variational definition of the surrogate.
    fn h_oracle(beta: f64, s: &PenaltySpec) -> f64 {
        let u = u_epsilon(s).unwrap();
        let q = s.q;
        let mut best = f64::INFINITY;
        let m = 400_000;
        for k in 0..=m {
            let sv = u * k as f64 / m as f64;
            let v = q * (beta.abs() * sv - (q - 1.0) / q * sv.powf(q / (q - 1.0)));
            // s = 0 makes the second term 0^negative = inf for q<1; skip
            if v.is_finite() && v < best {
                best = v;
            }
        }
        best
    }

    #[test]
    fn h_eps_matches_grid_oracle() {
        let s = spec(0.5, 0.5, 0.5, 4); // u_eps = (0.5/2)^{-1} = 4
        let u = u_epsilon(&s).unwrap();
        assert!((u - 4.0).abs() < 1e-12);
        for beta in [0.0, 0.01, 0.05, 0.0625, 0.1, 0.5, 2.0, -1.3] {
            let h = h_eps_value(beta, &s);
            let oracle = h_oracle(beta, &s);
            assert!(
                (h - oracle).abs() < 1e-6,
                "beta={beta}: {h} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn h_eps_value_far_above_switch_is_power() {
        let s = spec(0.5, 0.5, 0.5, 4);
        assert!((h_eps_value(2.0, &s) - 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn h_eps_nonnegative_at_zero() {
        let s = spec(0.5, 0.5, 0.5, 4);
        let v = h_eps_value(0.0, &s);
        assert!(v >= 0.0);
        // 1-D oracle confirms the inner minimizer at zero is s = u_eps
        assert!((v - h_oracle(0.0, &s)).abs() < 1e-9);
    }

    #[test]
    fn h_eps_continuous_at_switch() {
        let s = spec(0.5, 0.5, 0.5, 4);
        let switch = s.switch_point().unwrap();
        let above = switch * (1.0 + 1e-12);
        let below = switch * (1.0 - 1e-12);
        assert!((h_eps_value(above, &s) - h_eps_value(below, &s)).abs() < 1e-12);
    }

    #[test]
    fn h_eps_subgradient_branches() {
        let s = spec(0.5, 0.5, 0.5, 4);
        let u = u_epsilon(&s).unwrap();
        let switch = s.switch_point().unwrap();
        let b = 2.0 * switch.max(0.5);
        assert!((h_eps_subgradient(b, &s) - 0.5 * b.powf(-0.5)).abs() < 1e-14);
        assert_eq!(h_eps_subgradient(0.0, &s), 0.0);
        let b = switch * 0.5;
        assert!((h_eps_subgradient(-b, &s) + 0.5 * u).abs() < 1e-14);
    }

    #[test]
    fn h_eps_subgradient_matches_finite_differences() {
        let s = spec(0.4, 0.3, 0.2, 7);
        let switch = s.switch_point().unwrap();
        for &b in &[switch * 3.0, 1.0, -2.5, switch * 0.5, -switch * 0.3] {
            if b == 0.0 {
                continue;
            }
            let h = 1e-7 * (1.0 + b.abs());
            let fd = (h_eps_value(b + h, &s) - h_eps_value(b - h, &s)) / (2.0 * h);
            let g = h_eps_subgradient(b, &s);
            assert!(
                (fd - g).abs() <= 1e-6 * (1.0 + g.abs()),
                "b={b}: fd {fd} vs {g}"
            );
        }
    }

    #[test]
    fn weights_examples() {
        let s = spec(0.5, 0.02, 1e-3, 1000); // u_eps = 2e4
        let w = weights(&array![4.0, 0.0], &s);
        assert!((w.values()[0] - 0.5).abs() < 1e-14);
        assert!((w.values()[1] - 2.0e4).abs() < 1e-9);
        let s1 = spec(1.0, 0.02, 1e-3, 1000);
        let w = weights(&array![4.0, 0.0, -3.0], &s1);
        assert_eq!(w.values(), &array![1.0, 1.0, 1.0]);
    }

    #[test]
    fn epsilon_upper_bound_closed_form() {
        // all columns with ||X_i||_2 = 10, p = 1000, lambda1 = 0.2, q = 0.5:
        // 200 * (0.1/10) = 2
        let mut x = Array2::zeros((4, 3));
        for i in 0..3 {
            x[(i, i)] = 10.0;
        }
        let s = PenaltySpec::new(NormKind::L2, 0.5, 0.2, 0.0, 1e-6, 1000).unwrap();
        let b = epsilon_upper_bound(&x, &s).unwrap();
        assert!((b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn epsilon_upper_bound_base_one_and_min_rule() {
        let x = array![[0.05], [0.0]]; // ||X_1||_2 = q*lambda1 = 0.05
        let s = PenaltySpec::new(NormKind::L2, 0.5, 0.1, 0.0, 1e-6, 7).unwrap();
        let b = epsilon_upper_bound(&x, &s).unwrap();
        assert!((b - 0.7).abs() < 1e-12);
        // mixed norms: the minimum over columns governs
        let x = array![[10.0, 0.05], [0.0, 0.0]];
        let b = epsilon_upper_bound(&x, &s).unwrap();
        let per_wide_col = 7.0 * 0.1 * (10.0 / 0.05_f64).powf(-1.0);
        assert!((b - per_wide_col).abs() < 1e-12);
    }

    #[test]
    fn epsilon_upper_bound_rejects_zero_column() {
        let x = array![[1.0, 0.0], [0.0, 0.0]];
        let s = PenaltySpec::new(NormKind::L2, 0.5, 0.1, 0.0, 1e-6, 2).unwrap();
        assert!(epsilon_upper_bound(&x, &s).is_err());
    }

    #[test]
    fn lower_bound_closed_form() {
        let mut x = Array2::zeros((3, 2));
        x[(0, 0)] = 10.0;
        x[(1, 1)] = 0.1;
        let s = PenaltySpec::new(NormKind::L2, 0.5, 0.2, 0.0, 1e-6, 2).unwrap();
        let b = lower_bound(&x, &s).unwrap();
        assert!((b[0] - 1e-4).abs() < 1e-16);
        assert!((b[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_shrinks_as_q_grows() {
        let mut x = Array2::zeros((2, 1));
        x[(0, 0)] = 10.0;
        let b9 = lower_bound(&x, &spec(0.9, 0.2, 1e-6, 1)).unwrap()[0];
        let b5 = lower_bound(&x, &spec(0.5, 0.2, 1e-6, 1)).unwrap()[0];
        assert!(b9 < b5);
        assert!(b9 < 1e-10);
    }

    #[test]
    fn stationarity_zero_vector_has_zero_residual() {
        let data = ProblemData::new(array![[1.0, 2.0], [3.0, -1.0]], array![1.0, -2.0], None);
        for r in [NormKind::L1, NormKind::L2, NormKind::LInf] {
            let s = PenaltySpec::new(r, 0.5, 0.2, 0.1, 1e-6, 2).unwrap();
            let rep = stationarity_residual(&Array1::zeros(2), &data, &s);
            assert_eq!(rep.max_abs_residual, 0.0);
            assert!(rep.support.is_empty());
        }
    }

    #[test]
    fn stationarity_scalar_instance() {
        // X = [1], y = 1, r = l2, lambda2 = 0: the scalar objective
        // |b - 1| + lambda1 |b|^q has its minimizer at b = 1 (grid-checked),
        // where the loss subdifferential interval [-1, 1] absorbs the
        // penalty slope.
        let data = ProblemData::new(array![[1.0]], array![1.0], None);
        let s = PenaltySpec::new(NormKind::L2, 0.5, 0.1, 0.0, 1e-6, 1).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=400_000 {
            let b = -0.5 + 2.0 * k as f64 / 400_000.0;
            let v = (b - 1.0).abs() + 0.1 * b.abs().powf(0.5);
            if v < best.0 {
                best = (v, b);
            }
        }
        assert!((best.1 - 1.0).abs() < 1e-5, "grid minimizer {}", best.1);
        let rep = stationarity_residual(&array![1.0], &data, &s);
        assert!(rep.max_abs_residual <= 1e-10, "{}", rep.max_abs_residual);
    }

    #[test]
    fn objectives_at_zero_and_unit_weights() {
        let data = ProblemData::new(array![[1.0, 0.0], [0.0, 1.0]], array![3.0, -4.0], None);
        let s = PenaltySpec::new(NormKind::L2, 1.0, 0.3, 0.2, 1e-6, 2).unwrap();
        let zero = Array1::zeros(2);
        assert!((objective_f(&zero, &data, &s) - 5.0).abs() < 1e-14);
        let beta = array![0.5, -1.0];
        let w = WeightVector::ones(2);
        assert!(
            (objective_f_weighted(&beta, &data, &s, &w) - objective_f(&beta, &data, &s)).abs()
                < 1e-14
        );
    }

    #[test]
    fn f_eps_is_partial_min_of_pair() {
        let mut rng = StdRng::seed_from_u64(3);
        let data = ProblemData::new(
            array![[1.0, 0.2, -0.3], [0.1, -1.0, 0.5]],
            array![0.7, -0.2],
            None,
        );
        let s = PenaltySpec::new(NormKind::L1, 0.5, 0.3, 0.05, 0.2, 3).unwrap();
        let u = u_epsilon(&s).unwrap();
        for _ in 0..20 {
            let beta = Array1::from_iter((0..3).map(|_| rng.gen_range(-2.0..2.0)));
            let feps = objective_f_eps(&beta, &data, &s);
            let w_star = weights(&beta, &s);
            let at_min = objective_f_pair(&beta, &data, &s, &w_star);
            assert!((feps - at_min).abs() <= 1e-10 * (1.0 + feps.abs()));
            for _ in 0..100 {
                let w = WeightVector::from_values(Array1::from_iter(
                    (0..3).map(|_| rng.gen_range(0.0..1.0) * u),
                ));
                // w = 0 makes w^{q/(q-1)} blow up; keep strictly positive
                let w = WeightVector::from_values(w.values().mapv(|v| v.max(1e-6 * u)));
                let pair = objective_f_pair(&beta, &data, &s, &w);
                assert!(feps <= pair + 1e-12 * (1.0 + pair.abs()));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn weights_are_capped_and_monotone(
            b1 in 0.0001..5.0f64,
            b2 in 0.0001..5.0f64,
            q in 0.2..0.95f64,
        ) {
            let s = spec(q, 0.1, 1e-2, 10);
            let u = u_epsilon(&s).unwrap();
            let w = weights(&array![b1, b2], &s);
            prop_assert!(w.values().iter().all(|&v| v > 0.0 && v <= u));
            if b1 >= b2 {
                prop_assert!(w.values()[0] <= w.values()[1] + 1e-15);
            }
        }

        #[test]
        fn h_eps_even_and_monotone(b in 0.0..4.0f64, q in 0.2..0.95f64) {
            let s = spec(q, 0.3, 0.15, 6);
            prop_assert!((h_eps_value(b, &s) - h_eps_value(-b, &s)).abs() < 1e-14);
            prop_assert!(h_eps_value(b + 0.1, &s) >= h_eps_value(b, &s) - 1e-14);
        }
    }
}
