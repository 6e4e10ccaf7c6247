//! Synthetic benchmark instances, LIBSVM-format ingestion with polynomial
//! feature expansion, and the trial-averaged accuracy metrics.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemData;

/// Noise family for synthetic responses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// `exp(N(0,1))` recentred by its mean `e^{1/2}` so the noise has zero
    /// mean while keeping the heavy right tail.
    LogNormal,
    /// Standard normal.
    Gaussian,
    /// Uniform on `[-1, 1]`.
    Uniform,
}

impl NoiseKind {
    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::LogNormal => "ln",
            NoiseKind::Gaussian => "gn",
            NoiseKind::Uniform => "un",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Recipe for a synthetic regression instance: AR(1)-correlated rows,
/// a planted sparse coefficient vector, and additive scaled noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n: usize,
    pub p: usize,
    /// Row autocorrelation; column covariance is `kappa^{|i-j|}`.
    pub kappa: f64,
    /// Number of nonzero planted coefficients.
    pub sparsity: usize,
    /// Ratio of the largest to the smallest planted magnitude; the smallest
    /// is pinned to 1.
    pub magnitude_ratio: f64,
    pub noise: NoiseKind,
    /// Noise level multiplying the raw noise vector.
    pub alpha: f64,
    pub seed: u64,
    /// Planted coefficients are given independent random signs unless this
    /// forces them all positive.
    #[serde(default)]
    pub positive_signs: bool,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::Config("n and p must be positive".into()));
        }
        if self.sparsity >= self.n {
            return Err(Error::Config(format!(
                "sparsity {} must be below the observation count {}",
                self.sparsity, self.n
            )));
        }
        if self.sparsity > self.p {
            return Err(Error::Config(format!(
                "sparsity {} exceeds the predictor count {}",
                self.sparsity, self.p
            )));
        }
        if !(0.0..1.0).contains(&self.kappa) {
            return Err(Error::Config(format!(
                "kappa must lie in [0, 1), got {}",
                self.kappa
            )));
        }
        if self.magnitude_ratio < 1.0 {
            return Err(Error::Config(format!(
                "magnitude ratio must be at least 1, got {}",
                self.magnitude_ratio
            )));
        }
        if self.alpha < 0.0 || !self.alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be nonnegative, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Where a dataset came from; recorded so result files are re-runnable.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Synthetic(SyntheticConfig),
    File {
        path: String,
        expansion_degree: Option<usize>,
    },
}

/// A regression instance plus its provenance.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub problem: ProblemData,
    pub provenance: Provenance,
}

/// Rows drawn from a zero-mean Gaussian with covariance `kappa^{|i-j|}`,
/// sampled by the exact AR(1) recursion
/// `x_1 = z_1`, `x_j = kappa x_{j-1} + sqrt(1 - kappa^2) z_j`.
pub fn sample_design<R: Rng>(n: usize, p: usize, kappa: f64, rng: &mut R) -> Array2<f64> {
    let scale = (1.0 - kappa * kappa).sqrt();
    let mut x = Array2::zeros((n, p));
    for i in 0..n {
        let mut prev = 0.0;
        for j in 0..p {
            let z: f64 = StandardNormal.sample(rng);
            let v = if j == 0 { z } else { kappa * prev + scale * z };
            x[(i, j)] = v;
            prev = v;
        }
    }
    x
}

/// One noise vector of the requested family, deterministic in the seed.
pub fn noise_sample(kind: NoiseKind, n: usize, seed: u64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    noise_sample_with_rng(kind, n, &mut rng)
}

pub fn noise_sample_with_rng<R: Rng>(kind: NoiseKind, n: usize, rng: &mut R) -> Array1<f64> {
    match kind {
        NoiseKind::Gaussian => Array1::from_iter((0..n).map(|_| StandardNormal.sample(rng))),
        NoiseKind::Uniform => Array1::from_iter((0..n).map(|_| rng.gen_range(-1.0..=1.0))),
        NoiseKind::LogNormal => {
            let mean = (0.5_f64).exp();
            Array1::from_iter((0..n).map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                z.exp() - mean
            }))
        }
    }
}

/// Plants `sparsity` coefficients on a uniformly drawn support, with
/// magnitudes uniform on `[1, ratio]` and independent random signs.
fn plant_coefficients<R: Rng>(
    p: usize,
    sparsity: usize,
    ratio: f64,
    positive_signs: bool,
    rng: &mut R,
) -> Array1<f64> {
    let support = rand::seq::index::sample(rng, p, sparsity).into_vec();
    let mut beta = Array1::zeros(p);
    for idx in support {
        let magnitude = rng.gen_range(1.0..=ratio);
        let sign = if positive_signs || rng.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        };
        beta[idx] = sign * magnitude;
    }
    beta
}

/// Generates a synthetic dataset: design rows, planted coefficients, and
/// `y = X b + alpha * noise`. Identical seeds give bitwise-identical data.
pub fn generate(config: &SyntheticConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let x = sample_design(config.n, config.p, config.kappa, &mut rng);
    let beta_true = plant_coefficients(
        config.p,
        config.sparsity,
        config.magnitude_ratio,
        config.positive_signs,
        &mut rng,
    );
    let noise = noise_sample_with_rng(config.noise, config.n, &mut rng);
    let y = &x.dot(&beta_true) + &(noise * config.alpha);
    Ok(Dataset {
        problem: ProblemData::new(x, y, Some(beta_true)),
        provenance: Provenance::Synthetic(config.clone()),
    })
}

/// Like [`generate`] but with caller-chosen coefficients (fixed-design
/// experiments); the design and noise draws still come from the seed.
pub fn generate_with_coefficients(
    config: &SyntheticConfig,
    beta_true: Array1<f64>,
) -> Result<Dataset> {
    config.validate()?;
    if beta_true.len() != config.p {
        return Err(Error::Config("beta_true length must match p".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let x = sample_design(config.n, config.p, config.kappa, &mut rng);
    let noise = noise_sample_with_rng(config.noise, config.n, &mut rng);
    let y = &x.dot(&beta_true) + &(noise * config.alpha);
    Ok(Dataset {
        problem: ProblemData::new(x, y, Some(beta_true)),
        provenance: Provenance::Synthetic(config.clone()),
    })
}

/// Reads a LIBSVM-format text file (label followed by 1-based `index:value`
/// pairs) into dense arrays. Features never mentioned stay zero. No
/// centering or scaling is applied; see [`standardize`].
pub fn read_libsvm(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(display.clone(), e))?;
    let reader = BufReader::new(file);
    let mut labels: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(display.clone(), e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a first token");
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            path: display.clone(),
            line: lineno,
            msg: format!("bad label {label_tok:?}"),
        })?;
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                path: display.clone(),
                line: lineno,
                msg: format!("feature token {tok:?} lacks an index:value colon"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: lineno,
                msg: format!("bad feature index {idx_s:?}"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    path: display.clone(),
                    line: lineno,
                    msg: "feature indices are 1-based; found 0".into(),
                });
            }
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: lineno,
                msg: format!("bad feature value {val_s:?}"),
            })?;
            max_index = max_index.max(idx);
            entries.push((idx - 1, val));
        }
        labels.push(label);
        rows.push(entries);
    }
    let n = labels.len();
    let mut x = Array2::zeros((n, max_index));
    for (i, entries) in rows.iter().enumerate() {
        for &(j, v) in entries {
            x[(i, j)] = v;
        }
    }
    Ok(Dataset {
        problem: ProblemData::new(x, Array1::from_vec(labels), None),
        provenance: Provenance::File {
            path: display,
            expansion_degree: None,
        },
    })
}

/// Writes the instance back out in LIBSVM format (only nonzero features).
pub fn write_libsvm(problem: &ProblemData, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::create(path).map_err(|e| Error::io(display.clone(), e))?;
    let mut w = BufWriter::new(file);
    for i in 0..problem.n() {
        write!(w, "{}", problem.y[i]).map_err(|e| Error::io(display.clone(), e))?;
        for j in 0..problem.p() {
            let v = problem.x[(i, j)];
            if v != 0.0 {
                write!(w, " {}:{}", j + 1, v).map_err(|e| Error::io(display.clone(), e))?;
            }
        }
        writeln!(w).map_err(|e| Error::io(display.clone(), e))?;
    }
    w.flush().map_err(|e| Error::io(display, e))
}

/// Default ceiling on expanded column counts.
pub const DEFAULT_EXPANSION_CAP: usize = 200_000;

/// All monomials of total degree 1 through `degree` over the columns of `x`,
/// in graded lexicographic order (all degree-1 terms, then degree-2, ...).
/// Column count is `C(p + degree, degree) - 1`.
pub fn polynomial_expand(x: &Array2<f64>, degree: usize) -> Result<Array2<f64>> {
    polynomial_expand_with_cap(x, degree, DEFAULT_EXPANSION_CAP)
}

pub fn polynomial_expand_with_cap(
    x: &Array2<f64>,
    degree: usize,
    cap: usize,
) -> Result<Array2<f64>> {
    if degree == 0 {
        return Err(Error::Config("expansion degree must be at least 1".into()));
    }
    let p = x.ncols();
    let total = expanded_column_count(p, degree).ok_or_else(|| {
        Error::ResourceLimit(format!(
            "monomial count for p={p}, degree={degree} overflows"
        ))
    })?;
    if total > cap {
        return Err(Error::ResourceLimit(format!(
            "expansion would create {total} columns, above the cap of {cap}"
        )));
    }
    let n = x.nrows();
    let mut out = Array2::zeros((n, total));
    let mut col = 0usize;
    let mut monomial = Vec::new();
    for d in 1..=degree {
        monomial.clear();
        monomial.resize(d, 0usize);
        loop {
            for i in 0..n {
                let mut v = 1.0;
                for &j in &monomial {
                    v *= x[(i, j)];
                }
                out[(i, col)] = v;
            }
            col += 1;
            // next nondecreasing index tuple in lexicographic order
            let mut k = d;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if monomial[k] + 1 < p {
                    monomial[k] += 1;
                    for l in (k + 1)..d {
                        monomial[l] = monomial[k];
                    }
                    break;
                }
                if k == 0 {
                    monomial.clear();
                    break;
                }
            }
            if monomial.is_empty() {
                break;
            }
        }
    }
    debug_assert_eq!(col, total);
    Ok(out)
}

/// `C(p + degree, degree) - 1`, or `None` on overflow.
pub fn expanded_column_count(p: usize, degree: usize) -> Option<usize> {
    let mut c: u128 = 1;
    for k in 1..=degree as u128 {
        c = c.checked_mul(p as u128 + k)?;
        c /= k;
    }
    let total = c.checked_sub(1)?;
    usize::try_from(total).ok()
}

/// Column-centering and optional unit-l2-norm column scaling. When known
/// coefficients are attached, they are rescaled consistently.
pub fn standardize(problem: &ProblemData, center: bool, unit_columns: bool) -> ProblemData {
    let mut x = problem.x.clone();
    let mut y = problem.y.clone();
    let mut beta_true = problem.beta_true.clone();
    let n = x.nrows() as f64;
    if center {
        for mut col in x.columns_mut() {
            let mean = col.sum() / n;
            col.mapv_inplace(|v| v - mean);
        }
        let ymean = y.sum() / n;
        y.mapv_inplace(|v| v - ymean);
    }
    if unit_columns {
        for (j, mut col) in x.columns_mut().into_iter().enumerate() {
            let norm = col.dot(&col).sqrt();
            if norm > 0.0 {
                col.mapv_inplace(|v| v / norm);
                if let Some(b) = beta_true.as_mut() {
                    b[j] *= norm;
                }
            }
        }
    }
    ProblemData::new(x, y, beta_true)
}

/// One completed trial: the estimate and, when available, the truth.
#[derive(Clone, Debug)]
pub struct TrialFit {
    pub beta_hat: Array1<f64>,
    pub beta_true: Option<Array1<f64>>,
}

/// Trial-averaged evaluation metrics. `re` and `mse` need known true
/// coefficients and are absent otherwise; so is `sd`, whose zero positions
/// are defined by the truth.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricSet {
    /// Mean of `||b_hat - b_true||_2 / ||b_true||_2` over trials.
    pub re: Option<f64>,
    /// Mean of `||b_hat - b_true||_2 / p` over trials. Kept as the unsquared
    /// norm over `p`; see [`MetricSet::conventional_mse`] for the squared
    /// variant.
    pub mse: Option<f64>,
    /// Mean over trials of the standard deviation of the estimated
    /// coefficients at true-zero positions.
    pub sd: Option<f64>,
    pub n_trials: usize,
}

/// Trial-averaged metrics over completed fits. All fits must share the
/// dimension and agree on whether the truth is known.
pub fn metrics(fits: &[TrialFit]) -> Result<MetricSet> {
    if fits.is_empty() {
        return Err(Error::Config("metrics need at least one completed fit".into()));
    }
    let p = fits[0].beta_hat.len();
    let with_truth = fits[0].beta_true.is_some();
    for f in fits {
        if f.beta_hat.len() != p {
            return Err(Error::Config("fits disagree on the dimension p".into()));
        }
        if f.beta_true.is_some() != with_truth {
            return Err(Error::Config(
                "fits disagree on whether true coefficients are available".into(),
            ));
        }
    }
    let n_trials = fits.len();
    if !with_truth {
        return Ok(MetricSet {
            re: None,
            mse: None,
            sd: None,
            n_trials,
        });
    }
    let mut re_sum = 0.0;
    let mut mse_sum = 0.0;
    let mut sd_sum = 0.0;
    for f in fits {
        let truth = f.beta_true.as_ref().expect("checked above");
        let err = &f.beta_hat - truth;
        let err_norm = err.dot(&err).sqrt();
        let truth_norm = truth.dot(truth).sqrt();
        re_sum += err_norm / truth_norm;
        mse_sum += err_norm / p as f64;
        let zeros: Vec<f64> = (0..p)
            .filter(|&i| truth[i] == 0.0)
            .map(|i| f.beta_hat[i])
            .collect();
        if !zeros.is_empty() {
            let m = zeros.iter().sum::<f64>() / zeros.len() as f64;
            let var = zeros.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / zeros.len() as f64;
            sd_sum += var.sqrt();
        }
    }
    Ok(MetricSet {
        re: Some(re_sum / n_trials as f64),
        mse: Some(mse_sum / n_trials as f64),
        sd: Some(sd_sum / n_trials as f64),
        n_trials,
    })
}

impl MetricSet {
    /// The conventional squared-error variant `mean ||e||_2^2 / p`, for
    /// callers that want it; the default report keeps the unsquared form.
    pub fn conventional_mse(fits: &[TrialFit]) -> Option<f64> {
        if fits.is_empty() || fits[0].beta_true.is_none() {
            return None;
        }
        let p = fits[0].beta_hat.len() as f64;
        let mut acc = 0.0;
        for f in fits {
            let truth = f.beta_true.as_ref()?;
            let err = &f.beta_hat - truth;
            acc += err.dot(&err) / p;
        }
        Some(acc / fits.len() as f64)
    }
}

/// Deterministic per-trial seed derivation (splitmix64 over the base seed and
/// the trial index), so parallel and serial benchmark runs agree.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    let mut z = base ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
