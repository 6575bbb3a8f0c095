//! Maximum-likelihood logistic regression by damped Newton (IRLS) steps.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Coefficients are clipped to this magnitude on the logit scale.
pub const COEFFICIENT_CLIP: f64 = 30.0;
pub const MAX_ITERATIONS: usize = 100;
pub const TOLERANCE: f64 = 1e-8;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    /// Intercept first, then one slope per feature column.
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Outcome was constant; only the intercept is meaningful.
    pub degenerate: bool,
    /// Some coefficient reached the clip, which indicates (quasi-)separation.
    pub clipped: bool,
    /// Log-likelihood at the start and after every accepted step.
    pub log_likelihoods: Vec<f64>,
}

impl LogisticFit {
    pub fn n_features(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn design_matrix(features: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = features.nrows();
    let mut x = Array2::<f64>::ones((n, features.ncols() + 1));
    x.slice_mut(ndarray::s![.., 1..]).assign(&features);
    x
}

pub fn log_likelihood(x: &Array2<f64>, y: &[f64], beta: &Array1<f64>) -> f64 {
    let eta = x.dot(beta);
    eta.iter()
        .zip(y)
        .map(|(&e, &yi)| if yi > 0.5 { -softplus(-e) } else { -softplus(e) })
        .sum()
}

/// Score vector `X^T (y - mu)`.
pub fn gradient(x: &Array2<f64>, y: &[f64], beta: &Array1<f64>) -> Array1<f64> {
    let eta = x.dot(beta);
    let resid: Array1<f64> = eta.iter().zip(y).map(|(&e, &yi)| yi - sigmoid(e)).collect();
    x.t().dot(&resid)
}

/// Log-likelihood gradient of a fit, evaluated on the data it was fitted to.
pub fn fitted_gradient(fit: &LogisticFit, features: ArrayView2<'_, f64>, outcome: &[bool]) -> Vec<f64> {
    let x = design_matrix(features);
    let y: Vec<f64> = outcome.iter().map(|&b| f64::from(u8::from(b))).collect();
    gradient(&x, &y, &Array1::from(fit.coefficients.clone())).to_vec()
}

fn fisher_information(x: &Array2<f64>, beta: &Array1<f64>) -> Array2<f64> {
    let eta = x.dot(beta);
    let w: Array1<f64> = eta.mapv(|e| {
        let p = sigmoid(e);
        p * (1.0 - p)
    });
    let xw = x * &w.insert_axis(Axis(1));
    x.t().dot(&xw)
}

/// Solves `a * out = b` for symmetric positive semi-definite `a` via Cholesky,
/// adding diagonal jitter when the factorization breaks down.
fn solve_psd(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let p = a.nrows();
    let scale = a.diag().iter().fold(0.0f64, |m, &d| m.max(d.abs())).max(1e-300);
    let mut jitter = 0.0;
    loop {
        if let Some(l) = cholesky(a, jitter) {
            let mut z = Array1::<f64>::zeros(p);
            for i in 0..p {
                let s: f64 = (0..i).map(|k| l[[i, k]] * z[k]).sum();
                z[i] = (b[i] - s) / l[[i, i]];
            }
            let mut out = Array1::<f64>::zeros(p);
            for i in (0..p).rev() {
                let s: f64 = ((i + 1)..p).map(|k| l[[k, i]] * out[k]).sum();
                out[i] = (z[i] - s) / l[[i, i]];
            }
            return out;
        }
        jitter = if jitter == 0.0 { scale * 1e-12 } else { jitter * 10.0 };
    }
}

fn cholesky(a: &Array2<f64>, jitter: f64) -> Option<Array2<f64>> {
    let p = a.nrows();
    let mut l = Array2::<f64>::zeros((p, p));
    let scale = a.diag().iter().fold(0.0f64, |m, &d| m.max(d.abs()));
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[[i, k]] * l[[j, k]]).sum();
            if i == j {
                let d = a[[i, i]] + jitter - s;
                if d <= scale * 1e-14 || !d.is_finite() {
                    return None;
                }
                l[[i, i]] = d.sqrt();
            } else {
                l[[i, j]] = (a[[i, j]] - s) / l[[j, j]];
            }
        }
    }
    Some(l)
}

fn clip(beta: &mut Array1<f64>) -> bool {
    let mut hit = false;
    for b in beta.iter_mut() {
        if b.abs() >= COEFFICIENT_CLIP {
            *b = b.clamp(-COEFFICIENT_CLIP, COEFFICIENT_CLIP);
            hit = true;
        }
    }
    hit
}

/// Fits `logit P(y = 1) = b0 + b . x` by maximum likelihood.
///
/// Newton steps are halved until the log-likelihood does not decrease.
/// Iteration stops when the largest coefficient change drops below
/// [`TOLERANCE`] or after [`MAX_ITERATIONS`] steps. A constant outcome yields
/// an intercept-only fit flagged `degenerate`.
pub fn fit_logistic(features: ArrayView2<'_, f64>, outcome: &[bool]) -> Result<LogisticFit> {
    let n = features.nrows();
    if outcome.len() != n {
        return Err(Error::input(format!(
            "{n} feature rows but {} outcomes",
            outcome.len()
        )));
    }
    if n == 0 {
        return Err(Error::input("cannot fit a logistic model to zero rows"));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("features contain non-finite values"));
    }
    let p = features.ncols() + 1;
    let positives = outcome.iter().filter(|&&b| b).count();
    if positives == 0 || positives == n {
        let prevalence = positives as f64 / n as f64;
        let logit = (prevalence / (1.0 - prevalence)).ln();
        let mut coefficients = vec![0.0; p];
        coefficients[0] = logit.clamp(-COEFFICIENT_CLIP, COEFFICIENT_CLIP);
        return Ok(LogisticFit {
            coefficients,
            converged: false,
            iterations: 0,
            degenerate: true,
            clipped: true,
            log_likelihoods: Vec::new(),
        });
    }

    let x = design_matrix(features);
    let y: Vec<f64> = outcome.iter().map(|&b| f64::from(u8::from(b))).collect();
    let mut beta = Array1::<f64>::zeros(p);
    beta[0] = (positives as f64 / (n - positives) as f64).ln();
    let mut ll = log_likelihood(&x, &y, &beta);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut clipped = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let grad = gradient(&x, &y, &beta);
        let info = fisher_information(&x, &beta);
        let step = solve_psd(&info, &grad);

        let mut accepted = None;
        let mut scale = 1.0;
        for _ in 0..MAX_HALVINGS {
            let mut candidate = &beta + &(&step * scale);
            let hit = clip(&mut candidate);
            let cand_ll = log_likelihood(&x, &y, &candidate);
            if cand_ll >= ll {
                accepted = Some((candidate, cand_ll, hit));
                break;
            }
            scale *= 0.5;
        }
        let Some((next, next_ll, hit)) = accepted else {
            // no ascent direction left at working precision
            converged = !clipped;
            break;
        };
        clipped |= hit;
        let change = (&next - &beta).iter().fold(0.0f64, |m, d| m.max(d.abs()));
        beta = next;
        ll = next_ll;
        trace.push(ll);
        if change < TOLERANCE {
            converged = !clipped;
            break;
        }
    }

    Ok(LogisticFit {
        coefficients: beta.to_vec(),
        converged,
        iterations,
        degenerate: false,
        clipped,
        log_likelihoods: trace,
    })
}

/// Linear predictors (logits) of `features` under `fit`.
pub fn predict_logistic(fit: &LogisticFit, features: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    if features.ncols() != fit.n_features() {
        return Err(Error::input(format!(
            "model has {} features, data has {}",
            fit.n_features(),
            features.ncols()
        )));
    }
    let slopes = ndarray::ArrayView1::from(&fit.coefficients[1..]);
    Ok(features
        .dot(&slopes)
        .iter()
        .map(|&v| v + fit.coefficients[0])
        .collect())
}
