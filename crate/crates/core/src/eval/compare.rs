//! Paired significance tests across aligned replications.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::eval::auc::midranks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignificanceTest {
    /// Two-sided paired t-test on the differences.
    #[default]
    Paired,
    /// Wilcoxon signed-rank test, normal approximation with tie correction.
    Wilcoxon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// Mean of `b - a`.
    pub mean_difference: f64,
    pub p_value: f64,
    /// Differences had no spread, so the p-value is 0 or 1 by convention.
    pub degenerate: bool,
}

impl Comparison {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

fn degenerate(mean: f64) -> Comparison {
    Comparison {
        mean_difference: mean,
        p_value: if mean == 0.0 { 1.0 } else { 0.0 },
        degenerate: true,
    }
}

pub fn paired_comparison(a: &[f64], b: &[f64], test: SignificanceTest) -> Result<Comparison> {
    if a.len() != b.len() {
        return Err(Error::input(format!("paired vectors differ in length: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::input("paired comparison needs at least two replications"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    match test {
        SignificanceTest::Paired => paired_t(&diffs),
        SignificanceTest::Wilcoxon => signed_rank(&diffs),
    }
}

fn paired_t(diffs: &[f64]) -> Result<Comparison> {
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    // rounding in b - a leaves ~1 ulp of spread on a constant offset
    if sd <= 1e-12 * mean.abs() || sd == 0.0 {
        return Ok(degenerate(mean));
    }
    let t = mean / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).map_err(|e| Error::input(e.to_string()))?;
    Ok(Comparison {
        mean_difference: mean,
        p_value: (2.0 * dist.sf(t.abs())).min(1.0),
        degenerate: false,
    })
}

fn signed_rank(diffs: &[f64]) -> Result<Comparison> {
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let scale = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| d.abs() > 1e-12 * scale).collect();
    if nonzero.is_empty() {
        return Ok(degenerate(mean));
    }
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w_plus: f64 = ranks.iter().zip(&nonzero).filter(|(_, &d)| d > 0.0).map(|(r, _)| r).sum();
    let n = nonzero.len() as f64;
    let expected = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return Ok(degenerate(mean));
    }
    let z = (w_plus - expected) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).map_err(|e| Error::input(e.to_string()))?;
    Ok(Comparison {
        mean_difference: mean,
        p_value: (2.0 * normal.sf(z.abs())).min(1.0),
        degenerate: false,
    })
}
