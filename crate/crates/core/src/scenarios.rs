//! Venue misreporting scenarios and the two-cluster augmentation.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::SampleData;
use crate::rng::RngStream;
use crate::transmission::check_probability;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Perfect,
    Coarse,
    Smallest,
    Largest,
    Contaminated,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        Self::Perfect,
        Self::Coarse,
        Self::Smallest,
        Self::Largest,
        Self::Contaminated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Perfect => "perfect",
            Self::Coarse => "coarse",
            Self::Smallest => "smallest",
            Self::Largest => "largest",
            Self::Contaminated => "contaminated",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                Error::input(format!(
                    "unknown scenario `{s}` (expected perfect|coarse|smallest|largest|contaminated)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub group_size: usize,
    pub drop_count: usize,
    pub contamination_fraction: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self::new(ScenarioKind::Perfect)
    }
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            group_size: 3,
            drop_count: 3,
            contamination_fraction: 0.5,
        }
    }
}

/// Reported data after a scenario transform. `columns[k]` lists the original
/// venues merged into output column `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub z: Array2<f64>,
    pub columns: Vec<Vec<usize>>,
}

/// Venues ordered from most to least patronized; ties by ascending index.
pub fn venues_by_total(z: ArrayView2<'_, f64>) -> Vec<usize> {
    let totals: Vec<f64> = z.columns().into_iter().map(|c| c.sum()).collect();
    let mut order: Vec<usize> = (0..z.ncols()).collect();
    order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]).then(a.cmp(&b)));
    order
}

fn select_columns(z: ArrayView2<'_, f64>, groups: Vec<Vec<usize>>) -> ScenarioOutput {
    let mut out = Array2::<f64>::zeros((z.nrows(), groups.len()));
    for (k, group) in groups.iter().enumerate() {
        for &j in group {
            let mut col = out.column_mut(k);
            col += &z.column(j);
        }
    }
    ScenarioOutput { z: out, columns: groups }
}

pub fn apply_scenario(z: ArrayView2<'_, f64>, spec: &ScenarioSpec, stream: RngStream) -> Result<ScenarioOutput> {
    apply_scenario_with(z, spec, &mut stream.rng())
}

pub fn apply_scenario_with<R: Rng + ?Sized>(
    z: ArrayView2<'_, f64>,
    spec: &ScenarioSpec,
    rng: &mut R,
) -> Result<ScenarioOutput> {
    if z.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::input("encounter matrix must be finite and non-negative"));
    }
    let m = z.ncols();
    match spec.kind {
        ScenarioKind::Perfect => Ok(ScenarioOutput {
            z: z.to_owned(),
            columns: (0..m).map(|j| vec![j]).collect(),
        }),
        ScenarioKind::Coarse => {
            if spec.group_size == 0 || spec.group_size > m {
                return Err(Error::input(format!(
                    "group size {} must be between 1 and the venue count {m}",
                    spec.group_size
                )));
            }
            let order = venues_by_total(z);
            let groups = order.chunks(spec.group_size).map(<[usize]>::to_vec).collect();
            Ok(select_columns(z, groups))
        }
        ScenarioKind::Smallest | ScenarioKind::Largest => {
            if spec.drop_count > m {
                return Err(Error::input(format!(
                    "cannot drop {} of {m} venues",
                    spec.drop_count
                )));
            }
            let order = venues_by_total(z);
            let dropped: Vec<usize> = if spec.kind == ScenarioKind::Largest {
                order[..spec.drop_count].to_vec()
            } else {
                order[m - spec.drop_count..].to_vec()
            };
            let kept = (0..m).filter(|j| !dropped.contains(j)).map(|j| vec![j]).collect();
            Ok(select_columns(z, kept))
        }
        ScenarioKind::Contaminated => {
            check_probability(spec.contamination_fraction)?;
            if m == 0 {
                return Ok(ScenarioOutput { z: z.to_owned(), columns: vec![] });
            }
            let mut out = Array2::<f64>::zeros(z.raw_dim());
            let frac = spec.contamination_fraction;
            for (i, row) in z.rows().into_iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    let whole = x.floor();
                    for _ in 0..(whole as u64) {
                        let dest = if rng.random::<f64>() < frac { rng.random_range(0..m) } else { j };
                        out[[i, dest]] += 1.0;
                    }
                    let rest = x - whole;
                    if rest > 0.0 {
                        let dest = if rng.random::<f64>() < frac { rng.random_range(0..m) } else { j };
                        out[[i, dest]] += rest;
                    }
                }
            }
            Ok(ScenarioOutput {
                z: out,
                columns: (0..m).map(|j| vec![j]).collect(),
            })
        }
    }
}

/// Parameters of the two-cluster augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoClusterSpec {
    pub renamed_count: usize,
    pub conversion_prob: f64,
}

impl Default for TwoClusterSpec {
    fn default() -> Self {
        Self {
            renamed_count: 10,
            conversion_prob: 0.75,
        }
    }
}

/// Duplicates every row of `base`. In the copies, the `renamed_count`
/// busiest venues move to fresh venue ids `m..m + renamed_count` (busiest
/// first), so the two copies overlap only at the remaining venues, and each
/// baseline positive turns negative with probability `conversion_prob`.
///
/// Rows `0..n` are the originals and rows `n..2n` the copies.
pub fn build_two_cluster(
    base: &SampleData,
    renamed_count: usize,
    conversion_prob: f64,
    stream: RngStream,
) -> Result<SampleData> {
    let (n, m) = (base.n_persons(), base.n_venues());
    if renamed_count >= m && !(renamed_count == 0 && m == 0) {
        return Err(Error::input(format!(
            "renamed venue count {renamed_count} must be below the venue count {m}"
        )));
    }
    check_probability(conversion_prob)?;
    let mut rng = stream.rng();
    let renamed: Vec<usize> = venues_by_total(base.z.view())[..renamed_count].to_vec();
    let mut z = Array2::<f64>::zeros((2 * n, m + renamed_count));
    z.slice_mut(ndarray::s![..n, ..m]).assign(&base.z);
    z.slice_mut(ndarray::s![n.., ..m]).assign(&base.z);
    for (k, &j) in renamed.iter().enumerate() {
        let col = base.z.column(j).to_owned();
        z.slice_mut(ndarray::s![n.., m + k]).assign(&col);
        z.slice_mut(ndarray::s![n.., j]).fill(0.0);
    }
    let mut baseline = base.baseline.clone();
    baseline.extend(
        base.baseline
            .iter()
            .map(|&s| s && rng.random::<f64>() >= conversion_prob),
    );
    SampleData::new(z, baseline)
}
