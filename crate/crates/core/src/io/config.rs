//! Flat TOML study configuration.
//!
//! Keys mirror [`StudyConfig`] field names; scenario and two-cluster
//! parameters are spelled out as top-level keys. Every key is optional and
//! falls back to the [`StudyConfig`] default. The base data is either a
//! participant CSV (`data`, relative to the config file) or a synthetic base.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::participants::load_participants;
use crate::error::{Error, Result};
use crate::estimator::SampleData;
use crate::eval::SignificanceTest;
use crate::harness::{StudyConfig, SyntheticBase, TwoClusterConfig};
use crate::parallel::Execution;
use crate::rng::RngStream;
use crate::scenarios::{ScenarioKind, ScenarioSpec};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_sample: Option<usize>,
    pub population_multiplier: Option<usize>,
    pub pi_values: Option<Vec<f64>>,
    pub replications: Option<usize>,
    pub data_window: Option<f64>,
    pub first_window: Option<f64>,
    pub second_window: Option<f64>,
    pub scenario: Option<ScenarioKind>,
    pub group_size: Option<usize>,
    pub drop_count: Option<usize>,
    pub contamination_fraction: Option<f64>,
    pub two_cluster: Option<bool>,
    pub renamed_count: Option<usize>,
    pub conversion_prob: Option<f64>,
    pub two_cluster_sample: Option<usize>,
    pub master_seed: Option<u64>,
    pub significance: Option<SignificanceTest>,
    pub alpha: Option<f64>,
    pub transmit_in_first_window: Option<bool>,
    pub sequential: Option<bool>,
    /// Participant CSV used as the base.
    pub data: Option<PathBuf>,
    /// Seed of the synthetic base used when `data` is absent.
    pub synthetic_seed: Option<u64>,
    pub synthetic_persons: Option<usize>,
    pub synthetic_venues: Option<usize>,
    pub synthetic_prevalence: Option<f64>,
}

/// Study settings plus where the base data comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub study: StudyConfig,
    pub base: BaseSource,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseSource {
    Participants(PathBuf),
    Synthetic { spec: SyntheticBase, seed: u64 },
}

impl BaseSource {
    pub fn load(&self) -> Result<SampleData> {
        match self {
            BaseSource::Participants(path) => load_participants(path)?.sample_data(),
            BaseSource::Synthetic { spec, seed } => spec.generate(RngStream::new(*seed, 0)),
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::input(format!("config: {e}")))
    }

    /// Resolves defaults; a relative `data` path is taken relative to
    /// `config_dir`.
    pub fn resolve(&self, config_dir: &Path) -> LoadedConfig {
        let d = StudyConfig::default();
        let mut scenario = ScenarioSpec::new(self.scenario.unwrap_or(d.scenario.kind));
        if let Some(v) = self.group_size {
            scenario.group_size = v;
        }
        if let Some(v) = self.drop_count {
            scenario.drop_count = v;
        }
        if let Some(v) = self.contamination_fraction {
            scenario.contamination_fraction = v;
        }
        let tc_default = TwoClusterConfig::default();
        let two_cluster = self.two_cluster.unwrap_or(false).then(|| TwoClusterConfig {
            renamed_count: self.renamed_count.unwrap_or(tc_default.renamed_count),
            conversion_prob: self.conversion_prob.unwrap_or(tc_default.conversion_prob),
            n_sample: self.two_cluster_sample.unwrap_or(tc_default.n_sample),
        });
        let study = StudyConfig {
            n_sample: self.n_sample.unwrap_or(d.n_sample),
            population_multiplier: self.population_multiplier.unwrap_or(d.population_multiplier),
            pi_values: self.pi_values.clone().unwrap_or(d.pi_values),
            replications: self.replications.unwrap_or(d.replications),
            data_window: self.data_window.unwrap_or(d.data_window),
            first_window: self.first_window.unwrap_or(d.first_window),
            second_window: self.second_window.unwrap_or(d.second_window),
            scenario,
            two_cluster,
            master_seed: self.master_seed.unwrap_or(d.master_seed),
            significance: self.significance.unwrap_or(d.significance),
            alpha: self.alpha.unwrap_or(d.alpha),
            transmit_in_first_window: self.transmit_in_first_window.unwrap_or(d.transmit_in_first_window),
            execution: if self.sequential.unwrap_or(false) {
                Execution::Sequential
            } else {
                d.execution
            },
        };
        let base = match &self.data {
            Some(p) if p.is_relative() => BaseSource::Participants(config_dir.join(p)),
            Some(p) => BaseSource::Participants(p.clone()),
            None => {
                let sd = SyntheticBase::default();
                BaseSource::Synthetic {
                    spec: SyntheticBase {
                        persons: self.synthetic_persons.unwrap_or(sd.persons),
                        venues: self.synthetic_venues.unwrap_or(sd.venues),
                        prevalence: self.synthetic_prevalence.unwrap_or(sd.prevalence),
                        ..sd
                    },
                    seed: self.synthetic_seed.unwrap_or(0),
                }
            }
        };
        LoadedConfig { study, base }
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file = ConfigFile::parse(&text).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    Ok(file.resolve(path.parent().unwrap_or(Path::new("."))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = ConfigFile::parse("").unwrap().resolve(Path::new("."));
        assert_eq!(cfg.study, StudyConfig::default());
        assert!(matches!(cfg.base, BaseSource::Synthetic { seed: 0, .. }));
    }

    #[test]
    fn keys_map_onto_study_config() {
        let text = r#"
            n_sample = 100
            pi_values = [0.01, 0.02]
            replications = 7
            scenario = "contaminated"
            contamination_fraction = 0.25
            two_cluster = true
            renamed_count = 4
            master_seed = 99
            significance = "wilcoxon"
            second_window = 273
            sequential = true
            data = "people.csv"
        "#;
        let cfg = ConfigFile::parse(text).unwrap().resolve(Path::new("/study"));
        let s = &cfg.study;
        assert_eq!(s.n_sample, 100);
        assert_eq!(s.pi_values, vec![0.01, 0.02]);
        assert_eq!(s.replications, 7);
        assert_eq!(s.scenario.kind, ScenarioKind::Contaminated);
        assert_eq!(s.scenario.contamination_fraction, 0.25);
        let tc = s.two_cluster.unwrap();
        assert_eq!(tc.renamed_count, 4);
        assert_eq!(tc.n_sample, 862);
        assert_eq!(s.master_seed, 99);
        assert_eq!(s.significance, SignificanceTest::Wilcoxon);
        assert_eq!(s.second_window, 273.0);
        assert_eq!(s.execution, Execution::Sequential);
        assert_eq!(cfg.base, BaseSource::Participants(PathBuf::from("/study/people.csv")));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(ConfigFile::parse("replicates = 3").is_err());
        assert!(ConfigFile::parse("scenario = \"sideways\"").is_err());
        assert!(ConfigFile::parse("n_sample = -1").is_err());
        assert!(ConfigFile::parse("[section]\nn_sample = 1").is_err());
    }
}
