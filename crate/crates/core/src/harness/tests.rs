use super::*;
use crate::scenarios::ScenarioKind;
use ndarray::array;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn small_base(seed: u64) -> SampleData {
    SyntheticBase {
        persons: 120,
        venues: 6,
        ..SyntheticBase::default()
    }
    .generate(RngStream::new(seed, 0))
    .unwrap()
}

fn small_cfg() -> StudyConfig {
    StudyConfig {
        n_sample: 120,
        replications: 20,
        master_seed: 9,
        ..StudyConfig::default()
    }
}

#[test]
fn draw_population_examples() {
    let base = SampleData::new(array![[1.0, 2.0]], vec![true]).unwrap();
    let mut rng = RngStream::new(1, 0).rng();
    assert!(draw_population(&base, 0, 1.0, &mut rng).unwrap().is_empty());
    let pop = draw_population(&base, 5, 1.0, &mut rng).unwrap();
    assert!(pop.iter().all(|p| p.expected_counts == vec![1.0, 2.0] && p.baseline_status));
    let empty = SampleData::new(Array2::zeros((0, 2)), vec![]).unwrap();
    assert!(draw_population(&empty, 3, 1.0, &mut rng).is_err());
}

#[test]
fn draw_population_is_uniform_over_rows() {
    let rows = 20;
    let z = Array2::from_shape_fn((rows, 1), |(i, _)| i as f64);
    let base = SampleData::new(z, vec![false; rows]).unwrap();
    let draws = 100_000;
    let pop = draw_population(&base, draws, 1.0, &mut RngStream::new(3, 0).rng()).unwrap();
    let mut freq = vec![0usize; rows];
    for p in &pop {
        freq[p.expected_counts[0] as usize] += 1;
    }
    let expected = draws as f64 / rows as f64;
    let stat: f64 = freq.iter().map(|&f| (f as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((rows - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(stat < critical, "chi2 {stat} >= {critical}");
}

#[test]
fn zero_pi_replication_is_flagged() {
    let base = small_base(1);
    let cfg = StudyConfig {
        pi_values: vec![0.0],
        ..small_cfg()
    };
    let r = &run_replication(&cfg, &base, 0).unwrap()[0];
    assert_eq!(r.new_infections, 0);
    assert!(r.flagged());
    assert_eq!(r.incidence, 0.0);
    assert!(matches!(run_study(&cfg, &base), Err(Error::DegenerateStudy { .. })));
}

#[test]
fn replication_is_deterministic() {
    let base = small_base(2);
    let cfg = small_cfg();
    let a = run_replication(&cfg, &base, 4).unwrap();
    let b = run_replication(&cfg, &base, 4).unwrap();
    assert_eq!(a, b);
    assert_eq!(a[0].seed, replication_seed(cfg.master_seed, 4));
    assert_ne!(a, run_replication(&cfg, &base, 5).unwrap());
}

#[test]
fn replications_share_exposure_across_pi() {
    let base = small_base(3);
    let cfg = small_cfg();
    let r = run_replication(&cfg, &base, 0).unwrap();
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|x| x.encounter_quartiles == r[0].encounter_quartiles));
    // coupled transmission: more infections at higher pi
    assert!(r[0].new_infections <= r[1].new_infections);
    assert!(r[1].new_infections <= r[2].new_infections);
}

#[test]
fn higher_pi_has_higher_mean_incidence() {
    let base = small_base(4);
    let cfg = StudyConfig {
        pi_values: vec![0.0062, 0.0143],
        replications: 200,
        ..small_cfg()
    };
    let reps: Vec<_> = (0..200).map(|i| run_replication(&cfg, &base, i).unwrap()).collect();
    let low = reps.iter().map(|r| r[0].incidence).sum::<f64>() / 200.0;
    let high = reps.iter().map(|r| r[1].incidence).sum::<f64>() / 200.0;
    assert!(high > low, "{high} <= {low}");
}

#[test]
fn single_replication_study_has_no_significance() {
    let base = small_base(5);
    let cfg = StudyConfig {
        pi_values: vec![0.05],
        replications: 1,
        ..small_cfg()
    };
    let out = run_study(&cfg, &base).unwrap();
    let r = &out.replications[0];
    let s = &out.summary.by_pi[0];
    for p in Predictor::ALL {
        let ps = s.predictor(p);
        assert_eq!(ps.mean, r.auc_of(p).unwrap());
        assert_eq!(ps.sd, 0.0);
        assert!(ps.vs_venue_risk.is_none());
    }
    assert_eq!(s.mean_incidence, r.incidence);
}

#[test]
fn sequential_and_parallel_studies_agree() {
    let base = small_base(6);
    let seq = StudyConfig {
        execution: Execution::Sequential,
        ..small_cfg()
    };
    let par = StudyConfig {
        execution: Execution::Parallel,
        ..small_cfg()
    };
    assert_eq!(run_study(&seq, &base).unwrap(), run_study(&par, &base).unwrap());
}

#[test]
fn scenario_flows_into_predictors() {
    let base = small_base(7);
    let mut cfg = small_cfg();
    cfg.scenario = ScenarioSpec::new(ScenarioKind::Largest);
    let largest = run_replication(&cfg, &base, 0).unwrap();
    cfg.scenario = ScenarioSpec::new(ScenarioKind::Perfect);
    let perfect = run_replication(&cfg, &base, 0).unwrap();
    // identical simulation truth, different reported data
    for (a, b) in largest.iter().zip(&perfect) {
        assert_eq!(a.new_infections, b.new_infections);
        assert_eq!(a.incidence, b.incidence);
    }
}

#[test]
fn two_cluster_study_uses_doubled_base() {
    let base = small_base(8);
    let cfg = StudyConfig {
        two_cluster: Some(TwoClusterConfig {
            renamed_count: 3,
            conversion_prob: 0.75,
            n_sample: 200,
        }),
        replications: 4,
        ..small_cfg()
    };
    let prepared = cfg.prepare_base(&base).unwrap();
    assert_eq!(prepared.n_persons(), 240);
    assert_eq!(prepared.n_venues(), 9);
    let out = run_study(&cfg, &base).unwrap();
    assert_eq!(out.summary.sample_size, 200);
    assert!(out.summary.two_cluster);
}

#[test]
fn oversized_sample_rejected() {
    let base = small_base(9);
    let cfg = StudyConfig {
        n_sample: 10_000,
        ..small_cfg()
    };
    assert!(run_replication(&cfg, &base, 0).is_err());
}

#[test]
fn calibration_examples() {
    let base = small_base(10);
    let cfg = small_cfg();
    let curve = calibrate_pi(&base, &[0.0, 0.005, 0.01, 0.02], 50, &cfg).unwrap();
    assert_eq!(curve[0].mean_rate, 0.0);
    assert_eq!(curve.iter().map(|c| c.pi).collect::<Vec<_>>(), vec![0.0, 0.005, 0.01, 0.02]);
    assert!(curve.windows(2).all(|w| w[1].mean_rate >= w[0].mean_rate));
    assert!(calibrate_pi(&base, &[], 5, &cfg).is_err());
}

#[test]
fn doubling_window_doubles_encounters() {
    let base = small_base(11);
    let mut cfg = small_cfg();
    let mean_median = |cfg: &StudyConfig| {
        (0..100)
            .map(|i| simulate_cohort(cfg, &base, i, None).unwrap().encounter_quartiles)
            .map(|q| q[0] + q[1] + q[2])
            .sum::<f64>()
            / 100.0
    };
    let single = mean_median(&cfg);
    cfg.first_window = 2.0 * SIX_MONTHS;
    let double = mean_median(&cfg);
    let ratio = double / single;
    assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn quantile_type7() {
    let v = [1.0, 2.0, 3.0, 4.0];
    assert_eq!(quantile(&v, 0.5), 2.5);
    assert_eq!(quantile(&v, 0.25), 1.75);
    assert_eq!(quantile(&[5.0], 0.75), 5.0);
}

#[test]
fn transmit_in_first_window_changes_baseline_only_upward() {
    let base = small_base(12);
    let mut cfg = small_cfg();
    cfg.pi_values = vec![0.2];
    let plain = simulate_cohort(&cfg, &base, 0, None).unwrap();
    cfg.transmit_in_first_window = true;
    let with = simulate_cohort(&cfg, &base, 0, Some(0.2)).unwrap();
    let count = |c: &Cohort| c.baseline.iter().filter(|&&b| b).count();
    assert!(count(&with) > count(&plain));
    assert!(plain.baseline.iter().zip(&with.baseline).all(|(a, b)| !a || *b));
}
