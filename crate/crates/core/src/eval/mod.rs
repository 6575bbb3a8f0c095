//! Baseline predictors and evaluation metrics.

pub mod auc;
pub mod compare;
pub mod incidence;
pub mod logistic;

pub use auc::auc;
pub use compare::{paired_comparison, Comparison, SignificanceTest};
pub use incidence::{incidence_rate, FollowUpRecord, Incidence};
pub use logistic::{fit_logistic, predict_logistic, LogisticFit};
