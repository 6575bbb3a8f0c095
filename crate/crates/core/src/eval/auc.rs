use crate::error::{Error, Result};

/// Midranks (1-based) of `values`; tied values share the mean of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid;
        }
        start = end;
    }
    ranks
}

/// Area under the ROC curve via the Mann-Whitney statistic. Tied
/// positive/negative score pairs count one half.
pub fn auc(scores: &[f64], outcomes: &[bool]) -> Result<f64> {
    if scores.len() != outcomes.len() {
        return Err(Error::input(format!(
            "{} scores but {} outcomes",
            scores.len(),
            outcomes.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::input("scores contain NaN"));
    }
    let n_pos = outcomes.iter().filter(|&&o| o).count();
    let n_neg = outcomes.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedAuc);
    }
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks.iter().zip(outcomes).filter(|(_, &o)| o).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(scores: &[f64], outcomes: &[bool]) -> f64 {
        let mut credit = 0.0;
        let mut pairs = 0.0;
        for (i, &oi) in outcomes.iter().enumerate() {
            if !oi {
                continue;
            }
            for (j, &oj) in outcomes.iter().enumerate() {
                if oj {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    credit += 1.0;
                } else if scores[i] == scores[j] {
                    credit += 0.5;
                }
            }
        }
        credit / pairs
    }

    #[test]
    fn examples() {
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &[false, false, true, true]).unwrap(), 1.0);
        assert_eq!(auc(&[3.0; 5], &[false, true, false, true, true]).unwrap(), 0.5);
        let scores = [1.0, 2.0, 2.0, 3.0];
        let outcomes = [false, false, true, true];
        assert_eq!(brute_force(&scores, &outcomes), 0.875);
        assert_eq!(auc(&scores, &outcomes).unwrap(), 0.875);
    }

    #[test]
    fn single_class_is_undefined() {
        assert!(matches!(auc(&[1.0, 2.0], &[true, true]), Err(Error::UndefinedAuc)));
        assert!(matches!(auc(&[1.0, 2.0], &[false, false]), Err(Error::UndefinedAuc)));
    }

    #[test]
    fn midranks_of_ties() {
        assert_eq!(midranks(&[5.0, 1.0, 5.0, 3.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    proptest! {
        #[test]
        fn matches_enumeration_with_ties(
            data in prop::collection::vec((0i32..6, any::<bool>()), 2..50)
        ) {
            let scores: Vec<f64> = data.iter().map(|&(s, _)| s as f64).collect();
            let outcomes: Vec<bool> = data.iter().map(|&(_, o)| o).collect();
            let n_pos = outcomes.iter().filter(|&&o| o).count();
            prop_assume!(n_pos > 0 && n_pos < outcomes.len());
            let a = auc(&scores, &outcomes).unwrap();
            prop_assert_eq!(a, brute_force(&scores, &outcomes));
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            prop_assert!((a + auc(&neg, &outcomes).unwrap() - 1.0).abs() < 1e-12);
            let affine: Vec<f64> = scores.iter().map(|s| 3.0 * s + 7.0).collect();
            prop_assert_eq!(auc(&affine, &outcomes).unwrap(), a);
            let expd: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
            prop_assert_eq!(auc(&expd, &outcomes).unwrap(), a);
        }
    }
}
