//! Rater agreement, item means and correlation tables with significance.

use alloc::string::String;

mod agreement;
mod correlation;
pub mod special;

pub use agreement::{
    cronbach_alpha, flag_outlier_raters, inter_rater_agreement, item_mean_ratings, AgreementReport, RatingMatrix,
    DEFAULT_SCALE, OUTLIER_SD,
};
pub use correlation::{
    correlation_p_value, cross_correlation_matrix, pearson, pearson_pairwise, stars, CorrelationCell,
    CorrelationMatrix,
};

/// Statistics errors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    /// Fewer than three complete pairs.
    #[error("need at least 3 complete pairs, got {0}")]
    TooFewPairs(usize),
    /// One of the sequences is constant.
    #[error("constant input")]
    ConstantInput,
    /// Sequences of different length.
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    /// Too few (complete) items.
    #[error("too few items: {0}")]
    TooFewItems(usize),
    /// Too few raters.
    #[error("too few raters: {0}")]
    TooFewRaters(usize),
    /// Row length differs from the rater count.
    #[error("item {item} has {len} cells")]
    RaggedRow {
        /// Item index.
        item: usize,
        /// Cells found.
        len: usize,
    },
    /// Rating outside the declared scale.
    #[error("rating {value} for item {item}, rater {rater} is outside the scale")]
    OutOfScale {
        /// Item index.
        item: usize,
        /// Rater index.
        rater: usize,
        /// Offending value.
        value: f64,
    },
    /// No rater pair had a defined correlation.
    #[error("no rater pair with a defined correlation")]
    ConstantRater,
    /// Item totals have zero variance, so alpha is undefined.
    #[error("item totals have zero variance")]
    ZeroTotalVariance,
    /// Dropping raters left fewer than two.
    #[error("fewer than two raters remain")]
    AllDropped,
    /// Rater id not in the matrix.
    #[error("unknown rater `{0}`")]
    UnknownRater(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn matrix(rows: &[&[f64]]) -> RatingMatrix {
        RatingMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Some(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn pearson_examples() {
        assert_abs_diff_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(pearson(&[1.0, 2.0], &[1.0, 2.0]), Err(StatsError::TooFewPairs(2)));
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatsError::ConstantInput));
        let x = [Some(1.0), None, Some(2.0), Some(3.0)];
        let y = [Some(1.0), Some(5.0), None, Some(3.0)];
        assert_eq!(pearson_pairwise(&x, &y), Err(StatsError::TooFewPairs(2)));
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(correlation_p_value(0.0, 10).unwrap(), 1.0);
        assert_eq!(correlation_p_value(1.0, 10).unwrap(), 0.0);
        assert!(correlation_p_value(0.999_999, 10).unwrap() < 1e-10);
        assert!(correlation_p_value(0.5, 2).is_err());
    }

    #[test]
    fn star_boundaries() {
        assert_eq!(stars(0.049), "*");
        assert_eq!(stars(0.009), "**");
        assert_eq!(stars(0.0009), "***");
        assert_eq!(stars(0.051), "");
        assert_eq!(stars(0.05), "");
        assert_eq!(stars(0.01), "*");
        assert_eq!(stars(0.001), "**");
    }

    #[test]
    fn alpha_examples() {
        let a = inter_rater_agreement(&matrix(&[&[1.0, 2.0], &[2.0, 3.0], &[3.0, 4.0]])).unwrap();
        assert_abs_diff_eq!(a.mean_pairwise_r, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.cronbach_alpha, 1.0, epsilon = 1e-12);

        let b = inter_rater_agreement(&matrix(&[&[1.0, 2.0], &[2.0, 1.0], &[3.0, 3.0]])).unwrap();
        assert_abs_diff_eq!(b.cronbach_alpha, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn identical_columns() {
        let a = inter_rater_agreement(&matrix(&[&[1.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[2.0, 2.0, 2.0], &[9.0, 9.0, 9.0]])).unwrap();
        assert_eq!(a.mean_pairwise_r, 1.0);
        assert_abs_diff_eq!(a.cronbach_alpha, 1.0, epsilon = 1e-12);
        assert!(a.skipped_pairs.is_empty());
    }

    #[test]
    fn alpha_uses_complete_cases_and_reports_constant_pairs() {
        let rows = vec![
            vec![Some(1.0), Some(2.0), Some(5.0)],
            vec![Some(2.0), Some(3.0), Some(5.0)],
            vec![Some(3.0), None, Some(5.0)],
            vec![Some(4.0), Some(4.0), Some(5.0)],
            vec![Some(5.0), Some(6.0), Some(5.0)],
        ];
        let m = RatingMatrix::from_rows(rows).unwrap();
        let a = inter_rater_agreement(&m).unwrap();
        assert_eq!(a.n_items, 4);
        assert_eq!(a.skipped_pairs, vec![(0, 2), (1, 2)]);
        assert_eq!(a.per_rater_mean_r[2], None);
    }

    #[test]
    fn too_few_complete_rows() {
        let rows = vec![vec![Some(1.0), Some(2.0)], vec![Some(2.0), None], vec![Some(3.0), Some(4.0)]];
        let m = RatingMatrix::from_rows(rows).unwrap();
        assert_eq!(inter_rater_agreement(&m), Err(StatsError::TooFewItems(2)));
    }

    #[test]
    fn negated_rater_flagged() {
        let base = [1.0, 3.0, 2.0, 5.0, 4.0, 8.0];
        let m = RatingMatrix::from_rows(
            base.iter()
                .map(|&v| vec![Some(v), Some(v), Some(v), Some(10.0 - v)])
                .collect(),
        )
        .unwrap();
        let flags = flag_outlier_raters(&m).unwrap();
        assert_eq!(flags.len(), 1);
        assert_eq!(flags[0].0, "rater4");
        assert_abs_diff_eq!(flags[0].1, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn identical_panel_not_flagged() {
        let m = matrix(&[&[1.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[2.0, 2.0, 2.0]]);
        assert!(flag_outlier_raters(&m).unwrap().is_empty());
    }

    #[test]
    fn item_means() {
        let m = matrix(&[&[1.0, 3.0, 5.0], &[2.0, 4.0, 6.0]]);
        assert_eq!(item_mean_ratings(&m, &[]).unwrap(), vec![Some(3.0), Some(4.0)]);
        assert_eq!(item_mean_ratings(&m, &["rater3"]).unwrap(), vec![Some(2.0), Some(3.0)]);
        assert_eq!(item_mean_ratings(&m, &["rater2", "rater3"]), Err(StatsError::AllDropped));
        assert!(matches!(item_mean_ratings(&m, &["nobody"]), Err(StatsError::UnknownRater(_))));

        let gappy = RatingMatrix::from_rows(vec![vec![Some(5.0), None, Some(7.0)], vec![Some(1.0), Some(2.0), Some(3.0)]]).unwrap();
        assert_eq!(item_mean_ratings(&gappy, &[]).unwrap()[0], Some(6.0));
    }

    #[test]
    fn scale_validation() {
        let err = RatingMatrix::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![vec![Some(1.0), Some(10.0)], vec![Some(2.0), Some(3.0)]],
            DEFAULT_SCALE,
        )
        .unwrap_err();
        assert_eq!(err, StatsError::OutOfScale { item: 0, rater: 1, value: 10.0 });
    }

    #[test]
    fn cross_correlation_grid() {
        let cols = vec![
            ("a".into(), vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)]),
            ("b".into(), vec![Some(1.0), Some(3.0), Some(2.0), Some(4.0)]),
            ("c".into(), vec![Some(1.0), Some(1.0), None, Some(1.0)]),
        ];
        let m = cross_correlation_matrix(&cols);
        let ab = m.cell(0, 1).as_ref().unwrap();
        assert_abs_diff_eq!(ab.r, 0.8, epsilon = 1e-15);
        assert_eq!(ab.n, 4);
        assert_eq!(ab.stars, stars(ab.p));
        assert_eq!(m.cell(1, 0), m.cell(0, 1));
        assert_eq!(m.cell(0, 0).as_ref().unwrap().r, 1.0);
        assert_eq!(m.cell(2, 0), &Err(StatsError::ConstantInput));
    }
}
