use alloc::string::String;
use alloc::vec::Vec;

use super::correlation::pearson_pairwise;
use super::StatsError;
use crate::math;

/// Items x raters grid of Likert ratings with optional missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    item_ids: Vec<String>,
    rater_ids: Vec<String>,
    values: Vec<Option<f64>>,
    scale: (f64, f64),
}

/// Default Likert bounds.
pub const DEFAULT_SCALE: (f64, f64) = (1.0, 9.0);

impl RatingMatrix {
    /// Builds a matrix from one row per item.
    pub fn new(
        item_ids: Vec<String>,
        rater_ids: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
        scale: (f64, f64),
    ) -> Result<Self, StatsError> {
        if rows.len() != item_ids.len() {
            return Err(StatsError::LengthMismatch(rows.len(), item_ids.len()));
        }
        if item_ids.len() < 2 {
            return Err(StatsError::TooFewItems(item_ids.len()));
        }
        if rater_ids.len() < 2 {
            return Err(StatsError::TooFewRaters(rater_ids.len()));
        }
        let mut values = Vec::with_capacity(rows.len() * rater_ids.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != rater_ids.len() {
                return Err(StatsError::RaggedRow { item: i, len: row.len() });
            }
            for (j, v) in row.into_iter().enumerate() {
                if let Some(x) = v {
                    if !(x >= scale.0 && x <= scale.1) {
                        return Err(StatsError::OutOfScale { item: i, rater: j, value: x });
                    }
                }
                values.push(v);
            }
        }
        Ok(Self {
            item_ids,
            rater_ids,
            values,
            scale,
        })
    }

    /// Matrix with generated ids (`item1..`, `rater1..`) and no scale bounds.
    pub fn from_rows(rows: Vec<Vec<Option<f64>>>) -> Result<Self, StatsError> {
        let raters = rows.first().map_or(0, Vec::len);
        let items = (1..=rows.len()).map(|i| alloc::format!("item{i}")).collect();
        let rater_ids = (1..=raters).map(|j| alloc::format!("rater{j}")).collect();
        Self::new(items, rater_ids, rows, (f64::NEG_INFINITY, f64::INFINITY))
    }

    /// Number of items.
    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    /// Number of raters.
    pub fn n_raters(&self) -> usize {
        self.rater_ids.len()
    }

    /// Item ids.
    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    /// Rater ids.
    pub fn rater_ids(&self) -> &[String] {
        &self.rater_ids
    }

    /// Declared scale bounds.
    pub fn scale(&self) -> (f64, f64) {
        self.scale
    }

    /// Cell value.
    pub fn get(&self, item: usize, rater: usize) -> Option<f64> {
        self.values[item * self.n_raters() + rater]
    }

    /// One rater's column.
    pub fn column(&self, rater: usize) -> Vec<Option<f64>> {
        (0..self.n_items()).map(|i| self.get(i, rater)).collect()
    }

    fn rater_index(&self, id: &str) -> Result<usize, StatsError> {
        self.rater_ids
            .iter()
            .position(|r| r == id)
            .ok_or_else(|| StatsError::UnknownRater(id.into()))
    }

    /// Copy without the given raters.
    pub fn without_raters(&self, drop: &[&str]) -> Result<Self, StatsError> {
        let mut keep = alloc::vec![true; self.n_raters()];
        for id in drop {
            keep[self.rater_index(id)?] = false;
        }
        let kept: Vec<usize> = (0..self.n_raters()).filter(|&j| keep[j]).collect();
        if kept.len() < 2 {
            return Err(StatsError::AllDropped);
        }
        let rows = (0..self.n_items())
            .map(|i| kept.iter().map(|&j| self.get(i, j)).collect())
            .collect();
        Self::new(
            self.item_ids.clone(),
            kept.iter().map(|&j| self.rater_ids[j].clone()).collect(),
            rows,
            self.scale,
        )
    }
}

/// Panel agreement statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    /// Mean Pearson r over all usable rater pairs.
    pub mean_pairwise_r: f64,
    /// Cronbach's alpha, i.e. ICC(C,k), over complete-case items.
    pub cronbach_alpha: f64,
    /// Raters in the panel.
    pub n_raters: usize,
    /// Complete-case items entering alpha.
    pub n_items: usize,
    /// Each rater's mean r with the others; `None` if no usable pair.
    pub per_rater_mean_r: Vec<Option<f64>>,
    /// Rater pairs left out of the mean (constant input or too few pairs).
    pub skipped_pairs: Vec<(usize, usize)>,
}

/// Pairwise correlations; `None` where a pair is unusable.
fn pair_correlations(m: &RatingMatrix) -> Vec<Vec<Option<f64>>> {
    let k = m.n_raters();
    let columns: Vec<Vec<Option<f64>>> = (0..k).map(|j| m.column(j)).collect();
    let mut r = alloc::vec![alloc::vec![None; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let v = pearson_pairwise(&columns[a], &columns[b]).ok().map(|(r, _)| r);
            r[a][b] = v;
            r[b][a] = v;
        }
    }
    r
}

fn per_rater_means(pairs: &[Vec<Option<f64>>]) -> Vec<Option<f64>> {
    pairs
        .iter()
        .enumerate()
        .map(|(a, row)| {
            let vals: Vec<f64> = row
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .filter_map(|(_, v)| *v)
                .collect();
            (!vals.is_empty()).then(|| math::mean(&vals))
        })
        .collect()
}

/// Cronbach's alpha over complete-case items:
/// `k/(k-1) * (1 - sum var(rater) / var(item totals))`, sample variances.
pub fn cronbach_alpha(m: &RatingMatrix) -> Result<(f64, usize), StatsError> {
    let k = m.n_raters();
    let rows: Vec<Vec<f64>> = (0..m.n_items())
        .filter_map(|i| (0..k).map(|j| m.get(i, j)).collect::<Option<Vec<f64>>>())
        .collect();
    if rows.len() < 3 {
        return Err(StatsError::TooFewItems(rows.len()));
    }
    let rater_var_sum: f64 = (0..k)
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            math::sample_variance(&col)
        })
        .sum();
    let totals: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let total_var = math::sample_variance(&totals);
    if !(total_var > 0.0) {
        return Err(StatsError::ZeroTotalVariance);
    }
    let k = k as f64;
    Ok((k / (k - 1.0) * (1.0 - rater_var_sum / total_var), rows.len()))
}

/// Mean inter-rater correlation and Cronbach's alpha.
pub fn inter_rater_agreement(m: &RatingMatrix) -> Result<AgreementReport, StatsError> {
    let (alpha, n_items) = cronbach_alpha(m)?;
    let pairs = pair_correlations(m);
    let k = m.n_raters();
    let mut usable = Vec::new();
    let mut skipped_pairs = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            match pairs[a][b] {
                Some(r) => usable.push(r),
                None => skipped_pairs.push((a, b)),
            }
        }
    }
    if usable.is_empty() {
        return Err(StatsError::ConstantRater);
    }
    Ok(AgreementReport {
        mean_pairwise_r: math::mean(&usable),
        cronbach_alpha: alpha,
        n_raters: k,
        n_items,
        per_rater_mean_r: per_rater_means(&pairs),
        skipped_pairs,
    })
}

/// z-score below the panel mean (in sample SDs) that flags a rater.
pub const OUTLIER_SD: f64 = 2.5;

/// Raters whose mean correlation with the others is negative or more than
/// [`OUTLIER_SD`] sample SDs below the panel average of that statistic.
/// Nothing is removed.
pub fn flag_outlier_raters(m: &RatingMatrix) -> Result<Vec<(String, f64)>, StatsError> {
    if m.n_raters() < 3 {
        return Err(StatsError::TooFewRaters(m.n_raters()));
    }
    let means = per_rater_means(&pair_correlations(m));
    let present: Vec<f64> = means.iter().flatten().copied().collect();
    let threshold = if present.len() >= 2 {
        let sd = math::sqrt(math::sample_variance(&present));
        math::mean(&present) - OUTLIER_SD * sd
    } else {
        f64::NEG_INFINITY
    };
    Ok(means
        .iter()
        .enumerate()
        .filter_map(|(j, r)| {
            let r = (*r)?;
            (r < 0.0 || r < threshold).then(|| (m.rater_ids()[j].clone(), r))
        })
        .collect())
}

/// Per-item mean over present cells of the retained raters.
pub fn item_mean_ratings(m: &RatingMatrix, drop: &[&str]) -> Result<Vec<Option<f64>>, StatsError> {
    let kept = m.without_raters(drop)?;
    Ok((0..kept.n_items())
        .map(|i| {
            let vals: Vec<f64> = (0..kept.n_raters()).filter_map(|j| kept.get(i, j)).collect();
            (!vals.is_empty()).then(|| math::mean(&vals))
        })
        .collect())
}
