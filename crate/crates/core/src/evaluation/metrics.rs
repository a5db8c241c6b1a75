use crate::error::{Error, Result};
use crate::rankers::ranking_order;
use crate::scalar::Scalar;

/// Indices of the `k` largest values (ties by ascending index).
pub fn top_k<T: PartialOrd>(values: &[T], k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > values.len() {
        return Err(Error::KExceedsPopulation { k, population: values.len() });
    }
    let mut order = ranking_order(values);
    order.truncate(k);
    Ok(order)
}

/// `|top_k(scores) ∩ top_k(truth)| / k`.
pub fn precision_at_k<A: PartialOrd, B: PartialOrd>(scores: &[A], truth: &[B], k: usize) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::LengthMismatch { expected: scores.len(), actual: truth.len() });
    }
    let predicted = top_k(scores, k)?;
    let mut actual = vec![false; truth.len()];
    for i in top_k(truth, k)? {
        actual[i] = true;
    }
    let hits = predicted.into_iter().filter(|&i| actual[i]).count();
    Ok(hits as f64 / k as f64)
}

/// Which series picks the `k` entities a correlation is computed over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TopKSelection {
    #[default]
    ByScore,
    ByTruth,
}

/// Pearson coefficient, or the reason it is undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum Correlation {
    Defined(f64),
    Undefined(String),
}

impl Correlation {
    pub fn value(&self) -> Option<f64> {
        match self {
            Correlation::Defined(v) => Some(*v),
            Correlation::Undefined(_) => None,
        }
    }

    /// The coefficient, or NaN when undefined.
    pub fn or_nan(&self) -> f64 {
        self.value().unwrap_or(f64::NAN)
    }
}

/// Converts raw counts into the scalar type for correlation.
pub fn counts_as<S: Scalar>(counts: &[u64]) -> Vec<S> {
    counts.iter().map(|&c| S::from_count(c)).collect()
}

/// Pearson correlation between scores and truth over the top-`k` entities
/// (selected by score unless `selection` says otherwise).
pub fn pearson_top_k<S: Scalar>(scores: &[S], truth: &[S], k: usize, selection: TopKSelection) -> Result<Correlation> {
    if scores.len() != truth.len() {
        return Err(Error::LengthMismatch { expected: scores.len(), actual: truth.len() });
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("Pearson correlation needs k >= 2, got {k}")));
    }
    let chosen = match selection {
        TopKSelection::ByScore => top_k(scores, k)?,
        TopKSelection::ByTruth => top_k(truth, k)?,
    };
    let xs: Vec<f64> = chosen.iter().map(|&i| scores[i].as_f64()).collect();
    let ys: Vec<f64> = chosen.iter().map(|&i| truth[i].as_f64()).collect();
    let n = k as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return Ok(Correlation::Undefined(format!("scores of the top {k} have zero variance")));
    }
    if !(syy > 0.0) {
        return Ok(Correlation::Undefined(format!("truth counts of the top {k} have zero variance")));
    }
    Ok(Correlation::Defined((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}
