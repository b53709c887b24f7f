//! Comparators used by the statistical checks: two-sample KS distance,
//! log–log slope fits, empirical moments and a chi-square goodness-of-fit
//! p-value.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
///
/// Ties (within and across samples) are handled by evaluating both
/// empirical distribution functions only after every copy of a value has
/// been consumed, so integer-valued samples are compared correctly.
pub fn ks_statistic<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let sorted = |s: &[T]| {
        let mut v = s.to_vec();
        v.sort_by(|x, y| x.partial_cmp(y).expect("samples must not contain NaN"));
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (T::of_usize(a.len()), T::of_usize(b.len()));
    let (mut i, mut j) = (0, 0);
    let mut sup = T::zero();
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        let gap = (T::of_usize(i) / na - T::of_usize(j) / nb).abs();
        sup = sup.max(gap);
    }
    Ok(sup)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn exponent_fit<T: Scalar>(points: &[(T, T)]) -> Result<T> {
    if points.len() < 2 {
        return Err(Error::EmptySample);
    }
    let k = T::of_usize(points.len());
    let logs: Vec<(T, T)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).fold(T::zero(), |s, x| s + x) / k;
    let my = logs.iter().map(|p| p.1).fold(T::zero(), |s, y| s + y) / k;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for &(x, y) in &logs {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    if sxx == T::zero() {
        return Err(Error::Precondition("exponent fit needs two distinct x values".into()));
    }
    Ok(sxy / sxx)
}

/// Raw empirical moment `(1/N) Σ x^k`.
pub fn moment<T: Scalar>(sample: &[T], k: u32) -> Result<T> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let sum = sample.iter().fold(T::zero(), |s, &x| s + x.powi(k as i32));
    Ok(sum / T::of_usize(sample.len()))
}

pub fn mean<T: Scalar>(sample: &[T]) -> Result<T> {
    moment(sample, 1)
}

/// Unbiased sample variance.
pub fn variance<T: Scalar>(sample: &[T]) -> Result<T> {
    if sample.len() < 2 {
        return Err(Error::EmptySample);
    }
    let m = mean(sample)?;
    let ss = sample.iter().fold(T::zero(), |s, &x| s + (x - m) * (x - m));
    Ok(ss / T::of_usize(sample.len() - 1))
}

/// Pearson chi-square goodness-of-fit p-value of observed `counts` against
/// category probabilities `expected`.
pub fn chi_square_p_value(counts: &[u64], expected: &[f64]) -> Result<f64> {
    if counts.len() != expected.len() {
        return Err(Error::Precondition(format!(
            "{} counts for {} categories",
            counts.len(),
            expected.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    if counts.len() == 1 {
        return Ok(1.0);
    }
    let total = total as f64;
    let stat: f64 = counts
        .iter()
        .zip(expected)
        .map(|(&c, &p)| {
            let e = p * total;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64)
        .map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(dist.sf(stat))
}

/// One statistic as emitted in JSON reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub statistic: String,
    pub value: f64,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}
