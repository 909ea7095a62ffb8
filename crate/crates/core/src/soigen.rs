//! Autoregressive generation of counterfactual values on a subsequence.
//!
//! The difference between a reference and the target around the
//! subsequence is modelled as an AR(p) process with intercept, fitted by
//! least squares on one-step residuals (the conditional maximum-likelihood
//! estimate under Gaussian errors). The one-step fitted values of that
//! process are added to the target inside the subsequence; every point
//! outside it is copied from the target unchanged.

use crate::evolution::Chromosome;
use crate::reference::ReferenceSet;
use crate::scalar::Scalar;
use crate::timeseries::TimeSeries;

/// Diagonal damping used when the normal equations are singular.
pub const RIDGE_DAMPING: f64 = 1e-8;

/// `z_t = intercept + sum_i coefficients[i] * z_{t-1-i} + e_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel<T> {
    pub coefficients: Vec<T>,
    pub intercept: T,
}

impl<T: Scalar> ArModel<T> {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    fn degenerate(series: &[T]) -> Self {
        let mean = if series.is_empty() {
            T::zero()
        } else {
            series.iter().copied().sum::<T>() / T::of(series.len() as f64)
        };
        Self {
            coefficients: vec![T::zero()],
            intercept: mean,
        }
    }
}

/// Least-squares AR fit with intercept.
///
/// The order is lowered to `len - 2` when the series is too short for the
/// requested one; below three points the model is `z_t = mean`. Singular
/// normal equations are retried with [`RIDGE_DAMPING`] on the diagonal.
pub fn fit_ar<T: Scalar>(series: &[T], order: usize) -> ArModel<T> {
    let n = series.len();
    if n < 3 {
        return ArModel::degenerate(series);
    }
    let p = order.clamp(1, n - 2);
    let dim = p + 1;

    // Gram matrix and right-hand side of the lagged design [1, z_{t-1}, .., z_{t-p}].
    let mut gram = vec![T::zero(); dim * dim];
    let mut rhs = vec![T::zero(); dim];
    let mut row = vec![T::one(); dim];
    for t in p..n {
        for i in 1..dim {
            row[i] = series[t - i];
        }
        for a in 0..dim {
            rhs[a] = rhs[a] + row[a] * series[t];
            for b in a..dim {
                gram[a * dim + b] = gram[a * dim + b] + row[a] * row[b];
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            gram[a * dim + b] = gram[b * dim + a];
        }
    }

    let beta = solve(gram.clone(), rhs.clone(), dim).unwrap_or_else(|| {
        let lambda = T::of(RIDGE_DAMPING);
        for a in 0..dim {
            gram[a * dim + a] = gram[a * dim + a] + lambda;
        }
        solve(gram, rhs, dim).unwrap_or_else(|| vec![T::zero(); dim])
    });
    ArModel {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
    }
}

/// Gaussian elimination with partial pivoting on a row-major `dim x dim`
/// system. `None` when a pivot is negligible relative to the diagonal.
fn solve<T: Scalar>(mut a: Vec<T>, mut b: Vec<T>, dim: usize) -> Option<Vec<T>> {
    let scale = (0..dim)
        .map(|i| a[i * dim + i].abs())
        .fold(T::zero(), T::max);
    let tiny = scale * T::epsilon() * T::of(16.0 * dim as f64);
    if scale == T::zero() {
        return None;
    }
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&r, &s| {
                a[r * dim + col]
                    .abs()
                    .partial_cmp(&a[s * dim + col].abs())
                    .expect("finite")
            })
            .expect("non-empty range");
        if a[pivot_row * dim + col].abs() <= tiny {
            return None;
        }
        if pivot_row != col {
            for k in 0..dim {
                a.swap(col * dim + k, pivot_row * dim + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * dim + col];
        for r in col + 1..dim {
            let factor = a[r * dim + col] / pivot;
            if factor == T::zero() {
                continue;
            }
            for k in col..dim {
                a[r * dim + k] = a[r * dim + k] - factor * a[col * dim + k];
            }
            b[r] = b[r] - factor * b[col];
        }
    }
    let mut x = vec![T::zero(); dim];
    for r in (0..dim).rev() {
        let tail = (r + 1..dim).map(|k| a[r * dim + k] * x[k]).sum::<T>();
        x[r] = (b[r] - tail) / a[r * dim + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// One-step-ahead fitted values. The first `order` positions have no full
/// lag context and are passed through unchanged.
pub fn predict_insample<T: Scalar>(model: &ArModel<T>, series: &[T]) -> Vec<T> {
    let p = model.order();
    series
        .iter()
        .enumerate()
        .map(|(t, &z)| {
            if t < p {
                z
            } else {
                model.intercept
                    + model
                        .coefficients
                        .iter()
                        .enumerate()
                        .map(|(i, &phi)| phi * series[t - 1 - i])
                        .sum::<T>()
            }
        })
        .collect()
}

/// Builds the candidate for `chrom` from its reference in `refs`.
pub fn generate<T: Scalar>(
    target: &TimeSeries<T>,
    chrom: &Chromosome,
    refs: &ReferenceSet<T>,
    order: usize,
) -> TimeSeries<T> {
    let reference = &refs.members[chrom.ref_idx].series;
    generate_from_reference(target, reference, chrom.start, chrom.end, order)
}

/// Replaces `target[start..end]` with `target + fitted(reference - target)`,
/// where the AR model is fitted on the difference over
/// `[start - order, end + order)` clipped to the series.
pub fn generate_from_reference<T: Scalar>(
    target: &TimeSeries<T>,
    reference: &TimeSeries<T>,
    start: usize,
    end: usize,
    order: usize,
) -> TimeSeries<T> {
    let m = target.len();
    debug_assert!(start < end && end <= m && reference.len() == m);
    let lo = start.saturating_sub(order);
    let hi = (end + order).min(m);
    let diff: Vec<T> = (lo..hi).map(|t| reference[t] - target[t]).collect();
    let model = fit_ar(&diff, order);
    let fitted = predict_insample(&model, &diff);

    let mut values = target.values().to_vec();
    for t in start..end {
        let v = target[t] + fitted[t - lo];
        // Overflow of the fitted values is the only way to leave the finite range.
        values[t] = if v.is_finite() { v } else { reference[t] };
    }
    TimeSeries::from_vec_unchecked(values)
}
