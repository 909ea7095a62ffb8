//! Reference implementations used as test oracles. Each one is written
//! from the textbook definition, independent of the engine code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use tscf_core::ProbVector;

/// Random distribution over `k` classes, with some exact zeros.
pub fn random_probs<R: Rng>(k: usize, rng: &mut R) -> ProbVector<f64> {
    loop {
        let raw: Vec<f64> = (0..k)
            .map(|_| {
                if rng.random::<f64>() < 0.15 {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return ProbVector::new(raw.iter().map(|v| v / total).collect()).unwrap();
        }
    }
}

/// KL divergence in bits, summed term by term with natural logs.
pub fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..p.len() {
        if p[i] != 0.0 {
            total += p[i] * (p[i].ln() - q[i].ln());
        }
    }
    total / std::f64::consts::LN_2
}

pub fn js_oracle(p: &[f64], q: &[f64]) -> f64 {
    let mid: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a + b) / 2.0).collect();
    (0.5 * kl_bits(p, &mid) + 0.5 * kl_bits(q, &mid))
        .max(0.0)
        .sqrt()
}

fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Fronts by repeatedly removing the non-dominated remainder.
pub fn peel_fronts(points: &[(f64, f64)]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(points[j], points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Crowding distance of every member of `front`, by position in the
/// (value, index) order of each objective.
pub fn crowding_oracle(points: &[(f64, f64)], front: &[usize]) -> Vec<(usize, f64)> {
    if front.len() <= 2 {
        return front.iter().map(|&i| (i, f64::INFINITY)).collect();
    }
    let mut out: Vec<(usize, f64)> = front.iter().map(|&i| (i, 0.0)).collect();
    for obj in 0..2 {
        let val = |i: usize| if obj == 0 { points[i].0 } else { points[i].1 };
        let mut order = front.to_vec();
        order.sort_by(|&a, &b| val(a).total_cmp(&val(b)).then(a.cmp(&b)));
        let range = val(order[order.len() - 1]) - val(order[0]);
        for (pos, &i) in order.iter().enumerate() {
            let slot = out.iter_mut().find(|(j, _)| *j == i).unwrap();
            if pos == 0 || pos == order.len() - 1 {
                slot.1 = f64::INFINITY;
            } else if range > 0.0 {
                slot.1 += (val(order[pos + 1]) - val(order[pos - 1])) / range;
            }
        }
    }
    out
}

/// Least-squares AR(p) with intercept from the explicit lag matrix,
/// solved through the normal equations with a Cholesky factorisation.
/// Returns `(intercept, coefficients)`.
pub fn ar_oracle(z: &[f64], p: usize) -> (f64, Vec<f64>) {
    let rows = z.len() - p;
    let x = DMatrix::from_fn(rows, p + 1, |r, c| if c == 0 { 1.0 } else { z[r + p - c] });
    let y = DVector::from_fn(rows, |r, _| z[r + p]);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;
    let beta = xtx.cholesky().expect("full rank design").solve(&xty);
    (beta[0], beta.iter().skip(1).copied().collect())
}
