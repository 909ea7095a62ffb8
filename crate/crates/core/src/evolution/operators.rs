//! Chromosome representation and variation operators.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Genotype: the half-open subsequence `[start, end)` and the index of the
/// reference that guides value generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chromosome {
    pub start: usize,
    pub end: usize,
    pub ref_idx: usize,
}

impl Chromosome {
    pub fn new(start: usize, end: usize, ref_idx: usize) -> Self {
        Self {
            start,
            end,
            ref_idx,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// `start < end <= m` and `ref_idx < n_refs`.
    pub fn is_valid(&self, m: usize, n_refs: usize) -> bool {
        self.start < self.end && self.end <= m && self.ref_idx < n_refs
    }
}

/// Uniform random population: start in `[0, m-2]`, end in `[start+1, m]`,
/// reference in `[0, n_refs-1]`, drawn in that order.
pub fn init_population<R: Rng + ?Sized>(
    size: usize,
    m: usize,
    n_refs: usize,
    rng: &mut R,
) -> Vec<Chromosome> {
    assert!(m >= 2 && n_refs >= 1);
    (0..size)
        .map(|_| {
            let start = rng.random_range(0..=m - 2);
            let end = rng.random_range(start + 1..=m);
            let ref_idx = rng.random_range(0..n_refs);
            Chromosome::new(start, end, ref_idx)
        })
        .collect()
}

/// Binary tournament on (rank, crowding): lower rank wins, then larger
/// crowding distance, then the first contestant drawn.
pub fn tournament_select<T: Scalar, R: Rng + ?Sized>(
    rank: &[usize],
    crowding: &[T],
    rng: &mut R,
) -> usize {
    let a = rng.random_range(0..rank.len());
    let b = rng.random_range(0..rank.len());
    tournament_winner(a, b, rank, crowding)
}

/// Crowded comparison of contestants `a` (drawn first) and `b`.
pub fn tournament_winner<T: Scalar>(a: usize, b: usize, rank: &[usize], crowding: &[T]) -> usize {
    if rank[b] < rank[a] || (rank[b] == rank[a] && crowding[b] > crowding[a]) {
        b
    } else {
        a
    }
}

/// Sorted distinct values of the four endpoints.
fn distinct_endpoints(a: &Chromosome, b: &Chromosome) -> Vec<usize> {
    let mut v = vec![a.start, a.end, b.start, b.end];
    v.sort_unstable();
    v.dedup();
    v
}

fn span(x: usize, y: usize) -> (usize, usize) {
    (x.min(y), x.max(y))
}

/// Interval recombination that keeps the offspring's subsequences short and
/// as disjoint as the parents allow.
///
/// With four distinct endpoints the two pairings of parent endpoints are
/// compared by total displacement and the smaller one (starts with starts
/// on a tie) forms the offspring. Three distinct endpoints give the two
/// adjacent intervals; identical parents are split at a uniform interior
/// point when one exists. Reference indices stay with their parent.
pub fn crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    p_crossover: f64,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let (mut y1, mut y2) = (*a, *b);
    if rng.random::<f64>() >= p_crossover {
        return (y1, y2);
    }
    let alpha = distinct_endpoints(a, b);
    let ((s1, e1), (s2, e2)) = match alpha.len() {
        4 => {
            let same = a.start.abs_diff(b.start) + a.end.abs_diff(b.end);
            let cross = a.start.abs_diff(b.end) + a.end.abs_diff(b.start);
            if same <= cross {
                (span(a.start, b.start), span(a.end, b.end))
            } else {
                (span(a.start, b.end), span(a.end, b.start))
            }
        }
        3 => ((alpha[0], alpha[1]), (alpha[1], alpha[2])),
        _ => {
            let (lo, hi) = (alpha[0], alpha[1]);
            if hi - lo < 2 {
                return (y1, y2);
            }
            let split = rng.random_range(lo + 1..hi);
            ((lo, split), (split, hi))
        }
    };
    (y1.start, y1.end) = (s1, e1);
    (y2.start, y2.end) = (s2, e2);
    (y1, y2)
}

/// Success probability of the binomial length draw.
///
/// For `tau` in `(0, 1)` this is `exp(ln(0.5) / tau * len / m)`, which is
/// exactly one half when `len / m == tau`; otherwise one half.
pub fn length_success_probability(len: usize, m: usize, tau: Option<f64>) -> f64 {
    match tau {
        Some(tau) if tau > 0.0 && tau < 1.0 => {
            // exp(ln(0.5) / tau * len / m), written so the fixed point is exact
            0.5f64.powf(len as f64 / (tau * m as f64))
        }
        _ => 0.5,
    }
}

/// Rescales the subsequence length.
///
/// A new length `l ~ Binomial(2 * len, p_b)` is applied from the start
/// (moving the end) or from the end (moving the start) with equal
/// probability, clamped to keep `1 <= len` and the interval inside `[0, m]`.
pub fn mutate<R: Rng + ?Sized>(
    x: &Chromosome,
    p_mutation: f64,
    tau: Option<f64>,
    m: usize,
    rng: &mut R,
) -> Chromosome {
    let mut y = *x;
    if rng.random::<f64>() >= p_mutation {
        return y;
    }
    let p_b = length_success_probability(x.len(), m, tau);
    let grow_end = rng.random::<f64>() < 0.5;
    let l = sample_length(2 * x.len(), p_b, rng);
    if grow_end {
        y.end = (y.start + l).max(y.start + 1).min(m);
    } else {
        y.start = y.end.saturating_sub(l).min(y.end - 1);
    }
    y
}

/// Draws a new subsequence length `l ~ Binomial(trials, p)`.
pub fn sample_length<R: Rng + ?Sized>(trials: usize, p: f64, rng: &mut R) -> usize {
    Binomial::new(trials as u64, p)
        .expect("p in [0, 1]")
        .sample(rng) as usize
}

/// `k` copies of `x`, one per reference index.
pub fn expand(x: &Chromosome, k: usize) -> Vec<Chromosome> {
    (0..k).map(|r| Chromosome::new(x.start, x.end, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(s: usize, e: usize) -> Chromosome {
        Chromosome::new(s, e, 0)
    }

    #[test]
    fn crossover_disjoint_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (y1, y2) = crossover(&c(2, 5), &Chromosome::new(10, 20, 3), 1.0, &mut rng);
        assert_eq!((y1.start, y1.end, y1.ref_idx), (2, 10, 0));
        assert_eq!((y2.start, y2.end, y2.ref_idx), (5, 20, 3));
    }

    #[test]
    fn crossover_cross_pairing() {
        // same = 1 + 9 = 10, cross = 9 + 1 = 10 -> tie keeps starts together
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (y1, y2) = crossover(&c(1, 10), &c(2, 11), 1.0, &mut rng);
        assert_eq!((y1.start, y1.end, y2.start, y2.end), (1, 2, 10, 11));
        // nested: same = 2 + 2 = 4 < cross = 16 + 12
        let (y1, y2) = crossover(&c(0, 20), &c(2, 18), 1.0, &mut rng);
        assert_eq!((y1.start, y1.end, y2.start, y2.end), (0, 2, 18, 20));
    }

    #[test]
    fn crossover_shared_endpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (y1, y2) = crossover(&c(3, 7), &c(7, 12), 1.0, &mut rng);
        assert_eq!((y1.start, y1.end, y2.start, y2.end), (3, 7, 7, 12));
    }

    #[test]
    fn crossover_identical_parents_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (y1, y2) = crossover(&c(3, 7), &c(3, 7), 1.0, &mut rng);
            assert_eq!((y1.start, y2.end), (3, 7));
            assert_eq!(y1.end, y2.start);
            assert!((4..=6).contains(&y1.end));
        }
        let (y1, y2) = crossover(&c(3, 4), &c(3, 4), 1.0, &mut rng);
        assert_eq!((y1, y2), (c(3, 4), c(3, 4)));
    }

    #[test]
    fn zero_probabilities_are_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (a, b) = (c(1, 9), Chromosome::new(4, 30, 2));
        for _ in 0..1000 {
            assert_eq!(crossover(&a, &b, 0.0, &mut rng), (a, b));
            assert_eq!(mutate(&a, 0.0, Some(0.4), 40, &mut rng), a);
        }
    }

    #[test]
    fn success_probability_fixed_point() {
        assert_eq!(length_success_probability(16, 40, Some(0.4)), 0.5);
        assert_eq!(length_success_probability(16, 40, None), 0.5);
        assert_eq!(length_success_probability(16, 40, Some(1.0)), 0.5);
        assert!(length_success_probability(5, 40, Some(0.4)) > 0.5);
        assert!(length_success_probability(40, 40, Some(0.4)) < 0.5);
    }

    #[test]
    fn mutation_keeps_length_at_least_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let x = c(5, 6);
            let y = mutate(&x, 1.0, Some(0.01), 40, &mut rng);
            assert!(y.is_valid(40, 1));
            assert!(y.start == x.start || y.end == x.end);
        }
    }

    #[test]
    fn expand_enumerates_references() {
        assert_eq!(
            expand(&Chromosome::new(2, 9, 7), 1),
            vec![Chromosome::new(2, 9, 0)]
        );
        assert_eq!(
            expand(&c(2, 9), 4),
            (0..4).map(|r| Chromosome::new(2, 9, r)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn init_boundary_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for x in init_population(100, 2, 3, &mut rng) {
            assert_eq!(x.start, 0);
            assert!((1..=2).contains(&x.end));
            assert!(x.ref_idx < 3);
        }
        let a = init_population(50, 128, 4, &mut ChaCha8Rng::seed_from_u64(9));
        let b = init_population(50, 128, 4, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn tournament_rules() {
        let rank = [0usize, 1, 0, 0];
        let crowd = [0.0f64, 10.0, f64::INFINITY, 0.2];
        assert_eq!(tournament_winner(0, 1, &rank, &crowd), 0);
        assert_eq!(tournament_winner(1, 0, &rank, &crowd), 0);
        assert_eq!(tournament_winner(3, 2, &rank, &crowd), 2);
        assert_eq!(tournament_winner(2, 3, &rank, &crowd), 2);
        assert_eq!(tournament_winner(3, 3, &rank, &crowd), 3);
        let tied = [0.5f64, 0.5];
        assert_eq!(tournament_winner(1, 0, &[0, 0], &tied), 1);
        assert_eq!(tournament_winner(0, 1, &[0, 0], &tied), 0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut wins = [0; 2];
        for _ in 0..4000 {
            wins[tournament_select(&[0, 1], &[0.0f64, 10.0], &mut rng)] += 1;
        }
        // the rank-1 member only wins when drawn twice (p = 1/4)
        assert!(wins[1] > 800 && wins[1] < 1200, "{wins:?}");
    }
}
