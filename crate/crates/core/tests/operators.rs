use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tscf_core::evolution::{
    crossover, expand, init_population, length_success_probability, mutate, tournament_winner,
};
use tscf_core::Chromosome;

fn chromosome(m: usize) -> impl Strategy<Value = Chromosome> {
    (0..m - 1)
        .prop_flat_map(move |s| (Just(s), s + 1..=m, 0usize..4))
        .prop_map(|(s, e, r)| Chromosome::new(s, e, r))
}

fn sized() -> impl Strategy<Value = (usize, Chromosome, Chromosome)> {
    (2usize..300).prop_flat_map(|m| (Just(m), chromosome(m), chromosome(m)))
}

proptest! {
    #[test]
    fn crossover_keeps_invariants((m, a, b) in sized(), p in 0.0f64..=1.0, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (y1, y2) = crossover(&a, &b, p, &mut rng);
        prop_assert!(y1.is_valid(m, 4) && y2.is_valid(m, 4));
        prop_assert_eq!((y1.ref_idx, y2.ref_idx), (a.ref_idx, b.ref_idx));
        // offspring endpoints come from the parents, or a split point inside them
        let lo = a.start.min(b.start);
        let hi = a.end.max(b.end);
        prop_assert!(y1.start >= lo && y2.end <= hi && y1.end <= hi && y2.start >= lo);
    }

    #[test]
    fn crossover_with_zero_probability_is_identity((_m, a, b) in sized(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(crossover(&a, &b, 0.0, &mut rng), (a, b));
    }

    #[test]
    fn mutation_keeps_invariants(
        (m, a, _b) in sized(),
        tau in prop::option::of(0.05f64..0.95),
        seed: u64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = mutate(&a, 1.0, tau, m, &mut rng);
        prop_assert!(y.is_valid(m, 4));
        prop_assert_eq!(y.ref_idx, a.ref_idx);
        // one endpoint is kept
        prop_assert!(y.start == a.start || y.end == a.end);
        prop_assert_eq!(mutate(&a, 0.0, tau, m, &mut rng), a);
    }

    #[test]
    fn expand_enumerates_references((_m, a, _b) in sized(), k in 1usize..8) {
        let xs = expand(&a, k);
        prop_assert_eq!(xs.len(), k);
        for (r, x) in xs.iter().enumerate() {
            prop_assert_eq!(*x, Chromosome::new(a.start, a.end, r));
        }
    }
}

#[test]
fn crossover_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let c = |s, e| Chromosome::new(s, e, 0);
    // A = 8 + 15 = 23, B = 18 + 5 = 23, tie goes to starts-with-starts
    assert_eq!(
        crossover(&c(2, 5), &c(10, 20), 1.0, &mut rng),
        (c(2, 10), c(5, 20))
    );
    assert_eq!(
        crossover(&c(3, 7), &c(7, 12), 1.0, &mut rng),
        (c(3, 7), c(7, 12))
    );
    let mut seen = [false; 3];
    for _ in 0..200 {
        let (y1, y2) = crossover(&c(3, 7), &c(3, 7), 1.0, &mut rng);
        assert_eq!((y1.start, y2.end), (3, 7));
        assert_eq!(y1.end, y2.start);
        seen[y1.end - 4] = true;
    }
    assert_eq!(seen, [true; 3]);
}

#[test]
fn tournament_prefers_rank_then_crowding() {
    let rank = [0, 1, 0, 0];
    let crowding = [1.0, 9.0, 2.0, 1.0];
    assert_eq!(tournament_winner(1, 0, &rank, &crowding), 0);
    assert_eq!(tournament_winner(0, 2, &rank, &crowding), 2);
    assert_eq!(tournament_winner(0, 3, &rank, &crowding), 0);
    assert_eq!(tournament_winner(3, 0, &rank, &crowding), 3);
}

#[test]
fn initial_starts_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let m = 100;
    let pop = init_population(100_000, m, 4, &mut rng);
    let mut counts = vec![0f64; m - 1];
    for x in &pop {
        assert!(x.is_valid(m, 4));
        counts[x.start] += 1.0;
    }
    let expected = pop.len() as f64 / counts.len() as f64;
    let chi2: f64 = counts
        .iter()
        .map(|c| (c - expected).powi(2) / expected)
        .sum();
    // 98 degrees of freedom: the 0.999 quantile is about 148.2
    assert!(chi2 < 148.2, "chi-square {chi2}");
}

#[test]
fn success_probability_closed_form() {
    assert_eq!(length_success_probability(16, 40, Some(0.4)), 0.5);
    assert_eq!(length_success_probability(16, 40, None), 0.5);
    for len in [1usize, 5, 10, 20, 40] {
        let expected = (0.5f64.ln() * len as f64 / (0.4 * 40.0)).exp();
        assert!((length_success_probability(len, 40, Some(0.4)) - expected).abs() < 1e-15);
    }
}

#[test]
fn mutated_length_has_binomial_mean() {
    // (15, 25) in m = 40 is far enough from both borders that no draw of at most 20 is clamped
    let m = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let len = 10;
    let p_b = length_success_probability(len, m, Some(0.4));
    let x = Chromosome::new(15, 25, 0);
    let n = 100_000;
    let mut total = 0usize;
    for _ in 0..n {
        let y = mutate(&x, 1.0, Some(0.4), m, &mut rng);
        total += y.len();
    }
    let mean = total as f64 / n as f64;
    let expected = 2.0 * len as f64 * p_b;
    assert!(
        (mean - expected).abs() / expected < 0.02,
        "{mean} vs {expected}"
    );
}
