use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

/// Chance that a classifier guessing labels with the class priors gets at
/// least `correct` of `n` right: the upper binomial tail with success
/// probability `sum_j p_j^2`.
pub fn p_value(correct: usize, n: usize, class_counts: &[usize]) -> f64 {
    if correct == 0 || n == 0 {
        return 1.0;
    }
    let total: usize = class_counts.iter().sum();
    let p0: f64 = class_counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total as f64;
            p * p
        })
        .sum();
    if p0 >= 1.0 {
        return 1.0;
    }
    let binom = Binomial::new(p0.clamp(0.0, 1.0), n as u64).expect("valid binomial parameters");
    binom.sf(correct as u64 - 1).clamp(0.0, 1.0)
}

/// Monte Carlo estimate of [`p_value`]: draws `rounds` prior-matching random
/// labelings of `truth` and counts those at least as accurate.
pub fn p_value_monte_carlo(correct: usize, truth: &[u32], rounds: usize, seed: u64) -> f64 {
    let mut classes: Vec<u32> = truth.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let weights: Vec<usize> = classes.iter().map(|c| truth.iter().filter(|t| *t == c).count()).collect();
    let Ok(dist) = WeightedIndex::new(&weights) else {
        return 1.0;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..rounds {
        let ok = truth.iter().filter(|&&t| classes[dist.sample(&mut rng)] == t).count();
        if ok >= correct {
            hits += 1;
        }
    }
    // Add-one estimate keeps the value strictly positive.
    (hits + 1) as f64 / (rounds + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn choose(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn perfect_balanced_twenty() {
        assert_relative_eq!(p_value(20, 20, &[10, 10]), 0.5f64.powi(20), max_relative = 1e-9);
    }

    #[test]
    fn zero_correct_is_certain() {
        assert_eq!(p_value(0, 30, &[10, 20]), 1.0);
    }

    #[test]
    fn matches_direct_tail_sum() {
        let (n, k) = (25u64, 17u64);
        let p0 = (0.3f64).powi(2) + (0.7f64).powi(2);
        let direct: f64 = (k..=n)
            .map(|i| choose(n, i) * p0.powi(i as i32) * (1.0 - p0).powi((n - i) as i32))
            .sum();
        assert_relative_eq!(p_value(k as usize, n as usize, &[3, 7]), direct, max_relative = 1e-9);
    }

    #[test]
    fn tail_at_the_mean_is_about_half() {
        let n = 400;
        let p = p_value(n / 2, n, &[200, 200]);
        assert!((p - 0.5).abs() < 2.0 / (n as f64).sqrt(), "{p}");
    }

    #[test]
    fn monotone_in_accuracy() {
        let mut last = 1.0;
        for k in 0..=50 {
            let p = p_value(k, 50, &[20, 30]);
            assert!(p <= last + 1e-15);
            last = p;
        }
    }

    #[test]
    fn monte_carlo_agrees() {
        let truth: Vec<u32> = (0..60).map(|i| if i % 3 == 0 { 2 } else { 1 }).collect();
        let exact = p_value(38, 60, &[40, 20]);
        let mc = p_value_monte_carlo(38, &truth, 20_000, 7);
        assert!((exact - mc).abs() < 0.02, "{exact} vs {mc}");
    }
}
