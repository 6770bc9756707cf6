use distortia::generator::{Builtin, Generator};
use distortia::portfolio::{optimize, PortfolioOptions, ScenarioMatrix};
use distortia::semigroup::{build_semigroup, Semigroup};
use distortia::{alpha, AlphaStatus};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sg(b: Builtin) -> Semigroup {
    build_semigroup(&Generator::builtin(b), 1e-9).unwrap()
}

/// Product of independent five-point discretized normals, one per asset.
fn discretized(rng: &mut ChaCha8Rng, assets: usize) -> ScenarioMatrix<f64> {
    // Gauss-Hermite nodes and weights for five points, probabilists' scaling.
    const Z: [f64; 5] = [-2.856970013872806, -1.355626179974266, 0.0, 1.355626179974266, 2.856970013872806];
    const W: [f64; 5] = [0.011257411327721, 0.222075922005613, 0.533333333333333, 0.222075922005613, 0.011257411327721];
    let params: Vec<(f64, f64)> = (0..assets).map(|_| (rng.random_range(0.05..0.5), rng.random_range(0.5..1.5))).collect();
    let mut gains = vec![vec![]];
    let mut probs = vec![1.0];
    for &(mu, sd) in &params {
        let mut g2 = Vec::new();
        let mut p2 = Vec::new();
        for (row, p) in gains.iter().zip(&probs) {
            for (z, w) in Z.iter().zip(&W) {
                let mut r = row.clone();
                r.push(mu + sd * z);
                g2.push(r);
                p2.push(p * w);
            }
        }
        gains = g2;
        probs = p2;
    }
    let total: f64 = probs.iter().sum();
    ScenarioMatrix::new(gains, probs.iter().map(|p| p / total).collect()).unwrap()
}

#[test]
fn optimum_is_unique_on_discretized_densities() {
    let s = sg(Builtin::Aimin);
    let opts = PortfolioOptions { starts: 4, angular_tol: 1e-4, ..PortfolioOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut unique = 0;
    for trial in 0..100 {
        let m = discretized(&mut rng, 2);
        let sol = optimize(&s, &m, &PortfolioOptions { seed: trial, ..opts }).unwrap();
        assert!(!sol.arbitrage);
        if sol.uniqueness_flag {
            unique += 1;
        }
    }
    assert!(unique >= 95, "{unique} of 100 unique");
}

#[test]
fn positive_mean_without_arbitrage_gives_a_positive_index() {
    let s = sg(Builtin::Wang);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..10 {
        let m = discretized(&mut rng, 3);
        let sol = optimize(&s, &m, &PortfolioOptions { starts: 4, angular_tol: 1e-4, seed: trial, ..Default::default() }).unwrap();
        assert!(!sol.arbitrage && !sol.all_zero);
        assert!(sol.alpha_star > 0.0, "trial {trial}");
        assert_eq!(sol.status, AlphaStatus::Interior);
    }
}

#[test]
fn arbitrage_is_flagged() {
    let m = ScenarioMatrix::uniform(vec![vec![1.0, -1.0], vec![0.0, 1.0], vec![2.0, 0.5]]).unwrap();
    let sol = optimize(&sg(Builtin::Aimax), &m, &PortfolioOptions { starts: 4, ..Default::default() }).unwrap();
    assert!(sol.arbitrage);
    assert_eq!(sol.status, AlphaStatus::Infinite);
}

#[test]
fn solver_is_deterministic_for_a_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = discretized(&mut rng, 2);
    let s = sg(Builtin::Aimax);
    let opts = PortfolioOptions { starts: 4, seed: 9, ..Default::default() };
    assert_eq!(optimize(&s, &m, &opts).unwrap(), optimize(&s, &m, &opts).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn objective_is_scale_invariant(seed in 0u64..1000, theta in 0.0f64..std::f64::consts::TAU, lambda in 1e-3f64..1e3) {
        let s = sg(Builtin::Aimin);
        let m = discretized(&mut ChaCha8Rng::seed_from_u64(seed), 2);
        let h = [theta.cos(), theta.sin()];
        let a = alpha(&s, &m.portfolio(&h).unwrap(), 1e-9, 50.0).unwrap();
        let b = alpha(&s, &m.portfolio(&[lambda * h[0], lambda * h[1]]).unwrap(), 1e-9, 50.0).unwrap();
        prop_assert_eq!(a.value, b.value);
    }
}
