//! Fitting routines on synthetic data with known answers.

use growthlab::master_eq::{degree_distribution, solve_q, truncation_mass};
use growthlab::observables::{scaling_exponent, weibull_tail_fit, DegreeHistogram};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Weibull};

fn discretized(samples: impl Iterator<Item = f64>) -> DegreeHistogram {
    let mut h = DegreeHistogram::default();
    for x in samples {
        h.add((x.ceil() as u32).max(1), 1);
    }
    h
}

#[test]
fn weibull_shape_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dist = Weibull::new(0.063, 0.34).unwrap();
    let h = discretized((0..1_000_000).map(|_| dist.sample(&mut rng)));
    let fit = weibull_tail_fit(&h, 2).unwrap();
    assert!((fit.shape - 0.34).abs() <= 0.03, "k = {}", fit.shape);
}

#[test]
fn exponential_tail_has_unit_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dist = Exp::new(0.5).unwrap();
    let h = discretized((0..1_000_000).map(|_| dist.sample(&mut rng)));
    let fit = weibull_tail_fit(&h, 2).unwrap();
    assert!((fit.shape - 1.0).abs() <= 0.05, "k = {}", fit.shape);
}

#[test]
fn power_law_slope_is_recovered() {
    let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5, 1e6].iter().map(|&n: &f64| (n, 3.0 * n.powf(0.4))).collect();
    let (slope, stderr) = scaling_exponent(&pts).unwrap();
    assert!((slope - 0.4).abs() < 1e-12);
    assert!(stderr < 1e-10);
}

#[test]
fn master_equation_mass_converges() {
    let g = solve_q(400, 400).unwrap();
    let p = degree_distribution(&g, 400).unwrap();
    let mass: f64 = p.iter().sum();
    assert!(mass > 1.0 - 1e-6, "{mass}");
    assert!(truncation_mass(&g) < 1e-6);
    assert_eq!(p[1], 0.5);
}
