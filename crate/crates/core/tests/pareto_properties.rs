use zpeff::error::Sign;
use zpeff::ingest::{empirical_gini, fit_pareto_hill, SampleSet};
use zpeff::pareto::{
    efficiency_root_function, gini_from_beta, thresholds, zp_efficiency, ParetoModel,
};
use zpeff::Error;

fn beta_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut r = vec![0.0; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn efficiency_and_gini_fall_together() {
    let grid = beta_grid(1.05, 20.0, 400);
    let eta: Vec<f64> = grid.iter().map(|&b| zp_efficiency(b).unwrap()).collect();
    let gini: Vec<f64> = grid.iter().map(|&b| gini_from_beta(b).unwrap()).collect();
    assert!(eta.windows(2).all(|w| w[1] < w[0]));
    assert!(gini.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(spearman(&eta, &gini), 1.0);
}

#[test]
fn sign_structure() {
    let t = thresholds(1e-12_f64).unwrap();
    assert!((t.beta_star - 4.14105).abs() < 1e-3);
    for beta in beta_grid(1.0 + 1e-6, 100.0, 1000) {
        let eta = zp_efficiency(beta).unwrap();
        if beta < t.beta_star - 1e-9 {
            assert!(eta > 0.0, "β={beta}: {eta}");
        } else if beta > t.beta_star + 1e-9 {
            assert!(eta < 0.0, "β={beta}: {eta}");
        }
    }
    for beta in [1.0, 0.5, 1e-3] {
        assert!(matches!(
            zp_efficiency(beta),
            Err(Error::Divergent { sign: Sign::Positive, .. })
        ));
    }
}

#[test]
fn appendix_root_is_unique() {
    let n = 10_000;
    let values: Vec<f64> = (0..n)
        .map(|k| 0.001 + 0.498 * k as f64 / (n - 1) as f64)
        .map(efficiency_root_function)
        .collect();
    let changes = values.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    assert_eq!(changes, 1);
}

#[test]
fn sampler_matches_ccdf() {
    for (beta, seed) in [(2.0, 1u64), (1.5, 7), (4.0, 42)] {
        let m = ParetoModel::new(1.0, beta).unwrap();
        let mut xs = m.sample(100_000, seed);
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        // Kolmogorov–Smirnov distance against 1 - x^{-β}
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = 1.0 - x.powf(-beta);
                (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
            })
            .fold(0.0, f64::max);
        assert!(d <= 0.01, "β={beta}: KS = {d}");
    }
}

#[test]
fn sampler_is_deterministic_per_seed() {
    let m = ParetoModel::new(3.0, 2.5).unwrap();
    assert_eq!(m.sample(1000, 9), m.sample(1000, 9));
    assert_ne!(m.sample(1000, 9), m.sample(1000, 10));
    assert!(m.sample(1000, 9).iter().all(|&x| x >= 3.0));
}

#[test]
fn hill_recovers_index() {
    for (beta, seed) in [(1.5, 11u64), (2.0, 12), (4.0, 13)] {
        let m = ParetoModel::new(1.0, beta).unwrap();
        let s = SampleSet::new(m.sample(100_000, seed), Some(1.0)).unwrap();
        let fit = fit_pareto_hill(&s).unwrap();
        assert!(
            (fit.beta - beta).abs() <= 3.0 * fit.std_err,
            "β={beta}: {} ± {}",
            fit.beta,
            fit.std_err
        );
    }
}

#[test]
fn gini_pipeline_consistency() {
    for (beta, seed) in [(1.5, 21u64), (2.0, 22), (4.0, 23)] {
        let m = ParetoModel::new(1.0, beta).unwrap();
        let s = SampleSet::new(m.sample(100_000, seed), Some(1.0)).unwrap();
        let hill = fit_pareto_hill(&s).unwrap();
        let via_fit = gini_from_beta(hill.beta).unwrap();
        let empirical = empirical_gini(&s).unwrap();
        assert!(
            (via_fit - empirical).abs() <= 0.02,
            "β={beta}: {via_fit} vs {empirical}"
        );
    }
}

#[test]
fn gini_at_beta_two() {
    let m = ParetoModel::new(1.0, 2.0).unwrap();
    let s = SampleSet::new(m.sample(100_000, 2), None).unwrap();
    let g = empirical_gini(&s).unwrap();
    assert!((g - 1.0 / 3.0).abs() <= 0.01, "{g}");
}

#[test]
fn generic_over_f32() {
    let t = thresholds::<f32>(1e-6).unwrap();
    assert!((t.a_star - 0.194513).abs() < 1e-4);
    let m = ParetoModel::<f32>::new(1.0, 2.0).unwrap();
    assert!(m.sample(100, 3).iter().all(|&x| x >= 1.0));
    assert!((zp_efficiency(2.0f32).unwrap() - 1.762204).abs() < 1e-4);
}
