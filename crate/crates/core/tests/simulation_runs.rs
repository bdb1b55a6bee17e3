use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use summstat_core::simulation::{
    run_grid, sample, summarize, DistributionSpec, SdRule, SimulationConfig, NORMAL_C1, SKEWED,
};
use summstat_core::{MethodId, Scenario};

fn config(reps: u32, methods: BTreeMap<Scenario, Vec<SdRule>>) -> SimulationConfig {
    SimulationConfig {
        dist: NORMAL_C1,
        n_grid: vec![9, 41],
        reps,
        master_seed: 11,
        mean_method: MethodId::MeanSimple,
        methods,
    }
}

#[test]
fn normal_sample_mean_within_clt_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = sample(&NORMAL_C1, 1_000_000, &mut rng).unwrap();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    assert!((mean - 50.0).abs() < 5.0 * 17.0 / 1e3);
}

#[test]
fn summaries_are_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for dist in std::iter::once(NORMAL_C1).chain(SKEWED) {
        for n in [5usize, 13, 101] {
            let s = summarize(&sample(&dist, n, &mut rng).unwrap()).unwrap();
            let (q1, q3) = s.quartiles.unwrap();
            assert!(s.min <= q1 && q1 <= s.median && s.median <= q3 && q3 <= s.max);
        }
    }
}

#[test]
fn standard_error_shrinks_with_reps() {
    let methods = BTreeMap::from([(Scenario::C1, vec![SdRule::Method(MethodId::SdWanBlom)])]);
    let se: Vec<f64> = [100, 400, 1600]
        .iter()
        .map(|&reps| run_grid(&config(reps, methods.clone())).unwrap()[0].se_rel_err_sd)
        .collect();
    for w in se.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.6..2.5).contains(&ratio), "standard errors {se:?}");
    }
}

#[test]
fn quartile_mean_is_unbiased_for_normal_parent() {
    let methods = BTreeMap::from([(Scenario::C3, vec![SdRule::Method(MethodId::SdCochrane)])]);
    for cell in run_grid(&config(4000, methods)).unwrap() {
        assert!(
            cell.avg_rel_err_mean.abs() < 4.0 * cell.se_rel_err_mean,
            "n = {}: {} +- {}",
            cell.n,
            cell.avg_rel_err_mean,
            cell.se_rel_err_mean
        );
    }
}

#[test]
fn c1_cells_ignore_quartiles() {
    // a C1 cell is identical whether or not quartile scenarios run alongside it
    let alone = BTreeMap::from([(Scenario::C1, vec![SdRule::Method(MethodId::SdWanBlom)])]);
    let mut together = alone.clone();
    together.insert(Scenario::C3, vec![SdRule::Method(MethodId::SdWanBlom)]);
    let a = run_grid(&config(50, alone)).unwrap();
    let b = run_grid(&config(50, together)).unwrap();
    assert_eq!(a[0], b[0]);
    assert_eq!(a[1], b[2]);
}

#[test]
fn custom_distribution_runs_with_non_quartile_grid() {
    let c = SimulationConfig {
        dist: DistributionSpec::Exponential { lambda: 2.0 },
        n_grid: vec![6, 10],
        ..config(
            20,
            BTreeMap::from([(Scenario::C1, vec![SdRule::RangeOverSqrt12])]),
        )
    };
    let cells = run_grid(&c).unwrap();
    assert_eq!(cells.len(), 2);
    assert!(cells
        .iter()
        .all(|c| c.reps == 20 && c.avg_rel_err_sd.is_finite()));
}
