//! Monte Carlo evaluation of the estimators.
//!
//! For every sample size in a grid, each replication draws a fresh sample,
//! computes the true sample mean and standard deviation, reduces the sample
//! to its five-number summary and feeds each scenario's fields (and only
//! those) to the estimators. Relative errors `(estimate - truth) / truth` are
//! averaged over replications.
//!
//! Randomness for replication `k` of sample size `n` comes from a ChaCha8
//! stream seeded by mixing `(master_seed, distribution tag, n, k)`, so cells
//! can be computed in any order or in parallel with identical results.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{
    allowed_mean_methods, allowed_sd_methods, estimate_mean, estimate_sd, FiveNumberSummary,
    MethodId, QuartileSummary, RangeSummary, Scenario, ScenarioInput,
};
use crate::normal::quantile_unchecked;
use crate::order_stats::quartile_index;

/// Default master seed for reproducible runs.
pub const DEFAULT_SEED: u64 = 20_140_924;

/// Replications per grid point unless overridden.
pub const DEFAULT_REPS: u32 = 1000;

/// Parent distribution of simulated samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Normal {
        mu: f64,
        sigma: f64,
    },
    /// `exp(N(mu, sigma^2))`
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
    /// Rate parameterisation, mean `1/lambda`.
    Exponential {
        lambda: f64,
    },
    Weibull {
        /// shape
        k: f64,
        /// scale
        lambda: f64,
    },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite, got {v}")))
            }
        };
        match *self {
            DistributionSpec::Normal { mu, sigma } | DistributionSpec::LogNormal { mu, sigma } => {
                finite("mu", mu)?;
                positive("sigma", sigma)
            }
            DistributionSpec::Beta { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)
            }
            DistributionSpec::Exponential { lambda } => positive("lambda", lambda),
            DistributionSpec::Weibull { k, lambda } => {
                positive("k", k)?;
                positive("lambda", lambda)
            }
        }
    }

    /// Stable label such as `lognormal(4;0.3)`, used in output and seeding.
    pub fn tag(&self) -> String {
        match *self {
            DistributionSpec::Normal { mu, sigma } => format!("normal({mu};{sigma})"),
            DistributionSpec::LogNormal { mu, sigma } => format!("lognormal({mu};{sigma})"),
            DistributionSpec::Beta { alpha, beta } => format!("beta({alpha};{beta})"),
            DistributionSpec::Exponential { lambda } => format!("exponential({lambda})"),
            DistributionSpec::Weibull { k, lambda } => format!("weibull({k};{lambda})"),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `name:p1,p2`, e.g. `normal:50,17`, `exponential:10`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("expected name:params, got '{s}'")))?;
        let params = params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("bad distribution parameter '{p}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let want = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let spec = match name.trim().to_ascii_lowercase().as_str() {
            "normal" => {
                want(2)?;
                DistributionSpec::Normal {
                    mu: params[0],
                    sigma: params[1],
                }
            }
            "lognormal" => {
                want(2)?;
                DistributionSpec::LogNormal {
                    mu: params[0],
                    sigma: params[1],
                }
            }
            "beta" => {
                want(2)?;
                DistributionSpec::Beta {
                    alpha: params[0],
                    beta: params[1],
                }
            }
            "exponential" => {
                want(1)?;
                DistributionSpec::Exponential { lambda: params[0] }
            }
            "weibull" => {
                want(2)?;
                DistributionSpec::Weibull {
                    k: params[0],
                    lambda: params[1],
                }
            }
            other => return Err(Error::Domain(format!("unknown distribution '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[inline]
fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

#[inline]
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    quantile_unchecked(uniform(rng))
}

/// Marsaglia-Tsang rejection sampler for Gamma(shape, 1).
fn gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u = uniform(rng);
        return gamma(shape + 1.0, rng) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = standard_normal(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = uniform(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

fn draw<R: Rng + ?Sized>(dist: &DistributionSpec, rng: &mut R) -> f64 {
    match *dist {
        DistributionSpec::Normal { mu, sigma } => mu + sigma * standard_normal(rng),
        DistributionSpec::LogNormal { mu, sigma } => (mu + sigma * standard_normal(rng)).exp(),
        DistributionSpec::Beta { alpha, beta } => {
            let x = gamma(alpha, rng);
            let y = gamma(beta, rng);
            x / (x + y)
        }
        DistributionSpec::Exponential { lambda } => -uniform(rng).ln() / lambda,
        DistributionSpec::Weibull { k, lambda } => lambda * (-uniform(rng).ln()).powf(1.0 / k),
    }
}

/// `n` independent draws from `dist`.
pub fn sample<R: Rng + ?Sized>(dist: &DistributionSpec, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    dist.validate()?;
    if n == 0 {
        return Err(Error::Domain("sample size must be at least 1".into()));
    }
    Ok((0..n).map(|_| draw(dist, rng)).collect())
}

/// Order-statistic summary of a sample plus its true moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: u64,
    pub min: f64,
    /// `X(Q+1)` and `X(3Q+1)`; present only when `n = 4Q + 1`.
    pub quartiles: Option<(f64, f64)>,
    pub median: f64,
    pub max: f64,
    pub true_mean: f64,
    /// Sample standard deviation with the `n - 1` denominator.
    pub true_sd: f64,
}

impl SampleSummary {
    pub fn q1(&self) -> Option<f64> {
        self.quartiles.map(|q| q.0)
    }

    pub fn q3(&self) -> Option<f64> {
        self.quartiles.map(|q| q.1)
    }

    /// Exactly the fields a study reporting `scenario` would publish.
    pub fn scenario_input(&self, scenario: Scenario) -> Result<ScenarioInput> {
        let quartiles = || {
            self.quartiles.ok_or_else(|| {
                Error::Domain(format!("quartiles need n = 4Q + 1, got n = {}", self.n))
            })
        };
        Ok(match scenario {
            Scenario::C1 => RangeSummary::new(self.min, self.median, self.max, self.n)?.into(),
            Scenario::C2 => {
                let (q1, q3) = quartiles()?;
                FiveNumberSummary::new(self.min, q1, self.median, q3, self.max, self.n)?.into()
            }
            Scenario::C3 => {
                let (q1, q3) = quartiles()?;
                QuartileSummary::new(q1, self.median, q3, self.n)?.into()
            }
        })
    }
}

/// Five-number summary and true moments. Quartiles are the order statistics
/// at positions Q+1 and 3Q+1 when `n = 4Q + 1`.
pub fn summarize(sample: &[f64]) -> Result<SampleSummary> {
    if sample.is_empty() {
        return Err(Error::Domain("cannot summarize an empty sample".into()));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("sample contains non-finite values".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let quartiles = quartile_index(n as u64).map(|q| (sorted[q as usize], sorted[3 * q as usize]));
    let mean = sample.iter().sum::<f64>() / n as f64;
    let true_sd = if n > 1 {
        let ss: f64 = sample.iter().map(|x| (x - mean) * (x - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(SampleSummary {
        n: n as u64,
        min: sorted[0],
        quartiles,
        median,
        max: sorted[n - 1],
        true_mean: mean,
        true_sd,
    })
}

/// `(estimated - truth) / truth`; `None` when the truth is zero.
pub fn relative_error(estimated: f64, truth: f64) -> Option<f64> {
    if truth == 0.0 {
        None
    } else {
        Some((estimated - truth) / truth)
    }
}

/// Standard deviation rule evaluated in a simulation cell. Besides the
/// estimators, the individual branches of Hozo's adaptive rule can be traced
/// over the whole grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SdRule {
    Method(MethodId),
    /// (b - a)/sqrt(12) at every n.
    RangeOverSqrt12,
    /// (b - a)/6 at every n.
    RangeOverSix,
}

impl SdRule {
    pub fn token(&self) -> &'static str {
        match self {
            SdRule::Method(m) => m.token(),
            SdRule::RangeOverSqrt12 => "sd_range_sqrt12",
            SdRule::RangeOverSix => "sd_range_6",
        }
    }

    fn applies_to(&self, scenario: Scenario) -> bool {
        match self {
            SdRule::Method(m) => allowed_sd_methods(scenario).contains(m),
            SdRule::RangeOverSqrt12 | SdRule::RangeOverSix => scenario == Scenario::C1,
        }
    }

    fn evaluate(&self, input: &ScenarioInput) -> Result<f64> {
        match (self, input) {
            (SdRule::Method(m), _) => Ok(estimate_sd(input, *m)?.value),
            (SdRule::RangeOverSqrt12, ScenarioInput::C1(s)) => {
                Ok((s.max() - s.min()) / 12f64.sqrt())
            }
            (SdRule::RangeOverSix, ScenarioInput::C1(s)) => Ok((s.max() - s.min()) / 6.0),
            _ => Err(Error::Config(format!(
                "{} does not apply to {}",
                self.token(),
                input.scenario()
            ))),
        }
    }
}

impl From<MethodId> for SdRule {
    fn from(m: MethodId) -> Self {
        SdRule::Method(m)
    }
}

impl fmt::Display for SdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sd_range_sqrt12" => Ok(SdRule::RangeOverSqrt12),
            "sd_range_6" => Ok(SdRule::RangeOverSix),
            other => {
                let m: MethodId = other.parse()?;
                if m.is_mean() {
                    Err(Error::Domain(format!(
                        "{m} is not a standard deviation method"
                    )))
                } else {
                    Ok(SdRule::Method(m))
                }
            }
        }
    }
}

/// One simulation study over a single distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dist: DistributionSpec,
    pub n_grid: Vec<u64>,
    pub reps: u32,
    pub master_seed: u64,
    /// Mean method used for every scenario.
    pub mean_method: MethodId,
    /// Scenarios and the standard deviation rules evaluated for each.
    pub methods: BTreeMap<Scenario, Vec<SdRule>>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.dist.validate()?;
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::Config("sample size grid is empty".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 5) {
            return Err(Error::Config(format!(
                "sample sizes must be at least 5, got {n}"
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no scenarios selected".into()));
        }
        for (&scenario, rules) in &self.methods {
            if rules.is_empty() {
                return Err(Error::Config(format!("no methods for scenario {scenario}")));
            }
            if !allowed_mean_methods(scenario).contains(&self.mean_method) {
                return Err(Error::Config(format!(
                    "mean method {} not available for {scenario}",
                    self.mean_method
                )));
            }
            if let Some(r) = rules.iter().find(|r| !r.applies_to(scenario)) {
                return Err(Error::Config(format!(
                    "{r} is not available for {scenario}"
                )));
            }
            if scenario != Scenario::C1 {
                if let Some(&n) = self.n_grid.iter().find(|&&n| quartile_index(n).is_none()) {
                    return Err(Error::Config(format!(
                        "scenario {scenario} needs n = 4Q + 1, got {n}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// How the random stream of a replication is derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedLineage {
    pub master_seed: u64,
    pub dist_tag: String,
    pub n: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl SeedLineage {
    /// Seed of replication attempt `k`.
    pub fn replication_seed(&self, k: u64) -> u64 {
        let mut h = splitmix64(self.master_seed);
        h = splitmix64(h ^ fnv1a(self.dist_tag.as_bytes()));
        h = splitmix64(h ^ self.n);
        splitmix64(h ^ k)
    }

    pub fn replication_rng(&self, k: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.replication_seed(k))
    }
}

/// Averaged relative errors at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationCell {
    pub dist: String,
    pub n: u64,
    pub scenario: Scenario,
    pub method: SdRule,
    pub avg_rel_err_mean: f64,
    pub avg_rel_err_sd: f64,
    /// Standard error of `avg_rel_err_mean` across replications.
    pub se_rel_err_mean: f64,
    /// Standard error of `avg_rel_err_sd` across replications.
    pub se_rel_err_sd: f64,
    pub reps: u32,
    /// Replications discarded because a true moment was zero.
    pub discarded: u64,
    pub seed_lineage: SeedLineage,
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    sum_sq: f64,
}

impl Accumulator {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn mean(&self, count: u32) -> f64 {
        self.sum / count as f64
    }

    fn standard_error(&self, count: u32) -> f64 {
        if count < 2 {
            return 0.0;
        }
        let c = count as f64;
        let mean = self.sum / c;
        let var = ((self.sum_sq - c * mean * mean) / (c - 1.0)).max(0.0);
        (var / c).sqrt()
    }
}

fn run_sample_size(config: &SimulationConfig, n: u64) -> Result<Vec<SimulationCell>> {
    let lineage = SeedLineage {
        master_seed: config.master_seed,
        dist_tag: config.dist.tag(),
        n,
    };
    let slots: Vec<(Scenario, SdRule)> = config
        .methods
        .iter()
        .flat_map(|(&s, rules)| rules.iter().map(move |&r| (s, r)))
        .collect();
    let mut mean_acc = vec![Accumulator::default(); slots.len()];
    let mut sd_acc = vec![Accumulator::default(); slots.len()];

    let max_attempts = 2 * config.reps as u64 + 1000;
    let mut done = 0u32;
    let mut discarded = 0u64;
    let mut attempt = 0u64;
    while done < config.reps {
        if attempt >= max_attempts {
            return Err(Error::Config(format!(
                "{discarded} of {attempt} replications at n = {n} had a zero true moment"
            )));
        }
        let mut rng = lineage.replication_rng(attempt);
        attempt += 1;
        let data = sample(&config.dist, n as usize, &mut rng)?;
        let summary = summarize(&data)?;
        if summary.true_sd == 0.0 || summary.true_mean == 0.0 {
            discarded += 1;
            continue;
        }
        let mut cached: Option<(Scenario, ScenarioInput, f64)> = None;
        for (i, &(scenario, rule)) in slots.iter().enumerate() {
            let (input, mean_est) = match cached {
                Some((s, input, mean)) if s == scenario => (input, mean),
                _ => {
                    let input = summary.scenario_input(scenario)?;
                    let mean = estimate_mean(&input, config.mean_method)?;
                    cached = Some((scenario, input, mean));
                    (input, mean)
                }
            };
            let sd_est = rule.evaluate(&input)?;
            // Both truths are non-zero here.
            mean_acc[i].push((mean_est - summary.true_mean) / summary.true_mean);
            sd_acc[i].push((sd_est - summary.true_sd) / summary.true_sd);
        }
        done += 1;
    }

    Ok(slots
        .iter()
        .enumerate()
        .map(|(i, &(scenario, method))| SimulationCell {
            dist: lineage.dist_tag.clone(),
            n,
            scenario,
            method,
            avg_rel_err_mean: mean_acc[i].mean(done),
            avg_rel_err_sd: sd_acc[i].mean(done),
            se_rel_err_mean: mean_acc[i].standard_error(done),
            se_rel_err_sd: sd_acc[i].standard_error(done),
            reps: done,
            discarded,
            seed_lineage: lineage.clone(),
        })
        .collect())
}

/// Run every (n, scenario, method) cell of a configuration. Sample sizes are
/// processed in parallel; the output order follows the grid, then scenarios,
/// then the listed methods.
pub fn run_grid(config: &SimulationConfig) -> Result<Vec<SimulationCell>> {
    config.validate()?;
    let per_n = config
        .n_grid
        .par_iter()
        .map(|&n| run_sample_size(config, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

/// Sample sizes `4Q + 1` for `Q = 1..=q_max`.
pub fn quartile_grid(q_max: u64) -> Vec<u64> {
    (1..=q_max).map(|q| 4 * q + 1).collect()
}

/// Preset reproductions of the published simulation studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    /// Normal(50, 17), C1, n = 5..1001.
    C1Normal,
    /// Log-normal, beta, exponential and Weibull, C1, n = 5..101.
    C1Skewed,
    /// Normal(5, 1) and log-normal(5, sigma) for sigma in {0.25, 0.5, 1}, C2.
    C2,
    /// All five distributions, every scenario side by side.
    C3,
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c1-normal" => Ok(Study::C1Normal),
            "c1-skewed" => Ok(Study::C1Skewed),
            "c2" => Ok(Study::C2),
            "c3" => Ok(Study::C3),
            other => Err(Error::Domain(format!(
                "unknown study '{other}' (expected c1-normal, c1-skewed, c2 or c3)"
            ))),
        }
    }
}

pub const NORMAL_C1: DistributionSpec = DistributionSpec::Normal {
    mu: 50.0,
    sigma: 17.0,
};

/// The four skewed parents used alongside [`NORMAL_C1`].
pub const SKEWED: [DistributionSpec; 4] = [
    DistributionSpec::LogNormal {
        mu: 4.0,
        sigma: 0.3,
    },
    DistributionSpec::Beta {
        alpha: 9.0,
        beta: 4.0,
    },
    DistributionSpec::Exponential { lambda: 10.0 },
    DistributionSpec::Weibull {
        k: 2.0,
        lambda: 35.0,
    },
];

pub const C2_DISTRIBUTIONS: [DistributionSpec; 4] = [
    DistributionSpec::Normal {
        mu: 5.0,
        sigma: 1.0,
    },
    DistributionSpec::LogNormal {
        mu: 5.0,
        sigma: 0.25,
    },
    DistributionSpec::LogNormal {
        mu: 5.0,
        sigma: 0.5,
    },
    DistributionSpec::LogNormal {
        mu: 5.0,
        sigma: 1.0,
    },
];

/// Standard deviation rules traced in the C1 studies.
pub fn c1_rules() -> Vec<SdRule> {
    vec![
        SdRule::Method(MethodId::SdWanBlom),
        SdRule::Method(MethodId::SdWanExact),
        SdRule::Method(MethodId::SdHozoAdaptive),
        SdRule::Method(MethodId::SdRangeRule),
        SdRule::RangeOverSqrt12,
        SdRule::RangeOverSix,
    ]
}

/// Default standard deviation rules for each scenario in a custom run.
pub fn default_rules(scenario: Scenario) -> Vec<SdRule> {
    match scenario {
        Scenario::C1 => c1_rules(),
        Scenario::C2 => vec![
            SdRule::Method(MethodId::SdWanBlom),
            SdRule::Method(MethodId::SdWanExact),
            SdRule::Method(MethodId::SdBland),
        ],
        Scenario::C3 => vec![
            SdRule::Method(MethodId::SdWanExact),
            SdRule::Method(MethodId::SdWanBlom),
            SdRule::Method(MethodId::SdCochrane),
        ],
    }
}

impl Study {
    /// One configuration per distribution.
    pub fn configs(self, reps: u32, master_seed: u64) -> Vec<SimulationConfig> {
        let make =
            |dist: DistributionSpec, n_grid: Vec<u64>, methods: BTreeMap<Scenario, Vec<SdRule>>| {
                SimulationConfig {
                    dist,
                    n_grid,
                    reps,
                    master_seed,
                    mean_method: MethodId::MeanSimple,
                    methods,
                }
            };
        match self {
            Study::C1Normal => vec![make(
                NORMAL_C1,
                quartile_grid(250),
                BTreeMap::from([(Scenario::C1, c1_rules())]),
            )],
            Study::C1Skewed => SKEWED
                .iter()
                .map(|&d| {
                    make(
                        d,
                        quartile_grid(25),
                        BTreeMap::from([(Scenario::C1, c1_rules())]),
                    )
                })
                .collect(),
            Study::C2 => C2_DISTRIBUTIONS
                .iter()
                .map(|&d| {
                    make(
                        d,
                        quartile_grid(50),
                        BTreeMap::from([(
                            Scenario::C2,
                            vec![
                                SdRule::Method(MethodId::SdWanBlom),
                                SdRule::Method(MethodId::SdWanExact),
                                SdRule::Method(MethodId::SdBland),
                            ],
                        )]),
                    )
                })
                .collect(),
            Study::C3 => std::iter::once(NORMAL_C1)
                .chain(SKEWED)
                .map(|d| {
                    make(
                        d,
                        quartile_grid(50),
                        BTreeMap::from([
                            (Scenario::C1, vec![SdRule::Method(MethodId::SdWanBlom)]),
                            (Scenario::C2, vec![SdRule::Method(MethodId::SdWanBlom)]),
                            (
                                Scenario::C3,
                                vec![
                                    SdRule::Method(MethodId::SdWanExact),
                                    SdRule::Method(MethodId::SdWanBlom),
                                ],
                            ),
                        ]),
                    )
                })
                .collect(),
        }
    }
}

/// Run several configurations and concatenate their cells.
pub fn run_configs(configs: &[SimulationConfig]) -> Result<Vec<SimulationCell>> {
    for c in configs {
        c.validate()?;
    }
    let mut out = Vec::new();
    for c in configs {
        out.extend(run_grid(c)?);
    }
    Ok(out)
}

pub const CSV_HEADER: [&str; 8] = [
    "dist",
    "n",
    "scenario",
    "method",
    "avg_rel_err_mean",
    "avg_rel_err_sd",
    "reps",
    "seed",
];

/// Write cells as CSV. Floating point values use the shortest representation
/// that round-trips.
pub fn write_cells_csv<W: Write>(cells: &[SimulationCell], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for c in cells {
        w.write_record([
            c.dist.clone(),
            c.n.to_string(),
            c.scenario.to_string(),
            c.method.to_string(),
            c.avg_rel_err_mean.to_string(),
            c.avg_rel_err_sd.to_string(),
            c.reps.to_string(),
            c.seed_lineage.master_seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
