//! Mean and standard deviation estimators for the three reporting scenarios.
//!
//! | scenario | reported                    | mean                       | sd                                                                        |
//! |----------|-----------------------------|----------------------------|---------------------------------------------------------------------------|
//! | C1       | min, median, max, n         | `mean_simple`, `mean_full` | `sd_range_rule`, `sd_hozo_adaptive`, `sd_hozo_exact`, `sd_wan_exact`, `sd_wan_blom` |
//! | C2       | min, q1, median, q3, max, n | `mean_simple`, `mean_full` | `sd_bland`, `sd_wan_exact`, `sd_wan_blom`                                 |
//! | C3       | q1, median, q3, n           | `mean_simple`              | `sd_wan_exact`, `sd_wan_blom`, `sd_cochrane`                              |
//!
//! The defaults for every scenario are `mean_simple` and `sd_wan_blom`.
//!
//! Hozo's exact variance expression was derived for non-negative data. It is
//! still evaluated for negative inputs (it is only kept for comparison), and,
//! unlike every other standard deviation estimator here, it is not invariant
//! under a shift of the data.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::order_stats::{blom_eta, blom_xi, eta, quartile_index, xi};

/// Divisor of the interquartile range in the Cochrane Handbook rule.
pub const COCHRANE_DIVISOR: f64 = 1.35;

/// Reporting scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// min, median, max
    C1,
    /// min, q1, median, q3, max
    C2,
    /// q1, median, q3
    C3,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::C1, Scenario::C2, Scenario::C3];
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::C1 => "C1",
            Scenario::C2 => "C2",
            Scenario::C3 => "C3",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "C1" => Ok(Scenario::C1),
            "C2" => Ok(Scenario::C2),
            "C3" => Ok(Scenario::C3),
            _ => Err(Error::Domain(format!("unknown scenario '{s}'"))),
        }
    }
}

/// Estimation formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    /// (a + 2m + b)/4, (a + 2q1 + 2m + 2q3 + b)/8 or (q1 + m + q3)/3.
    MeanSimple,
    /// Midpoint of the inequality bounds; adds an O(1/n) correction.
    MeanFull,
    /// (b - a)/4
    SdRangeRule,
    /// Hozo's piecewise rule with cut points n = 15 and n = 70.
    SdHozoAdaptive,
    /// Hozo's variance expression from the bounds on the sum of squares.
    SdHozoExact,
    /// Divisors from the exact expected range / interquartile range.
    SdWanExact,
    /// Divisors from Blom's approximation.
    SdWanBlom,
    SdBland,
    /// (q3 - q1)/1.35
    SdCochrane,
}

impl MethodId {
    pub const ALL: [MethodId; 9] = [
        MethodId::MeanSimple,
        MethodId::MeanFull,
        MethodId::SdRangeRule,
        MethodId::SdHozoAdaptive,
        MethodId::SdHozoExact,
        MethodId::SdWanExact,
        MethodId::SdWanBlom,
        MethodId::SdBland,
        MethodId::SdCochrane,
    ];

    pub fn token(self) -> &'static str {
        match self {
            MethodId::MeanSimple => "mean_simple",
            MethodId::MeanFull => "mean_full",
            MethodId::SdRangeRule => "sd_range_rule",
            MethodId::SdHozoAdaptive => "sd_hozo_adaptive",
            MethodId::SdHozoExact => "sd_hozo_exact",
            MethodId::SdWanExact => "sd_wan_exact",
            MethodId::SdWanBlom => "sd_wan_blom",
            MethodId::SdBland => "sd_bland",
            MethodId::SdCochrane => "sd_cochrane",
        }
    }

    pub fn is_mean(self) -> bool {
        matches!(self, MethodId::MeanSimple | MethodId::MeanFull)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        MethodId::ALL
            .into_iter()
            .find(|m| m.token() == t)
            .ok_or_else(|| Error::Domain(format!("unknown method '{s}'")))
    }
}

/// Adjustments made while computing an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    /// A negative variance expression was replaced by zero.
    SdClampedToZero,
    /// Blom's approximation supplied a divisor.
    BlomApproximationUsed,
    /// n is not of the form 4Q + 1, so the exact interquartile divisor was
    /// replaced by Blom's.
    EtaFallbackUsed,
}

impl Flag {
    pub fn token(self) -> &'static str {
        match self {
            Flag::SdClampedToZero => "SD_CLAMPED_TO_ZERO",
            Flag::BlomApproximationUsed => "BLOM_APPROXIMATION_USED",
            Flag::EtaFallbackUsed => "ETA_FALLBACK_USED",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

pub type Flags = BTreeSet<Flag>;

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

fn check_order(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        check_finite(name, *v)?;
    }
    for w in pairs.windows(2) {
        let ((ln, lv), (hn, hv)) = (w[0], w[1]);
        if lv > hv {
            return Err(Error::Ordering(format!("{ln} ({lv}) > {hn} ({hv})")));
        }
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("sample size must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn require_sd_n(n: u64) -> Result<()> {
    if n < 2 {
        Err(Error::Domain(format!(
            "standard deviation estimation requires n >= 2, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Scenario C1: minimum, median, maximum and sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSummary {
    min: f64,
    median: f64,
    max: f64,
    n: u64,
}

impl RangeSummary {
    pub fn new(min: f64, median: f64, max: f64, n: u64) -> Result<Self> {
        check_order(&[("min", min), ("median", median), ("max", max)])?;
        check_n(n)?;
        Ok(RangeSummary {
            min,
            median,
            max,
            n,
        })
    }

    pub fn min(&self) -> f64 {
        self.min
    }
    pub fn median(&self) -> f64 {
        self.median
    }
    pub fn max(&self) -> f64 {
        self.max
    }
    pub fn n(&self) -> u64 {
        self.n
    }
}

/// Scenario C2: the full five-number summary and sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumberSummary {
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
    n: u64,
}

impl FiveNumberSummary {
    pub fn new(min: f64, q1: f64, median: f64, q3: f64, max: f64, n: u64) -> Result<Self> {
        check_order(&[
            ("min", min),
            ("q1", q1),
            ("median", median),
            ("q3", q3),
            ("max", max),
        ])?;
        check_n(n)?;
        Ok(FiveNumberSummary {
            min,
            q1,
            median,
            q3,
            max,
            n,
        })
    }

    pub fn min(&self) -> f64 {
        self.min
    }
    pub fn q1(&self) -> f64 {
        self.q1
    }
    pub fn median(&self) -> f64 {
        self.median
    }
    pub fn q3(&self) -> f64 {
        self.q3
    }
    pub fn max(&self) -> f64 {
        self.max
    }
    pub fn n(&self) -> u64 {
        self.n
    }
}

/// Scenario C3: quartiles, median and sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuartileSummary {
    q1: f64,
    median: f64,
    q3: f64,
    n: u64,
}

impl QuartileSummary {
    pub fn new(q1: f64, median: f64, q3: f64, n: u64) -> Result<Self> {
        check_order(&[("q1", q1), ("median", median), ("q3", q3)])?;
        check_n(n)?;
        Ok(QuartileSummary { q1, median, q3, n })
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }
    pub fn median(&self) -> f64 {
        self.median
    }
    pub fn q3(&self) -> f64 {
        self.q3
    }
    pub fn n(&self) -> u64 {
        self.n
    }
}

/// The summary statistics a study reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioInput {
    C1(RangeSummary),
    C2(FiveNumberSummary),
    C3(QuartileSummary),
}

impl ScenarioInput {
    pub fn scenario(&self) -> Scenario {
        match self {
            ScenarioInput::C1(_) => Scenario::C1,
            ScenarioInput::C2(_) => Scenario::C2,
            ScenarioInput::C3(_) => Scenario::C3,
        }
    }

    pub fn n(&self) -> u64 {
        match self {
            ScenarioInput::C1(s) => s.n,
            ScenarioInput::C2(s) => s.n,
            ScenarioInput::C3(s) => s.n,
        }
    }
}

impl From<RangeSummary> for ScenarioInput {
    fn from(s: RangeSummary) -> Self {
        ScenarioInput::C1(s)
    }
}

impl From<FiveNumberSummary> for ScenarioInput {
    fn from(s: FiveNumberSummary) -> Self {
        ScenarioInput::C2(s)
    }
}

impl From<QuartileSummary> for ScenarioInput {
    fn from(s: QuartileSummary) -> Self {
        ScenarioInput::C3(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanVariant {
    Simple,
    Full,
}

/// A standard deviation together with the adjustments that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SdEstimate {
    pub value: f64,
    pub flags: Flags,
}

impl SdEstimate {
    fn plain(value: f64) -> Self {
        SdEstimate {
            value,
            flags: Flags::new(),
        }
    }

    fn with(value: f64, flags: &[Flag]) -> Self {
        SdEstimate {
            value,
            flags: flags.iter().copied().collect(),
        }
    }

    /// Square root of a variance expression, clamping negatives to zero.
    fn from_variance(s2: f64) -> Self {
        if s2 < 0.0 {
            SdEstimate::with(0.0, &[Flag::SdClampedToZero])
        } else {
            SdEstimate::plain(s2.sqrt())
        }
    }
}

/// Result of [`estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub sd: f64,
    pub mean_method: MethodId,
    pub sd_method: MethodId,
    pub scenario: Scenario,
    pub flags: Flags,
}

pub fn mean_c1(input: &RangeSummary, variant: MeanVariant) -> f64 {
    let (a, m, b) = (input.min, input.median, input.max);
    let simple = (a + 2.0 * m + b) / 4.0;
    match variant {
        MeanVariant::Simple => simple,
        MeanVariant::Full => simple + (a - 2.0 * m + b) / (4.0 * input.n as f64),
    }
}

pub fn sd_c1(input: &RangeSummary, method: MethodId) -> Result<SdEstimate> {
    require_sd_n(input.n)?;
    let (a, m, b, n) = (input.min, input.median, input.max, input.n);
    let range = b - a;
    let applicable = matches!(
        method,
        MethodId::SdRangeRule
            | MethodId::SdHozoAdaptive
            | MethodId::SdHozoExact
            | MethodId::SdWanExact
            | MethodId::SdWanBlom
    );
    if !applicable {
        return Err(dispatch_error(method, Scenario::C1));
    }
    // A zero range means every observation is equal.
    if range == 0.0 {
        return Ok(SdEstimate::plain(0.0));
    }
    let sd = match method {
        MethodId::SdRangeRule => SdEstimate::plain(range / 4.0),
        MethodId::SdHozoAdaptive => SdEstimate::plain(hozo_adaptive(a, m, b, n)),
        MethodId::SdHozoExact => {
            let nf = n as f64;
            let sum_sq = a * a
                + m * m
                + b * b
                + (nf - 3.0) / 2.0 * ((a + m).powi(2) + (m + b).powi(2)) / 4.0;
            let s2 = (sum_sq - nf * (a + 2.0 * m + b).powi(2) / 16.0) / (nf - 1.0);
            SdEstimate::from_variance(s2)
        }
        MethodId::SdWanExact => SdEstimate::plain(range / xi(n)?),
        MethodId::SdWanBlom => {
            SdEstimate::with(range / blom_xi(n)?, &[Flag::BlomApproximationUsed])
        }
        _ => unreachable!(),
    };
    Ok(sd)
}

fn hozo_adaptive(a: f64, m: f64, b: f64, n: u64) -> f64 {
    if n <= 15 {
        ((b - a).powi(2) + (a - 2.0 * m + b).powi(2) / 4.0).sqrt() / 12f64.sqrt()
    } else if n <= 70 {
        (b - a) / 4.0
    } else {
        (b - a) / 6.0
    }
}

pub fn mean_c2(input: &FiveNumberSummary, variant: MeanVariant) -> f64 {
    let s = input;
    let simple = (s.min + 2.0 * s.q1 + 2.0 * s.median + 2.0 * s.q3 + s.max) / 8.0;
    match variant {
        MeanVariant::Simple => simple,
        // (LB + UB)/2 with
        //   LB = (a+q1+m+q3)/4 + (4b-a-q1-m-q3)/(4n)
        //   UB = (q1+m+q3+b)/4 + (4a-q1-m-q3-b)/(4n)
        MeanVariant::Full => {
            simple + (3.0 * (s.min + s.max) - 2.0 * (s.q1 + s.median + s.q3)) / (8.0 * s.n as f64)
        }
    }
}

pub fn sd_c2(input: &FiveNumberSummary, method: MethodId) -> Result<SdEstimate> {
    require_sd_n(input.n)?;
    let s = input;
    match method {
        MethodId::SdBland => {
            // The expression is shift invariant; centring at the median keeps
            // it exact for constant data and well conditioned otherwise.
            let c = s.median;
            let (a, q1, m, q3, b) = (s.min - c, s.q1 - c, 0.0, s.q3 - c, s.max - c);
            let s2 = (a * a + 2.0 * q1 * q1 + 2.0 * m * m + 2.0 * q3 * q3 + b * b) / 16.0
                + (a * q1 + q1 * m + m * q3 + q3 * b) / 8.0
                - (a + 2.0 * q1 + 2.0 * m + 2.0 * q3 + b).powi(2) / 64.0;
            Ok(SdEstimate::from_variance(s2))
        }
        MethodId::SdWanExact => {
            let mut flags = Flags::new();
            let range_div = xi(s.n)?;
            let iqr_div = match quartile_index(s.n) {
                Some(_) => eta(s.n)?,
                None => {
                    flags.insert(Flag::EtaFallbackUsed);
                    flags.insert(Flag::BlomApproximationUsed);
                    blom_eta(s.n)?
                }
            };
            let value = (s.max - s.min) / (2.0 * range_div) + (s.q3 - s.q1) / (2.0 * iqr_div);
            Ok(SdEstimate { value, flags })
        }
        MethodId::SdWanBlom => {
            let value =
                (s.max - s.min) / (2.0 * blom_xi(s.n)?) + (s.q3 - s.q1) / (2.0 * blom_eta(s.n)?);
            Ok(SdEstimate::with(value, &[Flag::BlomApproximationUsed]))
        }
        other => Err(dispatch_error(other, Scenario::C2)),
    }
}

pub fn mean_c3(input: &QuartileSummary) -> f64 {
    (input.q1 + input.median + input.q3) / 3.0
}

pub fn sd_c3(input: &QuartileSummary, method: MethodId) -> Result<SdEstimate> {
    let iqr = input.q3 - input.q1;
    match method {
        MethodId::SdCochrane => Ok(SdEstimate::plain(iqr / COCHRANE_DIVISOR)),
        MethodId::SdWanExact => {
            require_sd_n(input.n)?;
            match quartile_index(input.n) {
                Some(_) => Ok(SdEstimate::plain(iqr / eta(input.n)?)),
                None => Ok(SdEstimate::with(
                    iqr / blom_eta(input.n)?,
                    &[Flag::EtaFallbackUsed, Flag::BlomApproximationUsed],
                )),
            }
        }
        MethodId::SdWanBlom => {
            require_sd_n(input.n)?;
            Ok(SdEstimate::with(
                iqr / blom_eta(input.n)?,
                &[Flag::BlomApproximationUsed],
            ))
        }
        other => Err(dispatch_error(other, Scenario::C3)),
    }
}

/// Mean methods applicable to a scenario.
pub fn allowed_mean_methods(scenario: Scenario) -> &'static [MethodId] {
    match scenario {
        Scenario::C1 | Scenario::C2 => &[MethodId::MeanSimple, MethodId::MeanFull],
        Scenario::C3 => &[MethodId::MeanSimple],
    }
}

/// Standard deviation methods applicable to a scenario.
pub fn allowed_sd_methods(scenario: Scenario) -> &'static [MethodId] {
    match scenario {
        Scenario::C1 => &[
            MethodId::SdRangeRule,
            MethodId::SdHozoAdaptive,
            MethodId::SdHozoExact,
            MethodId::SdWanExact,
            MethodId::SdWanBlom,
        ],
        Scenario::C2 => &[MethodId::SdBland, MethodId::SdWanExact, MethodId::SdWanBlom],
        Scenario::C3 => &[
            MethodId::SdWanExact,
            MethodId::SdWanBlom,
            MethodId::SdCochrane,
        ],
    }
}

/// Recommended (mean, sd) methods for a scenario.
pub fn default_methods(_scenario: Scenario) -> (MethodId, MethodId) {
    (MethodId::MeanSimple, MethodId::SdWanBlom)
}

fn dispatch_error(method: MethodId, scenario: Scenario) -> Error {
    let allowed = if method.is_mean() {
        allowed_mean_methods(scenario)
    } else {
        allowed_sd_methods(scenario)
    };
    Error::Dispatch {
        method,
        scenario,
        allowed: allowed.to_vec(),
    }
}

/// Mean of a scenario input with a given method.
pub fn estimate_mean(input: &ScenarioInput, method: MethodId) -> Result<f64> {
    let variant = match method {
        MethodId::MeanSimple => MeanVariant::Simple,
        MethodId::MeanFull => MeanVariant::Full,
        other => return Err(dispatch_error(other, input.scenario())),
    };
    match (input, variant) {
        (ScenarioInput::C1(s), v) => Ok(mean_c1(s, v)),
        (ScenarioInput::C2(s), v) => Ok(mean_c2(s, v)),
        (ScenarioInput::C3(s), MeanVariant::Simple) => Ok(mean_c3(s)),
        (ScenarioInput::C3(_), MeanVariant::Full) => Err(dispatch_error(method, Scenario::C3)),
    }
}

/// Standard deviation of a scenario input with a given method.
pub fn estimate_sd(input: &ScenarioInput, method: MethodId) -> Result<SdEstimate> {
    if !allowed_sd_methods(input.scenario()).contains(&method) {
        return Err(dispatch_error(method, input.scenario()));
    }
    match input {
        ScenarioInput::C1(s) => sd_c1(s, method),
        ScenarioInput::C2(s) => sd_c2(s, method),
        ScenarioInput::C3(s) => sd_c3(s, method),
    }
}

/// Estimate mean and standard deviation, using the scenario defaults for any
/// method not given.
pub fn estimate(
    input: &ScenarioInput,
    mean_method: Option<MethodId>,
    sd_method: Option<MethodId>,
) -> Result<Estimate> {
    let scenario = input.scenario();
    let (default_mean, default_sd) = default_methods(scenario);
    let mean_method = mean_method.unwrap_or(default_mean);
    let sd_method = sd_method.unwrap_or(default_sd);
    if !allowed_mean_methods(scenario).contains(&mean_method) {
        return Err(dispatch_error(mean_method, scenario));
    }
    if !allowed_sd_methods(scenario).contains(&sd_method) {
        return Err(dispatch_error(sd_method, scenario));
    }
    let mean = estimate_mean(input, mean_method)?;
    let sd = estimate_sd(input, sd_method)?;
    Ok(Estimate {
        mean,
        sd: sd.value,
        mean_method,
        sd_method,
        scenario,
        flags: sd.flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1(a: f64, m: f64, b: f64, n: u64) -> RangeSummary {
        RangeSummary::new(a, m, b, n).unwrap()
    }

    fn c2(a: f64, q1: f64, m: f64, q3: f64, b: f64, n: u64) -> FiveNumberSummary {
        FiveNumberSummary::new(a, q1, m, q3, b, n).unwrap()
    }

    fn c3(q1: f64, m: f64, q3: f64, n: u64) -> QuartileSummary {
        QuartileSummary::new(q1, m, q3, n).unwrap()
    }

    #[test]
    fn ordering_is_validated() {
        assert!(matches!(
            RangeSummary::new(2.0, 1.0, 3.0, 5),
            Err(Error::Ordering(_))
        ));
        assert!(matches!(
            FiveNumberSummary::new(0.0, 2.0, 1.0, 3.0, 4.0, 5),
            Err(Error::Ordering(_))
        ));
        assert!(matches!(
            QuartileSummary::new(1.0, 2.0, 1.5, 5),
            Err(Error::Ordering(_))
        ));
        assert!(RangeSummary::new(0.0, 1.0, 2.0, 0).is_err());
        assert!(RangeSummary::new(0.0, f64::NAN, 2.0, 3).is_err());
    }

    #[test]
    fn c1_means() {
        for n in [1, 5, 1000] {
            assert_eq!(mean_c1(&c1(0.0, 1.0, 2.0, n), MeanVariant::Simple), 1.0);
        }
        assert_eq!(mean_c1(&c1(0.0, 1.0, 2.0, 5), MeanVariant::Full), 1.0);
        assert_eq!(mean_c1(&c1(1.0, 2.0, 7.0, 9), MeanVariant::Simple), 3.0);
        // LB1 = (a+m)/2 + (2b-a-m)/(2n), UB1 = (m+b)/2 + (2a-m-b)/(2n)
        let (a, m, b, n) = (1.0, 2.0, 7.0, 9.0);
        let lb = (a + m) / 2.0 + (2.0 * b - a - m) / (2.0 * n);
        let ub = (m + b) / 2.0 + (2.0 * a - m - b) / (2.0 * n);
        let full = mean_c1(&c1(a, m, b, 9), MeanVariant::Full);
        assert!((full - (lb + ub) / 2.0).abs() < 1e-14);
        let big = mean_c1(&c1(a, m, b, 10_000_000), MeanVariant::Full);
        assert!((big - 3.0).abs() < 1e-6);
    }

    #[test]
    fn c1_sds() {
        let sd = |s: RangeSummary, m| sd_c1(&s, m).unwrap().value;
        assert_eq!(sd(c1(0.0, 1.0, 4.0, 20), MethodId::SdHozoAdaptive), 1.0);
        assert!((sd(c1(0.0, 0.0, 1.128, 2), MethodId::SdWanExact) - 1.0).abs() < 1e-3);
        let v = sd(c1(0.0, 2.0, 4.0, 10), MethodId::SdHozoAdaptive);
        assert!((v - 4.0 / 12f64.sqrt()).abs() < 1e-12);
        assert!((v - 1.1547).abs() < 1e-4);
        assert_eq!(sd(c1(0.0, 1.0, 12.0, 100), MethodId::SdHozoAdaptive), 2.0);
        assert_eq!(sd(c1(0.0, 1.0, 12.0, 100), MethodId::SdRangeRule), 3.0);
        let blom = sd(c1(0.0, 1.0, 12.0, 100), MethodId::SdWanBlom);
        let expect = 12.0 / (2.0 * crate::normal::quantile_f64(99.625 / 100.25).unwrap());
        assert_eq!(blom, expect);
        for m in allowed_sd_methods(Scenario::C1) {
            assert_eq!(sd(c1(3.5, 3.5, 3.5, 11), *m), 0.0);
            assert_eq!(sd(c1(-3.5, -3.5, -3.5, 80), *m), 0.0);
        }
    }

    #[test]
    fn hozo_exact_variance() {
        // a=1, m=3, b=8, n=9 evaluated by hand:
        //   1 + 9 + 64 + 3*(16 + 121)/4 = 176.75 ; 9*(15^2)/16 = 126.5625
        //   (176.75 - 126.5625)/8 = 6.2734375
        let s = sd_c1(&c1(1.0, 3.0, 8.0, 9), MethodId::SdHozoExact).unwrap();
        assert!((s.value - 6.273_437_5f64.sqrt()).abs() < 1e-12);
        assert!(s.flags.is_empty());
    }

    #[test]
    fn hozo_exact_clamps_negative_variance() {
        // n = 2, a = 9, m = b = 10:
        //   281 - ((19^2 + 20^2)/8 = 95.125) - (39^2/8 = 190.125) = -4.25
        let s = sd_c1(&c1(9.0, 10.0, 10.0, 2), MethodId::SdHozoExact).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.flags.contains(&Flag::SdClampedToZero));
    }

    #[test]
    fn c1_sd_requires_two_observations() {
        let s = c1(0.0, 1.0, 2.0, 1);
        for m in allowed_sd_methods(Scenario::C1) {
            assert!(matches!(sd_c1(&s, *m), Err(Error::Domain(_))));
        }
        assert!(matches!(
            sd_c1(&c1(0.0, 1.0, 2.0, 5), MethodId::SdBland),
            Err(Error::Dispatch { .. })
        ));
    }

    #[test]
    fn c2_means() {
        let s = c2(0.0, 1.0, 2.0, 3.0, 4.0, 5);
        assert_eq!(mean_c2(&s, MeanVariant::Simple), 2.0);
        assert_eq!(mean_c2(&s, MeanVariant::Full), 2.0);
        let k = c2(2.5, 2.5, 2.5, 2.5, 2.5, 9);
        assert_eq!(mean_c2(&k, MeanVariant::Simple), 2.5);
        assert_eq!(mean_c2(&k, MeanVariant::Full), 2.5);
        // Hand evaluation of the bounds for (1, 2, 3, 5, 10; n = 9):
        //   LB2 = 11/4 + 29/36, UB2 = 20/4 - 16/36
        let lb = 11.0 / 4.0 + 29.0 / 36.0;
        let ub = 5.0 - 16.0 / 36.0;
        let s = c2(1.0, 2.0, 3.0, 5.0, 10.0, 9);
        assert!((mean_c2(&s, MeanVariant::Full) - (lb + ub) / 2.0).abs() < 1e-14);
        assert!((mean_c2(&s, MeanVariant::Full) - 4.055_555_555_555_555).abs() < 1e-12);
        assert_eq!(mean_c2(&s, MeanVariant::Simple), 3.875);
    }

    #[test]
    fn c2_sds() {
        let s = c2(0.0, 0.0, 0.5, 0.990, 2.326, 5);
        let w = sd_c2(&s, MethodId::SdWanExact).unwrap();
        assert!((w.value - 1.0).abs() < 1e-3);
        assert!(w.flags.is_empty());
        let b = sd_c2(&c2(0.0, 1.0, 2.0, 3.0, 4.0, 5), MethodId::SdBland).unwrap();
        assert!((b.value - 1.25f64.sqrt()).abs() < 1e-14);
        assert!((b.value - 1.1180).abs() < 1e-4);
        let k = c2(0.1, 0.1, 0.1, 0.1, 0.1, 9);
        for m in allowed_sd_methods(Scenario::C2) {
            assert_eq!(sd_c2(&k, *m).unwrap().value, 0.0);
        }
    }

    #[test]
    fn c2_wan_exact_falls_back_for_other_n() {
        let s = c2(0.0, 1.0, 2.0, 3.0, 4.0, 12);
        let w = sd_c2(&s, MethodId::SdWanExact).unwrap();
        assert!(w.flags.contains(&Flag::EtaFallbackUsed));
        let expect = 4.0 / (2.0 * xi(12).unwrap()) + 2.0 / (2.0 * blom_eta(12).unwrap());
        assert!((w.value - expect).abs() < 1e-14);
    }

    #[test]
    fn c3_estimators() {
        assert_eq!(mean_c3(&c3(1.0, 2.0, 3.0, 5)), 2.0);
        assert_eq!(mean_c3(&c3(4.0, 4.0, 4.0, 5)), 4.0);
        assert_eq!(mean_c3(&c3(0.0, 0.0, 3.0, 5)), 1.0);
        let s = c3(0.0, 0.7, 1.35, 50);
        assert!((sd_c3(&s, MethodId::SdCochrane).unwrap().value - 1.0).abs() < 1e-15);
        let s = c3(0.0, 0.5, 1.340, 201);
        assert!((sd_c3(&s, MethodId::SdWanExact).unwrap().value - 1.0).abs() < 1e-3);
        let s = c3(2.0, 2.0, 2.0, 21);
        for m in allowed_sd_methods(Scenario::C3) {
            assert_eq!(sd_c3(&s, *m).unwrap().value, 0.0);
        }
        // sd_cochrane ignores n; the order-statistic divisors need n >= 2
        let s = c3(0.0, 0.5, 1.0, 1);
        assert!(sd_c3(&s, MethodId::SdCochrane).is_ok());
        assert!(sd_c3(&s, MethodId::SdWanBlom).is_err());
        let fb = sd_c3(&c3(0.0, 0.5, 1.0, 10), MethodId::SdWanExact).unwrap();
        assert!(fb.flags.contains(&Flag::EtaFallbackUsed));
    }

    #[test]
    fn dispatch_defaults_and_errors() {
        let input: ScenarioInput = c1(0.0, 1.0, 2.0, 5).into();
        let e = estimate(&input, None, None).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.sd, 2.0 / blom_xi(5).unwrap());
        assert_eq!(
            (e.mean_method, e.sd_method),
            (MethodId::MeanSimple, MethodId::SdWanBlom)
        );
        assert_eq!(e.scenario, Scenario::C1);

        let input: ScenarioInput = c2(0.0, 1.0, 2.0, 3.0, 4.0, 9).into();
        let e = estimate(&input, None, None).unwrap();
        assert_eq!(e.mean, 2.0);
        let expect = 4.0 / (4.0 * crate::normal::quantile_f64(8.625 / 9.25).unwrap())
            + 2.0 / (4.0 * crate::normal::quantile_f64(6.625 / 9.25).unwrap());
        assert!((e.sd - expect).abs() < 1e-14);

        let input: ScenarioInput = c3(1.0, 2.0, 3.0, 9).into();
        let err = estimate(&input, None, Some(MethodId::SdBland)).unwrap_err();
        match err {
            Error::Dispatch {
                allowed, scenario, ..
            } => {
                assert_eq!(scenario, Scenario::C3);
                assert_eq!(allowed, allowed_sd_methods(Scenario::C3));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(estimate(&input, Some(MethodId::MeanFull), None).is_err());
        assert!(estimate(&input, Some(MethodId::SdCochrane), None).is_err());
        assert!(estimate(&input, None, Some(MethodId::MeanSimple)).is_err());
    }

    #[test]
    fn method_tokens_round_trip() {
        for m in MethodId::ALL {
            assert_eq!(m.token().parse::<MethodId>().unwrap(), m);
        }
        assert_eq!(
            "SD_WAN_BLOM".parse::<MethodId>().unwrap(),
            MethodId::SdWanBlom
        );
        assert!("sd_magic".parse::<MethodId>().is_err());
        assert_eq!("c2".parse::<Scenario>().unwrap(), Scenario::C2);
    }
}
