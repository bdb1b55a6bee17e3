//! Standard normal density, distribution function and quantile.
//!
//! The distribution function is evaluated through the complementary error
//! function so that both tails keep full relative precision: a positive-term
//! series covers `|x| < 2.5` and a continued fraction covers the tails. The
//! quantile starts from Acklam's rational approximation and takes one Halley
//! step against the distribution function.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_SQRT_PI, PI};

use crate::error::{Error, Result};

/// 1/sqrt(2*pi)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Below this argument `erfc` uses the series, above it the continued fraction.
const ERFC_SERIES_LIMIT: f64 = 1.5;

/// A probability in the closed interval [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::Domain(format!("probability {value} outside [0, 1]")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Standard normal density.
pub fn pdf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("pdf argument {z} is not finite")));
    }
    Ok(density(z))
}

/// Standard normal distribution function. Infinite arguments map to 0 and 1.
pub fn cdf(z: f64) -> Result<Probability> {
    if z.is_nan() {
        return Err(Error::Domain("cdf argument is NaN".into()));
    }
    Ok(Probability(lower_tail(z)))
}

/// Standard normal quantile, the inverse of [`cdf`].
pub fn quantile(p: Probability) -> Result<f64> {
    let p = p.value();
    if p == 0.0 || p == 1.0 {
        return Err(Error::Infinite(p));
    }
    Ok(quantile_unchecked(p))
}

/// Convenience wrapper accepting a raw `f64`.
pub fn quantile_f64(p: f64) -> Result<f64> {
    quantile(Probability::new(p)?)
}

#[inline]
pub(crate) fn density(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Phi(z) without argument checks. Accurate in relative terms for z < 0.
#[inline]
pub(crate) fn lower_tail(z: f64) -> f64 {
    if z < 0.0 {
        half_erfc_of_scaled(-z)
    } else {
        1.0 - half_erfc_of_scaled(z)
    }
}

/// 1 - Phi(z), accurate in relative terms for z > 0.
#[inline]
pub(crate) fn upper_tail(z: f64) -> f64 {
    lower_tail(-z)
}

/// Quantile for 0 < p < 1. The upper half is reflected so that
/// `quantile(1 - p) == -quantile(p)` whenever `1 - p` is exact.
pub(crate) fn quantile_unchecked(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    if p < 0.5 {
        lower_quantile(p)
    } else if p > 0.5 {
        -lower_quantile(1.0 - p)
    } else {
        0.0
    }
}

// Acklam's coefficients.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

/// Quantile on (0, 0.5], where Phi is evaluated with full relative accuracy.
fn lower_quantile(q: f64) -> f64 {
    let x0 = if q < P_LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else {
        let t = q - 0.5;
        let r = t * t;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * t
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // Halley step. The residual is scaled by 1/phi(x0) via exp(x0^2/2); the
    // product stays finite down to the smallest positive doubles.
    let e = lower_tail(x0) - q;
    let u = e * SQRT_2PI * (0.5 * x0 * x0).exp();
    if !u.is_finite() {
        return x0;
    }
    x0 - u / (1.0 + 0.5 * x0 * u)
}

/// erfc(t/sqrt(2))/2 for t >= 0. In the tail the Gaussian factor is formed
/// from `t` itself, so rounding `t/sqrt(2)` does not leak into the exponent.
fn half_erfc_of_scaled(t: f64) -> f64 {
    let x = t * FRAC_1_SQRT_2;
    if x < ERFC_SERIES_LIMIT {
        0.5 * (1.0 - erf_series(x))
    } else if t > 40.0 {
        0.0
    } else {
        0.5 * exp_neg_half_square(t) * erfc_scaled_continued_fraction(x)
    }
}

/// exp(-t^2/2) with t^2 split as hi^2 + (t - hi)(t + hi), hi = t to 1/16.
fn exp_neg_half_square(t: f64) -> f64 {
    let hi = (t * 16.0).trunc() / 16.0;
    let lo = (t - hi) * (t + hi);
    (-0.5 * hi * hi).exp() * (-0.5 * lo).exp()
}

/// erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_k (2x^2)^k x / (1*3*...*(2k+1)).
/// Every term is positive, so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// exp(x^2) erfc(x) = 1/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
/// evaluated with the modified Lentz algorithm.
fn erfc_scaled_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for j in 1..500 {
        let a = 0.5 * j as f64;
        d = x + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = x + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (PI.sqrt() * f)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // Reference values computed with 40-digit arithmetic.
    const CDF_REF: [(f64, f64); 17] = [
        (-37.0, 5.725_571_222_524_577e-300),
        (-10.0, 7.619_853_024_160_526e-24),
        (-8.0, 6.220_960_574_271_784e-16),
        (-6.5, 4.016_000_583_859_118e-11),
        (-6.0, 9.865_876_450_376_981e-10),
        (-4.0, 3.167_124_183_311_992e-5),
        (-3.0, 1.349_898_031_630_094_5e-3),
        (-2.5, 6.209_665_325_776_135e-3),
        (-1.0, 0.158_655_253_931_457_05),
        (-0.3, 0.382_088_577_811_047_37),
        (0.5, 0.691_462_461_274_013_1),
        (1.0, 0.841_344_746_068_542_9),
        (2.0, 0.977_249_868_051_820_8),
        (3.0, 0.998_650_101_968_369_9),
        (3.5, 0.999_767_370_920_964_5),
        (5.0, 0.999_999_713_348_428_1),
        (8.0, 0.999_999_999_999_999_4),
    ];

    const QUANTILE_REF: [(f64, f64); 10] = [
        (1e-12, -7.034_483_825_301_132),
        (1e-10, -6.361_340_902_404_056),
        (0.001, -3.090_232_306_167_813_5),
        (0.02425, -1.972_961_051_311_884_9),
        (0.1, -1.281_551_565_544_600_5),
        (0.3, -0.524_400_512_708_040_8),
        (0.75, 0.674_489_750_196_081_7),
        (0.9986501, 2.999_999_555_858_321),
        (0.999, 3.090_232_306_167_813_5),
        (0.97575, 1.972_961_051_311_884_9),
    ];

    #[test]
    fn pdf_values() {
        assert!((pdf(0.0).unwrap() - 0.398_942_280_4).abs() < 1e-10);
        let direct = (-0.5f64).exp() / (2.0 * PI).sqrt();
        assert!((pdf(1.0).unwrap() - direct).abs() < 1e-15);
        assert!((pdf(1.0).unwrap() - 0.241_970_724_5).abs() < 1e-10);
        assert_eq!(pdf(2.7).unwrap(), pdf(-2.7).unwrap());
        assert!(pdf(f64::INFINITY).is_err());
        assert!(pdf(f64::NAN).is_err());
    }

    #[test]
    fn cdf_matches_reference() {
        for &(z, expect) in &CDF_REF {
            let got = cdf(z).unwrap().value();
            assert!(
                (got - expect).abs() <= 1e-12,
                "cdf({z}) = {got}, want {expect}"
            );
            if z < 0.0 {
                let rel = (got - expect).abs() / expect;
                assert!(rel < 1e-13, "relative error {rel} at {z}");
            }
        }
    }

    #[test]
    fn cdf_special_points() {
        assert_eq!(cdf(0.0).unwrap().value(), 0.5);
        assert_eq!(cdf(f64::NEG_INFINITY).unwrap().value(), 0.0);
        assert_eq!(cdf(f64::INFINITY).unwrap().value(), 1.0);
        assert!(cdf(f64::NAN).is_err());
        assert!((cdf(3.0).unwrap().value() - 0.998_650_102_0).abs() < 1e-10);
        for z in [0.1, 1.3, 2.49, 2.51, 4.0, 7.9] {
            let s = cdf(z).unwrap().value() + cdf(-z).unwrap().value();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn erfc_branches_agree_at_switch() {
        let x = ERFC_SERIES_LIMIT;
        let below = 1.0 - erf_series(x);
        let above = (-x * x).exp() * erfc_scaled_continued_fraction(x);
        assert!(((below - above) / above).abs() < 1e-12);
    }

    #[test]
    fn quantile_matches_reference() {
        for &(p, expect) in &QUANTILE_REF {
            let got = quantile_f64(p).unwrap();
            assert!(
                (got - expect).abs() < 1e-12 * expect.abs().max(1.0),
                "quantile({p}) = {got}"
            );
        }
        assert_eq!(quantile_f64(0.5).unwrap(), 0.0);
        assert!((quantile_f64(0.75).unwrap() - 0.67449).abs() < 1e-5);
    }

    #[test]
    fn quantile_errors() {
        assert_eq!(quantile_f64(0.0), Err(Error::Infinite(0.0)));
        assert_eq!(quantile_f64(1.0), Err(Error::Infinite(1.0)));
        assert!(matches!(quantile_f64(1.5), Err(Error::Domain(_))));
        assert!(matches!(quantile_f64(-0.1), Err(Error::Domain(_))));
        assert!(matches!(quantile_f64(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn quantile_far_tail_is_finite() {
        let z = quantile_f64(1e-300).unwrap();
        assert!(z.is_finite() && z < -37.0 && z > -37.1);
        let z = quantile_f64(f64::MIN_POSITIVE).unwrap();
        assert!(z.is_finite());
    }

    #[test]
    fn bisection_round_trip_at_three() {
        // Independent inversion of cdf by bisection.
        let target = 0.998_650_1;
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid).unwrap().value() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = quantile_f64(target).unwrap();
        assert!((q - 0.5 * (lo + hi)).abs() < 1e-9);
        assert!((q - 3.0).abs() < 1e-3);
    }
}
