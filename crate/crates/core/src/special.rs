//! Log-gamma and log binomial-type coefficients.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// ln(n! / ((r-1)! (n-r)!)), the leading coefficient of the density of the
/// r-th order statistic of n draws.
pub fn ln_order_stat_coefficient(n: u64, r: u64) -> f64 {
    debug_assert!(r >= 1 && r <= n);
    ln_factorial(n) - ln_factorial(r - 1) - ln_factorial(n - r)
}

/// ln(k!), exact products below 20 so that small coefficients are exact.
fn ln_factorial(k: u64) -> f64 {
    if k < 20 {
        (2..=k).map(|i| i as f64).product::<f64>().ln()
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}
