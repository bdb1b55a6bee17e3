//! Expected values of standard normal order statistics.
//!
//! `E(Z(r))` for the r-th smallest of n draws is obtained by adaptive
//! quadrature of
//!
//! ```text
//! n!/((r-1)!(n-r)!) * z * Phi(z)^(r-1) * (1 - Phi(z))^(n-r) * phi(z)
//! ```
//!
//! with the whole product evaluated in log space, and approximately by Blom's
//! formula `quantile((r - alpha) / (n - 2 alpha + 1))`. The scaling constants
//! `xi(n) = 2 E(Z(n))` (expected range) and `eta(n) = 2 E(Z(3Q+1))` with
//! `n = 4Q + 1` (expected interquartile range) are memoized per process.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::format_fixed;
use crate::normal::{self, lower_tail, upper_tail};
use crate::quadrature::AdaptiveQuadrature;
use crate::special::ln_order_stat_coefficient;

/// Blom's compromise value of alpha.
pub const BLOM_ALPHA: f64 = 0.375;

/// Absolute tolerance for each order-statistic integral.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// Rank `r` of `n` draws, with `1 <= r <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderStatQuery {
    n: u64,
    r: u64,
}

impl OrderStatQuery {
    pub fn new(n: u64, r: u64) -> Result<Self> {
        if n == 0 || r == 0 || r > n {
            return Err(Error::Domain(format!(
                "rank {r} out of range for sample size {n}"
            )));
        }
        Ok(OrderStatQuery { n, r })
    }

    /// The largest of `n` draws.
    pub fn maximum(n: u64) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// The rank mirrored about the median, `n - r + 1`.
    pub fn mirrored(&self) -> Self {
        OrderStatQuery {
            n: self.n,
            r: self.n - self.r + 1,
        }
    }
}

fn cache() -> &'static RwLock<HashMap<OrderStatQuery, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<OrderStatQuery, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Half-width of the integration domain. The integrand's mass moves outward
/// like sqrt(2 ln n).
pub fn truncation_bound(n: u64) -> f64 {
    8.0 + (2.0 * (n as f64).ln()).sqrt()
}

/// `E(Z(r))` for `n` standard normal draws, by adaptive quadrature.
pub fn expected_order_stat(q: OrderStatQuery) -> Result<f64> {
    if let Some(&v) = cache()
        .read()
        .expect("order statistic cache poisoned")
        .get(&q)
    {
        return Ok(v);
    }
    let v = integrate_order_stat(q)?;
    cache()
        .write()
        .expect("order statistic cache poisoned")
        .insert(q, v);
    Ok(v)
}

fn integrate_order_stat(q: OrderStatQuery) -> Result<f64> {
    let OrderStatQuery { n, r } = q;
    // Middle rank of an odd sample: the integrand is odd.
    if 2 * r == n + 1 {
        return Ok(0.0);
    }
    let ln_coef = ln_order_stat_coefficient(n, r) - 0.5 * (2.0 * std::f64::consts::PI).ln();
    let below = (r - 1) as f64;
    let above = (n - r) as f64;
    let integrand = |z: f64| {
        let mut ln_f = ln_coef - 0.5 * z * z;
        if below > 0.0 {
            ln_f += below * lower_tail(z).ln();
        }
        if above > 0.0 {
            ln_f += above * upper_tail(z).ln();
        }
        z * ln_f.exp()
    };
    let bound = truncation_bound(n);
    let integral = AdaptiveQuadrature::with_tolerance(QUADRATURE_TOLERANCE)
        .integrate(integrand, -bound, bound)?;
    Ok(integral.value)
}

/// `xi(n) = 2 E(Z(n))`, the expected range of `n` standard normal draws.
pub fn xi(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("xi requires n >= 1".into()));
    }
    Ok(2.0 * expected_order_stat(OrderStatQuery::maximum(n)?)?)
}

/// `Q` such that `n = 4Q + 1`, if any.
pub fn quartile_index(n: u64) -> Option<u64> {
    if n >= 5 && (n - 1).is_multiple_of(4) {
        Some((n - 1) / 4)
    } else {
        None
    }
}

/// `eta(n) = 2 E(Z(3Q+1))` for `n = 4Q + 1`, the expected interquartile range.
pub fn eta(n: u64) -> Result<f64> {
    let q = quartile_index(n)
        .ok_or_else(|| Error::Domain(format!("eta requires n = 4Q + 1 with Q >= 1, got {n}")))?;
    Ok(2.0 * expected_order_stat(OrderStatQuery::new(n, 3 * q + 1)?)?)
}

/// Blom's approximation `quantile((r - alpha) / (n - 2 alpha + 1))`.
pub fn blom(q: OrderStatQuery, alpha: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [0, 0.5)")));
    }
    let p = (q.r as f64 - alpha) / (q.n as f64 - 2.0 * alpha + 1.0);
    normal::quantile_f64(p)
}

/// `2 quantile((n - 0.375) / (n + 0.25))`.
pub fn blom_xi(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("blom_xi requires n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok(2.0 * normal::quantile_f64((n - 0.375) / (n + 0.25))?)
}

/// `2 quantile((0.75 n - 0.125) / (n + 0.25))`, defined for every n >= 2.
pub fn blom_eta(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("blom_eta requires n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok(2.0 * normal::quantile_f64((0.75 * n - 0.125) / (n + 0.25))?)
}

/// Which scaling constant a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Indexed by sample size n.
    Xi,
    /// Indexed by Q, with n = 4Q + 1.
    Eta,
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableKind::Xi => "xi",
            TableKind::Eta => "eta",
        })
    }
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xi" => Ok(TableKind::Xi),
            "eta" => Ok(TableKind::Eta),
            other => Err(Error::Domain(format!(
                "unknown table kind '{other}' (expected xi or eta)"
            ))),
        }
    }
}

/// Exact scaling constants for consecutive indices starting at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub kind: TableKind,
    pub entries: Vec<(u64, f64)>,
}

impl ScalingTable {
    /// CSV with header `index,value`, values rounded half away from zero to
    /// three decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for &(i, v) in &self.entries {
            out.push_str(&format!("{i},{}\n", format_fixed(v, 3)));
        }
        out
    }
}

pub fn generate_table(kind: TableKind, max_index: u64) -> Result<ScalingTable> {
    if max_index == 0 {
        return Err(Error::Domain("table needs at least one row".into()));
    }
    let entries = (1..=max_index)
        .into_par_iter()
        .map(|i| {
            let v = match kind {
                TableKind::Xi => xi(i)?,
                TableKind::Eta => eta(4 * i + 1)?,
            };
            Ok((i, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingTable { kind, entries })
}
