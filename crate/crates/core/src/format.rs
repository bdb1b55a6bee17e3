//! Decimal formatting for CSV emission.

/// Round half away from zero to `decimals` places.
pub fn round_half_away(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    // f64::round rounds half away from zero; + 0.0 clears negative zero.
    (x * scale).round() / scale + 0.0
}

/// Fixed number of decimals, e.g. `1.128`.
pub fn format_fixed(x: f64, decimals: u32) -> String {
    format!("{:.*}", decimals as usize, round_half_away(x, decimals))
}

/// At most `decimals` decimals, trailing zeros removed.
pub fn format_trimmed(x: f64, decimals: u32) -> String {
    let s = format_fixed(x, decimals);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
