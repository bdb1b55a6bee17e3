//! Brute-force oracle for expected normal order statistics.
//!
//! Draws N points of a Halton sequence, maps each pair of coordinates to two
//! standard normal variates with Box-Muller, sorts every point and averages
//! rank by rank. Nothing from the library is used, so the output can be
//! checked against the quadrature.
//!
//!     cargo run --release -p summstat-core --example order_stat_oracle > crates/core/tests/fixtures/order_stat_oracle.csv

use std::f64::consts::PI;

use rayon::prelude::*;

const POINTS: u64 = 10_000_000;
const SIZES: [usize; 3] = [5, 9, 13];
const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    x
}

/// Sum over points of the sorted normal vector of size `n`.
fn rank_sums(n: usize, indices: std::ops::Range<u64>) -> Vec<f64> {
    let dims = n + n % 2;
    let mut sums = vec![0.0; n];
    let mut z = vec![0.0; dims];
    for i in indices {
        for k in (0..dims).step_by(2) {
            let u1 = radical_inverse(i, PRIMES[k]);
            let u2 = radical_inverse(i, PRIMES[k + 1]);
            let radius = (-2.0 * u1.ln()).sqrt();
            z[k] = radius * (2.0 * PI * u2).cos();
            z[k + 1] = radius * (2.0 * PI * u2).sin();
        }
        let point = &mut z[..n];
        point.sort_by(f64::total_cmp);
        for (s, v) in sums.iter_mut().zip(point.iter()) {
            *s += v;
        }
    }
    sums
}

fn main() {
    println!("n,r,expected");
    for n in SIZES {
        const CHUNK: u64 = 100_000;
        // index 0 maps to the origin, where Box-Muller is singular
        let sums = (0..POINTS / CHUNK)
            .into_par_iter()
            .map(|c| rank_sums(n, 1 + c * CHUNK..1 + (c + 1) * CHUNK))
            .reduce(
                || vec![0.0; n],
                |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
            );
        for (r, s) in sums.iter().enumerate() {
            println!("{n},{},{:.10}", r + 1, s / POINTS as f64);
        }
    }
}
