//! Log-counts of restricted integer partitions, `q(m, n)`: the number of
//! ways to write `m` as a sum of at most `n` positive parts.
//!
//! Small arguments come from an exact table; large ones fall back to the
//! Szekeres asymptotic expansion.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

/// Table entries above which the exact table is not built.
const MAX_TABLE_ENTRIES: usize = 1 << 23;
/// `q(m, n)` overflows an `f64` for `m` somewhat above 76_000.
const MAX_TABLE_M: usize = 60_000;

#[derive(Debug, Clone)]
pub(crate) struct LogPartitions {
    max_m: usize,
    max_n: usize,
    // ln q(m, n) at n * (max_m + 1) + m, for n <= max_n.
    table: Vec<f64>,
}

impl LogPartitions {
    /// Exact values for `m <= max_m` and `n <= max_n` where affordable.
    pub(crate) fn new(max_m: usize, max_n: usize) -> Self {
        let max_n = max_n.min(max_m);
        let entries = (max_m + 1).saturating_mul(max_n + 1);
        if max_m > MAX_TABLE_M || entries > MAX_TABLE_ENTRIES {
            return Self {
                max_m: 0,
                max_n: 0,
                table: vec![0.0],
            };
        }
        let width = max_m + 1;
        let mut counts = vec![0.0f64; width * (max_n + 1)];
        counts[0] = 1.0;
        for n in 1..=max_n {
            let (prev, cur) = counts.split_at_mut(n * width);
            let prev = &prev[(n - 1) * width..];
            let cur = &mut cur[..width];
            for m in 0..width {
                cur[m] = prev[m] + if m >= n { cur[m - n] } else { 0.0 };
            }
        }
        let table = counts.into_iter().map(f64::ln).collect();
        Self { max_m, max_n, table }
    }

    pub(crate) fn ln_q(&self, m: u64, n: u64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let n = n.min(m);
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        let (mu, nu) = (m as usize, n as usize);
        if mu <= self.max_m && nu <= self.max_n {
            self.table[nu * (self.max_m + 1) + mu]
        } else {
            ln_q_approx(m, n)
        }
    }
}

/// Szekeres' uniform asymptotic for `ln q(m, n)`, with the small-`n`
/// expansion `ln C(m-1, n-1) - ln n!` when `n < m^(1/4)`.
pub(crate) fn ln_q_approx(m: u64, n: u64) -> f64 {
    let n = n.min(m);
    if m == 0 {
        return 0.0;
    }
    let (mf, nf) = (m as f64, n as f64);
    if nf < mf.powf(0.25) {
        let ln_binom = ln_gamma(mf) - ln_gamma(nf) - ln_gamma(mf - nf + 1.0);
        return ln_binom - ln_gamma(nf + 1.0);
    }
    let u = nf / mf.sqrt();
    let v = szekeres_v(u);
    let lf =
        v.ln() - (-(-v).exp() * (1.0 + u * u / 2.0)).ln_1p() / 2.0 - 1.5 * std::f64::consts::LN_2 - u.ln() - PI.ln();
    let g = 2.0 * v / u - u * (-(-v).exp()).ln_1p();
    lf - mf.ln() + mf.sqrt() * g
}

/// Solves `v = u * sqrt(Li2(1 - e^-v))` by fixed-point iteration.
fn szekeres_v(u: f64) -> f64 {
    let mut v = u;
    for _ in 0..10_000 {
        let next = u * dilog(1.0 - (-v).exp()).sqrt();
        if (next - v).abs() <= 1e-12 * v.max(1.0) {
            return next;
        }
        v = next;
    }
    v
}

/// Dilogarithm `Li2(x)` for `0 <= x <= 1`.
fn dilog(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return PI * PI / 6.0;
    }
    if x > 0.5 {
        // Euler reflection.
        return PI * PI / 6.0 - x.ln() * (1.0 - x).ln() - dilog(1.0 - x);
    }
    let mut sum = 0.0;
    let mut power = x;
    for k in 1..200 {
        let term = power / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        power *= x;
    }
    sum
}
