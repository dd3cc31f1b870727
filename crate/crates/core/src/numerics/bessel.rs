use super::ln_factorial;

/// Below this argument the power series is used directly.
const SERIES_CUTOFF: f64 = 20.0;

/// Extra backward-recurrence steps beyond `order + ceil(x)`.
const MILLER_MARGIN: u32 = 40;

const RESCALE_THRESHOLD: f64 = 1e250;

/// Natural log of the modified Bessel function of the first kind, `ln I_order(x)`.
///
/// Uses the power series for `x < 20` and Miller's backward recurrence for
/// larger arguments, normalized through `e^x = I_0(x) + 2 Σ_{k≥1} I_k(x)` so
/// that `e^x` never has to be formed. The result is finite for every finite
/// `x > 0`; `I_n(0)` is 1 for `n = 0` and 0 (log: `-inf`) otherwise.
pub fn log_bessel_i(order: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0, "log_bessel_i requires x >= 0, got {x}");
    if x == 0.0 {
        return if order == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if x < SERIES_CUTOFF {
        log_bessel_series(order, x)
    } else {
        log_bessel_miller(order, x)
    }
}

fn log_bessel_series(order: u32, x: f64) -> f64 {
    // I_n(x) = (x/2)^n / n! · Σ_k (x²/4)^k / (k! (n+1)_k); all terms positive.
    let n = order as f64;
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (n + k));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    n * (0.5 * x).ln() - ln_factorial(order as u64) + sum.ln()
}

fn log_bessel_miller(order: u32, x: f64) -> f64 {
    let start = order + x.ceil() as u32 + MILLER_MARGIN;
    let two_over_x = 2.0 / x;

    let mut next: f64 = 0.0; // unnormalized I_{k+1}
    let mut cur: f64 = 1.0; // unnormalized I_k
    let mut log_scale = 0.0;
    let mut tail = 0.0; // 2 Σ_{j ≥ k+1} I_j
    let mut log_target = f64::NAN;

    for k in (1..=start).rev() {
        if k == order {
            log_target = cur.ln() + log_scale;
        }
        tail += 2.0 * cur;
        let prev = next + k as f64 * two_over_x * cur;
        next = cur;
        cur = prev;
        if cur > RESCALE_THRESHOLD {
            next /= RESCALE_THRESHOLD;
            cur /= RESCALE_THRESHOLD;
            tail /= RESCALE_THRESHOLD;
            log_scale += RESCALE_THRESHOLD.ln();
        }
    }
    if order == 0 {
        log_target = cur.ln() + log_scale;
    }
    let log_norm = (tail + cur).ln() + log_scale;
    x + log_target - log_norm
}
