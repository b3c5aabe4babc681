//! Log-domain combinatorics and the modified Bessel function of the first
//! kind, integer order.

use std::sync::OnceLock;

const TABLE_LEN: usize = 1024;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        let mut acc = 0.0f64;
        t.push(0.0);
        for n in 1..TABLE_LEN {
            acc += (n as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`. Exact summation below 1024, Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return ln_fact_table()[n as usize];
    }
    let x = n as f64 + 1.0;
    // ln Gamma(x) for x >= 1025; three correction terms are far below 1 ulp
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x * x)
        + 1.0 / (1260.0 * x.powi(5))
}

/// `ln C(n, k)`; `-inf` outside `0 <= k <= n`.
pub fn ln_binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial((n - k) as u64)
}

/// Log of a sum given the logs of its terms.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `ln( sum_k exp(k * ln_y - ln k! - ln (k+n)!) )`, the core of
/// `I_n(2 sqrt(y)) / y^{n/2}`. Terms are summed outward from the largest
/// one until they drop below `rel_tol` relative to the running total.
///
/// Returns `None` if the series fails to converge within a generous term
/// budget.
pub fn ln_bessel_core(n: u32, ln_y: f64, rel_tol: f64) -> Option<f64> {
    if ln_y == f64::NEG_INFINITY {
        return Some(-ln_factorial(n as u64));
    }
    let y = ln_y.exp();
    // peak of k -> y^k / (k! (k+n)!) solves k (k+n) = y
    let nf = n as f64;
    let peak = (0.5 * (-nf + (nf * nf + 4.0 * y).sqrt())).floor().max(0.0) as u64;
    let term = |k: u64| k as f64 * ln_y - ln_factorial(k) - ln_factorial(k + n as u64);
    let t_peak = term(peak);
    if !t_peak.is_finite() {
        return None;
    }
    let budget = 200_000u64;
    let mut sum = 1.0f64;
    let mut k = peak + 1;
    loop {
        let r = (term(k) - t_peak).exp();
        sum += r;
        if r < rel_tol * sum * 1e-3 {
            break;
        }
        k += 1;
        if k - peak > budget {
            return None;
        }
    }
    let mut k = peak;
    while k > 0 {
        k -= 1;
        let r = (term(k) - t_peak).exp();
        sum += r;
        if r < rel_tol * sum * 1e-3 {
            break;
        }
    }
    Some(t_peak + sum.ln())
}

/// `ln I_n(x)` for `x > 0`.
pub fn ln_bessel_i(n: u32, x: f64, rel_tol: f64) -> Option<f64> {
    if x <= 0.0 {
        return if n == 0 {
            Some(0.0)
        } else {
            Some(f64::NEG_INFINITY)
        };
    }
    let half = 0.5 * x;
    let core = ln_bessel_core(n, 2.0 * half.ln(), rel_tol)?;
    Some(n as f64 * half.ln() + core)
}

/// Upper regularized incomplete gamma for integer shape: probability that a
/// Poisson(`x`) variable is below `n`, i.e. `P(Erlang(n) > t)` with `x = mu t`.
pub fn poisson_cdf_below(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if x <= 0.0 {
        return 1.0;
    }
    let lx = x.ln();
    let mut terms = Vec::with_capacity(n as usize);
    for k in 0..n {
        terms.push(-x + k as f64 * lx - ln_factorial(k as u64));
    }
    log_sum_exp(&terms).exp().min(1.0)
}

/// Erlang(`n`, `mu`) CDF at `t`.
pub fn erlang_cdf(n: u32, mu: f64, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let x = mu * t;
    // for x far below n the complement is 1 - tiny; sum the lower tail directly
    if x < n as f64 {
        let lx = x.ln();
        let mut terms = Vec::new();
        let mut k = n as u64;
        loop {
            let lt = -x + k as f64 * lx - ln_factorial(k);
            terms.push(lt);
            if lt < terms[0] - 40.0 || k > n as u64 + 10_000 {
                break;
            }
            k += 1;
        }
        log_sum_exp(&terms).exp().min(1.0)
    } else {
        1.0 - poisson_cdf_below(n, x)
    }
}

/// Poisson(`mean`) pmf restricted to `0..=bound` and renormalised.
pub fn truncated_poisson(mean: f64, bound: u32) -> Vec<f64> {
    if mean <= 0.0 {
        let mut v = vec![0.0; bound as usize + 1];
        v[0] = 1.0;
        return v;
    }
    let lm = mean.ln();
    let logs: Vec<f64> = (0..=bound as u64)
        .map(|k| k as f64 * lm - ln_factorial(k))
        .collect();
    let z = log_sum_exp(&logs);
    logs.iter().map(|l| (l - z).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
        // continuity across the table edge
        let a = ln_factorial(1023) + 1024f64.ln();
        assert!((ln_factorial(1024) - a).abs() < 1e-9 * a);
        let b = ln_factorial(1024) + 1025f64.ln();
        assert!((ln_factorial(1025) - b).abs() < 1e-9 * b);
    }

    #[test]
    fn binomials() {
        assert!((ln_binomial(10, 3).exp() - 120.0).abs() < 1e-9);
        assert_eq!(ln_binomial(3, -1), f64::NEG_INFINITY);
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn bessel_reference_values() {
        // I_0(1), I_1(1), I_2(5), I_3(50) from standard tables
        let cases = [
            (0, 1.0, 1.266_065_877_752_008),
            (1, 1.0, 0.565_159_103_992_485),
            (2, 5.0, 17.505_614_966_624_236),
            (3, 50.0, 2.677_764_138_883_94e20),
        ];
        for (n, x, want) in cases {
            let got = ln_bessel_i(n, x, 1e-14).unwrap().exp();
            assert!(((got - want) / want).abs() < 1e-12, "I_{n}({x}) = {got}");
        }
    }

    #[test]
    fn bessel_large_argument_is_finite() {
        // I_1(5000) overflows f64; the log does not
        let l = ln_bessel_i(1, 5000.0, 1e-12).unwrap();
        let asym = 5000.0 - 0.5 * (2.0 * std::f64::consts::PI * 5000.0).ln();
        assert!((l - asym).abs() < 1e-3);
    }

    #[test]
    fn erlang_cdf_matches_exponential() {
        for t in [0.1, 1.0, 3.0] {
            assert!((erlang_cdf(1, 2.0, t) - (1.0 - (-2.0 * t).exp())).abs() < 1e-14);
        }
        let t = 1.3;
        let x: f64 = 2.0 * t;
        let want = 1.0 - (-x).exp() * (1.0 + x);
        assert!((erlang_cdf(2, 2.0, t) - want).abs() < 1e-14);
        assert!(erlang_cdf(30, 1.0, 1.0) > 0.0);
        assert!(erlang_cdf(30, 1.0, 1.0) < 1e-30);
    }

    #[test]
    fn truncated_poisson_is_normalised() {
        let v = truncated_poisson(2.5, 4);
        assert_eq!(v.len(), 5);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(v[2] > v[0]);
        assert_eq!(truncated_poisson(0.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
    }
}
