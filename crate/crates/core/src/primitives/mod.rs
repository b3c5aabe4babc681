//! Probabilistic building blocks: busy-period hitting times, Erlang races,
//! transfer counts between two exhaustive servers and the two-station drain.

pub mod quad;
pub mod special;

use crate::error::{Error, Result};
use special::{erlang_cdf, ln_bessel_core, ln_binomial, ln_factorial, log_sum_exp};

/// Largest number of subintervals a single adaptive integration may use.
pub const MAX_INTERVALS: usize = 2000;

/// Time for an M/M/1 queue holding `l` customers to first become empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingTimeDist {
    pub l: u32,
    pub lambda: f64,
    pub mu: f64,
}

impl HittingTimeDist {
    pub fn new(l: u32, lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::NonPositiveRate {
                name: "lambda",
                value: lambda,
            });
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::NonPositiveRate {
                name: "mu",
                value: mu,
            });
        }
        if lambda >= mu {
            return Err(Error::UnstableQueue { lambda, mu });
        }
        Ok(HittingTimeDist { l, lambda, mu })
    }

    pub fn mean(&self) -> f64 {
        self.l as f64 / (self.mu - self.lambda)
    }

    /// Natural log of the density at `t > 0`.
    pub fn ln_pdf(&self, t: f64, series_tol: f64) -> Result<f64> {
        if t <= 0.0 {
            return Err(Error::InvalidSupport(format!(
                "hitting-time density needs t > 0, got {t}"
            )));
        }
        if self.l == 0 {
            return Ok(f64::NEG_INFINITY);
        }
        let l = self.l as f64;
        // (mu/lambda)^{L/2} I_L(2 t sqrt(lambda mu)) = (mu t)^L * core(lambda mu t^2)
        let ln_y = if self.lambda > 0.0 {
            (self.lambda * self.mu).ln() + 2.0 * t.ln()
        } else {
            f64::NEG_INFINITY
        };
        let core = ln_bessel_core(self.l, ln_y, series_tol).ok_or_else(|| {
            Error::SeriesOverflow(format!(
                "Bessel series for L={}, t={t} did not converge",
                self.l
            ))
        })?;
        Ok(l.ln() - t.ln() - (self.lambda + self.mu) * t + l * (self.mu * t).ln() + core)
    }

    pub fn pdf(&self, t: f64, series_tol: f64) -> Result<f64> {
        Ok(self.ln_pdf(t, series_tol)?.exp())
    }
}

/// Sum of `n` independent exponential(`mu`) times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErlangDist {
    pub n: u32,
    pub mu: f64,
}

impl ErlangDist {
    pub fn new(n: u32, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::NonPositiveRate {
                name: "mu",
                value: mu,
            });
        }
        Ok(ErlangDist { n, mu })
    }

    pub fn mean(&self) -> f64 {
        self.n as f64 / self.mu
    }

    pub fn cdf(&self, t: f64) -> f64 {
        erlang_cdf(self.n, self.mu, t)
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if self.n == 0 || t <= 0.0 {
            return 0.0;
        }
        let n = self.n as u64;
        (self.mu.ln() + (n - 1) as f64 * (self.mu * t).ln() - self.mu * t - ln_factorial(n - 1))
            .exp()
    }
}

/// Mean time for an M/M/1 queue with `l` customers to empty.
pub fn hitting_mean(l: u32, lambda: f64, mu: f64) -> Result<f64> {
    Ok(HittingTimeDist::new(l, lambda, mu)?.mean())
}

/// Density of the hitting time at `t`.
pub fn hitting_pdf(d: &HittingTimeDist, t: f64, series_tol: f64) -> Result<f64> {
    d.pdf(t, series_tol)
}

/// Probability that exactly `k` customers complete at the upstream server
/// while the downstream server exhaustively clears its `w` initial customers
/// plus those `k` transfers.
///
/// The upstream queue is assumed never to run dry, so the total mass over
/// `k` is `min(1, (mu2/mu1)^w)`.
pub fn transfer_count_pmf(k: u32, w: u32, mu1: f64, mu2: f64) -> Result<f64> {
    Ok(ln_transfer_count_pmf(k, w, mu1, mu2)?.exp())
}

pub fn ln_transfer_count_pmf(k: u32, w: u32, mu1: f64, mu2: f64) -> Result<f64> {
    if w == 0 {
        return Err(Error::InvalidSupport(
            "transfer count needs at least one downstream customer (w >= 1)".into(),
        ));
    }
    check_pos("mu1", mu1)?;
    check_pos("mu2", mu2)?;
    let s = mu1 + mu2;
    let (lp, lq) = ((mu1 / s).ln(), (mu2 / s).ln());
    let (k, w) = (k as i64, w as i64);
    // C(n,k) - C(n,k-1) = C(n,k) * w / (k + w) with n = 2k + w - 1
    Ok(k as f64 * lp
        + (w + k) as f64 * lq
        + ln_binomial(2 * k + w - 1, k)
        + ((w as f64) / ((k + w) as f64)).ln())
}

/// Mean time until a tagged customer with `u` customers ahead at station 1
/// and `w` customers at station 2 leaves station 2, with no arrivals. Both
/// of its own service times are included, so `drain_wait(0, 0)` is
/// `1/mu1 + 1/mu2`.
pub fn drain_wait(u: u32, w: u32, mu1: f64, mu2: f64) -> Result<f64> {
    check_pos("mu1", mu1)?;
    check_pos("mu2", mu2)?;
    let p = mu1 / (mu1 + mu2);
    let q = 1.0 - p;
    let (u, w) = (u as usize, w as usize);
    // row r holds W(r, 0..=w + u - r)
    let mut prev: Vec<f64> = Vec::new();
    for r in 0..=u {
        let width = w + u - r;
        let mut row = vec![0.0; width + 1];
        for c in 0..=width {
            row[c] = match (r, c) {
                (0, 0) => 1.0 / mu1 + 1.0 / mu2,
                (0, c) => p * (1.0 / mu1 + (c as f64 + 1.0) / mu2) + q * row[c - 1],
                (_, 0) => 1.0 / mu1 + prev[1],
                (_, c) => p * (1.0 / mu1 + prev[c + 1]) + q * row[c - 1],
            };
        }
        prev = row;
    }
    Ok(prev[w])
}

/// `P(h1(u) < h2(w))` for independent Erlang(`u`, `mu1`) and
/// Erlang(`w`, `mu2`). `w = 0` gives 0, otherwise `u = 0` gives 1.
pub fn race_erlang(u: u32, mu1: f64, w: u32, mu2: f64) -> Result<f64> {
    check_pos("mu1", mu1)?;
    check_pos("mu2", mu2)?;
    if w == 0 {
        return Ok(0.0);
    }
    if u == 0 {
        return Ok(1.0);
    }
    let s = mu1 + mu2;
    let (lp, lq) = ((mu1 / s).ln(), (mu2 / s).ln());
    let terms: Vec<f64> = (0..u as i64)
        .map(|r| r as f64 * lp + w as f64 * lq + ln_binomial(r + w as i64 - 1, r))
        .collect();
    let below = log_sum_exp(&terms).exp();
    Ok((1.0 - below).clamp(0.0, 1.0))
}

/// `P(h(w) < g(u))`: station 2 clears `w` customers at rate `mu2` before an
/// M/M/1 station 1 (arrival rate `lambda1`, service rate `mu1`) holding `u`
/// customers first empties.
#[allow(clippy::too_many_arguments)]
pub fn race_busy_period(
    u: u32,
    lambda1: f64,
    mu1: f64,
    w: u32,
    mu2: f64,
    t_max_factor: f64,
    quad_tol: f64,
    series_tol: f64,
) -> Result<f64> {
    check_pos("mu2", mu2)?;
    let g = HittingTimeDist::new(u, lambda1, mu1)?;
    if w == 0 {
        return Ok(1.0);
    }
    if u == 0 {
        return Ok(0.0);
    }
    let h = ErlangDist::new(w, mu2)?;
    let integrand = |t: f64| -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match g.ln_pdf(t, series_tol) {
            Ok(lf) => h.cdf(t) * lf.exp(),
            Err(_) => f64::NAN,
        }
    };
    let mut upper = t_max_factor * g.mean().max(h.mean());
    let mut total = 0.0;
    let mut total_err = 0.0;
    let first = integrate_checked(&integrand, 0.0, upper, 0.5 * quad_tol)?;
    total += first.0;
    total_err += first.1;
    // keep doubling until a segment contributes negligibly
    let mut budget = quad_tol * 0.5;
    for _ in 0..60 {
        budget *= 0.5;
        let (v, e) = integrate_checked(&integrand, upper, 2.0 * upper, budget)?;
        total += v;
        total_err += e;
        upper *= 2.0;
        if v < quad_tol / 10.0 {
            break;
        }
    }
    if !total.is_finite() {
        return Err(Error::SeriesOverflow(
            "non-finite density inside race_busy_period".into(),
        ));
    }
    if total_err > quad_tol {
        return Err(Error::QuadratureFailure {
            tol: quad_tol,
            err: total_err,
        });
    }
    Ok(total.clamp(0.0, 1.0))
}

fn integrate_checked<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    match quad::integrate(f, a, b, tol, MAX_INTERVALS) {
        Ok(r) if r.value.is_finite() => Ok((r.value, r.abs_err)),
        Ok(r) | Err(r) => Err(Error::QuadratureFailure {
            tol,
            err: if r.abs_err.is_finite() {
                r.abs_err
            } else {
                f64::INFINITY
            },
        }),
    }
}

fn check_pos(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveRate { name, value: v })
    }
}
