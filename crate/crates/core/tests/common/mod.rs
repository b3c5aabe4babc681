//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's numerical code.

#![allow(dead_code)]

pub mod reference;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn exp(r: &mut ChaCha8Rng, rate: f64) -> f64 {
    let e: f64 = r.sample(Exp1);
    e / rate
}

#[derive(Debug, Clone, Copy)]
pub struct Mc {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Mc {
    pub fn from_sums(sum: f64, sum_sq: f64, n: usize) -> Self {
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0) * n as f64 / (n as f64 - 1.0);
        Mc {
            mean,
            se: (var / n as f64).sqrt(),
            n,
        }
    }

    pub fn within(&self, x: f64, k: f64) -> bool {
        (x - self.mean).abs() <= k * self.se
    }
}

pub fn mc<F: FnMut(&mut ChaCha8Rng) -> f64>(n: usize, seed: u64, mut f: F) -> Mc {
    let mut r = rng(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let x = f(&mut r);
        s += x;
        s2 += x * x;
    }
    Mc::from_sums(s, s2, n)
}

/// Time for an M/M/1 queue holding `l` customers to empty.
pub fn busy_period(r: &mut ChaCha8Rng, l: u32, lambda: f64, mu: f64) -> f64 {
    let mut n = l;
    let mut t = 0.0;
    let total = lambda + mu;
    while n > 0 {
        t += exp(r, total);
        if r.random::<f64>() * total < lambda {
            n += 1;
        } else {
            n -= 1;
        }
    }
    t
}

pub fn erlang(r: &mut ChaCha8Rng, n: u32, mu: f64) -> f64 {
    (0..n).map(|_| exp(r, mu)).sum()
}

/// Tagged customer behind `u` others at station 1, `w` at station 2, no
/// arrivals, FCFS tandem.
pub fn drain_sample(r: &mut ChaCha8Rng, u: u32, w: u32, mu1: f64, mu2: f64) -> f64 {
    let mut free2 = erlang(r, w, mu2);
    let mut d1 = 0.0;
    for _ in 0..=u {
        d1 += exp(r, mu1);
        free2 = free2.max(d1) + exp(r, mu2);
    }
    free2
}

/// `P(K = k)` where station 2 clears `w` customers plus every transfer and
/// each station-1 completion before that transfers one more. Dynamic
/// programming over completion orderings.
pub fn transfer_pmf_dp(k: u32, w: u32, mu1: f64, mu2: f64) -> f64 {
    let p = mu1 / (mu1 + mu2);
    let q = 1.0 - p;
    // prob[t][j]: t transfers so far, j customers left at station 2
    let jmax = (w + k + 1) as usize;
    let mut cur = vec![0.0; jmax + 1];
    cur[w as usize] = 1.0;
    let mut out = 0.0;
    for t in 0..=k {
        // absorb station-2 completions at this transfer count
        let mut next = vec![0.0; jmax + 1];
        let mut level = cur.clone();
        loop {
            let mut moved = false;
            let mut nl = vec![0.0; jmax + 1];
            for j in 1..=jmax {
                let m = level[j];
                if m == 0.0 {
                    continue;
                }
                moved = true;
                if j == 1 {
                    if t == k {
                        out += m * q;
                    }
                } else {
                    nl[j - 1] += m * q;
                }
                if j < jmax {
                    next[j + 1] += m * p;
                }
            }
            level = nl;
            if !moved {
                break;
            }
        }
        cur = next;
    }
    out
}

/// `P(u completions at rate mu1 finish before w at rate mu2)` by
/// recursion over which completion comes next.
pub fn race_dp(u: u32, mu1: f64, w: u32, mu2: f64) -> f64 {
    let p = mu1 / (mu1 + mu2);
    let (u, w) = (u as usize, w as usize);
    // f[a][b]: a still needed at 1, b still needed at 2
    let mut f = vec![vec![0.0; w + 1]; u + 1];
    for a in 0..=u {
        for b in 0..=w {
            f[a][b] = if a == 0 && b > 0 {
                1.0
            } else if b == 0 {
                0.0
            } else {
                p * f[a - 1][b] + (1.0 - p) * f[a][b - 1]
            };
        }
    }
    f[u][w]
}

/// Outcome of one path on the coupled two-station lattice: station 1 fed at
/// `lambda`, transfers at `mu1`, station 2 drains at `mu2`.
pub struct LatticePath {
    /// true if station 2 emptied first.
    pub second_first: bool,
    pub time: f64,
}

pub fn lattice_path(
    r: &mut ChaCha8Rng,
    u: u32,
    w: u32,
    lambda: f64,
    mu1: f64,
    mu2: f64,
) -> LatticePath {
    let (mut i, mut j) = (u, w);
    let mut t = 0.0;
    while i > 0 && j > 0 {
        let total = lambda + mu1 + mu2;
        t += exp(r, total);
        let x = r.random::<f64>() * total;
        if x < lambda {
            i += 1;
        } else if x < lambda + mu1 {
            i -= 1;
            j += 1;
        } else {
            j -= 1;
        }
    }
    LatticePath {
        second_first: j == 0,
        time: t,
    }
}

/// Time to empty station 2 (`target_two`) or station 1 on the lattice with
/// every move into the other station's empty set suppressed.
pub fn lattice_passage_suppressed(
    r: &mut ChaCha8Rng,
    u: u32,
    w: u32,
    lambda: f64,
    mu1: f64,
    mu2: f64,
    target_two: bool,
) -> f64 {
    let (mut i, mut j) = (u as i64, w as i64);
    let mut t = 0.0;
    loop {
        if (target_two && j == 0) || (!target_two && i == 0) {
            return t;
        }
        let a = lambda;
        let b = if i > 0 && !(target_two && i == 1) {
            mu1
        } else {
            0.0
        };
        let c = if j > 0 && !(!target_two && j == 1 && i > 0) {
            mu2
        } else {
            0.0
        };
        let total = a + b + c;
        t += exp(r, total);
        let x = r.random::<f64>() * total;
        if x < a {
            i += 1;
        } else if x < a + b {
            i -= 1;
            j += 1;
        } else {
            j -= 1;
        }
    }
}
