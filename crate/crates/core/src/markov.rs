//! Absorption probabilities and mean first-passage times on the
//! `(station 1, station 2)` queue-length lattice of one customer class.
//!
//! Transitions out of `(i, j)`: an arrival to `(i+1, j)` at rate `lambda`,
//! a station-1 completion to `(i-1, j+1)` at rate `mu1` and a station-2
//! completion to `(i, j-1)` at rate `mu2`. The lattice is cut at `n_max`;
//! any move beyond it lands in an overflow sentinel whose hitting
//! probability is tracked.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::model::TruncationConfig;

/// Which station's emptying ends the passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetStation {
    One,
    Two,
}

/// Destination of one lattice transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dest {
    State(usize, usize),
    Overflow,
}

/// Banded matrix stored by rows, factorised in place without pivoting. The
/// generator systems solved here are M-matrices, for which this is stable.
struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl Banded {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        Banded {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.kl >= r && c <= r + self.ku);
        r * (self.kl + self.ku + 1) + c + self.kl - r
    }

    fn add(&mut self, r: usize, c: usize, v: f64) {
        let i = self.idx(r, c);
        self.data[i] += v;
    }

    fn factor(&mut self) -> Result<()> {
        for k in 0..self.n {
            let piv = self.data[self.idx(k, k)];
            if piv.abs() < 1e-300 || !piv.is_finite() {
                return Err(Error::SingularSystem(k));
            }
            let rmax = (k + self.kl).min(self.n - 1);
            let cmax = (k + self.ku).min(self.n - 1);
            for r in k + 1..=rmax {
                let ir = self.idx(r, k);
                let l = self.data[ir] / piv;
                if l == 0.0 {
                    continue;
                }
                self.data[ir] = l;
                for c in k + 1..=cmax {
                    let kc = self.data[self.idx(k, c)];
                    let rc = self.idx(r, c);
                    self.data[rc] -= l * kc;
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::needless_range_loop)]
    fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for r in 0..n {
            let lo = r.saturating_sub(self.kl);
            let mut s = b[r];
            for c in lo..r {
                s -= self.data[self.idx(r, c)] * b[c];
            }
            b[r] = s;
        }
        for r in (0..n).rev() {
            let hi = (r + self.ku).min(n - 1);
            let mut s = b[r];
            for c in r + 1..=hi {
                s -= self.data[self.idx(r, c)] * b[c];
            }
            b[r] = s / self.data[self.idx(r, r)];
        }
    }
}

/// Rectangular block of unknowns `i_lo..=n, j_lo..=n`, row-major in `i`.
#[derive(Debug, Clone, Copy)]
struct Grid {
    n: usize,
    i_lo: usize,
    j_lo: usize,
}

impl Grid {
    fn width(&self) -> usize {
        self.n - self.j_lo + 1
    }
    fn len(&self) -> usize {
        (self.n - self.i_lo + 1) * self.width()
    }
    fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.i_lo && j >= self.j_lo && i <= self.n && j <= self.n
    }
    fn index(&self, i: usize, j: usize) -> usize {
        (i - self.i_lo) * self.width() + (j - self.j_lo)
    }
}

/// Solved value of some functional over every lattice state, plus the
/// probability of reaching the overflow sentinel first.
#[derive(Debug, Clone)]
struct Field {
    grid: Grid,
    value: Vec<f64>,
    leak: Vec<f64>,
}

/// Truncated lattice for one parameter triple; solutions are computed on
/// first use and kept for the lifetime of the value.
#[derive(Debug)]
pub struct LatticeChain {
    lambda: f64,
    mu1: f64,
    mu2: f64,
    n_max: usize,
    absorption: OnceLock<Result<Field>>,
    mfpt_one: OnceLock<Result<Field>>,
    mfpt_two: OnceLock<Result<Field>>,
}

impl LatticeChain {
    pub fn new(lambda: f64, mu1: f64, mu2: f64, n_max: usize) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::NonPositiveRate {
                name: "lambda",
                value: lambda,
            });
        }
        for (name, v) in [("mu1", mu1), ("mu2", mu2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveRate { name, value: v });
            }
        }
        if n_max < 2 {
            return Err(Error::InvalidConfig(format!("n_max too small: {n_max}")));
        }
        Ok(LatticeChain {
            lambda,
            mu1,
            mu2,
            n_max,
            absorption: OnceLock::new(),
            mfpt_one: OnceLock::new(),
            mfpt_two: OnceLock::new(),
        })
    }

    pub fn rates(&self) -> (f64, f64, f64) {
        (self.lambda, self.mu1, self.mu2)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Outgoing transitions of `(i, j)` in the untruncated-then-cut chain.
    pub fn transitions(&self, i: usize, j: usize) -> Vec<(Dest, f64)> {
        let n = self.n_max;
        let mut out = Vec::with_capacity(3);
        if self.lambda > 0.0 {
            let d = if i >= n {
                Dest::Overflow
            } else {
                Dest::State(i + 1, j)
            };
            out.push((d, self.lambda));
        }
        if i > 0 {
            let d = if j >= n {
                Dest::Overflow
            } else {
                Dest::State(i - 1, j + 1)
            };
            out.push((d, self.mu1));
        }
        if j > 0 {
            out.push((Dest::State(i, j - 1), self.mu2));
        }
        out
    }

    /// Embedded jump-chain probabilities out of `(i, j)`.
    pub fn embedded_row(&self, i: usize, j: usize) -> Vec<(Dest, f64)> {
        let tr = self.transitions(i, j);
        let total: f64 = tr.iter().map(|t| t.1).sum();
        tr.into_iter().map(|(d, r)| (d, r / total)).collect()
    }

    fn absorption_field(&self) -> Result<&Field> {
        self.absorption
            .get_or_init(|| self.solve_absorption())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn mfpt_field(&self, x: TargetStation) -> Result<&Field> {
        let cell = match x {
            TargetStation::One => &self.mfpt_one,
            TargetStation::Two => &self.mfpt_two,
        };
        cell.get_or_init(|| self.solve_mfpt(x))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Probability of reaching `{(k, 0)}` before `{(0, k)}` on the transient
    /// block `i, j >= 1`, with a second right-hand side for the overflow.
    fn solve_absorption(&self) -> Result<Field> {
        let grid = Grid {
            n: self.n_max,
            i_lo: 1,
            j_lo: 1,
        };
        let w = grid.width();
        let mut a = Banded::new(grid.len(), w - 1, w);
        let mut b_val = vec![0.0; grid.len()];
        let mut b_leak = vec![0.0; grid.len()];
        for i in 1..=grid.n {
            for j in 1..=grid.n {
                let r = grid.index(i, j);
                for (d, rate) in self.transitions(i, j) {
                    a.add(r, r, rate);
                    match d {
                        Dest::Overflow => b_leak[r] += rate,
                        Dest::State(_, 0) => b_val[r] += rate,
                        Dest::State(0, _) => {}
                        Dest::State(i2, j2) => a.add(r, grid.index(i2, j2), -rate),
                    }
                }
            }
        }
        a.factor()?;
        a.solve(&mut b_val);
        a.solve(&mut b_leak);
        Ok(Field {
            grid,
            value: b_val,
            leak: b_leak,
        })
    }

    /// Mean time to reach the target station's empty set in the chain with
    /// every transition into the rival empty set removed.
    fn solve_mfpt(&self, x: TargetStation) -> Result<Field> {
        let grid = match x {
            TargetStation::Two => Grid {
                n: self.n_max,
                i_lo: 0,
                j_lo: 1,
            },
            TargetStation::One => Grid {
                n: self.n_max,
                i_lo: 1,
                j_lo: 0,
            },
        };
        let is_target = |i: usize, j: usize| match x {
            TargetStation::Two => j == 0,
            TargetStation::One => i == 0,
        };
        // rival empty set, entered from outside it
        let is_rival_entry = |from: (usize, usize), to: (usize, usize)| match x {
            TargetStation::Two => to.0 == 0 && from.0 > 0 && to.1 > 0,
            TargetStation::One => to.1 == 0 && from.1 > 0 && to.0 > 0,
        };
        let w = grid.width();
        let mut a = Banded::new(grid.len(), w - 1, w);
        let mut b_val = vec![0.0; grid.len()];
        let mut b_leak = vec![0.0; grid.len()];
        for i in grid.i_lo..=grid.n {
            for j in grid.j_lo..=grid.n {
                let r = grid.index(i, j);
                b_val[r] = 1.0;
                let mut out = 0.0;
                for (d, rate) in self.transitions(i, j) {
                    match d {
                        Dest::Overflow => {
                            out += rate;
                            b_leak[r] += rate;
                        }
                        Dest::State(i2, j2) => {
                            if is_rival_entry((i, j), (i2, j2)) {
                                continue;
                            }
                            out += rate;
                            if !is_target(i2, j2) {
                                debug_assert!(grid.contains(i2, j2));
                                a.add(r, grid.index(i2, j2), -rate);
                            }
                        }
                    }
                }
                if out == 0.0 {
                    return Err(Error::SingularSystem(r));
                }
                a.add(r, r, out);
            }
        }
        a.factor()?;
        a.solve(&mut b_val);
        a.solve(&mut b_leak);
        Ok(Field {
            grid,
            value: b_val,
            leak: b_leak,
        })
    }

    fn check(&self, u: usize, w: usize) -> Result<()> {
        if u > self.n_max || w > self.n_max {
            return Err(Error::TruncationTooTight {
                mass: 1.0,
                tol: 0.0,
            });
        }
        Ok(())
    }

    /// `(p1, p2)`: probabilities that station 1 (resp. 2) empties first.
    pub fn absorption(&self, u: usize, w: usize, series_tol: f64) -> Result<(f64, f64)> {
        match (u, w) {
            (0, 0) => return Err(Error::InvalidSupport("both stations already empty".into())),
            (_, 0) => return Ok((0.0, 1.0)),
            (0, _) => return Ok((1.0, 0.0)),
            _ => {}
        }
        self.check(u, w)?;
        let f = self.absorption_field()?;
        let k = f.grid.index(u, w);
        if f.leak[k] > series_tol {
            return Err(Error::TruncationTooTight {
                mass: f.leak[k],
                tol: series_tol,
            });
        }
        let p2 = f.value[k].clamp(0.0, 1.0);
        Ok((1.0 - p2, p2))
    }

    /// Probability of hitting the overflow sentinel before either empty set.
    pub fn absorption_leak(&self, u: usize, w: usize) -> Result<f64> {
        if u == 0 || w == 0 {
            return Ok(0.0);
        }
        self.check(u, w)?;
        let f = self.absorption_field()?;
        Ok(f.leak[f.grid.index(u, w)])
    }

    /// Mean first-passage time from `(u, w)` to the empty set of station `x`.
    pub fn mfpt(&self, u: usize, w: usize, x: TargetStation, series_tol: f64) -> Result<f64> {
        let done = match x {
            TargetStation::Two => w == 0,
            TargetStation::One => u == 0,
        };
        if done {
            return Ok(0.0);
        }
        self.check(u, w)?;
        let f = self.mfpt_field(x)?;
        let k = f.grid.index(u, w);
        if f.leak[k] > series_tol {
            return Err(Error::TruncationTooTight {
                mass: f.leak[k],
                tol: series_tol,
            });
        }
        Ok(f.value[k])
    }
}

/// One-shot `(p1, p2)` for the lattice with the given rates.
pub fn absorption_probs(
    u: usize,
    w: usize,
    lambda: f64,
    mu1: f64,
    mu2: f64,
    trunc: &TruncationConfig,
) -> Result<(f64, f64)> {
    LatticeChain::new(lambda, mu1, mu2, trunc.n_max)?.absorption(u, w, trunc.series_tol)
}

/// One-shot mean first-passage time to the empty set of station `x`.
pub fn mfpt_to_empty(
    u: usize,
    w: usize,
    lambda: f64,
    mu1: f64,
    mu2: f64,
    x: TargetStation,
    trunc: &TruncationConfig,
) -> Result<f64> {
    LatticeChain::new(lambda, mu1, mu2, trunc.n_max)?.mfpt(u, w, x, trunc.series_tol)
}
