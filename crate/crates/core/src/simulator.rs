//! Monte Carlo simulation of the network with exponential clocks: tagged
//! customer runs from a snapshot, and long steady-state runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::engine::{Clock, Departure, Network, TraceRecord};
use crate::error::{Error, Result};
use crate::model::{ArrivalState, Class, Station, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub replications: usize,
    pub seed: u64,
    /// Departures discarded before steady-state measurement starts.
    pub warmup: u64,
    /// Departures measured in steady-state mode.
    pub horizon: u64,
    pub batches: usize,
    pub parallel: bool,
    /// Event budget per conditional replication.
    pub max_events: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            replications: 800,
            seed: 0x5eed,
            warmup: 10_000,
            horizon: 1_000_000,
            batches: 20,
            parallel: true,
            max_events: 10_000_000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        if self.batches < 2 {
            return Err(Error::InvalidConfig("need at least 2 batches".into()));
        }
        if self.horizon < self.batches as u64 {
            return Err(Error::InvalidConfig(
                "horizon shorter than batch count".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
}

impl SimEstimate {
    fn from_samples(xs: &[f64], seed: u64) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        SimEstimate {
            mean,
            stderr,
            n,
            seed,
        }
    }
}

/// Exponential service and interarrival times drawn from one stream.
pub struct ExpClock {
    rng: ChaCha8Rng,
    params: SystemParams,
}

impl ExpClock {
    /// Stream `stream` of generator `seed`; distinct streams are independent.
    pub fn new(params: SystemParams, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ExpClock { rng, params }
    }

    fn exp(&mut self, rate: f64) -> f64 {
        let e: f64 = self.rng.sample(Exp1);
        e / rate
    }
}

impl Clock for ExpClock {
    fn service(&mut self, class: Class, station: Station) -> f64 {
        self.exp(self.params.mu(class, station))
    }
    fn interarrival(&mut self, class: Class) -> f64 {
        self.exp(self.params.lambda(class))
    }
}

fn one_replication(
    s: &ArrivalState,
    p: &SystemParams,
    c: &SimConfig,
    rep: u64,
    trace: bool,
) -> Result<(f64, Vec<TraceRecord>)> {
    let clock = ExpClock::new(*p, c.seed, rep);
    let (mut net, id) = Network::from_arrival(clock, s, trace);
    let w = net
        .run_until_departure(id, c.max_events)
        .ok_or(Error::NonTermination(c.max_events))?;
    Ok((w, net.take_trace()))
}

/// Mean system time of a tagged customer arriving to the snapshot `s`.
/// Replication `r` uses stream `r` of `c.seed`, so the estimate does not
/// depend on `c.parallel`.
pub fn simulate_conditional(
    s: &ArrivalState,
    p: &SystemParams,
    c: &SimConfig,
) -> Result<SimEstimate> {
    c.validate()?;
    let run = |r: usize| one_replication(s, p, c, r as u64, false).map(|x| x.0);
    let waits: Vec<f64> = if c.parallel {
        (0..c.replications)
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        (0..c.replications).map(run).collect::<Result<_>>()?
    };
    Ok(SimEstimate::from_samples(&waits, c.seed))
}

/// One replication with its full event trace.
pub fn simulate_trace(
    s: &ArrivalState,
    p: &SystemParams,
    c: &SimConfig,
    replication: u64,
) -> Result<(f64, Vec<TraceRecord>)> {
    one_replication(s, p, c, replication, true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateReport {
    /// Batch-means estimate over all measured departures.
    pub all: SimEstimate,
    pub per_class: [f64; 2],
    /// Time-average number in the network over the measurement window.
    pub mean_in_system: f64,
    /// Observed departure rate times mean system time.
    pub little_rhs: f64,
}

impl SteadyStateReport {
    /// Relative gap in Little's law, `|L - lambda W| / L`.
    pub fn little_gap(&self) -> f64 {
        (self.mean_in_system - self.little_rhs).abs() / self.mean_in_system
    }
}

/// Long-run mean system time from an initially empty network.
pub fn simulate_steady_state(p: &SystemParams, c: &SimConfig) -> Result<SteadyStateReport> {
    c.validate()?;
    for st in Station::ALL {
        let rho = p.station_load(st);
        if rho >= 1.0 {
            return Err(Error::UnstableSystem {
                station: st.number() as usize,
                rho,
            });
        }
    }
    let mut net = Network::empty(ExpClock::new(*p, c.seed, u64::MAX));
    let per_batch = c.horizon / c.batches as u64;
    let measured = per_batch * c.batches as u64;
    let mut deps: Vec<Departure> = Vec::new();
    let mut seen = 0u64;
    let mut batch_sums = vec![0.0; c.batches];
    let mut class_sum = [0.0; 2];
    let mut class_n = [0u64; 2];
    let mut area = 0.0;
    let mut t_start = 0.0;
    while seen < c.warmup + measured {
        let n_before = net.in_system() as f64;
        let t0 = net.time();
        deps.clear();
        net.step(&mut deps);
        if seen >= c.warmup {
            area += n_before * (net.time() - t0);
        }
        for d in &deps {
            if seen >= c.warmup && seen < c.warmup + measured {
                let w = d.time - d.customer.entered;
                let k = ((seen - c.warmup) / per_batch) as usize;
                batch_sums[k] += w;
                let ci = d.customer.class.idx();
                class_sum[ci] += w;
                class_n[ci] += 1;
            }
            seen += 1;
            if seen == c.warmup {
                t_start = d.time;
            }
        }
    }
    let span = net.time() - t_start;
    let batch_means: Vec<f64> = batch_sums.iter().map(|s| s / per_batch as f64).collect();
    let mut all = SimEstimate::from_samples(&batch_means, c.seed);
    all.n = measured as usize;
    let per_class = [
        class_sum[0] / class_n[0].max(1) as f64,
        class_sum[1] / class_n[1].max(1) as f64,
    ];
    Ok(SteadyStateReport {
        all,
        per_class,
        mean_in_system: area / span,
        little_rhs: measured as f64 / span * all.mean,
    })
}
