//! Sample-path decomposition of the tagged customer's wait.
//!
//! Starting from the snapshot seen on arrival, the engine walks the tree of
//! event sequences (which server empties which queue first), weighting each
//! branch by its race probability and charging it the mean duration of each
//! event. Queue lengths that are only known in expectation are carried as
//! reals and rounded half-up whenever a primitive needs an integer. Counts
//! of services completed during an event are enumerated over their
//! truncated Poisson support, and states that round alike are merged.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::markov::{LatticeChain, TargetStation};
use crate::model::{
    relabel_for_class2, ArrivalState, Class, Scenario, Station, SystemParams, TruncationConfig,
};
use crate::primitives::special::truncated_poisson;
use crate::primitives::{
    drain_wait, hitting_mean, race_busy_period, race_erlang, transfer_count_pmf,
};

/// Branches lighter than this are dropped into the residual.
pub const PRUNE_PROB: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct SubScenarioOutcome {
    /// Event sequence, e.g. `A′≺C′≺F′1≺G≺H`.
    pub label: String,
    pub prob: f64,
    /// Mean wait given this sequence, own services included.
    pub wait: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub outcomes: Vec<SubScenarioOutcome>,
    /// Mass of the unexpanded tail, charged zero wait.
    pub residual_prob: f64,
    pub cond_wait: f64,
}

impl ScenarioReport {
    pub fn total_prob(&self) -> f64 {
        self.outcomes.iter().map(|o| o.prob).sum::<f64>() + self.residual_prob
    }
}

/// Stage of the tree a pending branch is waiting at. The ordering is a
/// topological order of the events inside one repeating block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Phase {
    L,
    J,
    K,
    A,
    C,
    F,
    G,
}

#[derive(Debug, Clone)]
struct Node {
    phase: Phase,
    label: String,
    /// Completed G′ events so far.
    depth: usize,
    prob: f64,
    elapsed: f64,
    /// Customers ahead of the tagged one at station 1.
    a: u32,
    /// Class-1 customers at station 2 while the tagged one is at station 1.
    b: u32,
    /// Customers ahead of the tagged one at station 2.
    c: u32,
    /// Class-1 customers at station 1 other than the tagged one and those
    /// ahead of it.
    q11: f64,
    q21: f64,
    q22: f64,
    /// Duration of J′, still needed by K.
    t_carry: f64,
}

type Key = (Phase, String, u32, u32, u32, u32, u32, u32);

impl Node {
    fn key(&self) -> Key {
        (
            self.phase,
            self.label.clone(),
            self.a,
            self.b,
            self.c,
            round_count(self.q11),
            round_count(self.q21),
            round_count(self.q22),
        )
    }

    fn then(&self, phase: Phase, event: &str, prob: f64, dt: f64) -> Node {
        let mut n = self.clone();
        n.phase = phase;
        n.label = join(&self.label, event);
        n.prob = self.prob * prob;
        n.elapsed = self.elapsed + dt;
        n
    }
}

fn join(label: &str, event: &str) -> String {
    if label.is_empty() {
        event.to_string()
    } else {
        format!("{label}≺{event}")
    }
}

/// Half-up rounding of an expected count, floored at zero.
pub fn round_count(x: f64) -> u32 {
    if x <= 0.0 {
        0
    } else {
        (x + 0.5).floor() as u32
    }
}

/// Accumulates pending branches of one block, merging those that round to
/// the same state.
#[derive(Default)]
struct Frontier {
    map: BTreeMap<Key, Node>,
}

impl Frontier {
    fn push(&mut self, n: Node) {
        match self.map.get_mut(&n.key()) {
            None => {
                self.map.insert(n.key(), n);
            }
            Some(m) => {
                let tot = m.prob + n.prob;
                let (wm, wn) = (m.prob / tot, n.prob / tot);
                m.elapsed = wm * m.elapsed + wn * n.elapsed;
                m.q11 = wm * m.q11 + wn * n.q11;
                m.q21 = wm * m.q21 + wn * n.q21;
                m.q22 = wm * m.q22 + wn * n.q22;
                m.t_carry = wm * m.t_carry + wn * n.t_carry;
                m.prob = tot;
            }
        }
    }

    fn pop(&mut self) -> Option<Node> {
        self.map.pop_first().map(|(_, n)| n)
    }

    fn mass(&self) -> f64 {
        self.map.values().map(|n| n.prob).sum()
    }
}

#[derive(Default)]
struct Leaves {
    order: Vec<String>,
    acc: HashMap<String, (f64, f64)>,
}

impl Leaves {
    fn add(&mut self, label: String, prob: f64, wait: f64) {
        let e = self.acc.entry(label.clone()).or_insert_with(|| {
            self.order.push(label);
            (0.0, 0.0)
        });
        e.0 += prob;
        e.1 += prob * wait;
    }

    fn finish(self) -> Vec<SubScenarioOutcome> {
        self.order
            .into_iter()
            .map(|label| {
                let (p, pw) = self.acc[&label];
                SubScenarioOutcome {
                    wait: if p > 0.0 { pw / p } else { 0.0 },
                    label,
                    prob: p,
                }
            })
            .collect()
    }
}

/// Analytic engine for one parameter set. Holds caches shared by every
/// snapshot analysed with it, so reuse it across a grid.
pub struct Analyzer {
    p: SystemParams,
    trunc: TruncationConfig,
    lattice: LatticeChain,
    races: Mutex<HashMap<(Class, u32, u32), f64>>,
}

impl Analyzer {
    /// `p` must already be labelled so that the tagged class is class 1.
    pub fn new(p: SystemParams, trunc: TruncationConfig) -> Result<Self> {
        trunc.validate()?;
        let lattice = LatticeChain::new(
            p.lambda(Class::Two),
            p.mu(Class::Two, Station::One),
            p.mu(Class::Two, Station::Two),
            trunc.n_max,
        )?;
        Ok(Analyzer {
            p,
            trunc,
            lattice,
            races: Mutex::new(HashMap::new()),
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.p
    }

    fn lam(&self, c: Class) -> f64 {
        self.p.lambda(c)
    }

    fn mu(&self, c: Class, s: Station) -> f64 {
        self.p.mu(c, s)
    }

    /// `P(h(w) < g(u))` where `g` is the busy period of class `busy` at
    /// station 1 and `h` the Erlang clearing time of `w` customers of the
    /// other class at station 2.
    fn race(&self, busy: Class, u: u32, w: u32) -> Result<f64> {
        if let Some(v) = self.races.lock().unwrap().get(&(busy, u, w)) {
            return Ok(*v);
        }
        let v = race_busy_period(
            u,
            self.lam(busy),
            self.mu(busy, Station::One),
            w,
            self.mu(busy.other(), Station::Two),
            self.trunc.t_max_factor,
            self.trunc.quad_tol,
            self.trunc.series_tol,
        )?;
        self.races.lock().unwrap().insert((busy, u, w), v);
        Ok(v)
    }

    fn busy_mean(&self, c: Class, u: u32) -> Result<f64> {
        hitting_mean(u, self.lam(c), self.mu(c, Station::One))
    }

    /// Conditional mean wait of a class-1 tagged customer.
    pub fn analyze(&self, s: &ArrivalState) -> Result<ScenarioReport> {
        if s.tagged != Class::One {
            return Err(Error::InvalidClass(s.tagged.number()));
        }
        let q = s.queues;
        let root = Node {
            phase: match s.scenario {
                Scenario::M1 => Phase::A,
                Scenario::M2 => Phase::C,
                Scenario::M3 => Phase::J,
                Scenario::M4 => Phase::L,
            },
            label: String::new(),
            depth: 0,
            prob: 1.0,
            elapsed: 0.0,
            a: q.l11(),
            b: q.l12(),
            c: 0,
            q11: 0.0,
            q21: q.l21() as f64,
            q22: q.l22() as f64,
            t_carry: 0.0,
        };
        let mut leaves = Leaves::default();
        let mut pruned = 0.0;
        let mut frontier = Frontier::default();
        frontier.push(root);
        let mut depth = 0;
        loop {
            let mut next = Frontier::default();
            while let Some(n) = frontier.pop() {
                for child in self.expand(n, &mut leaves)? {
                    if child.prob < PRUNE_PROB {
                        pruned += child.prob;
                    } else if child.depth > depth {
                        next.push(child);
                    } else {
                        frontier.push(child);
                    }
                }
            }
            let residual = next.mass() + pruned;
            if residual < self.trunc.eps {
                let outcomes = leaves.finish();
                let cond_wait = outcomes.iter().map(|o| o.prob * o.wait).sum();
                return Ok(ScenarioReport {
                    scenario: s.scenario,
                    outcomes,
                    residual_prob: residual,
                    cond_wait,
                });
            }
            depth += 1;
            if depth > self.trunc.max_depth {
                return Err(Error::ThresholdUnreached {
                    residual,
                    eps: self.trunc.eps,
                    depth: self.trunc.max_depth,
                });
            }
            frontier = next;
        }
    }

    fn expand(&self, n: Node, leaves: &mut Leaves) -> Result<Vec<Node>> {
        match n.phase {
            Phase::L => self.event_l(n),
            Phase::J => self.event_j(n),
            Phase::K => self.event_k(n),
            Phase::A => self.event_a(n, leaves),
            Phase::C => self.event_c(n, leaves),
            Phase::F => self.event_f(n, leaves),
            Phase::G => self.event_g(n, leaves),
        }
    }

    /// Both servers on class 2: which of the two class-2 queues empties
    /// first.
    fn event_l(&self, n: Node) -> Result<Vec<Node>> {
        let (u, w) = (round_count(n.q21), round_count(n.q22));
        if w == 0 {
            let mut m = n;
            m.phase = Phase::J;
            return Ok(vec![m]);
        }
        if u == 0 {
            let mut m = n;
            m.phase = Phase::C;
            return Ok(vec![m]);
        }
        let (l2, l1) = (self.lam(Class::Two), self.lam(Class::One));
        let (p1, p2) = self
            .lattice
            .absorption(u as usize, w as usize, self.trunc.series_tol)?;
        let mut out = Vec::new();

        let t = self.lattice.mfpt(
            u as usize,
            w as usize,
            TargetStation::Two,
            self.trunc.series_tol,
        )?;
        let at1 = n.q21 + l2 * t;
        let bound = round_count(at1).saturating_sub(1);
        for (v, pv) in truncated_poisson(self.mu(Class::Two, Station::One) * t, bound)
            .into_iter()
            .enumerate()
        {
            let mut m = n.then(Phase::J, "L", p2 * pv, t);
            m.q11 += l1 * t;
            m.q21 = (at1 - v as f64).max(0.0);
            m.q22 = 0.0;
            out.push(m);
        }

        let t = self.busy_mean(Class::Two, u)?;
        let total = n.q22 + n.q21 + l2 * t;
        let bound = round_count(total).saturating_sub(1);
        for (v, pv) in truncated_poisson(self.mu(Class::Two, Station::Two) * t, bound)
            .into_iter()
            .enumerate()
        {
            let mut m = n.then(Phase::C, "L′", p1 * pv, t);
            m.q11 += l1 * t;
            m.q21 = 0.0;
            m.q22 = (total - v as f64).max(0.0);
            out.push(m);
        }
        Ok(out)
    }

    /// Station 1 on class 2, station 2 on class 1.
    fn event_j(&self, n: Node) -> Result<Vec<Node>> {
        let (u, w) = (round_count(n.q21), n.b);
        if u == 0 {
            let mut m = n;
            m.phase = Phase::A;
            return Ok(vec![m]);
        }
        let (l1, l2) = (self.lam(Class::One), self.lam(Class::Two));
        let mut out = Vec::new();
        let p_jp = if w == 0 {
            1.0
        } else {
            self.race(Class::Two, u, w)?
        };

        if p_jp < 1.0 {
            let t = self.busy_mean(Class::Two, u)?;
            let pv = truncated_poisson(self.mu(Class::One, Station::Two) * t, w - 1);
            for (v, pv) in pv.into_iter().enumerate() {
                let mut m = n.then(Phase::A, "J", (1.0 - p_jp) * pv, t);
                m.b = w - v as u32;
                m.q22 = n.q22 + n.q21 + l2 * t;
                m.q21 = 0.0;
                m.q11 += l1 * t;
                out.push(m);
            }
        }

        if p_jp > 0.0 {
            let t = w as f64 / self.mu(Class::One, Station::Two);
            let at1 = n.q21 + l2 * t;
            let bound = round_count(at1).saturating_sub(1);
            let pv = truncated_poisson(self.mu(Class::Two, Station::One) * t, bound);
            for (v, pv) in pv.into_iter().enumerate() {
                let mut m = n.then(Phase::K, "J′", p_jp * pv, t);
                m.b = 0;
                m.q11 += l1 * t;
                m.q22 = n.q22 + n.q21 + l2 * t;
                m.q21 = (at1 - v as f64).max(0.0);
                m.t_carry = t;
                out.push(m);
            }
        }
        Ok(out)
    }

    /// Station 1 clears class 2 while station 2, with no class 1 left,
    /// serves the transfers. Happens with probability one.
    fn event_k(&self, n: Node) -> Result<Vec<Node>> {
        let u = round_count(n.q21);
        let (l1, l2) = (self.lam(Class::One), self.lam(Class::Two));
        let t = if u == 0 {
            0.0
        } else {
            self.busy_mean(Class::Two, u)?
        };
        // q22 already holds the class-2 customers that left station 1 before
        // K; add those served during K.
        let total = n.q22 + n.q21 + l2 * t;
        let bound = round_count(total).saturating_sub(1);
        let served_for = n.t_carry + t;
        let mut out = Vec::new();
        for (v, pv) in truncated_poisson(self.mu(Class::Two, Station::Two) * served_for, bound)
            .into_iter()
            .enumerate()
        {
            let mut m = n.then(Phase::C, "K", pv, t);
            m.q11 += l1 * t;
            m.q21 = 0.0;
            m.q22 = (total - v as f64).max(0.0);
            m.t_carry = 0.0;
            out.push(m);
        }
        Ok(out)
    }

    /// Both servers on class 1 with the tagged customer at station 1.
    fn event_a(&self, n: Node, leaves: &mut Leaves) -> Result<Vec<Node>> {
        let (a, w) = (n.a, n.b);
        if w == 0 {
            let mut m = n;
            m.phase = Phase::C;
            return Ok(vec![m]);
        }
        let (mu11, mu12) = (
            self.mu(Class::One, Station::One),
            self.mu(Class::One, Station::Two),
        );
        let (l1, l2) = (self.lam(Class::One), self.lam(Class::Two));
        let mut out = Vec::new();
        let mut below = 0.0;
        for k in 0..=a {
            let pk = transfer_count_pmf(k, w, mu11, mu12)?;
            below += pk;
            let t = (w + k) as f64 / mu12;
            let mut m = n.then(Phase::C, "A′", pk, t);
            m.a = a - k;
            m.b = 0;
            m.q11 += l1 * t;
            m.q21 += l2 * t;
            out.push(m);
        }
        let p_b = (1.0 - below).max(0.0);
        let wait = n.elapsed + (a + w + 1) as f64 / mu12;
        leaves.add(join(&n.label, "A≺B"), n.prob * p_b, wait);
        Ok(out)
    }

    /// Station 1 on class 1 (tagged waiting there), station 2 on class 2.
    fn event_c(&self, n: Node, leaves: &mut Leaves) -> Result<Vec<Node>> {
        let (mu11, mu12) = (
            self.mu(Class::One, Station::One),
            self.mu(Class::One, Station::Two),
        );
        let mu22 = self.mu(Class::Two, Station::Two);
        let (l1, l2) = (self.lam(Class::One), self.lam(Class::Two));
        let w = round_count(n.q22);
        let label_d = join(&n.label, "C≺D≺E1");
        if w == 0 {
            let wait = n.elapsed + drain_wait(n.a, n.b, mu11, mu12)?;
            leaves.add(label_d, n.prob, wait);
            return Ok(Vec::new());
        }
        let p_c = race_erlang(w, mu22, n.a + 1, mu11)?;

        if p_c > 0.0 {
            let t = w as f64 / mu22;
            for (v, pv) in truncated_poisson(mu11 * t, n.a).into_iter().enumerate() {
                let v = v as u32;
                let wait = n.elapsed + t + drain_wait(n.a - v, n.b + v, mu11, mu12)?;
                leaves.add(label_d.clone(), n.prob * p_c * pv, wait);
            }
        }

        let mut out = Vec::new();
        if p_c < 1.0 {
            let t = (n.a + 1) as f64 / mu11;
            for (v, pv) in truncated_poisson(mu22 * t, w - 1).into_iter().enumerate() {
                let mut m = n.then(Phase::F, "C′", (1.0 - p_c) * pv, t);
                m.q22 = (w - v as u32) as f64;
                m.c = n.b + n.a;
                m.a = 0;
                m.b = 0;
                m.q11 += l1 * t;
                m.q21 += l2 * t;
                out.push(m);
            }
        }
        Ok(out)
    }

    /// Tagged customer waits at station 2 behind class 2; station 1 works
    /// off the class-1 customers that arrived behind it.
    fn event_f(&self, n: Node, leaves: &mut Leaves) -> Result<Vec<Node>> {
        let mu12 = self.mu(Class::One, Station::Two);
        let mu22 = self.mu(Class::Two, Station::Two);
        let l2 = self.lam(Class::Two);
        let (u, w) = (round_count(n.q11), round_count(n.q22));
        let idx = n.depth + 1;
        let own = (n.c + 1) as f64 / mu12;
        if w == 0 {
            leaves.add(
                join(&n.label, &format!("E{}", idx + 1)),
                n.prob,
                n.elapsed + own,
            );
            return Ok(Vec::new());
        }
        let p_f = if u == 0 {
            0.0
        } else {
            self.race(Class::One, u, w)?
        };
        if p_f > 0.0 {
            let wait = n.elapsed + w as f64 / mu22 + own;
            let label = join(&n.label, &format!("F{idx}≺E{}", idx + 1));
            leaves.add(label, n.prob * p_f, wait);
        }
        let mut out = Vec::new();
        if p_f < 1.0 {
            let t = if u == 0 {
                0.0
            } else {
                self.busy_mean(Class::One, u)?
            };
            for (v, pv) in truncated_poisson(mu22 * t, w - 1).into_iter().enumerate() {
                let mut m = n.then(Phase::G, &format!("F′{idx}"), (1.0 - p_f) * pv, t);
                m.q22 = (w - v as u32) as f64;
                m.q11 = 0.0;
                m.q21 += l2 * t;
                out.push(m);
            }
        }
        Ok(out)
    }

    /// Both servers on class 2, tagged customer at station 2. Either
    /// station 2 empties first (G, then the tagged customer is served) or
    /// station 1 does (G′, and the block repeats).
    fn event_g(&self, n: Node, leaves: &mut Leaves) -> Result<Vec<Node>> {
        let mu12 = self.mu(Class::One, Station::Two);
        let mu22 = self.mu(Class::Two, Station::Two);
        let (l1, l2) = (self.lam(Class::One), self.lam(Class::Two));
        let (u, w) = (round_count(n.q21), round_count(n.q22));
        let own = (n.c + 1) as f64 / mu12;
        if w == 0 {
            leaves.add(join(&n.label, "H"), n.prob, n.elapsed + own);
            return Ok(Vec::new());
        }
        let p_g = if u == 0 {
            1.0
        } else {
            self.lattice
                .absorption(u as usize, w as usize, self.trunc.series_tol)?
                .1
        };
        let t_g = self.lattice.mfpt(
            u as usize,
            w as usize,
            TargetStation::Two,
            self.trunc.series_tol,
        )?;
        leaves.add(join(&n.label, "G≺H"), n.prob * p_g, n.elapsed + t_g + own);

        let mut out = Vec::new();
        if p_g < 1.0 {
            let t = self.busy_mean(Class::Two, u)?;
            let total = n.q22 + n.q21 + l2 * t;
            let bound = round_count(total).saturating_sub(1);
            for (v, pv) in truncated_poisson(mu22 * t, bound).into_iter().enumerate() {
                let mut m = n.then(Phase::F, "G′", (1.0 - p_g) * pv, t);
                m.depth += 1;
                m.q11 += l1 * t;
                m.q21 = 0.0;
                m.q22 = (total - v as f64).max(0.0);
                out.push(m);
            }
        }
        Ok(out)
    }
}

/// Conditional mean wait of the tagged customer in `s`; a class-2 tagged
/// customer is handled by exchanging the class labels.
pub fn analyze(
    s: &ArrivalState,
    p: &SystemParams,
    trunc: &TruncationConfig,
) -> Result<ScenarioReport> {
    let (s, p) = relabel_for_class2(*s, *p);
    Analyzer::new(p, *trunc)?.analyze(&s)
}
