//! Domain types shared by the analytic engine, the simulator and the
//! deterministic comparator.
//!
//! Index conventions follow the queueing literature: the first index of a
//! rate or queue length is the customer class, the second is the station.
//! Class 1 is the tagged class unless [`relabel_for_class2`] has been applied.

use std::fmt;

use crate::error::{Error, Result};

/// Customer class (product type).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    One,
    Two,
}

impl Class {
    pub const ALL: [Class; 2] = [Class::One, Class::Two];

    pub fn idx(self) -> usize {
        match self {
            Class::One => 0,
            Class::Two => 1,
        }
    }

    pub fn other(self) -> Class {
        match self {
            Class::One => Class::Two,
            Class::Two => Class::One,
        }
    }

    pub fn from_number(n: u8) -> Result<Class> {
        match n {
            1 => Ok(Class::One),
            2 => Ok(Class::Two),
            _ => Err(Error::InvalidClass(n)),
        }
    }

    pub fn number(self) -> u8 {
        self.idx() as u8 + 1
    }
}

/// Station in the tandem line. Station 1 receives the external arrivals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Station {
    One,
    Two,
}

impl Station {
    pub const ALL: [Station; 2] = [Station::One, Station::Two];

    pub fn idx(self) -> usize {
        match self {
            Station::One => 0,
            Station::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.idx() as u8 + 1
    }
}

/// Validated arrival and service rates of the network.
///
/// Construct with [`SystemParams::new`]; the constructor rejects
/// non-positive rates and any station with load `rho_j >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    lambda: [f64; 2],
    mu: [[f64; 2]; 2],
    tau: [[f64; 2]; 2],
    rho: [[f64; 2]; 2],
    station_rho: [f64; 2],
}

impl SystemParams {
    /// `lambda[i]` is the class-`i` arrival rate; `mu[i][j]` the service rate
    /// of class `i` at station `j` (zero-based indices).
    pub fn new(lambda: [f64; 2], mu: [[f64; 2]; 2]) -> Result<Self> {
        const LAMBDA_NAMES: [&str; 2] = ["lambda1", "lambda2"];
        const MU_NAMES: [[&str; 2]; 2] = [["mu11", "mu12"], ["mu21", "mu22"]];
        for (i, &l) in lambda.iter().enumerate() {
            check_rate(LAMBDA_NAMES[i], l)?;
        }
        for i in 0..2 {
            for j in 0..2 {
                check_rate(MU_NAMES[i][j], mu[i][j])?;
            }
        }
        let mut tau = [[0.0; 2]; 2];
        let mut rho = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                tau[i][j] = 1.0 / mu[i][j];
                rho[i][j] = lambda[i] * tau[i][j];
            }
        }
        let station_rho = [rho[0][0] + rho[1][0], rho[0][1] + rho[1][1]];
        for (j, &r) in station_rho.iter().enumerate() {
            if r >= 1.0 {
                return Err(Error::UnstableSystem {
                    station: j + 1,
                    rho: r,
                });
            }
        }
        Ok(SystemParams {
            lambda,
            mu,
            tau,
            rho,
            station_rho,
        })
    }

    /// Same arrival rate for both classes and one service rate per station.
    pub fn station_rates(lambda: f64, mu_station1: f64, mu_station2: f64) -> Result<Self> {
        Self::new(
            [lambda, lambda],
            [[mu_station1, mu_station2], [mu_station1, mu_station2]],
        )
    }

    pub fn lambda(&self, class: Class) -> f64 {
        self.lambda[class.idx()]
    }

    pub fn mu(&self, class: Class, station: Station) -> f64 {
        self.mu[class.idx()][station.idx()]
    }

    pub fn tau(&self, class: Class, station: Station) -> f64 {
        self.tau[class.idx()][station.idx()]
    }

    pub fn rho(&self, class: Class, station: Station) -> f64 {
        self.rho[class.idx()][station.idx()]
    }

    pub fn station_load(&self, station: Station) -> f64 {
        self.station_rho[station.idx()]
    }

    pub fn lambdas(&self) -> [f64; 2] {
        self.lambda
    }

    pub fn mus(&self) -> [[f64; 2]; 2] {
        self.mu
    }

    /// Multiply every rate by `c`, which divides every time scale by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut mu = self.mu;
        for row in mu.iter_mut() {
            for m in row.iter_mut() {
                *m *= c;
            }
        }
        Self::new([self.lambda[0] * c, self.lambda[1] * c], mu)
    }

    /// Swap the roles of the two classes.
    pub fn swapped_classes(&self) -> Self {
        Self::new([self.lambda[1], self.lambda[0]], [self.mu[1], self.mu[0]])
            .expect("swapping classes preserves validity")
    }
}

fn check_rate(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRate { name, value })
    }
}

/// Re-run validation on an existing parameter set. Idempotent.
pub fn validate_params(p: &SystemParams) -> Result<SystemParams> {
    SystemParams::new(p.lambda, p.mu)
}

/// Queue lengths `(L11, L21, L12, L22)` seen by the tagged customer, i.e.
/// `[class1@st1, class2@st1, class1@st2, class2@st2]`. Customers in service
/// are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QueueLengths(pub [u32; 4]);

impl QueueLengths {
    pub fn new(l11: u32, l21: u32, l12: u32, l22: u32) -> Self {
        QueueLengths([l11, l21, l12, l22])
    }

    pub fn get(&self, class: Class, station: Station) -> u32 {
        self.0[class.idx() + 2 * station.idx()]
    }

    pub fn l11(&self) -> u32 {
        self.0[0]
    }
    pub fn l21(&self) -> u32 {
        self.0[1]
    }
    pub fn l12(&self) -> u32 {
        self.0[2]
    }
    pub fn l22(&self) -> u32 {
        self.0[3]
    }

    pub fn swapped_classes(&self) -> Self {
        let [l11, l21, l12, l22] = self.0;
        QueueLengths([l21, l11, l22, l12])
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&l| l == 0)
    }
}

impl fmt::Display for QueueLengths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

/// Server positions at the tagged arrival, stored as the scenario index
/// `m`: 1 = (1,1), 2 = (1,2), 3 = (2,1), 4 = (2,2) where the pair lists the
/// queue served at station 1 and station 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    M1,
    M2,
    M3,
    M4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::M1, Scenario::M2, Scenario::M3, Scenario::M4];

    pub fn from_index(m: u8) -> Result<Self> {
        match m {
            1 => Ok(Scenario::M1),
            2 => Ok(Scenario::M2),
            3 => Ok(Scenario::M3),
            4 => Ok(Scenario::M4),
            _ => Err(Error::InvalidScenario(m)),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Scenario::M1 => 1,
            Scenario::M2 => 2,
            Scenario::M3 => 3,
            Scenario::M4 => 4,
        }
    }

    /// Queue being served at `(station 1, station 2)`.
    pub fn servers(self) -> (Class, Class) {
        match self {
            Scenario::M1 => (Class::One, Class::One),
            Scenario::M2 => (Class::One, Class::Two),
            Scenario::M3 => (Class::Two, Class::One),
            Scenario::M4 => (Class::Two, Class::Two),
        }
    }

    pub fn served_at(self, station: Station) -> Class {
        let (s1, s2) = self.servers();
        match station {
            Station::One => s1,
            Station::Two => s2,
        }
    }

    pub fn from_servers(s1: Class, s2: Class) -> Self {
        match (s1, s2) {
            (Class::One, Class::One) => Scenario::M1,
            (Class::One, Class::Two) => Scenario::M2,
            (Class::Two, Class::One) => Scenario::M3,
            (Class::Two, Class::Two) => Scenario::M4,
        }
    }

    /// Scenario after exchanging the class labels: 1<->4, 2<->3.
    pub fn swapped_classes(self) -> Self {
        let (s1, s2) = self.servers();
        Self::from_servers(s1.other(), s2.other())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}", self.index())
    }
}

/// What the tagged customer sees on arrival.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArrivalState {
    pub queues: QueueLengths,
    pub scenario: Scenario,
    pub tagged: Class,
}

impl ArrivalState {
    pub fn new(queues: QueueLengths, scenario: Scenario, tagged: Class) -> Self {
        ArrivalState {
            queues,
            scenario,
            tagged,
        }
    }

    /// Tagged customer of class 1.
    pub fn class1(queues: QueueLengths, scenario: Scenario) -> Self {
        Self::new(queues, scenario, Class::One)
    }
}

/// Exchange the class labels of a class-2 problem so that it can be analysed
/// as a class-1 problem. Problems whose tagged class is already 1 are
/// returned unchanged.
pub fn relabel_for_class2(s: ArrivalState, p: SystemParams) -> (ArrivalState, SystemParams) {
    match s.tagged {
        Class::One => (s, p),
        Class::Two => (swap_labels(s), p.swapped_classes()),
    }
}

/// Unconditional label exchange; applying it twice is the identity.
pub fn swap_labels(s: ArrivalState) -> ArrivalState {
    ArrivalState {
        queues: s.queues.swapped_classes(),
        scenario: s.scenario.swapped_classes(),
        tagged: s.tagged.other(),
    }
}

/// Numerical knobs of the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    /// Largest queue length per coordinate of the truncated lattice.
    pub n_max: usize,
    /// Residual probability below which the sub-scenario tree stops growing.
    pub eps: f64,
    /// Relative tail bound for series and allowed lattice leakage.
    pub series_tol: f64,
    /// Absolute quadrature tolerance.
    pub quad_tol: f64,
    /// Initial integration horizon as a multiple of the larger mean.
    pub t_max_factor: f64,
    /// Maximum number of repeating blocks in the sub-scenario tree.
    pub max_depth: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig {
            n_max: 80,
            eps: 1e-3,
            series_tol: 1e-10,
            quad_tol: 1e-8,
            t_max_factor: 50.0,
            max_depth: 50,
        }
    }
}

impl TruncationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 10 {
            return Err(Error::InvalidConfig(format!(
                "n_max must be at least 10, got {}",
                self.n_max
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eps must lie in (0, 1), got {}",
                self.eps
            )));
        }
        for (name, v) in [("series_tol", self.series_tol), ("quad_tol", self.quad_tol)] {
            if !(v > 0.0 && v <= 1e-4) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in (0, 1e-4], got {v}"
                )));
            }
        }
        if !(self.t_max_factor.is_finite() && self.t_max_factor > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_max_factor must be positive, got {}",
                self.t_max_factor
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidConfig("max_depth must be positive".into()));
        }
        Ok(())
    }
}
