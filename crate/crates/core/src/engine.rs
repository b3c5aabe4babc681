//! Event engine shared by the stochastic simulator and the deterministic
//! comparator. Servers poll exhaustively and cyclically with no switchover
//! time; the source of service and interarrival times is a [`Clock`].

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::model::{ArrivalState, Class, Station, SystemParams};

/// Events closer together than this are treated as simultaneous.
pub const TIE_EPS: f64 = 1e-9;

/// Source of durations.
pub trait Clock {
    fn service(&mut self, class: Class, station: Station) -> f64;
    fn interarrival(&mut self, class: Class) -> f64;
    fn first_arrival(&mut self, class: Class) -> f64 {
        self.interarrival(class)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Customer {
    pub id: u64,
    pub class: Class,
    pub entered: f64,
    pub tagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrival,
    Start,
    Completion,
}

/// One line of an optional event trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time: f64,
    pub kind: EventKind,
    pub station: Station,
    pub class: Class,
    pub customer: u64,
    /// `[L11, L21, L12, L22]` after the event.
    pub queues: [u32; 4],
}

/// Departure from station 2.
#[derive(Debug, Clone, Copy)]
pub struct Departure {
    pub time: f64,
    pub customer: Customer,
}

pub struct Network<C: Clock> {
    clock: C,
    time: f64,
    // [station][class]
    queues: [[VecDeque<Customer>; 2]; 2],
    polled: [Class; 2],
    busy_until: [Option<f64>; 2],
    next_arrival: [f64; 2],
    next_id: u64,
    trace: Option<Vec<TraceRecord>>,
}

impl<C: Clock> Network<C> {
    /// Empty network, both servers polled at queue 1.
    pub fn empty(clock: C) -> Self {
        let mut n = Network {
            clock,
            time: 0.0,
            queues: Default::default(),
            polled: [Class::One, Class::One],
            busy_until: [None, None],
            next_arrival: [0.0; 2],
            next_id: 0,
            trace: None,
        };
        for c in Class::ALL {
            n.next_arrival[c.idx()] = n.clock.first_arrival(c);
        }
        n
    }

    /// Network as seen by a tagged customer arriving at time 0. Returns the
    /// tagged customer's id alongside.
    pub fn from_arrival(clock: C, s: &ArrivalState, trace: bool) -> (Self, u64) {
        let mut n = Network::empty(clock);
        if trace {
            n.trace = Some(Vec::new());
        }
        let (s1, s2) = s.scenario.servers();
        n.polled = [s1, s2];
        for st in Station::ALL {
            for c in Class::ALL {
                for _ in 0..s.queues.get(c, st) {
                    let cust = n.new_customer(c, 0.0, false);
                    n.queues[st.idx()][c.idx()].push_back(cust);
                }
            }
        }
        let tagged = n.new_customer(s.tagged, 0.0, true);
        n.queues[0][s.tagged.idx()].push_back(tagged);
        n.dispatch();
        (n, tagged.id)
    }

    fn new_customer(&mut self, class: Class, entered: f64, tagged: bool) -> Customer {
        let c = Customer {
            id: self.next_id,
            class,
            entered,
            tagged,
        };
        self.next_id += 1;
        c
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn polled(&self) -> [Class; 2] {
        self.polled
    }

    pub fn is_busy(&self, st: Station) -> bool {
        self.busy_until[st.idx()].is_some()
    }

    pub fn queue_lengths(&self) -> [u32; 4] {
        [
            self.queues[0][0].len() as u32,
            self.queues[0][1].len() as u32,
            self.queues[1][0].len() as u32,
            self.queues[1][1].len() as u32,
        ]
    }

    pub fn in_system(&self) -> usize {
        self.queues.iter().flatten().map(|q| q.len()).sum()
    }

    pub fn take_trace(&mut self) -> Vec<TraceRecord> {
        self.trace.take().unwrap_or_default()
    }

    fn record(&mut self, kind: EventKind, station: Station, cust: &Customer) {
        if let Some(tr) = self.trace.as_mut() {
            let q = &self.queues;
            tr.push(TraceRecord {
                time: self.time,
                kind,
                station,
                class: cust.class,
                customer: cust.id,
                queues: [&q[0][0], &q[0][1], &q[1][0], &q[1][1]].map(|x| x.len() as u32),
            });
        }
    }

    fn start(&mut self, st: Station) {
        let class = self.polled[st.idx()];
        let head = *self.queues[st.idx()][class.idx()]
            .front()
            .expect("start on empty queue");
        let d = self.clock.service(class, st);
        self.busy_until[st.idx()] = Some(self.time + d);
        self.record(EventKind::Start, st, &head);
    }

    /// Idle servers continue the polled queue, else switch to the other one,
    /// else stay idle where they are.
    fn dispatch(&mut self) {
        for st in Station::ALL {
            if self.busy_until[st.idx()].is_some() {
                continue;
            }
            let cur = self.polled[st.idx()];
            if !self.queues[st.idx()][cur.idx()].is_empty() {
                self.start(st);
            } else if !self.queues[st.idx()][cur.other().idx()].is_empty() {
                self.polled[st.idx()] = cur.other();
                self.start(st);
            }
        }
    }

    fn complete(&mut self, st: Station) -> Option<Departure> {
        let class = self.polled[st.idx()];
        let cust = self.queues[st.idx()][class.idx()]
            .pop_front()
            .expect("completion on empty queue");
        self.busy_until[st.idx()] = None;
        match st {
            Station::One => {
                self.queues[1][class.idx()].push_back(cust);
                self.record(EventKind::Completion, st, &cust);
                None
            }
            Station::Two => {
                self.record(EventKind::Completion, st, &cust);
                Some(Departure {
                    time: self.time,
                    customer: cust,
                })
            }
        }
    }

    fn arrive(&mut self, class: Class) {
        let at = self.next_arrival[class.idx()];
        let cust = self.new_customer(class, self.time, false);
        self.queues[0][class.idx()].push_back(cust);
        self.next_arrival[class.idx()] = at + self.clock.interarrival(class);
        self.record(EventKind::Arrival, Station::One, &cust);
    }

    /// Advance to the next event time, apply every event due within
    /// [`TIE_EPS`] (station-2 completion, station-1 completion, class-1
    /// arrival, class-2 arrival) and only then let idle servers choose.
    pub fn step(&mut self, departures: &mut Vec<Departure>) {
        let mut t = self.next_arrival[0].min(self.next_arrival[1]);
        for b in self.busy_until.iter().flatten() {
            t = t.min(*b);
        }
        self.time = t;
        let due = |x: f64| x <= t + TIE_EPS;
        if self.busy_until[1].is_some_and(due) {
            if let Some(d) = self.complete(Station::Two) {
                departures.push(d);
            }
        }
        if self.busy_until[0].is_some_and(due) {
            self.complete(Station::One);
        }
        for c in Class::ALL {
            if due(self.next_arrival[c.idx()]) {
                self.arrive(c);
            }
        }
        self.dispatch();
    }

    /// Run until the customer `id` leaves station 2; `None` if `max_events`
    /// steps pass first.
    pub fn run_until_departure(&mut self, id: u64, max_events: usize) -> Option<f64> {
        let mut deps = Vec::new();
        for _ in 0..max_events {
            deps.clear();
            self.step(&mut deps);
            if let Some(d) = deps.iter().find(|d| d.customer.id == id) {
                return Some(d.time - d.customer.entered);
            }
        }
        None
    }
}

/// Render a trace as tab-separated text:
/// `time kind station class customer L11 L21 L12 L22`.
pub fn format_trace(records: &[TraceRecord]) -> String {
    let mut out = String::from("time\tkind\tstation\tclass\tcustomer\tL11\tL21\tL12\tL22\n");
    for r in records {
        let kind = match r.kind {
            EventKind::Arrival => "arrival",
            EventKind::Start => "start",
            EventKind::Completion => "completion",
        };
        let [a, b, c, d] = r.queues;
        let _ = writeln!(
            out,
            "{:.9}\t{kind}\t{}\t{}\t{}\t{a}\t{b}\t{c}\t{d}",
            r.time,
            r.station.number(),
            r.class.number(),
            r.customer
        );
    }
    out
}

/// Deterministic durations: every service takes exactly its mean and every
/// interarrival time is exactly `1/lambda`, the first arrival included.
#[derive(Debug, Clone, Copy)]
pub struct FixedClock {
    pub params: SystemParams,
}

impl Clock for FixedClock {
    fn service(&mut self, class: Class, station: Station) -> f64 {
        self.params.tau(class, station)
    }
    fn interarrival(&mut self, class: Class) -> f64 {
        1.0 / self.params.lambda(class)
    }
}
