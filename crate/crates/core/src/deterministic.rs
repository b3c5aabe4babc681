//! Deterministic comparator: constant interarrival and service times, the
//! tagged customer's exact system time read off the event timeline.

use crate::engine::{FixedClock, Network, TraceRecord};
use crate::error::{Error, Result};
use crate::model::{ArrivalState, SystemParams};

/// Step budget before the timeline is declared pathological.
pub const MAX_EVENTS: usize = 1_000_000;

/// Full event log of one deterministic run.
#[derive(Debug, Clone)]
pub struct DetTimeline {
    pub wait: f64,
    pub events: Vec<TraceRecord>,
}

pub fn deterministic_wait(s: &ArrivalState, p: &SystemParams) -> Result<f64> {
    run(s, p, false).map(|t| t.wait)
}

pub fn deterministic_timeline(s: &ArrivalState, p: &SystemParams) -> Result<DetTimeline> {
    run(s, p, true)
}

fn run(s: &ArrivalState, p: &SystemParams, trace: bool) -> Result<DetTimeline> {
    let (mut net, id) = Network::from_arrival(FixedClock { params: *p }, s, trace);
    let wait = net
        .run_until_departure(id, MAX_EVENTS)
        .ok_or(Error::NonTermination(MAX_EVENTS))?;
    Ok(DetTimeline {
        wait,
        events: net.take_trace(),
    })
}
