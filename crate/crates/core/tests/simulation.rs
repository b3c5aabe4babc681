mod common;

use std::collections::VecDeque;

use common::reference::{CASES, SYM_070};
use proptest::prelude::*;
use tandem_polling::deterministic::{deterministic_timeline, deterministic_wait};
use tandem_polling::engine::{EventKind, TraceRecord};
use tandem_polling::model::{
    ArrivalState, Class, QueueLengths, Scenario, Station, SystemParams, TruncationConfig,
};
use tandem_polling::scenario::Analyzer;
use tandem_polling::simulator::{simulate_conditional, simulate_trace, SimConfig};

/// Replays a trace from the snapshot and checks the service discipline.
fn check_trace(s: &ArrivalState, trace: &[TraceRecord]) -> Result<(), String> {
    // [station][class] queues of customer ids, in-service customer first
    let mut q: [[VecDeque<u64>; 2]; 2] = Default::default();
    let mut id = 0u64;
    for st in Station::ALL {
        for c in Class::ALL {
            for _ in 0..s.queues.get(c, st) {
                q[st.idx()][c.idx()].push_back(id);
                id += 1;
            }
        }
    }
    q[0][s.tagged.idx()].push_back(id);
    let (s1, s2) = s.scenario.servers();
    let mut polled = [s1, s2];
    let mut serving: [Option<u64>; 2] = [None, None];
    let mut last_t = 0.0;

    let conserving = |q: &[[VecDeque<u64>; 2]; 2], serving: &[Option<u64>; 2]| {
        for st in 0..2 {
            let waiting = q[st][0].len() + q[st][1].len();
            if waiting > 0 && serving[st].is_none() {
                return Err(format!("station {} idle with {waiting} present", st + 1));
            }
        }
        Ok(())
    };

    for (k, r) in trace.iter().enumerate() {
        if r.time < last_t {
            return Err(format!("time went back at record {k}"));
        }
        if r.time > last_t {
            conserving(&q, &serving)?;
            last_t = r.time;
        }
        let (st, c) = (r.station.idx(), r.class.idx());
        match r.kind {
            EventKind::Arrival => {
                if r.station != Station::One {
                    return Err("arrival at station 2".into());
                }
                q[0][c].push_back(r.customer);
            }
            EventKind::Start => {
                if serving[st].is_some() {
                    return Err(format!("station {} started twice", st + 1));
                }
                if polled[st] != r.class && !q[st][polled[st].idx()].is_empty() {
                    return Err(format!("station {} left a nonempty queue", st + 1));
                }
                if q[st][c].front() != Some(&r.customer) {
                    return Err(format!("record {k}: not the head of its queue"));
                }
                polled[st] = r.class;
                serving[st] = Some(r.customer);
            }
            EventKind::Completion => {
                if serving[st] != Some(r.customer) {
                    return Err(format!(
                        "record {k}: completion of a customer not in service"
                    ));
                }
                serving[st] = None;
                q[st][c].pop_front();
                if st == 0 {
                    q[1][c].push_back(r.customer);
                }
            }
        }
        let lens = [q[0][0].len(), q[0][1].len(), q[1][0].len(), q[1][1].len()];
        if lens.map(|x| x as u32) != r.queues {
            return Err(format!(
                "record {k}: queue lengths {:?} vs {lens:?}",
                r.queues
            ));
        }
    }
    conserving(&q, &serving)
}

fn arb_state() -> impl Strategy<Value = ArrivalState> {
    (prop::array::uniform4(0u32..=5), 1u8..=4, 1u8..=2).prop_map(|(q, m, c)| {
        ArrivalState::new(
            QueueLengths(q),
            Scenario::from_index(m).unwrap(),
            Class::from_number(c).unwrap(),
        )
    })
}

fn arb_params() -> impl Strategy<Value = SystemParams> {
    (0.5f64..1.0, 0.5f64..1.0, prop::array::uniform4(2.2f64..4.0))
        .prop_map(|(l1, l2, m)| SystemParams::new([l1, l2], [[m[0], m[1]], [m[2], m[3]]]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simulated_traces_follow_the_discipline(s in arb_state(), p in arb_params(), seed in any::<u64>(), rep in 0u64..1000) {
        let cfg = SimConfig { seed, ..SimConfig::default() };
        let (w, tr) = simulate_trace(&s, &p, &cfg, rep).unwrap();
        prop_assert!(w > 0.0);
        if let Err(e) = check_trace(&s, &tr) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn deterministic_traces_follow_the_discipline(s in arb_state(), p in arb_params()) {
        let t = deterministic_timeline(&s, &p).unwrap();
        if let Err(e) = check_trace(&s, &t.events) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn deterministic_wait_scales_inversely(s in arb_state(), p in arb_params()) {
        let a = deterministic_wait(&s, &p).unwrap();
        let b = deterministic_wait(&s, &p.scaled(2.0).unwrap()).unwrap();
        prop_assert!((a / 2.0 - b).abs() < 1e-9 * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn estimates_are_reproducible(s in arb_state(), p in arb_params(), seed in any::<u64>()) {
        let cfg = SimConfig { replications: 64, seed, ..SimConfig::default() };
        let a = simulate_conditional(&s, &p, &cfg).unwrap();
        let b = simulate_conditional(&s, &p, &cfg).unwrap();
        let c = simulate_conditional(&s, &p, &SimConfig { parallel: !cfg.parallel, ..cfg }).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, c);
    }
}

#[test]
fn deterministic_spot_values() {
    let p = SystemParams::station_rates(1.0, 2.86, 2.86).unwrap();
    let tau = 1.0 / 2.86;
    let q = QueueLengths::new(1, 1, 1, 1);
    let w1 = deterministic_wait(&ArrivalState::class1(q, Scenario::M1), &p).unwrap();
    let w2 = deterministic_wait(&ArrivalState::class1(q, Scenario::M2), &p).unwrap();
    assert!((w1 - 3.0 * tau).abs() < 1e-12);
    assert!((w2 - 4.0 * tau).abs() < 1e-12);
    for m in Scenario::ALL {
        let w = deterministic_wait(&ArrivalState::class1(QueueLengths::default(), m), &p).unwrap();
        assert!((w - 2.0 * tau).abs() < 1e-12);
    }
}

// variability costs about a fifth on top of the deterministic wait
#[test]
fn stochastic_waits_exceed_deterministic_by_about_a_fifth() {
    let p = SystemParams::station_rates(1.0, SYM_070.mu[0], SYM_070.mu[1]).unwrap();
    let an = Analyzer::new(p, TruncationConfig::default()).unwrap();
    let mut excess = Vec::new();
    let mut higher = 0;
    for c in CASES {
        for m in Scenario::ALL {
            let s = ArrivalState::class1(QueueLengths(c), m);
            let a = an.analyze(&s).unwrap().cond_wait;
            let d = deterministic_wait(&s, &p).unwrap();
            excess.push(a / d - 1.0);
            if d <= a {
                higher += 1;
            }
        }
    }
    let mean = excess.iter().sum::<f64>() / excess.len() as f64;
    assert!(higher > 18, "{higher}/36");
    assert!((mean - 0.21).abs() <= 0.10, "mean excess {mean}");
}
