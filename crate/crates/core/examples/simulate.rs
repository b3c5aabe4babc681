//! Monte Carlo estimates: conditional waits from a snapshot, one traced
//! replication, and a long steady-state run.

use tandem_polling::engine::format_trace;
use tandem_polling::model::{ArrivalState, QueueLengths, Scenario, SystemParams};
use tandem_polling::simulator::{
    simulate_conditional, simulate_steady_state, simulate_trace, SimConfig,
};

fn main() -> tandem_polling::Result<()> {
    let p = SystemParams::station_rates(1.0, 2.86, 2.86)?;
    let cfg = SimConfig {
        replications: 5000,
        seed: 42,
        ..SimConfig::default()
    };

    let q = QueueLengths::new(3, 3, 3, 3);
    for m in Scenario::ALL {
        let e = simulate_conditional(&ArrivalState::class1(q, m), &p, &cfg)?;
        println!("{q} {m}: {:.3} +- {:.3}", e.mean, e.stderr);
    }

    let small = ArrivalState::class1(QueueLengths::new(1, 0, 0, 1), Scenario::M4);
    let (w, trace) = simulate_trace(&small, &p, &cfg, 0)?;
    println!("\none replication from {}: wait {w:.3}", small.queues);
    print!("{}", format_trace(&trace));

    let ss = simulate_steady_state(
        &p,
        &SimConfig {
            horizon: 300_000,
            ..cfg
        },
    )?;
    println!(
        "\nsteady state: W = {:.3} +- {:.3}, per class {:.3} / {:.3}, Little gap {:.2}%",
        ss.all.mean,
        ss.all.stderr,
        ss.per_class[0],
        ss.per_class[1],
        ss.little_gap() * 100.0
    );
    Ok(())
}
