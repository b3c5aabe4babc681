//! The same network with every interval fixed at its mean.

use tandem_polling::deterministic::{deterministic_timeline, deterministic_wait};
use tandem_polling::engine::format_trace;
use tandem_polling::model::{ArrivalState, QueueLengths, Scenario, SystemParams};

fn main() -> tandem_polling::Result<()> {
    let p = SystemParams::station_rates(1.0, 2.86, 2.86)?;
    for q in [
        QueueLengths::new(1, 1, 1, 1),
        QueueLengths::new(3, 3, 3, 3),
        QueueLengths::new(1, 1, 6, 6),
    ] {
        let w: Vec<String> = Scenario::ALL
            .into_iter()
            .map(|m| deterministic_wait(&ArrivalState::class1(q, m), &p).map(|w| format!("{w:.2}")))
            .collect::<Result<_, _>>()?;
        println!("{q}: {}", w.join("  "));
    }

    let t = deterministic_timeline(
        &ArrivalState::class1(QueueLengths::new(1, 1, 1, 1), Scenario::M2),
        &p,
    )?;
    println!("\ntimeline for (1, 1, 1, 1) m=2, wait {:.4}", t.wait);
    print!("{}", format_trace(&t.events));
    Ok(())
}
