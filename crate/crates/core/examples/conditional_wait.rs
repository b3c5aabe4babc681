//! Analytic conditional wait for a tagged arrival, with the sub-scenario
//! breakdown.

use tandem_polling::model::{ArrivalState, QueueLengths, Scenario, SystemParams, TruncationConfig};
use tandem_polling::scenario::analyze;

fn main() -> tandem_polling::Result<()> {
    let p = SystemParams::station_rates(1.0, 2.86, 2.86)?;
    let trunc = TruncationConfig::default();
    let q = QueueLengths::new(3, 6, 3, 6);

    for m in Scenario::ALL {
        let r = analyze(&ArrivalState::class1(q, m), &p, &trunc)?;
        println!(
            "{q} {m}: wait {:.4}, residual {:.1e}, {} outcomes",
            r.cond_wait,
            r.residual_prob,
            r.outcomes.len()
        );
    }

    let r = analyze(&ArrivalState::class1(q, Scenario::M3), &p, &trunc)?;
    let mut top = r.outcomes.clone();
    top.sort_by(|a, b| b.prob.total_cmp(&a.prob));
    println!("largest paths for m=3:");
    for o in top.iter().take(6) {
        println!("  {:<12} p={:.4} wait={:.4}", o.label, o.prob, o.wait);
    }
    Ok(())
}
