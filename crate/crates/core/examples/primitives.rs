//! Building blocks: hitting times, transfer counts, drain waits and races.

use tandem_polling::primitives::{
    drain_wait, hitting_mean, race_busy_period, race_erlang, transfer_count_pmf, HittingTimeDist,
};

fn main() -> tandem_polling::Result<()> {
    let (lambda, mu) = (1.0, 2.86);

    println!("time for an M/M/1 queue with u customers to empty");
    for u in [1, 3, 6] {
        let d = HittingTimeDist::new(u, lambda, mu)?;
        println!(
            "  u={u}: mean {:.4}  density at the mean {:.4}",
            hitting_mean(u, lambda, mu)?,
            d.pdf(d.mean(), 1e-12)?
        );
    }

    println!("customers moved from station 1 while station 2 clears 3");
    let pmf: Vec<f64> = (0..6)
        .map(|k| transfer_count_pmf(k, 3, 2.22, 2.86))
        .collect::<Result<_, _>>()?;
    for (k, p) in pmf.iter().enumerate() {
        println!("  k={k}: {p:.4}");
    }

    println!("last departure from a closed two-station line");
    for (u, w) in [(0, 0), (1, 1), (3, 3), (3, 6)] {
        println!("  ({u}, {w}): {:.4}", drain_wait(u, w, mu, mu)?);
    }

    println!(
        "P(3 services at 2.86 beat 2 at 2.22): {:.4}",
        race_erlang(3, 2.86, 2, 2.22)?
    );
    println!(
        "P(station 2 clears 3 before a busy period from 2 ends): {:.4}",
        race_busy_period(2, lambda, mu, 3, mu, 50.0, 1e-8, 1e-10)?
    );
    Ok(())
}
