//! Which of two coupled stations empties first, and how long it takes.

use tandem_polling::markov::{LatticeChain, TargetStation};

fn main() -> tandem_polling::Result<()> {
    let chain = LatticeChain::new(1.0, 2.86, 2.86, 80)?;
    println!(
        "{:>3} {:>3} {:>8} {:>8} {:>9} {:>9}",
        "u", "w", "p1", "p2", "T(st1)", "T(st2)"
    );
    for (u, w) in [(1, 1), (1, 3), (3, 1), (3, 3), (6, 6), (2, 10)] {
        let (p1, p2) = chain.absorption(u, w, 1e-10)?;
        let t1 = chain.mfpt(u, w, TargetStation::One, 1e-10)?;
        let t2 = chain.mfpt(u, w, TargetStation::Two, 1e-10)?;
        println!("{u:>3} {w:>3} {p1:>8.4} {p2:>8.4} {t1:>9.4} {t2:>9.4}");
    }
    Ok(())
}
