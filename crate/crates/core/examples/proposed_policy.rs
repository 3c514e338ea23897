// Stepping the fair coded-caching controller slot by slot and watching the
// three queue tiers fill up.

use faircache::scenario::Scenario;
use faircache::sim::{run, Simulation};

pub fn run_example() -> faircache::Result<f64> {
    let mut c = Scenario::SymFading.config(3)?;
    c.horizon = 5_000;
    let mut sim = Simulation::new(c.clone())?;
    for _ in 0..5 {
        sim.step()?;
        let s = sim.state();
        println!(
            "slot {:>2}: S = {:?}  sum Q = {:8.1} bits  U = {:?}",
            sim.slot(),
            s.user,
            s.total_codeword_bits(),
            s.virtual_.iter().map(|u| (u * 100.0).round() / 100.0).collect::<Vec<_>>()
        );
    }

    let m = run(&c)?;
    println!("after {} slots: rates {:?}", c.horizon, m.rates);
    println!("sum rate {:.4} files/slot, utility {:.4}", m.sum_rate(), m.utility);
    Ok(m.sum_rate())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("proposed policy example");
}
