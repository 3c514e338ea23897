// A stationary randomized policy on a fixed two-user channel: admissions just
// inside the delivery region keep the queues flat, admissions outside make
// them grow without bound.

use faircache::combinatorics::SubsetId;
use faircache::scenario::Scenario;
use faircache::sim::{Scheme, Simulation};

fn final_backlog(load: f64, slots: u64) -> faircache::Result<f64> {
    let mut c = Scenario::DetTwoClass.config(2)?;
    c.scheme = Scheme::Static;
    c.static_load = load;
    c.horizon = slots;
    let mut sim = Simulation::new(c)?;
    for _ in 0..slots {
        sim.step()?;
    }
    let s = sim.state();
    let full = SubsetId::full(2);
    println!(
        "load {load:.1}: after {slots} slots S = {:?}, Q_full = {:.1} bits",
        s.user,
        s.codeword_of(full)
    );
    Ok(s.user.iter().sum::<f64>() + s.total_codeword_bits() / 1000.0)
}

pub fn run_example() -> faircache::Result<(f64, f64)> {
    let inside = final_backlog(0.8, 20_000)?;
    let outside = final_backlog(1.2, 20_000)?;
    Ok((inside, outside))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("stability example");
}
