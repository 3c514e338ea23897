// Poisson requests instead of an infinite backlog. Admissions stop at the
// horizon and the queues drain, so every admitted file is delivered.

use faircache::policies::ArrivalModel;
use faircache::scenario::Scenario;
use faircache::sim::run_with_drain;

pub fn run_example() -> faircache::Result<(f64, f64)> {
    let mut c = Scenario::TwoClassFading.config(3)?;
    c.horizon = 10_000;
    c.arrivals = ArrivalModel::Stochastic {
        rates: vec![0.3, 0.3, 0.3],
        cap: 2.0,
    };
    let (m, drain) = run_with_drain(&c, 100_000)?;
    println!("delivered rates {:?}", m.rates);
    println!(
        "admitted {:.0} files, delivered {:.3} after {} drain slots",
        drain.admitted_files, drain.delivered_files, drain.drain_slots
    );
    Ok((drain.admitted_files, drain.delivered_files))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("arrivals example");
}
