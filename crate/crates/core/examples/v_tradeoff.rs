// Sweeping V: utility climbs toward its optimum while backlogs grow.

use faircache::scenario::Scenario;
use faircache::sim::{sweep, SweepAxis};

pub fn run_example() -> faircache::Result<Vec<(f64, f64, f64)>> {
    let mut c = Scenario::SymFading.config(3)?;
    c.horizon = 20_000;
    let vs = [1.0, 10.0, 100.0];
    let ms = sweep(&c, SweepAxis::Tradeoff, &vs)?;
    let mut out = Vec::new();
    for (v, m) in vs.iter().zip(&ms) {
        println!(
            "V = {v:>6}: utility {:8.4}  avg codeword backlog {:10.1} bits",
            m.utility, m.avg_codeword_total
        );
        out.push((*v, m.utility, m.avg_codeword_total));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("V sweep example");
}
