// The two reference schemes on fixed two-class gains: opportunistic unicast
// and round-robin standard coded caching with its closed-form rate.

use faircache::scenario::Scenario;
use faircache::sim::{run, Scheme};

pub fn run_example() -> faircache::Result<(f64, f64)> {
    let mut c = Scenario::DetTwoClass.config(4)?;
    c.fairness.alpha = 0.0;
    c.horizon = 20_000;

    c.scheme = Scheme::UnicastOpp;
    let uni = run(&c)?;
    println!("unicast opportunistic: sum rate {:.4} files/slot", uni.sum_rate());

    c.scheme = Scheme::StandardCc;
    let cc = run(&c)?;
    let analytic = cc.analytic_rate.unwrap_or(f64::NAN) * c.users() as f64;
    println!(
        "standard coded caching: simulated {:.4}, closed form {:.4} files/slot",
        cc.sum_rate(),
        analytic
    );
    Ok((uni.sum_rate(), cc.sum_rate()))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("baselines example");
}
