// Weighted sum-rate point of a three-user degraded broadcast channel,
// checked against a coarse power grid.

use faircache::bc_capacity::oracle::wsr_bruteforce;
use faircache::bc_capacity::{solve_wsr, ChannelState, SubsetWeights};
use faircache::combinatorics::SubsetId;

pub fn run_example() -> faircache::Result<(f64, f64)> {
    let h = ChannelState::new(vec![1.0, 0.4, 0.1])?;
    let power = 10.0;
    let mut w = SubsetWeights::zeros(3);
    w.set(SubsetId::from_users(&[0])?, 1.0);
    w.set(SubsetId::from_users(&[1])?, 2.0);
    w.set(SubsetId::from_users(&[0, 1, 2])?, 4.0);

    let alloc = solve_wsr(&w, &h, power)?;
    println!("strength order {:?}", alloc.order);
    for (pos, (&p, &r)) in alloc.power.iter().zip(&alloc.layer_rates).enumerate() {
        println!("  layer {pos}: power {p:7.4}  rate {r:7.4} bits/use");
    }
    for mask in 1..8u32 {
        let r = alloc.rates[mask as usize];
        if r > 0.0 {
            println!("  subset {:03b} gets {r:.4}", mask);
        }
    }
    let grid = wsr_bruteforce(&w, &h, power, power / 400.0)?;
    println!("weighted sum rate {:.6}, grid search {:.6}", alloc.wsr, grid);
    Ok((alloc.wsr, grid))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("wsr example");
}
