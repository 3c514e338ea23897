// Placement arithmetic for a small system.

use faircache::combinatorics::{binomial, codeword_bits, standard_cc_load, subfile_size, CacheParams};

pub fn run_example() -> faircache::Result<f64> {
    let p = CacheParams::new(3, 0.6, 1000.0)?;
    println!("K = {}, m = {}, F = {} bits", p.users, p.memory, p.file_bits);

    let mut total = 0.0;
    for s in 0..=p.users {
        let size = subfile_size(s, &p)?;
        total += binomial(p.users, s) * size;
        println!("  sub-file cached by {s} users: {size:8.2} bits  (x{})", binomial(p.users, s));
    }
    println!("  sum over all sub-files = {total:.6} bits");

    for j in 1..=p.users {
        let row: Vec<String> = (1..=j)
            .map(|i| format!("b({j},{i}) = {:7.2}", codeword_bits(j, i, &p).unwrap()))
            .collect();
        println!("  {}", row.join("   "));
    }

    let load = standard_cc_load(p.users, p.memory);
    println!("standard coded caching sends {load:.4} files per request round");
    Ok(total)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("combinatorics example");
}
