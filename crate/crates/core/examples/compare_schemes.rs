// All schemes on one configuration, printed as a table and as CSV.

use faircache::report::{summary_table, write_csv};
use faircache::scenario::Scenario;
use faircache::sim::{compare, RunConfig};

pub fn run_example() -> faircache::Result<String> {
    let mut c = Scenario::TwoClassFading.config(4)?;
    c.horizon = 10_000;
    let ms = compare(&c)?;
    print!("{}", summary_table(&ms));

    let configs: Vec<RunConfig> = ms.iter().map(|m| RunConfig { scheme: m.scheme, ..c.clone() }).collect();
    let mut buf = Vec::new();
    write_csv(&mut buf, &configs, &ms)?;
    let text = String::from_utf8(buf).expect("csv is utf-8");
    print!("{text}");
    Ok(text)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("compare example");
}
