// Reproducible fading: the same seed and slot always give the same gains.

use faircache::channel::{two_class_gains, ChannelModel, FadingKind};

pub fn run_example() -> faircache::Result<Vec<f64>> {
    let means = two_class_gains(4);
    let model = ChannelModel::new(FadingKind::IidExponential, means.clone(), 7)?;
    let slots = 20_000u64;
    let mut avg = vec![0.0; means.len()];
    for t in 0..slots {
        for (a, g) in avg.iter_mut().zip(model.sample(t).gains()) {
            *a += g / slots as f64;
        }
    }
    for (k, (a, b)) in avg.iter().zip(&means).enumerate() {
        println!("user {k}: empirical mean {a:.4}, nominal {b}");
    }
    assert_eq!(model.sample(123), model.sample(123));
    Ok(avg)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("channel example");
}
