use faircache::channel::{ChannelModel, FadingKind};

const N: u64 = 1_000_000;

fn samples() -> (Vec<f64>, Vec<f64>) {
    let model = ChannelModel::new(FadingKind::IidExponential, vec![1.0, 1.0], 2024).unwrap();
    (0..N).map(|t| {
        let h = model.sample(t);
        (h.gain(0), h.gain(1))
    })
    .unzip()
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[test]
fn exponential_gains_have_the_right_law() {
    let (a, b) = samples();
    for x in [&a, &b] {
        assert!((mean(x) - 1.0).abs() < 0.01, "mean {}", mean(x));
        let mut s = x.clone();
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        let ks = s
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let f = 1.0 - (-v).exp();
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS distance {ks}");
    }
}

#[test]
fn users_and_slots_are_decorrelated() {
    let (a, b) = samples();
    let across = correlation(&a, &b);
    let lag = correlation(&a[..a.len() - 1], &a[1..]);
    assert!(across.abs() < 0.01, "user correlation {across}");
    assert!(lag.abs() < 0.01, "slot correlation {lag}");
}

#[test]
fn heterogeneous_means_scale_the_law() {
    let model = ChannelModel::new(FadingKind::IidExponential, vec![1.0, 0.2], 5).unwrap();
    let n = 200_000;
    let m: f64 = (0..n).map(|t| model.sample(t).gain(1)).sum::<f64>() / n as f64;
    assert!((m - 0.2).abs() < 0.2 * 0.01, "mean {m}");
}
