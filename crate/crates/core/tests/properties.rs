use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use faircache::bc_capacity::oracle::wsr_bruteforce;
use faircache::bc_capacity::{power_envelope, reduce_weights, solve_wsr, within_region, ChannelState, SubsetWeights};
use faircache::channel::{FadingKind, GainProfile};
use faircache::combinatorics::{CodewordTable, SubsetId};
use faircache::config::FileConfig;
use faircache::policies::{g_derivative, g_utility, gamma_opt, ArrivalModel, FairnessConfig, ProposedPolicy};
use faircache::queues::{apply_slot, DeliveryLedger, QueueState};
use faircache::scenario::Scenario;
use faircache::sim::{run, RunConfig, Scheme, Simulation};
use faircache::system::SystemParams;

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (2usize..=4).prop_flat_map(|k| {
        (
            prop::collection::vec(0.01f64..3.0, k),
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 1 << k),
            0.1f64..30.0,
        )
    })
}

fn build(gains: &[f64], weights: &[f64]) -> (SubsetWeights, ChannelState) {
    let mut w = weights.to_vec();
    w[0] = 0.0;
    (
        SubsetWeights::from_masked(gains.len(), w).unwrap(),
        ChannelState::new(gains.to_vec()).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wsr_argmax_is_scale_free((g, w, p) in instance(), e in -20i32..20) {
        let (w, h) = build(&g, &w);
        let c = 2f64.powi(e);
        let a = solve_wsr(&w, &h, p).unwrap();
        let b = solve_wsr(&w.scaled(c), &h, p).unwrap();
        prop_assert_eq!(&a.power, &b.power);
        prop_assert_eq!(&a.rates, &b.rates);
        prop_assert_eq!(a.wsr * c, b.wsr);
    }

    #[test]
    fn wsr_argmax_is_scale_free_for_any_factor((g, w, p) in instance(), c in 1e-3f64..1e3) {
        let (w, h) = build(&g, &w);
        let a = solve_wsr(&w, &h, p).unwrap();
        let b = solve_wsr(&w.scaled(c), &h, p).unwrap();
        for (x, y) in a.power.iter().zip(&b.power) {
            prop_assert!((x - y).abs() <= 1e-9 * p);
        }
        prop_assert!((a.wsr * c - b.wsr).abs() <= 1e-9 * b.wsr.max(1.0));
    }

    #[test]
    fn wsr_spends_whole_budget_or_nothing((g, w, p) in instance()) {
        let (w, h) = build(&g, &w);
        let a = solve_wsr(&w, &h, p).unwrap();
        let spent: f64 = a.power.iter().sum();
        let any = reduce_weights(&w, &h).unwrap().weights.iter().any(|&x| x > 0.0);
        if any {
            prop_assert!((spent - p).abs() <= 1e-9 * p);
        } else {
            prop_assert_eq!(spent, 0.0);
        }
    }

    #[test]
    fn wsr_rates_respect_their_own_power((g, w, p) in instance()) {
        let (w, h) = build(&g, &w);
        let a = solve_wsr(&w, &h, p).unwrap();
        prop_assert!(within_region(&a.rates, &a.power, &h, p, 1e-9));
    }

    #[test]
    fn envelope_holder_is_the_pointwise_max((g, w, p) in instance(), seed in any::<u64>()) {
        let (w, h) = build(&g, &w);
        let r = reduce_weights(&w, &h).unwrap();
        let env = power_envelope(&r, &h, p);
        let f = |pos: usize, z: f64| {
            let gain = h.gain(r.order[pos]);
            if r.weights[pos] <= 0.0 || gain <= 0.0 { 0.0 } else { r.weights[pos] / (1.0 / gain + z) }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let z = rng.random_range(0.0..=p);
            let best = (0..r.order.len()).map(|q| f(q, z)).fold(0.0, f64::max);
            match env.holder(z) {
                Some(pos) => prop_assert!((f(pos, z) - best).abs() <= 1e-12 * best.max(1.0)),
                None => prop_assert_eq!(best, 0.0),
            }
        }
    }

    #[test]
    fn wsr_matches_grid_on_exponential_gains(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(2..=4usize);
        let g: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let w: Vec<f64> = (0..1 << k).map(|_| rng.random::<f64>()).collect();
        let (w, h) = build(&g, &w);
        let p = 10.0;
        let exact = solve_wsr(&w, &h, p).unwrap().wsr;
        let grid = wsr_bruteforce(&w, &h, p, p / 1000.0).unwrap();
        prop_assert!(grid <= exact + 1e-9 * exact.max(1.0));
        prop_assert!((exact - grid).abs() <= 1e-3 * exact.max(1.0));
    }

    #[test]
    fn gamma_opt_is_a_grid_argmax(
        u in 0.0f64..300.0,
        v in 0.5f64..200.0,
        alpha in prop_oneof![Just(0.0), Just(1.0), 0.1f64..8.0],
        d in 0.01f64..1.0,
    ) {
        let gmax = 2.0;
        let x = gamma_opt(u, alpha, d, v, gmax);
        prop_assert!((0.0..=gmax).contains(&x));
        let obj = |x: f64| v * g_utility(x, alpha, d) - u * x;
        let best = (0..=20_000).map(|i| obj(gmax * i as f64 / 20_000.0)).fold(f64::MIN, f64::max);
        prop_assert!(obj(x) >= best - 1e-9 * best.abs().max(1.0));
    }
}

fn small_params(k: usize, memory: f64) -> SystemParams {
    SystemParams::new(k, memory, 1000.0, 100.0, 10.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Random fading traces under the proposed controller. The uncapped
    /// dynamics bound the implemented backlog from both sides.
    #[test]
    fn queue_dynamics_invariants(
        k in 2usize..=4,
        memory in 0.2f64..0.8,
        alpha in prop_oneof![Just(0.0), Just(1.0), Just(4.0)],
        tradeoff in 1.0f64..200.0,
        seed in any::<u64>(),
    ) {
        let params = small_params(k, memory);
        let fairness = FairnessConfig { alpha, tradeoff, ..FairnessConfig::default() };
        let policy = ProposedPolicy::new(params, fairness).unwrap();
        let table = CodewordTable::new(&params.cache).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = QueueState::empty(k);
        let mut ideal = QueueState::empty(k);
        let mut ledger = DeliveryLedger::new(k, params.missing_bits());
        let mut weighted_served = 0.0;
        let bound = tradeoff * g_derivative(0.0, alpha, fairness.shift) + fairness.gamma_max;

        for _ in 0..300 {
            let h = ChannelState::new((0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect()).unwrap();
            let d = policy.decide(&state, &h, None).unwrap();
            d.validate(&h, &params, fairness.sigma_max as f64).unwrap();
            let out = apply_slot(&mut state, &d, &params, &table).unwrap();
            ledger.update(&out.served, &d.admissions);
            for (mask, s) in out.served.iter().enumerate() {
                weighted_served += (mask as u32).count_ones() as f64 * s;
            }

            // uncapped dynamics driven by the same decisions
            let mut next = ideal.clone();
            for u in 0..k {
                let out_u: f64 = (1..1usize << k).filter(|m| m & (1 << u) != 0).map(|m| d.combinations[m]).sum();
                next.user[u] = (ideal.user[u] - out_u).max(0.0) + d.admissions[u];
            }
            for i in 1..1usize << k {
                let inflow: f64 = (1..1usize << k)
                    .filter(|&j| j & i == i)
                    .map(|j| {
                        let (jj, ii) = (SubsetId::new(j as u32).unwrap(), SubsetId::new(i as u32).unwrap());
                        table.for_pair(jj, ii) * d.combinations[j]
                    })
                    .sum();
                next.codeword[i] = (ideal.codeword[i] - params.slot_channel_uses * d.rates[i]).max(0.0) + inflow;
            }
            ideal = next;

            for &x in state.user.iter().chain(&state.codeword).chain(&state.virtual_) {
                prop_assert!(x >= 0.0);
            }
            for u in 0..k {
                prop_assert!(ideal.user[u] <= state.user[u] + 1e-9);
                if alpha > 0.0 {
                    prop_assert!(state.virtual_[u] < bound);
                } else {
                    prop_assert!(state.virtual_[u] <= bound);
                }
            }
            for i in 1..1usize << k {
                prop_assert!(state.codeword[i] <= ideal.codeword[i] * (1.0 + 1e-12) + 1e-9);
            }
            let credited: f64 = ledger.drained_bits.iter().sum();
            prop_assert!((credited - weighted_served).abs() <= 1e-9 * weighted_served.max(1.0));
        }
    }

    #[test]
    fn config_block_round_trips(
        k in 1usize..=6,
        memory in 0.05f64..0.95,
        power in 0.1f64..100.0,
        alpha in 0.0f64..5.0,
        tradeoff in 1.0f64..1e4,
        seed in 0u64..=faircache::sim::MAX_SEED,
        horizon in 1u64..1_000_000,
        fading in prop_oneof![Just(FadingKind::Deterministic), Just(FadingKind::IidExponential)],
        explicit in prop::option::of(prop::collection::vec(0.01f64..5.0, 6)),
        rate in prop::option::of(0.0f64..2.0),
    ) {
        let profile = match explicit {
            Some(g) => GainProfile::Explicit(g[..k].to_vec()),
            None => GainProfile::TwoClass,
        };
        let mut c = RunConfig::new(small_params(k, memory), fading, profile);
        c.params.power = power;
        c.fairness.alpha = alpha;
        c.fairness.tradeoff = tradeoff;
        c.seed = seed;
        c.horizon = horizon;
        if let Some(r) = rate {
            c.arrivals = ArrivalModel::Stochastic { rates: vec![r; k], cap: 2.0 };
        }
        c.validate().unwrap();
        let text = FileConfig::resolved(&c).to_toml().unwrap();
        let back = FileConfig::parse(&text).unwrap().apply(&Scenario::Custom.config(3).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn drain_delivers_every_combined_file() {
    for (scenario, k, rate) in [(Scenario::SymFading, 3, None), (Scenario::TwoClassFading, 4, Some(0.25))] {
        let mut c = scenario.config(k).unwrap();
        c.horizon = 3_000;
        if let Some(r) = rate {
            c.arrivals = ArrivalModel::Stochastic { rates: vec![r; k], cap: 2.0 };
        }
        let mut sim = Simulation::new(c.clone()).unwrap();
        for _ in 0..c.horizon {
            sim.step().unwrap();
        }
        sim.halt_admissions();
        let mut guard = 0;
        while !sim.state().is_drained() {
            sim.step().unwrap();
            guard += 1;
            assert!(guard < 1_000_000);
        }
        let l = sim.ledger();
        for u in 0..k {
            assert!((l.delivered_files(u) - l.combined_files[u]).abs() <= 1e-9, "user {u}");
            assert!((l.combined_files[u] - l.admitted_files[u]).abs() <= 1e-9, "user {u}");
        }
    }
}

#[test]
fn identical_configs_give_identical_metrics() {
    for scheme in Scheme::ALL {
        let mut c = Scenario::DetTwoClass.config(3).unwrap();
        c.scheme = scheme;
        c.horizon = 2_000;
        if scheme != Scheme::Static {
            c.fading = FadingKind::IidExponential;
        }
        assert_eq!(run(&c).unwrap(), run(&c).unwrap(), "{scheme}");
    }
}
