use std::collections::BTreeSet;

use proptest::prelude::*;

use mpoxnet::config::ScenarioConfig;
use mpoxnet::epidemic::InfectionRecord;
use mpoxnet::harness::log_log_slope;
use mpoxnet::interventions::{apply_behavior_change, BehaviorChangePolicy, Targeting};
use mpoxnet::metrics::{attribution_shares, quantile};
use mpoxnet::network::{cumulative_window_graph, ContactNetwork, EdgeKind, NetworkParams};
use mpoxnet::rng::RngStream;
use mpoxnet::sim::run_simulation;

fn kind_of(i: u8) -> Option<EdgeKind> {
    match i {
        0 => None,
        1 => Some(EdgeKind::Main),
        2 => Some(EdgeKind::Casual),
        _ => Some(EdgeKind::OneTime),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_ignores_order(mut v in prop::collection::vec(-1e6f64..1e6, 1..60), q in 0.0f64..=1.0, rot in 0usize..60) {
        let before = quantile(&v, q).unwrap();
        let k = rot % v.len();
        v.rotate_left(k);
        v.reverse();
        prop_assert_eq!(quantile(&v, q).unwrap(), before);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= before && before <= hi);
    }

    #[test]
    fn quantile_monotone_in_q(v in prop::collection::vec(-1e3f64..1e3, 1..40), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(quantile(&v, a).unwrap() <= quantile(&v, b).unwrap());
    }

    #[test]
    fn attribution_shares_sum_to_one(rows in prop::collection::vec((0u8..4, 0i32..100), 0..200), t in 0i32..100) {
        let records: Vec<InfectionRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, &(k, day))| InfectionRecord {
                source: kind_of(k).map(|_| 0),
                target: i as u32,
                day,
                kind: kind_of(k),
            })
            .collect();
        let transmitted = rows.iter().filter(|&&(k, d)| k > 0 && d <= t).count();
        match attribution_shares(&records, t) {
            None => prop_assert_eq!(transmitted, 0),
            Some(s) => {
                prop_assert!((s.total() - 1.0).abs() < 1e-12);
                let onetime = rows.iter().filter(|&&(k, d)| k == 3 && d <= t).count();
                prop_assert!((s.onetime - onetime as f64 / transmitted as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn power_law_slope_recovered(exp in 0.5f64..3.0, scale in 1e-4f64..10.0) {
        let pts: Vec<(f64, f64)> = [5e3f64, 1e4, 2e4, 4e4]
            .iter()
            .map(|&n| (n.ln(), (scale * n.powf(exp)).ln()))
            .collect();
        prop_assert!((log_log_slope(&pts).unwrap() - exp).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn behavior_change_is_idempotent(seed in any::<u64>(), reduction in 0.0f64..=1.0, targeted in any::<bool>()) {
        let mut rng = RngStream::new(seed, 0);
        let mut pop = ContactNetwork::generate(400, &NetworkParams::default(), false, &mut rng).unwrap().population;
        let policy = BehaviorChangePolicy {
            start_day: 0,
            reduction,
            targeting: if targeted { Targeting::top_strata() } else { Targeting::Universal },
        };
        apply_behavior_change(&mut pop, &policy);
        let once: Vec<f64> = pop.nodes().iter().map(|n| n.p_onetime).collect();
        apply_behavior_change(&mut pop, &policy);
        let twice: Vec<f64> = pop.nodes().iter().map(|n| n.p_onetime).collect();
        prop_assert_eq!(&once, &twice);
        for n in pop.nodes() {
            let want = if policy.targeting.includes(n.stratum) { n.p_onetime_base * (1.0 - reduction) } else { n.p_onetime_base };
            prop_assert_eq!(n.p_onetime, want);
        }
    }

    #[test]
    fn seir_counts_conserved(
        population in 200usize..800,
        horizon in 1u32..80,
        beta in 0.0f64..=1.0,
        stream in 0u64..1_000,
        preset in prop::sample::select(vec!["baseline", "targeted", "partial_isolation", "early_vaccination"]),
    ) {
        let mut c = ScenarioConfig::preset(preset).unwrap();
        c.population = population;
        c.horizon = horizon;
        c.epidemic.beta = beta;
        c.epidemic.seed_fraction = 0.01;
        let r = run_simulation(&c, stream).unwrap();
        prop_assert_eq!(r.daily.len(), horizon as usize);
        let mut last = 0;
        for d in std::iter::once(&r.initial).chain(&r.daily) {
            prop_assert_eq!(d.s + d.e + d.i + d.r, population);
            prop_assert!(d.cumulative >= last);
            last = d.cumulative;
        }
        prop_assert_eq!(last, r.infections.len());
        let targets: BTreeSet<u32> = r.infections.iter().map(|x| x.target).collect();
        prop_assert_eq!(targets.len(), r.infections.len());
    }

    #[test]
    fn window_graph_is_union_of_snapshots(seed in any::<u64>(), t0 in 0i32..12, len in 0i32..8) {
        let t1 = t0 + len;
        let mut rng = RngStream::new(seed, 3);
        let mut net = ContactNetwork::generate(500, &NetworkParams::default(), true, &mut rng).unwrap();
        let mut union = BTreeSet::new();
        let snapshot = |net: &ContactNetwork, out: &mut BTreeSet<(u32, u32)>| {
            for (a, b, _) in net.partnerships.live_edges() {
                out.insert((a.min(b), a.max(b)));
            }
        };
        if t0 == 0 {
            snapshot(&net, &mut union);
        }
        for day in 1..=t1 {
            net.step(day, &mut rng);
            if day >= t0 {
                snapshot(&net, &mut union);
            }
        }
        let log = net.partnerships.log().unwrap();
        let g = cumulative_window_graph(log, 500, t0, t1).unwrap();
        let got: BTreeSet<(u32, u32)> = g.edges().collect();
        prop_assert_eq!(got, union);
    }
}
