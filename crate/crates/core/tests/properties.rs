use std::sync::Arc;

use bapomcp_core::belief::{AugmentedState, LinkingState, Particle, ParticleFilter, RejectionConfig};
use bapomcp_core::counts::CountTable;
use bapomcp_core::domains::{Chain, Sysadmin, Tiger};
use bapomcp_core::model::{sample_dirichlet_row, SampledModel};
use bapomcp_core::oracle::{
    closed_form_history_prob, log_dirichlet_normalizer, sequential_history_prob, FullHistory, UniformPolicy,
};
use bapomcp_core::planner::{Planner, PlannerConfig, SearchTree};
use bapomcp_core::rng::seeded;
use bapomcp_core::step::{step_counting, StepBuffers};
use bapomcp_core::{
    expected_prob, ActionIndex, CountView, Domain, Layout, ObservationIndex, RowId, Spaces, StateIndex, StepKind,
    Variants,
};
use proptest::prelude::*;

fn spaces() -> impl Strategy<Value = Spaces> {
    (1usize..5, 1usize..4, 1usize..4).prop_map(|(s, a, z)| Spaces::new(s, a, z))
}

fn layout() -> impl Strategy<Value = Layout> {
    (spaces(), any::<bool>()).prop_map(|(sp, joint)| if joint { Layout::joint(sp) } else { Layout::factored(sp) })
}

/// Random table with every entry positive.
fn table() -> impl Strategy<Value = CountTable<f64>> {
    layout().prop_flat_map(|l| {
        prop::collection::vec(0.01f64..50.0, l.len()).prop_map(move |v| CountTable::from_vec(l, v).unwrap())
    })
}

fn transitions(sp: Spaces, max: usize) -> impl Strategy<Value = Vec<(ActionIndex, StateIndex, ObservationIndex)>> {
    prop::collection::vec(
        (0..sp.actions, 0..sp.states, 0..sp.observations)
            .prop_map(|(a, s, z)| (ActionIndex(a), StateIndex(s), ObservationIndex(z))),
        0..max,
    )
}

fn table_and_path() -> impl Strategy<Value = (CountTable<f64>, StateIndex, Vec<(ActionIndex, StateIndex, ObservationIndex)>)> {
    table().prop_flat_map(|t| {
        let sp = t.layout().spaces();
        (Just(t), (0..sp.states).prop_map(StateIndex), transitions(sp, 40))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expected_dynamics_are_distributions(t in table()) {
        let sp = t.layout().spaces();
        for s in 0..sp.states {
            for a in 0..sp.actions {
                let mut total = 0.0;
                for n in 0..sp.states {
                    for z in 0..sp.observations {
                        let p = expected_prob(&t, StateIndex(s), ActionIndex(a), StateIndex(n), ObservationIndex(z)).unwrap();
                        prop_assert!(p >= 0.0);
                        total += p;
                    }
                }
                prop_assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn increments_touch_only_their_entries((t, start, path) in table_and_path()) {
        let layout = t.layout();
        let mut current = t.clone();
        let mut s = start;
        for &(a, next, z) in &path {
            let before = current.clone();
            current.increment(s, a, next, z);
            let touched = layout.touched(s, a, next, z);
            for i in 0..layout.len() {
                let expected = if touched.as_slice().contains(&i) {
                    before.count(i) + 1.0
                } else {
                    before.count(i)
                };
                prop_assert_eq!(current.count(i), expected);
            }
            s = next;
        }
        for i in 0..layout.len() {
            prop_assert!(current.count(i) >= t.count(i));
        }
    }

    #[test]
    fn row_totals_grow_by_exactly_k(k in 0usize..200, row_len in 1usize..6, seed in any::<u64>()) {
        let sp = Spaces::new(1, 1, row_len);
        let l = Layout::joint(sp);
        let counts: Vec<f64> = (0..row_len).map(|i| 0.5 + i as f64).collect();
        let initial: f64 = counts.iter().sum();
        let mut t = CountTable::from_vec(l, counts).unwrap();
        let mut rng = seeded(seed);
        for _ in 0..k {
            let z = rand::Rng::random_range(&mut rng, 0..row_len);
            t.increment(StateIndex(0), ActionIndex(0), StateIndex(0), ObservationIndex(z));
        }
        prop_assert_eq!(t.row_total(RowId(0)), initial + k as f64);
    }

    #[test]
    fn linking_counts_equal_plain_counts((t, start, path) in table_and_path(), lambda in 0usize..6) {
        let base = Arc::new(t.clone());
        let mut plain = AugmentedState::new(start, t);
        let mut linked = LinkingState::new(start, base.clone());
        for &(a, next, z) in &path {
            plain.apply_transition(a, next, z);
            linked.apply_transition(a, next, z);
            linked.after_belief_update(lambda);
            prop_assert!(linked.delta().len() <= lambda);
        }
        prop_assert_eq!(plain.state(), linked.state());
        for i in 0..plain.layout().len() {
            prop_assert_eq!(plain.count(i), linked.count(i));
        }
        prop_assert_eq!(linked.to_table(), plain.counts.clone());
        for i in 0..base.len() {
            prop_assert!(base.count(i) <= linked.count(i));
        }
    }

    #[test]
    fn copies_are_isolated((t, start, path) in table_and_path()) {
        let original = LinkingState::new(start, Arc::new(t));
        let snapshot = original.to_table();
        let mut copy = original.clone();
        for &(a, next, z) in &path {
            copy.apply_transition(a, next, z);
            copy.merge_if_needed(2);
        }
        prop_assert_eq!(original.to_table(), snapshot);
        prop_assert_eq!(original.state(), start);
    }

    #[test]
    fn dirichlet_draws_are_on_the_simplex(alpha in prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1e3], 1..10), seed in any::<u64>()) {
        prop_assume!(alpha.iter().any(|&x| x > 0.0));
        let row = sample_dirichlet_row(&alpha, &mut seeded(seed)).unwrap();
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (p, a) in row.iter().zip(&alpha) {
            prop_assert!(*p >= 0.0);
            if *a == 0.0 {
                prop_assert_eq!(*p, 0.0);
            }
        }
    }

    #[test]
    fn sampled_model_rows_are_on_the_simplex(t in table(), seed in any::<u64>(), lazy in any::<bool>()) {
        let mut rng = seeded(seed);
        let mut model = SampledModel::sample_full(&t, &mut rng, lazy).unwrap();
        let mut scratch = Vec::new();
        for r in 0..t.layout().num_rows() {
            let row = model.row(&t, RowId(r), &mut rng, &mut scratch).unwrap().to_vec();
            prop_assert!(row.iter().all(|&p| p >= 0.0));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn node_statistics_are_running_means(updates in prop::collection::vec((0usize..3, -100.0f64..100.0), 1..200)) {
        let mut tree = SearchTree::<f64>::new(3, 2);
        let root = tree.add_node();
        let mut sums = [0.0; 3];
        let mut counts = [0u32; 3];
        for &(a, r) in &updates {
            tree.update(root, ActionIndex(a), r);
            sums[a] += r;
            counts[a] += 1;
        }
        let node = tree.node(root);
        prop_assert_eq!(node.visits, counts.iter().sum::<u32>());
        for a in 0..3 {
            prop_assert_eq!(node.action_visits[a], counts[a]);
            if counts[a] > 0 {
                prop_assert!((node.values[a] - sums[a] / counts[a] as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn closed_form_equals_sequential((t, start, path) in table_and_path()) {
        let sp = t.layout().spaces();
        let steps: Vec<_> = path.into_iter().take(5).collect();
        let policy = UniformPolicy { actions: sp.actions };
        let h = FullHistory::new(start, t, steps);
        let a = closed_form_history_prob(&h, &policy).unwrap();
        let b = sequential_history_prob(&h, &policy).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn normalizer_stays_finite(alpha in prop::collection::vec(1e-3f64..1e6, 1..20)) {
        prop_assert!(log_dirichlet_normalizer(&alpha).unwrap().is_finite());
    }

    #[test]
    fn variant_flags_round_trip(r in any::<bool>(), e in any::<bool>(), l in any::<bool>()) {
        let v = Variants::new(r, e, l);
        prop_assert_eq!(v.flags().parse::<Variants>().unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sysadmin_dynamics_are_distributions(n in 1usize..5, f in 0.0f64..=1.0) {
        let d = Sysadmin::<f64>::new(n, f);
        let sp = d.spaces();
        prop_assert_eq!(sp.states, 1 << n);
        prop_assert_eq!(sp.actions, 2 * n + 1);
        prop_assert_eq!(sp.observations, 3);
        for s in 0..sp.states {
            for a in 0..sp.actions {
                let out = d.true_dynamics(StateIndex(s), ActionIndex(a));
                prop_assert!(out.iter().all(|o| o.prob >= 0.0));
                prop_assert!((out.iter().map(|o| o.prob).sum::<f64>() - 1.0).abs() < 1e-9);
                if let bapomcp_core::domains::sysadmin::Action::Reboot(i) = d.decode(ActionIndex(a)) {
                    for o in out.iter().filter(|o| o.prob > 0.0) {
                        prop_assert_eq!(o.next.0 & (1 << i), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn sysadmin_prior_is_reproducible(n in 1usize..4, seed in any::<u64>()) {
        let d = Sysadmin::<f64>::new(n, 0.1);
        let a = d.prior(&mut seeded(seed));
        let b = d.prior(&mut seeded(seed));
        prop_assert_eq!(&a, &b);
        prop_assert!(a.first_empty_row().is_none());
    }

    #[test]
    fn linking_replay_matches_plain(seed in any::<u64>(), lambda in prop_oneof![Just(0usize), Just(1), Just(30)], expected in any::<bool>()) {
        let c = Chain::<f64>::default();
        let prior = c.prior(&mut seeded(0));
        let kind = if expected { StepKind::Expected } else { StepKind::Dirichlet };
        let mut plain = AugmentedState::new(StateIndex(0), prior.clone());
        let mut linked = LinkingState::new(StateIndex(0), Arc::new(prior));
        let (mut r1, mut r2) = (seeded(seed), seeded(seed));
        let (mut b1, mut b2) = (StepBuffers::new(), StepBuffers::new());
        for t in 0..20 {
            let a = ActionIndex(t % 2);
            let z1 = step_counting(&mut plain, a, kind, &mut r1, &mut b1).unwrap();
            let z2 = step_counting(&mut linked, a, kind, &mut r2, &mut b2).unwrap();
            linked.after_belief_update(lambda);
            prop_assert_eq!(z1, z2);
            prop_assert_eq!(plain.state(), linked.state());
            for i in 0..plain.layout().len() {
                prop_assert_eq!(plain.count(i), linked.count(i));
            }
        }
    }

    #[test]
    fn plan_leaves_the_belief_untouched(seed in any::<u64>(), flags in 0usize..8) {
        let t = Tiger::<f64>::default();
        let prior = t.prior(&mut seeded(seed));
        let mut rng = seeded(seed ^ 1);
        let b = ParticleFilter::plain_from_prior(&prior, 20, |g: &mut _| t.sample_initial_state(g), &mut rng);
        let before: Vec<_> = b.iter().map(|p| (p.state(), p.counts.clone())).collect();
        let cfg = PlannerConfig {
            num_sims: 50,
            max_depth: 5,
            discount: 0.95,
            exploration: 10.0,
            variants: Variants::all()[flags],
        };
        let mut planner = Planner::new(cfg, &t).unwrap();
        let a = planner.plan(&t, &b, &mut rng).unwrap();
        prop_assert!(a.0 < 3);
        let after: Vec<_> = b.iter().map(|p| (p.state(), p.counts.clone())).collect();
        prop_assert_eq!(before, after);
        let (lo, hi) = t.reward_range();
        for &q in &planner.root_values() {
            prop_assert!(q >= lo / 0.05 - 1e-9 && q <= hi / 0.05 + 1e-9);
        }
    }

    #[test]
    fn rejection_update_keeps_k_particles(k in 1usize..60, seed in any::<u64>(), z in 0usize..2) {
        let c = Chain::<f64>::default();
        let prior = c.prior(&mut seeded(0));
        let mut rng = seeded(seed);
        let b = ParticleFilter::plain_from_prior(&prior, k, |g: &mut _| c.sample_initial_state(g), &mut rng);
        let cfg = RejectionConfig::new(StepKind::Dirichlet, k);
        match b.rejection_update(ActionIndex(0), ObservationIndex(z), &cfg, &mut rng) {
            Ok((next, stats)) => {
                prop_assert_eq!(next.len(), k);
                prop_assert_eq!(stats.accepted, k);
                for p in next.iter() {
                    prop_assert!(p.state().0 < 2);
                    prop_assert!(p.counts.first_empty_row().is_none());
                }
            }
            Err(e) => {
                let deprived = matches!(e, bapomcp_core::Error::Deprived { .. });
                prop_assert!(deprived);
            }
        }
    }
}
