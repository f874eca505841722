use proptest::prelude::*;
use syncap::bounds::{
    evaluate_bound, h_t_limit, printed_t_penalty, stationary_iy, BoundKind, BoundOptions, RunKernel, SeriesConfig,
    TermRole,
};
use syncap::bounds::sterm::delins_count_laws;
use syncap::numeric::compensated_sum;
use syncap::optimize::{maximize_over_gamma, optimize_bound, sweep, ChannelKind, DEFAULT_TOL};
use syncap::{binary_entropy, ChannelParams};

fn gamma() -> impl Strategy<Value = f64> {
    0.02f64..0.98
}

fn kind_and_params() -> impl Strategy<Value = (BoundKind, ChannelParams)> {
    (0usize..4, 0.0f64..0.8, 0.0f64..0.8, 0.0f64..=1.0).prop_filter_map("d+i<=1", |(k, d, i, a)| {
        let (kind, p) = match k {
            0 => (BoundKind::Deletion, ChannelParams::deletion(d)),
            1 => (BoundKind::InsertionLb1, ChannelParams::insertion(i, a)),
            2 => (BoundKind::InsertionLb2, ChannelParams::insertion(i, a)),
            _ => (BoundKind::Delins, ChannelParams::new(d * 0.6, i * 0.6, a)),
        };
        p.ok().map(|p| (kind, p))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn terms_nonnegative_and_bound_below_source_entropy((kind, p) in kind_and_params(), g in gamma()) {
        let r = evaluate_bound(kind, &p, g, &BoundOptions::default()).unwrap();
        for t in &r.terms {
            prop_assert!(t.term.value >= -1e-15, "{} = {}", t.term.name, t.term.value);
            prop_assert!(t.term.truncation_error >= 0.0);
        }
        let h = binary_entropy(g).unwrap();
        prop_assert!(r.bound_bits <= h + 1e-12, "{} > h = {}", r.bound_bits, h);
        prop_assert!(h <= 1.0);
        prop_assert!((r.reconstruct() - r.bound_bits).abs() <= 1e-12);
        let base = r.terms.iter().find(|t| t.role == TermRole::Base).unwrap();
        prop_assert!((base.term.value - h).abs() <= 1e-15);
    }

    #[test]
    fn stationary_law_is_a_fixed_point(i in 0.0f64..0.95, a in 0.0f64..=1.0, g in gamma()) {
        let pi = stationary_iy(i, a, g).unwrap();
        prop_assert!((pi.total() - 1.0).abs() <= 1e-14);
        prop_assert!(pi.step(i, a, g).total_variation(&pi) <= 1e-14);
    }

    #[test]
    fn kernel_rows_sum_to_one(d in 0.0f64..0.9, i in 0.0f64..0.9, r in 1usize..300) {
        for kernel in [RunKernel::deletion(d), RunKernel::duplication(i), RunKernel::delins(d * 0.5, i * 0.5)] {
            let s = compensated_sum(kernel.row(r));
            prop_assert!((s - 1.0).abs() <= 1e-12, "{kernel:?} r={r}: {s}");
        }
    }

    #[test]
    fn count_laws_complete_the_joint_law(g in gamma(), d in 0.0f64..0.6, i in 0.0f64..0.4, a in 0.0f64..=1.0) {
        // the branches are joint masses; states with T_j = 1 are left out
        let laws = delins_count_laws(g, d, i, a).unwrap();
        let ip = i / (1.0 - d);
        let t_mass = ip * (1.0 - a) / (1.0 + ip);
        let total = laws[0].mass() + laws[1].mass() + t_mass;
        prop_assert!((total - 1.0).abs() <= 1e-12, "{laws:?}: {total}");
        for law in laws {
            let truncated = compensated_sum((0..4000).map(|k| law.pmf(k)));
            prop_assert!((truncated - law.mass()).abs() <= 1e-12);
        }
    }

    #[test]
    fn optimiser_returns_evaluated_maximum(c in 0.05f64..0.95, w in 1.0f64..50.0) {
        let f = |g: f64| Ok(-w * (g - c).powi(2) + (7.0 * g).sin() * 0.01);
        let m = maximize_over_gamma(f, 1e-6).unwrap();
        prop_assert_eq!(m.value, f(m.gamma).unwrap());
        let grid_max = (1..200).map(|k| f(k as f64 / 200.0).unwrap()).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m.value >= grid_max);
    }
}

#[test]
fn t_penalty_identity_at_random_points() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let i: f64 = rng.gen_range(0.0..0.95);
        let a: f64 = rng.gen_range(0.0..=1.0);
        let g: f64 = rng.gen_range(0.01..0.99);
        let lhs = (1.0 + i) * h_t_limit(i, a, g).unwrap();
        assert!((lhs - printed_t_penalty(i, a, g)).abs() <= 1e-14, "({i},{a},{g})");
    }
}

#[test]
fn optimised_bound_matches_re_evaluation() {
    let opts = BoundOptions::default();
    for (kind, p) in [
        (BoundKind::Deletion, ChannelParams::deletion(0.2).unwrap()),
        (BoundKind::InsertionLb2, ChannelParams::insertion(0.3, 0.7).unwrap()),
        (BoundKind::Delins, ChannelParams::new(0.1, 0.05, 0.9).unwrap()),
    ] {
        let r = optimize_bound(kind, &p, &opts, DEFAULT_TOL).unwrap();
        let again = evaluate_bound(kind, &p, r.gamma_star, &opts).unwrap();
        assert_eq!(r.bound_bits, again.bound_bits);
    }
}

#[test]
fn sweeps_are_deterministic_and_ordered() {
    let grid: Vec<_> = [0.3, 0.1, 0.2].iter().map(|&d| ChannelParams::deletion(d).unwrap()).collect();
    let cfg = BoundOptions::with_series(SeriesConfig::default());
    let a = sweep(ChannelKind::Deletion, &grid, &cfg, DEFAULT_TOL).unwrap();
    let b = sweep(ChannelKind::Deletion, &grid, &cfg, DEFAULT_TOL).unwrap();
    assert_eq!(a, b);
    let ds: Vec<f64> = a.iter().map(|r| r.params.d).collect();
    assert_eq!(ds, vec![0.3, 0.1, 0.2]);
}
