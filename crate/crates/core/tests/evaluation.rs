use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use twinsgame_core::eval::{
    assign_and_simulate, baseline_all, baseline_cll, external_regret, santafe_true_msne, summarize,
};
use twinsgame_core::game::{generate_observations, sample_vendor_game, PayoffModel};
use twinsgame_core::reduce::build_wel_game;
use twinsgame_core::rng::{stream, StreamRng};
use twinsgame_core::solve::symmetric_msne_2strategy;
use twinsgame_core::{AssignmentPlan, Clustering, Method, PlayRecord, PureProfile, SantaFeSpec, SolverConfig};

/// Regret recomputed from scratch: rebuild each deviating profile and
/// re-evaluate the full payoff vector.
fn naive_regret<G: PayoffModel>(game: &G, record: &PlayRecord, agent: usize) -> f64 {
    let s = game.descriptor().n_strategies;
    let t = record.profiles.len() as f64;
    let realized: f64 = record.profiles.iter().map(|p| game.payoffs(p).unwrap()[agent]).sum();
    let best = (0..s)
        .map(|alt| {
            record
                .profiles
                .iter()
                .map(|p| {
                    let mut q = p.0.clone();
                    q[agent] = alt;
                    game.payoffs(&PureProfile(q)).unwrap()[agent]
                })
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    (best - realized) / t
}

#[test]
fn regret_matches_naive_recomputation() {
    for seed in 0..4 {
        let game = sample_vendor_game(12, 2, 3, 1.5, &mut stream(seed, &[0])).unwrap();
        let mut rng = StreamRng::seed_from_u64(seed);
        let dists: Vec<Vec<f64>> = (0..12)
            .map(|_| {
                let w: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
                let t: f64 = w.iter().sum();
                w.iter().map(|v| v / t).collect()
            })
            .collect();
        let plan = AssignmentPlan { dists, method: Method::Cll };
        let record = assign_and_simulate(&game, &plan, 40, &mut rng).unwrap();
        let mut total = 0.0;
        for a in 0..12 {
            let r = external_regret(&game, &record, a).unwrap();
            assert_relative_eq!(r, naive_regret(&game, &record, a), epsilon = 1e-9);
            total += r;
        }
        let summary = summarize(&game, &record).unwrap();
        assert_relative_eq!(summary.mean_regret, total / 12.0, epsilon = 1e-9);
        let mean_payoff = record.payoffs.iter().flatten().sum::<f64>() / (12.0 * 40.0);
        assert_relative_eq!(summary.mean_payoff, mean_payoff, epsilon = 1e-9);
    }
}

#[test]
fn bar_game_regret_matches_naive_recomputation() {
    let game = SantaFeSpec::new(10, 0.6, (4.0, -6.0, 0.0)).unwrap();
    let plan = AssignmentPlan { dists: vec![vec![0.4, 0.6]; 10], method: Method::Twins };
    let record = assign_and_simulate(&game, &plan, 100, &mut StreamRng::seed_from_u64(9)).unwrap();
    for a in 0..10 {
        assert_relative_eq!(external_regret(&game, &record, a).unwrap(), naive_regret(&game, &record, a), epsilon = 1e-12);
    }
}

#[test]
fn pure_plans_are_played_exactly() {
    let game = sample_vendor_game(8, 2, 2, 1.0, &mut stream(1, &[0])).unwrap();
    let strategies = [0, 1, 1, 0, 1, 0, 0, 1];
    let plan = AssignmentPlan::pure(&strategies, 2, Method::All);
    let record = assign_and_simulate(&game, &plan, 5, &mut StreamRng::seed_from_u64(1)).unwrap();
    assert!(record.profiles.iter().all(|p| p.0 == strategies));
}

#[test]
fn baselines_follow_observed_means() {
    for seed in 0..5 {
        let game = sample_vendor_game(20, 2, 3, 1.5, &mut stream(seed, &[0])).unwrap();
        let obs = generate_observations(&game, 9, &mut stream(seed, &[1])).unwrap();
        let assignment: Vec<usize> = (0..20).map(|a| a % 2).collect();
        let clustering = Clustering::new(assignment.clone(), 2).unwrap();

        let oracle = |members: &dyn Fn(usize) -> bool| -> usize {
            let mut best = (usize::MAX, f64::NEG_INFINITY);
            for s in 0..3 {
                let vals: Vec<f64> = obs
                    .observations
                    .iter()
                    .flat_map(|o| (0..20).filter(|&a| members(a) && o.profile.0[a] == s).map(|a| o.payoffs[a]))
                    .collect();
                if !vals.is_empty() {
                    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                    if mean > best.1 {
                        best = (s, mean);
                    }
                }
            }
            best.0
        };

        let all = baseline_all(&obs).unwrap();
        for a in 0..20 {
            let expect = oracle(&|b| b == a);
            assert_eq!(all.dists[a][expect], 1.0, "agent {a}");
        }
        match baseline_cll(&obs, &clustering) {
            Ok(cll) => {
                for c in 0..2 {
                    let expect = oracle(&|b| assignment[b] == c);
                    for a in (0..20).filter(|&a| assignment[a] == c) {
                        assert_eq!(cll.dists[a][expect], 1.0);
                    }
                }
            }
            Err(e) => assert!(matches!(e, twinsgame_core::Error::Coverage { .. })),
        }
    }
}

fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= (n - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

#[test]
fn bar_game_equilibrium_matches_a_grid_scan() {
    for c in [0.3, 0.4, 0.5, 0.6, 0.7] {
        let spec = SantaFeSpec::new(10, c, (4.0, -6.0, 0.0)).unwrap();
        let cap = spec.comfortable_capacity() as u64;
        // Visiting pays 4 when at most cap-1 of the other 9 visit.
        let adv = |p: f64| {
            (0..=9u64)
                .map(|j| binomial_pmf(9, j, p) * if j < cap { 4.0 } else { -6.0 })
                .sum::<f64>()
        };
        let steps = 1_000_000;
        let root = (0..steps)
            .map(|i| (i + 1) as f64 / steps as f64)
            .find(|&p| adv(p) <= 0.0)
            .unwrap();
        let eq = santafe_true_msne(&spec);
        assert!((eq.p - root).abs() < 2e-6, "c={c}: {} vs {root}", eq.p);
    }
}

#[test]
fn five_group_reduction_root_matches_a_grid_scan() {
    for c in [0.3, 0.5, 0.7] {
        let spec = SantaFeSpec::new(10, c, (4.0, -6.0, 0.0)).unwrap();
        let cap = spec.comfortable_capacity() as u64;
        let wel = build_wel_game(&spec, 5).unwrap();
        let list = symmetric_msne_2strategy(&wel, &SolverConfig::default()).unwrap();
        // A visiting group of two shares the bar with 2j agents from the j other visiting groups.
        let adv = |p: f64| {
            (0..=4u64)
                .map(|j| binomial_pmf(4, j, p) * if 2 * (j + 1) <= cap { 4.0 } else { -6.0 })
                .sum::<f64>()
        };
        let steps = 1_000_000;
        let roots: Vec<f64> = (0..steps)
            .filter(|&i| {
                let (a, b) = (i as f64 / steps as f64, (i + 1) as f64 / steps as f64);
                adv(a) > 0.0 && adv(b) <= 0.0
            })
            .map(|i| (i + 1) as f64 / steps as f64)
            .collect();
        let interior: Vec<f64> = list
            .equilibria
            .iter()
            .map(|e| e.profile.dists[0][1])
            .filter(|&p| p > 1e-9 && p < 1.0 - 1e-9)
            .collect();
        assert_eq!(interior.len(), roots.len(), "c={c}");
        for (p, r) in interior.iter().zip(&roots) {
            assert!((p - r).abs() < 2e-6, "c={c}: {p} vs {r}");
        }
    }
}
