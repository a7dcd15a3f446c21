use divsim::diversity::{collaboration_graph, dfd, dfd_from_counts, dominant_counts, ifd, ifds, sdi, skill_distance};
use divsim::engine::{pass_phase, run_simulation, SimState};
use divsim::model::{Agent, GenerationMode, ModelParams, PassingScheme, Team};
use divsim::rng::stream;
use divsim::stats::{ols2, pearson, student_t_sf};
use divsim::teamgen::{generate_task, generate_tasks, generate_team, TeamSpec};
use proptest::prelude::*;

const OMEGA: f64 = 10.0;

/// Skill vectors with total `OMEGA`.
fn skills(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n)
        .prop_filter("non-zero", |v| v.iter().sum::<f64>() > 1e-6)
        .prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x * OMEGA / s).collect()
        })
}

fn team(n_agents: usize, n_functions: usize) -> impl Strategy<Value = Team> {
    (prop::collection::vec(skills(n_functions), n_agents), any::<u64>()).prop_map(|(vs, seed)| {
        let mut rng = stream(seed);
        let agents = vs
            .into_iter()
            .enumerate()
            .map(|(i, v)| Agent::from_skills(i, v, &mut rng).unwrap())
            .collect();
        Team::new(agents).unwrap()
    })
}

fn params_for(scheme: PassingScheme, tau: f64) -> ModelParams {
    ModelParams {
        passing_scheme: scheme,
        tau,
        ..ModelParams::default()
    }
}

proptest! {
    #[test]
    fn metrics_lie_in_unit_interval(t in team(10, 9)) {
        for v in [ifd(&t).unwrap(), dfd(&t).unwrap(), sdi(&t).unwrap()] {
            prop_assert!((0.0..=1.0).contains(&v), "{v}");
        }
        for a in t.agents() {
            let v = ifds(a).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn ifds_ignores_scale_and_order(v in skills(9), k in 0.01f64..100.0, rot in 0usize..9) {
        let mut rng = stream(1);
        let a = Agent::from_skills(0, v.clone(), &mut rng).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
        let mut rotated = v.clone();
        rotated.rotate_left(rot);
        let b = Agent::from_skills(0, scaled, &mut rng).unwrap();
        let c = Agent::from_skills(0, rotated, &mut rng).unwrap();
        prop_assert!((ifds(&a).unwrap() - ifds(&b).unwrap()).abs() < 1e-9);
        prop_assert!((ifds(&a).unwrap() - ifds(&c).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn dfd_depends_only_on_counts(t in team(10, 9)) {
        let counts = dominant_counts(&t);
        prop_assert_eq!(counts.iter().sum::<usize>(), 10);
        let mut permuted = counts.clone();
        permuted.reverse();
        prop_assert!((dfd(&t).unwrap() - dfd_from_counts(&permuted).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn distance_is_a_bounded_metric(a in skills(9), b in skills(9), c in skills(9)) {
        let d = |x: &[f64], y: &[f64]| skill_distance(x, y).unwrap();
        prop_assert!(d(&a, &a) == 0.0);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-12);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
        prop_assert!(d(&a, &b) <= OMEGA * 2f64.sqrt() + 1e-9);
    }

    #[test]
    fn collaboration_graph_is_symmetric_and_irreflexive(t in team(10, 9), tau in 0.0f64..1.2) {
        let g = collaboration_graph(&t, &params_for(PassingScheme::PassIfStuck, tau));
        for m in 0..10 {
            prop_assert!(!g.connected(m, m));
            for n in 0..10 {
                prop_assert_eq!(g.connected(m, n), g.connected(n, m));
            }
        }
    }

    #[test]
    fn threshold_above_max_distance_connects_everyone(t in team(10, 9)) {
        let g = collaboration_graph(&t, &params_for(PassingScheme::PassIfStuck, 1.0 + 1e-9));
        prop_assert_eq!(g.edge_count(), 45);
    }

    #[test]
    fn no_collaborators_no_passes(t in team(10, 9), seed in any::<u64>(), always in any::<bool>()) {
        let scheme = if always { PassingScheme::AlwaysPass } else { PassingScheme::PassIfStuck };
        let params = params_for(scheme, 0.0);
        let mut rng = stream(seed);
        let tasks = generate_tasks(&params, &mut rng);
        let r = run_simulation(&t, tasks, &params, &mut rng).unwrap();
        prop_assert_eq!(r.passes, 0);
    }

    #[test]
    fn work_is_conserved_each_step(t in team(10, 9), seed in any::<u64>(), always in any::<bool>()) {
        let scheme = if always { PassingScheme::AlwaysPass } else { PassingScheme::PassIfStuck };
        let params = params_for(scheme, 0.8);
        let graph = collaboration_graph(&t, &params);
        let mut rng = stream(seed);
        let tasks = generate_tasks(&params, &mut rng);
        let mut st = SimState::new(&t, tasks).unwrap();
        for _ in 0..60 {
            st.assign_phase(&mut rng);
            pass_phase(&mut st, scheme, &graph, &mut rng);
            let before = st.remaining_work();
            let work = st.work_phase();
            prop_assert!((before - st.remaining_work() - work).abs() < 1e-6);
            // No agent holds two tasks and no task has two holders.
            let mut seen = std::collections::HashSet::new();
            for (a, k) in st.assignments() {
                prop_assert!(seen.insert(k));
                prop_assert_eq!(st.holder_of(k), Some(a));
            }
            st.step += 1;
            if st.all_complete() {
                break;
            }
        }
    }

    #[test]
    fn runs_replay_exactly(t in team(10, 9), seed in any::<u64>()) {
        let params = params_for(PassingScheme::AlwaysPass, 0.8);
        let run = || {
            let mut rng = stream(seed);
            let tasks = generate_tasks(&params, &mut rng);
            run_simulation(&t, tasks, &params, &mut rng).unwrap()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn results_are_internally_consistent(t in team(10, 9), seed in any::<u64>()) {
        let params = params_for(PassingScheme::PassIfStuck, 0.8);
        let mut rng = stream(seed);
        let tasks = generate_tasks(&params, &mut rng);
        let r = run_simulation(&t, tasks, &params, &mut rng).unwrap();
        prop_assert!(r.steps_taken >= 1 && r.steps_taken <= params.max_steps);
        prop_assert!(r.completed_components <= r.total_components);
        prop_assert!((r.performance - r.completed_components as f64 / r.total_components as f64).abs() < 1e-12);
        prop_assert!((r.comm_density - r.passes as f64 / r.steps_taken as f64).abs() < 1e-12);
        prop_assert_eq!(r.all_solved, r.completed_components == r.total_components);
    }

    #[test]
    fn tasks_carry_theta(seed in any::<u64>()) {
        let params = ModelParams::default();
        let t = generate_task(0, &params, &mut stream(seed));
        prop_assert!((t.requirements().iter().sum::<f64>() - params.theta).abs() < 1e-9);
        prop_assert!(t.requirements().iter().all(|&r| r > 0.0));
    }

    #[test]
    fn generated_teams_hit_ifd_and_keep_omega(
        ifd_t in 0.0f64..=1.0,
        dfd_t in 0.0f64..=0.99,
        seed in any::<u64>(),
        mix in any::<bool>(),
        specgen in any::<bool>(),
    ) {
        let params = ModelParams {
            mix_skills: mix,
            generation_mode: if specgen { GenerationMode::SpecGen } else { GenerationMode::IfdsDistribution },
            ..ModelParams::default()
        };
        let spec = TeamSpec::from_params(&params, ifd_t, dfd_t);
        let t = generate_team(&spec, &params, &mut stream(seed)).unwrap();
        prop_assert_eq!(t.len(), 10);
        let tol = if specgen { 0.05 + 1e-9 } else { 1e-3 };
        prop_assert!((ifd(&t).unwrap() - ifd_t).abs() <= tol, "{} vs {}", ifd(&t).unwrap(), ifd_t);
        for a in t.agents() {
            prop_assert!((a.total_skill() - params.omega).abs() < 1e-9);
            if !mix && !specgen {
                let rest: Vec<f64> = (0..9).filter(|&j| j != a.dominant_function()).map(|j| a.skills()[j]).collect();
                prop_assert!(rest.windows(2).all(|w| w[0] >= w[1] - 1e-12));
            }
        }
    }

    #[test]
    fn generation_is_deterministic(ifd_t in 0.0f64..=1.0, dfd_t in 0.0f64..=0.99, seed in any::<u64>()) {
        let params = ModelParams::default();
        let spec = TeamSpec::from_params(&params, ifd_t, dfd_t);
        let a = generate_team(&spec, &params, &mut stream(seed)).unwrap();
        let b = generate_team(&spec, &params, &mut stream(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn t_tail_is_symmetric(t in -20.0f64..20.0, df in 1.0f64..400.0) {
        let s = student_t_sf(t, df).unwrap() + student_t_sf(-t, df).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pearson_is_affine_invariant(
        xy in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 5..40),
        a in 0.1f64..10.0,
        b in -50.0f64..50.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        prop_assume!(x.iter().any(|&v| (v - x[0]).abs() > 1e-3) && y.iter().any(|&v| (v - y[0]).abs() > 1e-3));
        let r = pearson(&x, &y).unwrap().r;
        let xt: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        prop_assert!((pearson(&xt, &y).unwrap().r - r).abs() < 1e-9);
        prop_assert!((pearson(&x, &neg).unwrap().r + r).abs() < 1e-9);
    }

    #[test]
    fn ols_recovers_exact_affine_relations(
        b in (-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0),
        pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 6..30),
    ) {
        let (x1, x2): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        // Keep the design well conditioned.
        let m1 = x1.iter().sum::<f64>() / x1.len() as f64;
        let m2 = x2.iter().sum::<f64>() / x2.len() as f64;
        let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
        for (u, v) in x1.iter().zip(&x2) {
            s11 += (u - m1).powi(2);
            s22 += (v - m2).powi(2);
            s12 += (u - m1) * (v - m2);
        }
        prop_assume!(s11 > 1.0 && s22 > 1.0 && s12 * s12 < 0.9 * s11 * s22);
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(u, v)| b.0 + b.1 * u + b.2 * v).collect();
        let fit = ols2(&y, &x1, &x2).unwrap();
        prop_assert!((fit.intercept.estimate - b.0).abs() < 1e-8);
        prop_assert!((fit.x1.estimate - b.1).abs() < 1e-8);
        prop_assert!((fit.x2.estimate - b.2).abs() < 1e-8);
    }
}
