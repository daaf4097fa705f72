use optdg_core::log::{generate_synthetic_log, GeneratorSpec, RandomSpecParams};
use optdg_core::solver::{LpStatus, DEFAULT_BRUTE_FORCE_CAP, FEASIBILITY_TOL};
use optdg_core::{
    brute_force_solve, build_model, count_relations, dependency_measures, discover, extract_graph, lp_relax_solve,
    solve, validate_paths, DiscoveryConfig, EventLog, SolveLimits, SolveStatus,
};

const EPS: f64 = 1e-7;

fn small_log(seed: u64) -> EventLog {
    let params = RandomSpecParams {
        alphabet_size: 2 + (seed % 2) as usize,
        ..RandomSpecParams::default()
    };
    let spec = GeneratorSpec::random(&params, seed).unwrap();
    generate_synthetic_log(&spec, 30, 0.05 * (seed % 3) as f64, seed).unwrap()
}

fn config(seed: u64) -> DiscoveryConfig {
    let mut cfg = DiscoveryConfig::default();
    cfg.max_arcs_ratio = [1.1, 1.5, 2.0, 3.0][(seed % 4) as usize];
    cfg.dep_thresh = [0.0, 0.5, 0.9][(seed % 3) as usize];
    cfg
}

#[test]
fn sequence_objective() {
    let log = EventLog::from_traces([(vec!["s", "a", "e"], 10)])
        .unwrap()
        .ensure_unique_endpoints();
    let found = discover(&log, &DiscoveryConfig::default(), &SolveLimits::default()).unwrap();
    assert_eq!(
        found.graph.named_arcs(),
        vec![("s".to_string(), "a".to_string()), ("a".into(), "e".into())]
    );
    assert!((found.objective - (20.0 / 11.0 - 2.0 * EPS)).abs() < 1e-9);
}

#[test]
fn concurrency_objective() {
    let log = EventLog::from_traces([(vec!["s", "a", "b", "e"], 10), (vec!["s", "b", "a", "e"], 10)])
        .unwrap()
        .ensure_unique_endpoints();
    let found = discover(&log, &DiscoveryConfig::default(), &SolveLimits::default()).unwrap();
    assert_eq!(found.graph.arc_count(), 4);
    for (x, y) in [("s", "a"), ("s", "b"), ("a", "e"), ("b", "e")] {
        let (x, y) = (found.graph.task_id(x).unwrap(), found.graph.task_id(y).unwrap());
        assert!(found.graph.has_arc(x, y));
    }
    assert!((found.objective - (40.0 / 11.0 - 4.0 * EPS)).abs() < 1e-9);
}

#[test]
fn zero_input_cap_is_infeasible() {
    let log = EventLog::from_traces([(vec!["s", "a", "e"], 10)])
        .unwrap()
        .ensure_unique_endpoints();
    let meas = dependency_measures(&count_relations(&log));
    let cfg = DiscoveryConfig {
        max_inputs: 0,
        ..DiscoveryConfig::default()
    };
    let model = build_model(&meas, log.start().unwrap(), log.end().unwrap(), &cfg).unwrap();
    assert_eq!(
        solve(&model, &SolveLimits::default()).unwrap().status,
        SolveStatus::Infeasible
    );
    let brute = brute_force_solve(&meas, log.start().unwrap(), log.end().unwrap(), &cfg, 5).unwrap();
    assert_eq!(brute.status, SolveStatus::Infeasible);
}

#[test]
fn solver_matches_oracle() {
    for seed in 0..40 {
        let log = small_log(seed);
        let meas = dependency_measures(&count_relations(&log));
        let (s, e) = (log.start().unwrap(), log.end().unwrap());
        let cfg = config(seed);
        let model = build_model(&meas, s, e, &cfg).unwrap();
        let ilp = solve(&model, &SolveLimits::default()).unwrap();
        let brute = brute_force_solve(&meas, s, e, &cfg, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(ilp.status, brute.status, "seed {seed}");
        if ilp.status != SolveStatus::Optimal {
            continue;
        }
        let (a, b) = (ilp.objective_value.unwrap(), brute.objective_value.unwrap());
        assert!((a - b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
        let oracle = brute.assignment.unwrap();
        model.check_feasible(&oracle, FEASIBILITY_TOL).unwrap();
        assert!((model.evaluate_objective(&oracle) - b).abs() < 1e-9, "seed {seed}");
    }
}

#[test]
fn relaxation_bounds_the_optimum() {
    for seed in 100..130 {
        let log = small_log(seed);
        let meas = dependency_measures(&count_relations(&log));
        let (s, e) = (log.start().unwrap(), log.end().unwrap());
        let cfg = config(seed);
        let model = build_model(&meas, s, e, &cfg).unwrap();
        let relax = lp_relax_solve(&model).unwrap();
        let brute = brute_force_solve(&meas, s, e, &cfg, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        if let Some(opt) = brute.objective_value {
            assert_eq!(relax.status, LpStatus::Optimal);
            assert!(relax.bound.unwrap() >= opt - 1e-6, "seed {seed}");
        }
    }
}

#[test]
fn discovered_graphs_satisfy_paths() {
    for seed in 200..240 {
        let params = RandomSpecParams {
            alphabet_size: 6,
            loop_prob: 0.3,
            ..RandomSpecParams::default()
        };
        let spec = GeneratorSpec::random(&params, seed).unwrap();
        let log = generate_synthetic_log(&spec, 40, 0.1, seed).unwrap();
        let meas = dependency_measures(&count_relations(&log));
        let cfg = config(seed);
        let model = build_model(&meas, log.start().unwrap(), log.end().unwrap(), &cfg).unwrap();
        let sol = solve(&model, &SolveLimits::default()).unwrap();
        if sol.status != SolveStatus::Optimal {
            continue;
        }
        let g = extract_graph(&model, &sol, log.start().unwrap(), log.end().unwrap()).unwrap();
        validate_paths(&g).unwrap();
        assert!(g.arc_count() as f64 <= (g.num_tasks() as f64 * cfg.max_arcs_ratio).ceil());
    }
}
