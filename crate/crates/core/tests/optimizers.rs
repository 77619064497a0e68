mod common;

use rfpns::model::ProblemModel;
use rfpns::numerics::{CoolingSchedule, RngStream};
use rfpns::optimizers::{
    run_optimizer, run_optimizer_sampled, OptRunConfig, PnsMethod, PnsStrategy,
};
use rfpns::problems::{
    KnapsackInstance, KnapsackModel, QuboInstance, QuboModel, SimplexQpInstance, SimplexQpModel,
};
use rfpns::RunError;

use common::{decode_bits, naive_knapsack_totals, naive_quadratic_form, naive_qubo_optimum};

fn qubo(n: usize, seed: u64) -> QuboInstance {
    QuboInstance::generate(n, true, &mut RngStream::new(seed, 0))
}

fn geometric(steps: usize) -> CoolingSchedule {
    CoolingSchedule::geometric(10.0, 0.1, steps).unwrap()
}

fn all_configs(steps: usize) -> Vec<OptRunConfig> {
    vec![
        OptRunConfig::sa(geometric(steps), steps),
        OptRunConfig::rf(geometric(steps), steps),
        OptRunConfig::pns(geometric(steps), steps, PnsStrategy::random(0.25).unwrap()),
        OptRunConfig::pns(geometric(steps), steps, PnsStrategy::new(PnsMethod::SystematicEvery10, 0.5).unwrap()),
        OptRunConfig::tabu(geometric(steps), steps, 3),
    ]
}

#[test]
fn zero_iterations_report_the_initial_state() {
    let inst = qubo(10, 1);
    let start = vec![true, false, true, true, false, false, true, false, false, true];
    let model = QuboModel::new(&inst).with_initial(start.clone()).unwrap();
    for config in all_configs(2).into_iter().map(|mut c| {
        c.iterations = 0;
        c
    }) {
        let trace = run_optimizer(&model, &config, &RngStream::new(0, 0)).unwrap();
        assert_eq!(trace.best_state, start);
        assert_eq!(trace.best_objective, naive_quadratic_form(&inst, &start));
        assert_eq!(trace.steps_to_best, 0);
        assert_eq!(trace.steps_run, 0);
        assert_eq!(trace.evaluations, 0);
    }
}

#[test]
fn every_algorithm_finds_a_small_optimum() {
    for seed in 0..4 {
        let inst = qubo(8, 100 + seed);
        let (opt, _) = naive_qubo_optimum(&inst);
        let model = QuboModel::new(&inst);
        // method D is left out: holding one half of the bits for ten forced
        // moves can pin a cold chain inside a block
        for config in all_configs(3000).into_iter().filter(|c| {
            c.pns.as_ref().is_none_or(|p| p.method != PnsMethod::SystematicEvery10)
        }) {
            let mut best = f64::NEG_INFINITY;
            for rep in 0..10 {
                let trace = run_optimizer(&model, &config, &RngStream::new(seed, rep)).unwrap();
                let exact = naive_quadratic_form(&inst, &trace.best_state);
                assert!((trace.best_objective - exact).abs() < 1e-9 * (1.0 + exact.abs()));
                best = best.max(trace.best_objective);
            }
            assert!(
                (best - opt).abs() < 1e-9 * (1.0 + opt.abs()),
                "{:?} found {best} of {opt} in ten runs",
                config.algorithm
            );
        }
    }
}

#[test]
fn systematic_blocks_stay_inside_the_active_half_between_refreshes() {
    let inst = qubo(8, 100);
    let model = QuboModel::new(&inst);
    let steps = 200;
    let strategy = PnsStrategy::new(PnsMethod::SystematicEvery10, 0.5).unwrap();
    let config = OptRunConfig::pns(geometric(steps), steps, strategy).recording(true);
    let trace = run_optimizer(&model, &config, &RngStream::new(0, 1)).unwrap();
    let flipped: Vec<usize> = trace
        .visited
        .windows(2)
        .map(|w| w[0].state_id.bytes().zip(w[1].state_id.bytes()).position(|(a, b)| a != b).unwrap())
        .collect();
    for block in flipped.chunks(10) {
        let low = block.iter().all(|&i| i < 4);
        let high = block.iter().all(|&i| i >= 4);
        assert!(low || high, "one refresh window touched both halves: {block:?}");
    }
}

#[test]
fn cold_rejection_free_climbs_then_takes_the_least_bad_flip() {
    let inst = qubo(12, 7);
    let model = QuboModel::new(&inst);
    let steps = 40;
    let config = OptRunConfig::rf(CoolingSchedule::constant(1e-3, steps).unwrap(), steps).recording(true);
    let trace = run_optimizer(&model, &config, &RngStream::new(3, 0)).unwrap();
    let mut saw_local_max = false;
    for w in trace.visited.windows(2) {
        let x = decode_bits(&w[0].state_id);
        let y = decode_bits(&w[1].state_id);
        let here = naive_quadratic_form(&inst, &x);
        let flips: Vec<f64> = (0..12)
            .map(|i| {
                let mut z = x.clone();
                z[i] ^= true;
                naive_quadratic_form(&inst, &z) - here
            })
            .collect();
        let moved = naive_quadratic_form(&inst, &y) - here;
        if flips.iter().any(|&d| d > 0.0) {
            // every uphill neighbor carries weight one; downhill ones are
            // suppressed by exp(delta / T)
            assert!(moved > 0.0, "step {}: moved downhill with uphill available", w[1].step);
        } else {
            saw_local_max = true;
            let least_bad = flips.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!((moved - least_bad).abs() < 1e-9, "step {}: {moved} vs {least_bad}", w[1].step);
        }
    }
    assert!(saw_local_max);
}

#[test]
fn evaluation_counts_follow_the_subset_size() {
    let inst = qubo(12, 2);
    let model = QuboModel::new(&inst);
    let steps = 200;
    let rng = RngStream::new(5, 0);
    let sa = run_optimizer(&model, &OptRunConfig::sa(geometric(steps), steps), &rng).unwrap();
    assert_eq!(sa.evaluations, steps as u64);
    let rf = run_optimizer(&model, &OptRunConfig::rf(geometric(steps), steps), &rng).unwrap();
    assert_eq!(rf.evaluations, 12 * steps as u64);
    for (fraction, k) in [(0.25, 3u64), (0.5, 6), (0.75, 9)] {
        let config = OptRunConfig::pns(geometric(steps), steps, PnsStrategy::random(fraction).unwrap());
        assert_eq!(config.evaluations_per_step(12).unwrap(), k as usize);
        let pns = run_optimizer(&model, &config, &rng).unwrap();
        assert_eq!(pns.evaluations, k * steps as u64);
    }
    let tabu = run_optimizer(&model, &OptRunConfig::tabu(geometric(steps), steps, 1), &rng).unwrap();
    // the previous state is always a neighbor, so exactly one is excluded
    assert_eq!(tabu.evaluations, 12 + 11 * (steps as u64 - 1));
}

#[test]
fn recorded_best_is_the_first_maximum_of_the_trace() {
    let inst = qubo(14, 3);
    let model = QuboModel::new(&inst);
    for config in all_configs(400) {
        let trace = run_optimizer(&model, &config.recording(true), &RngStream::new(11, 2)).unwrap();
        assert_eq!(trace.visited.len(), trace.steps_run + 1);
        let max = trace.visited.iter().map(|v| v.log_target).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max, trace.best_log_target);
        let first = trace.visited.iter().position(|v| v.log_target == max).unwrap();
        assert_eq!(first, trace.steps_to_best);
        for v in &trace.visited {
            let exact = naive_quadratic_form(&inst, &decode_bits(&v.state_id));
            assert!((v.log_target - exact).abs() < 1e-9 * (1.0 + exact.abs()));
        }
    }
}

#[test]
fn rejection_free_moves_every_step() {
    let inst = qubo(10, 4);
    let model = QuboModel::new(&inst);
    let steps = 300;
    for config in &all_configs(steps)[1..] {
        let trace = run_optimizer(&model, &config.clone().recording(true), &RngStream::new(1, 1)).unwrap();
        for w in trace.visited.windows(2) {
            let a = decode_bits(&w[0].state_id);
            let b = decode_bits(&w[1].state_id);
            let flips = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            assert_eq!(flips, 1, "{:?} at step {}", config.algorithm, w[1].step);
        }
    }
}

#[test]
fn tabu_never_returns_to_its_window() {
    let inst = qubo(10, 5);
    let model = QuboModel::new(&inst);
    let steps = 500;
    for length in [1usize, 2, 3, 5, 9] {
        let config = OptRunConfig::tabu(CoolingSchedule::constant(0.5, steps).unwrap(), steps, length).recording(true);
        let trace = run_optimizer(&model, &config, &RngStream::new(length as u64, 0)).unwrap();
        let states: Vec<&str> = trace.visited.iter().map(|v| v.state_id.as_str()).collect();
        for k in 1..states.len() {
            let window = &states[k.saturating_sub(length + 1)..k - 1];
            assert!(!window.contains(&states[k]), "L={length}: step {k} revisits {}", states[k]);
        }
    }
}

#[test]
fn target_stops_the_run_early() {
    let inst = qubo(10, 6);
    let (opt, _) = naive_qubo_optimum(&inst);
    let model = QuboModel::new(&inst);
    let steps = 100_000;
    let config = OptRunConfig::rf(geometric(steps), steps).with_target(opt);
    let trace = run_optimizer(&model, &config, &RngStream::new(0, 0)).unwrap();
    assert!(trace.reached_target);
    assert!(trace.steps_run < steps);
    assert_eq!(trace.steps_run, trace.steps_to_best);
    assert_eq!(trace.evaluations, 10 * trace.steps_run as u64);
}

#[test]
fn runs_are_reproducible_and_seed_sensitive() {
    let inst = qubo(16, 8);
    let model = QuboModel::new(&inst);
    for config in all_configs(300) {
        let config = config.recording(true);
        let a = run_optimizer(&model, &config, &RngStream::new(42, 1)).unwrap();
        let b = run_optimizer(&model, &config, &RngStream::new(42, 1)).unwrap();
        assert_eq!(a.visited, b.visited);
        let c = run_optimizer(&model, &config, &RngStream::new(42, 2)).unwrap();
        assert_ne!(a.visited, c.visited, "{:?}", config.algorithm);
    }
}

#[test]
fn knapsack_runs_stay_feasible() {
    let inst = KnapsackInstance::generate(40, 8000.0, &mut RngStream::new(9, 0)).unwrap();
    let model = KnapsackModel::new(&inst);
    for config in all_configs(2000) {
        let trace = run_optimizer(&model, &config.recording(true), &RngStream::new(9, 1)).unwrap();
        for v in &trace.visited {
            let (w, value) = naive_knapsack_totals(&inst, &decode_bits(&v.state_id));
            assert!(w <= inst.capacity(), "weight {w} over capacity");
            if value > 0.0 {
                assert!((v.log_target - value.ln()).abs() < 1e-12);
            }
        }
        let (_, best) = naive_knapsack_totals(&inst, &trace.best_state);
        assert_eq!(trace.best_objective, best);
    }
}

#[test]
fn all_infeasible_neighbors_are_an_absorbing_state() {
    let inst = KnapsackInstance::new(1.0, vec![5.0, 7.0, 9.0], vec![1.0, 2.0, 3.0]).unwrap();
    let model = KnapsackModel::new(&inst);
    let steps = 10;
    let rf = run_optimizer(&model, &OptRunConfig::rf(geometric(steps), steps), &RngStream::new(0, 0));
    assert!(matches!(rf, Err(RunError::AbsorbingState { step: 1 })));
    let pns = OptRunConfig::pns(geometric(steps), steps, PnsStrategy::random_count(1).unwrap());
    assert!(matches!(
        run_optimizer(&model, &pns, &RngStream::new(0, 0)),
        Err(RunError::AbsorbingState { .. })
    ));
    // simulated annealing simply rejects and stays put
    let sa = run_optimizer(&model, &OptRunConfig::sa(geometric(steps), steps), &RngStream::new(0, 0)).unwrap();
    assert_eq!(sa.best_state, vec![false; 3]);
}

#[test]
fn sampled_neighborhoods_run_sa_and_pns_only() {
    let inst = SimplexQpInstance::generate(8, 0.1, &mut RngStream::new(1, 0)).unwrap();
    let model = SimplexQpModel::new(&inst);
    let steps = 2000;
    let pns = OptRunConfig::pns(geometric(steps), steps, PnsStrategy::random_count(10).unwrap());
    let trace = run_optimizer_sampled(&model, &pns, &RngStream::new(2, 0)).unwrap();
    assert_eq!(trace.evaluations, 10 * steps as u64);
    assert!((trace.best_state.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(trace.best_objective >= model.objective(&model.initial_state()));
    let sa = OptRunConfig::sa(geometric(steps), steps);
    assert!(run_optimizer_sampled(&model, &sa, &RngStream::new(2, 0)).is_ok());
    let rf = OptRunConfig::rf(geometric(steps), steps);
    assert!(matches!(
        run_optimizer_sampled(&model, &rf, &RngStream::new(2, 0)),
        Err(RunError::Config(_))
    ));
    let fraction = OptRunConfig::pns(geometric(steps), steps, PnsStrategy::random(0.5).unwrap());
    assert!(matches!(
        run_optimizer_sampled(&model, &fraction, &RngStream::new(2, 0)),
        Err(RunError::Config(_))
    ));
}

#[test]
fn configurations_are_validated_before_running() {
    let inst = qubo(6, 1);
    let model = QuboModel::new(&inst);
    let short = OptRunConfig::rf(geometric(10), 20);
    assert!(matches!(
        run_optimizer(&model, &short, &RngStream::new(0, 0)),
        Err(RunError::Config(_))
    ));
    let too_many = OptRunConfig::pns(geometric(10), 10, PnsStrategy::random_count(7).unwrap());
    assert!(run_optimizer(&model, &too_many, &RngStream::new(0, 0)).is_err());
    assert!(PnsStrategy::new(PnsMethod::SystematicEveryStep, 0.25).is_err());
    assert!(PnsStrategy::random(0.0).is_err());
    assert!(PnsStrategy::random(1.5).is_err());
}

#[test]
fn trace_csv_has_a_header_even_when_empty() {
    let inst = qubo(5, 1);
    let model = QuboModel::new(&inst);
    let trace = run_optimizer(&model, &OptRunConfig::rf(geometric(4), 4), &RngStream::new(0, 0)).unwrap();
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "step,state_id,log_target,n_candidates,wall_time_cumulative\n");

    let recorded = run_optimizer(&model, &OptRunConfig::rf(geometric(4), 4).recording(true), &RngStream::new(0, 0)).unwrap();
    let mut buf = Vec::new();
    recorded.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().nth(2).unwrap().ends_with(",5,"));
}
