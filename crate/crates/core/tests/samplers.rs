mod common;

use rfpns::numerics::{CoolingSchedule, RngStream};
use rfpns::problems::{GraphModel, ToyLocalMaxInstance, ToyModel, HUB_A, HUB_B};
use rfpns::samplers::{
    jump_collapse, run_metropolis, run_rejection_free_sampling, weighted_expectation,
    write_jump_csv, write_trace_csv,
};
use rfpns::RunError;

use common::{chi_square, chi_square_critical, mh_kernel, six_state_graph};

fn six_state_model() -> (GraphModel, Vec<f64>, Vec<Vec<f64>>) {
    let (pi, adjacency) = six_state_graph();
    let kernel = mh_kernel(&pi, &adjacency);
    let log_pi = pi.iter().map(|v| v.ln()).collect();
    (GraphModel::new(log_pi, adjacency).unwrap(), pi, kernel)
}

/// Counts `from -> to` transitions of a state sequence.
fn transition_counts(states: &[usize], k: usize) -> Vec<Vec<u64>> {
    let mut counts = vec![vec![0u64; k]; k];
    for w in states.windows(2) {
        counts[w[0]][w[1]] += 1;
    }
    counts
}

/// Chi-square test of each row of observed transitions against the
/// corresponding kernel row, over cells with positive probability.
fn rows_match_kernel(counts: &[Vec<u64>], kernel: &[Vec<f64>]) {
    for (x, row) in counts.iter().enumerate() {
        let (obs, probs): (Vec<u64>, Vec<f64>) = row
            .iter()
            .zip(&kernel[x])
            .filter(|(_, &p)| p > 0.0)
            .map(|(&o, &p)| (o, p))
            .unzip();
        for (&o, &p) in row.iter().zip(&kernel[x]) {
            if p == 0.0 {
                assert_eq!(o, 0, "impossible transition out of {x} observed");
            }
        }
        if obs.len() < 2 {
            continue;
        }
        let stat = chi_square(&obs, &probs);
        let crit = chi_square_critical(obs.len() - 1, 1e-4);
        assert!(stat < crit, "state {x}: chi-square {stat:.2} >= {crit:.2}");
    }
}

#[test]
fn metropolis_transitions_follow_the_hastings_kernel() {
    let (model, _, kernel) = six_state_model();
    let steps = 400_000;
    let schedule = CoolingSchedule::constant(1.0, steps).unwrap();
    let trace = run_metropolis(&model, steps, &schedule, &RngStream::new(1, 0)).unwrap();
    assert_eq!(trace.len(), steps + 1);
    rows_match_kernel(&transition_counts(&trace.states, 6), &kernel);
}

#[test]
fn metropolis_occupation_approaches_pi() {
    let (model, pi, _) = six_state_model();
    let steps = 400_000;
    let schedule = CoolingSchedule::constant(1.0, steps).unwrap();
    let trace = run_metropolis(&model, steps, &schedule, &RngStream::new(2, 0)).unwrap();
    let z: f64 = pi.iter().sum();
    for s in 0..6 {
        let freq = trace.mean_of(|&x| f64::from(u8::from(x == s)));
        assert!((freq - pi[s] / z).abs() < 0.01, "state {s}: {freq} vs {}", pi[s] / z);
    }
}

#[test]
fn rejection_free_jumps_follow_the_jump_kernel() {
    let (model, _, kernel) = six_state_model();
    let jump_kernel: Vec<Vec<f64>> = kernel
        .iter()
        .enumerate()
        .map(|(x, row)| {
            let leave = 1.0 - row[x];
            row.iter()
                .enumerate()
                .map(|(y, &p)| if y == x { 0.0 } else { p / leave })
                .collect()
        })
        .collect();
    let rec = run_rejection_free_sampling(&model, 200_000, &RngStream::new(3, 0)).unwrap();
    assert!(rec.jump_states.windows(2).all(|w| w[0] != w[1]));
    rows_match_kernel(&transition_counts(&rec.jump_states, 6), &jump_kernel);
}

#[test]
fn multiplicity_means_match_inverse_escape_probabilities() {
    let (model, _, kernel) = six_state_model();
    let rec = run_rejection_free_sampling(&model, 200_000, &RngStream::new(4, 0)).unwrap();
    let escapes = rec.escape_probs.as_ref().expect("escape probabilities recorded");
    for s in 0..6 {
        let p = 1.0 - kernel[s][s];
        let ms: Vec<f64> = rec
            .jump_states
            .iter()
            .zip(&rec.multiplicities)
            .zip(escapes)
            .filter(|((&x, _), _)| x == s)
            .map(|((_, &m), &e)| {
                assert!((e - p).abs() < 1e-12, "recorded escape {e} vs {p}");
                m as f64
            })
            .collect();
        let mean = ms.iter().sum::<f64>() / ms.len() as f64;
        let sd = ((1.0 - p) / (p * p)).sqrt() / (ms.len() as f64).sqrt();
        assert!((mean - 1.0 / p).abs() <= 5.0 * sd + 1e-12, "state {s}: mean {mean} vs {}", 1.0 / p);
    }
}

#[test]
fn weighted_expectation_matches_pi() {
    let (model, pi, _) = six_state_model();
    let z: f64 = pi.iter().sum();
    let f = |&s: &usize| s as f64;
    let exact: f64 = (0..6).map(|s| pi[s] / z * s as f64).sum();
    let rec = run_rejection_free_sampling(&model, 100_000, &RngStream::new(5, 0)).unwrap();
    let est = weighted_expectation(&rec, f);
    assert!((est - exact).abs() < 0.03, "{est} vs {exact}");
}

#[test]
fn collapse_of_a_metropolis_run_is_a_jump_chain() {
    let (model, _, _) = six_state_model();
    let steps = 20_000;
    let schedule = CoolingSchedule::constant(1.0, steps).unwrap();
    let trace = run_metropolis(&model, steps, &schedule, &RngStream::new(6, 0)).unwrap();
    let rec = jump_collapse(&trace);
    assert_eq!(rec.total_steps(), trace.len() as u64);
    assert!(rec.jump_states.windows(2).all(|w| w[0] != w[1]));
    assert!(rec.multiplicities.iter().all(|&m| m >= 1));
    // the collapse loses nothing: weighted and plain averages coincide
    let f = |&s: &usize| (s * s) as f64;
    let plain = trace.mean_of(f);
    let weighted = weighted_expectation(&rec, f);
    assert!((plain - weighted).abs() < 1e-9 * plain.abs().max(1.0));
}

#[test]
fn toy_chain_leaves_a_at_the_closed_form_rate() {
    let inst = ToyLocalMaxInstance::new(10).unwrap();
    let model = ToyModel::new(&inst);
    let steps = 400_000;
    let schedule = CoolingSchedule::constant(1.0, steps).unwrap();
    let trace = run_metropolis(&model, steps, &schedule, &RngStream::new(7, 0)).unwrap();
    let (mut visits, mut escapes) = (0u64, 0u64);
    for w in trace.states.windows(2) {
        if w[0] == HUB_A {
            visits += 1;
            escapes += u64::from(w[1] != HUB_A);
        }
    }
    let p = inst.exact_escape_probability();
    let freq = escapes as f64 / visits as f64;
    let se = (p * (1.0 - p) / visits as f64).sqrt();
    assert!((freq - p).abs() < 4.0 * se, "{freq} vs {p}");
}

#[test]
fn toy_rejection_free_run_alternates_between_hubs_mostly() {
    let inst = ToyLocalMaxInstance::new(10).unwrap();
    let model = ToyModel::new(&inst);
    let rec = run_rejection_free_sampling(&model, 50_000, &RngStream::new(8, 0)).unwrap();
    let from_hubs: Vec<(usize, usize)> = rec
        .jump_states
        .windows(2)
        .filter(|w| w[0] == HUB_A || w[0] == HUB_B)
        .map(|w| (w[0], w[1]))
        .collect();
    let to_hub = from_hubs.iter().filter(|(x, y)| (*x == HUB_A && *y == HUB_B) || (*x == HUB_B && *y == HUB_A)).count();
    let freq = to_hub as f64 / from_hubs.len() as f64;
    let p = inst.exact_rf_hub_jump();
    let se = (p * (1.0 - p) / from_hubs.len() as f64).sqrt();
    assert!((freq - p).abs() < 5.0 * se + 1e-12, "{freq} vs {p}");
}

#[test]
fn chains_are_reproducible() {
    let (model, _, _) = six_state_model();
    let schedule = CoolingSchedule::geometric(5.0, 0.5, 1000).unwrap();
    let a = run_metropolis(&model, 1000, &schedule, &RngStream::new(9, 4)).unwrap();
    let b = run_metropolis(&model, 1000, &schedule, &RngStream::new(9, 4)).unwrap();
    assert_eq!(a.states, b.states);
    let c = run_metropolis(&model, 1000, &schedule, &RngStream::new(9, 5)).unwrap();
    assert_ne!(a.states, c.states);
    let r1 = run_rejection_free_sampling(&model, 500, &RngStream::new(9, 4)).unwrap();
    let r2 = run_rejection_free_sampling(&model, 500, &RngStream::new(9, 4)).unwrap();
    assert_eq!(r1.jump_states, r2.jump_states);
    assert_eq!(r1.multiplicities, r2.multiplicities);
}

#[test]
fn metropolis_rejects_steps_beyond_the_schedule() {
    let (model, _, _) = six_state_model();
    let schedule = CoolingSchedule::constant(1.0, 10).unwrap();
    let err = run_metropolis(&model, 11, &schedule, &RngStream::new(0, 0)).unwrap_err();
    assert!(matches!(err, RunError::Config(_)));
}

#[test]
fn zero_step_chain_is_the_initial_state() {
    let (model, _, _) = six_state_model();
    let model = model.starting_at(3);
    let schedule = CoolingSchedule::constant(1.0, 1).unwrap();
    let trace = run_metropolis(&model, 0, &schedule, &RngStream::new(0, 0)).unwrap();
    assert_eq!(trace.states, vec![3]);
}

#[test]
fn trace_and_jump_csv_have_fixed_columns() {
    let (model, _, _) = six_state_model();
    let schedule = CoolingSchedule::constant(1.0, 5).unwrap();
    let trace = run_metropolis(&model, 5, &schedule, &RngStream::new(10, 0)).unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, &model, &trace).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,state_id,log_target,multiplicity");
    assert_eq!(lines.len(), 7);
    assert!(lines[1..].iter().all(|l| l.ends_with(",1")));

    let rec = jump_collapse(&trace);
    let mut buf = Vec::new();
    write_jump_csv(&mut buf, &model, &rec).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), rec.len() + 1);
    let total: u64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 6);
}
