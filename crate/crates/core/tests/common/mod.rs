//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code under test beyond reading instance data.

#![allow(dead_code)]

use rfpns::problems::{IsingXorInstance, KnapsackInstance, QuboInstance};

/// `x^T Q x` summed over every entry of the dense matrix.
pub fn naive_quadratic_form(q: &QuboInstance, x: &[bool]) -> f64 {
    let n = q.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if x[i] && x[j] {
                total += q.get(i, j);
            }
        }
    }
    total
}

pub fn bits_of(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Exhaustive maximum of `x^T Q x` and the number of maximizers (within a
/// relative tolerance), by plain enumeration.
pub fn naive_qubo_optimum(q: &QuboInstance) -> (f64, usize) {
    let n = q.n();
    assert!(n <= 20, "naive enumeration is for small instances");
    let values: Vec<f64> = (0..1u64 << n)
        .map(|m| naive_quadratic_form(q, &bits_of(m, n)))
        .collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ties = values
        .iter()
        .filter(|&&v| (v - best).abs() <= 1e-9 * (1.0 + best.abs()))
        .count();
    (best, ties)
}

/// `H(s) = sum_r (-1)^{b_r} prod_{i in row r} s_i`, read straight off the
/// linear system `A x = b (mod 2)` with `s_i = (-1)^{x_i}`.
pub fn naive_ising_energy(inst: &IsingXorInstance, x: &[bool]) -> i64 {
    inst.a_matrix()
        .iter()
        .zip(inst.b_vector())
        .map(|(row, &b)| {
            let mut term: i64 = if b { -1 } else { 1 };
            for (i, &in_row) in row.iter().enumerate() {
                if in_row && x[i] {
                    term = -term;
                }
            }
            term
        })
        .sum()
}

pub fn naive_knapsack_totals(inst: &KnapsackInstance, x: &[bool]) -> (f64, f64) {
    let mut w = 0.0;
    let mut v = 0.0;
    for (i, &b) in x.iter().enumerate() {
        if b {
            w += inst.weights()[i];
            v += inst.values()[i];
        }
    }
    (w, v)
}

pub fn decode_bits(s: &str) -> Vec<bool> {
    s.chars()
        .map(|c| match c {
            '0' => false,
            '1' => true,
            other => panic!("unexpected state character {other:?}"),
        })
        .collect()
}

/// One-sample Kolmogorov-Smirnov statistic against `Uniform(0, 1)`.
pub fn ks_uniform_statistic(sample: &[f64]) -> f64 {
    let mut u = sample.to_vec();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i + 1) as f64 / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of a KS statistic `d` from `n` observations, with
/// Stephens' small-sample correction.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Pearson chi-square statistic of observed counts against expected
/// probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// Metropolis-Hastings kernel for a uniform-over-neighbors proposal on an
/// undirected graph, written out from the acceptance rule
/// `min{1, π(y) deg(x) / (π(x) deg(y))}`.
pub fn mh_kernel(pi: &[f64], adjacency: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let k = pi.len();
    let mut p = vec![vec![0.0; k]; k];
    for x in 0..k {
        let dx = adjacency[x].len() as f64;
        for &y in &adjacency[x] {
            let dy = adjacency[y].len() as f64;
            p[x][y] = (pi[y] * dx / (pi[x] * dy)).min(1.0) / dx;
        }
        p[x][x] = 1.0 - p[x].iter().sum::<f64>();
    }
    p
}

/// Six states on an irregular graph, so that proposals are not symmetric.
pub fn six_state_graph() -> (Vec<f64>, Vec<Vec<usize>>) {
    let pi = vec![1.0, 3.0, 0.5, 2.0, 4.0, 1.5];
    let adjacency = vec![
        vec![1, 2, 5],
        vec![0, 2, 3],
        vec![0, 1],
        vec![1, 4, 5],
        vec![3, 5],
        vec![0, 3, 4],
    ];
    (pi, adjacency)
}

/// Upper critical value of the chi-square distribution.
pub fn chi_square_critical(dof: usize, alpha: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(dof as f64).expect("dof").inverse_cdf(1.0 - alpha)
}
