//! Small explicit state graphs with arbitrary targets, used to check chain
//! laws against exact enumeration.

use rand::Rng;

use crate::error::ProblemError;
use crate::model::{FiniteNeighborhood, ProblemModel};

/// An undirected graph over states `0..k` with `log π` per state and a
/// uniform proposal over each state's neighbors, corrected by the full
/// Hastings ratio so the stationary law is exactly `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphModel {
    log_pi: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
    initial: usize,
}

impl GraphModel {
    pub fn new(log_pi: Vec<f64>, adjacency: Vec<Vec<usize>>) -> Result<Self, ProblemError> {
        let k = log_pi.len();
        if adjacency.len() != k {
            return Err(ProblemError::DimensionMismatch {
                expected: k,
                found: adjacency.len(),
            });
        }
        for (s, nbrs) in adjacency.iter().enumerate() {
            if nbrs.is_empty() {
                return Err(ProblemError::InvalidInstance(format!("state {s} has no neighbors")));
            }
            for &t in nbrs {
                if t >= k || t == s || !adjacency[t].contains(&s) {
                    return Err(ProblemError::InvalidInstance(format!(
                        "edge {s} -> {t} is not a symmetric edge between distinct states"
                    )));
                }
            }
        }
        if log_pi.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(ProblemError::InvalidInstance("log targets must be < +inf".into()));
        }
        Ok(Self {
            log_pi,
            adjacency,
            initial: 0,
        })
    }

    /// Every state adjacent to every other.
    pub fn complete(log_pi: Vec<f64>) -> Result<Self, ProblemError> {
        let k = log_pi.len();
        let adjacency = (0..k).map(|s| (0..k).filter(|&t| t != s).collect()).collect();
        Self::new(log_pi, adjacency)
    }

    /// States on a cycle `0 - 1 - ... - (k-1) - 0`.
    pub fn ring(log_pi: Vec<f64>) -> Result<Self, ProblemError> {
        let k = log_pi.len();
        if k < 3 {
            return Self::complete(log_pi);
        }
        let adjacency = (0..k).map(|s| vec![(s + k - 1) % k, (s + 1) % k]).collect();
        Self::new(log_pi, adjacency)
    }

    pub fn starting_at(mut self, state: usize) -> Self {
        assert!(state < self.log_pi.len());
        self.initial = state;
        self
    }

    pub fn state_count(&self) -> usize {
        self.log_pi.len()
    }

    pub fn neighbors(&self, state: usize) -> &[usize] {
        &self.adjacency[state]
    }

    /// Normalized `π`.
    pub fn stationary(&self) -> Vec<f64> {
        let max = self.log_pi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_pi.iter().map(|v| (v - max).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|v| v / z).collect()
    }

    /// One-step Metropolis-Hastings kernel `P(y|x)`, including the holding
    /// probability on the diagonal.
    pub fn transition_matrix(&self) -> Vec<Vec<f64>> {
        let k = self.state_count();
        let mut p = vec![vec![0.0; k]; k];
        for x in 0..k {
            let dx = self.adjacency[x].len() as f64;
            let mut leave = 0.0;
            for &y in &self.adjacency[x] {
                let dy = self.adjacency[y].len() as f64;
                let ratio = (self.log_pi[y] - self.log_pi[x] + (dx / dy).ln()).exp();
                let pxy = ratio.min(1.0) / dx;
                p[x][y] = pxy;
                leave += pxy;
            }
            p[x][x] = 1.0 - leave;
        }
        p
    }

    /// Jump-chain kernel `P(y|x) / sum_{z != x} P(z|x)`.
    pub fn jump_matrix(&self) -> Vec<Vec<f64>> {
        self.transition_matrix()
            .into_iter()
            .enumerate()
            .map(|(x, mut row)| {
                row[x] = 0.0;
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= total);
                row
            })
            .collect()
    }
}

impl ProblemModel for GraphModel {
    type State = usize;
    type Move = usize;
    type Cache = ();

    fn initial_state(&self) -> usize {
        self.initial
    }

    fn log_target(&self, state: &usize) -> f64 {
        self.log_pi[*state]
    }

    fn build_cache(&self, _: &usize) {}

    fn candidate_log_target(&self, state: &usize, _: &(), mv: &usize) -> f64 {
        self.log_pi[self.adjacency[*state][*mv]]
    }

    fn apply(&self, state: &mut usize, _: &mut (), mv: &usize) {
        *state = self.adjacency[*state][*mv];
    }

    fn propose<R: Rng + ?Sized>(&self, state: &usize, _: &(), rng: &mut R) -> usize {
        rng.random_range(0..self.adjacency[*state].len())
    }

    fn log_proposal_ratio(&self, state: &usize, mv: &usize) -> f64 {
        let y = self.adjacency[*state][*mv];
        (self.adjacency[*state].len() as f64 / self.adjacency[y].len() as f64).ln()
    }

    fn encode_state(&self, state: &usize) -> String {
        state.to_string()
    }

    fn decode_state(&self, encoded: &str) -> Option<usize> {
        encoded.parse().ok().filter(|&s| s < self.state_count())
    }
}

impl FiniteNeighborhood for GraphModel {
    fn neighbor_count(&self, state: &usize) -> usize {
        self.adjacency[*state].len()
    }

    fn neighbor_state(&self, state: &usize, index: usize) -> usize {
        self.adjacency[*state][index]
    }
}
