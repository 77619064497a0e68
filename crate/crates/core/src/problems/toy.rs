//! Two adjacent hubs `A` and `B`, each carrying `n` pendant spokes.
//!
//! With `π(A) = π(B) = 100` and `π(spoke) = 0.01`, a Metropolis chain at `A`
//! proposes `B` only with probability `1/(n+1)` and otherwise proposes a
//! spoke it almost always rejects, so it lingers; a rejection-free chain jumps
//! to `B` almost surely. The pair `{A, B}` is the archetypal local maximum
//! that traps rejection-free search.
//!
//! States are indexed `0 = A`, `1 = B`, `2..2+n = A_1..A_n`,
//! `2+n..2+2n = B_1..B_n`. At a hub, neighbor `0` is the other hub and
//! neighbor `i >= 1` is its `i`-th spoke; a spoke's only neighbor is its hub.

use rand::Rng;

use crate::error::ProblemError;
use crate::model::{FiniteNeighborhood, ProblemModel};

pub const HUB_A: usize = 0;
pub const HUB_B: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyLocalMaxInstance {
    n: usize,
    pi_hub: f64,
    pi_spoke: f64,
}

impl ToyLocalMaxInstance {
    /// Hubs at `π = 100`, spokes at `π = 0.01`.
    pub fn new(n: usize) -> Result<Self, ProblemError> {
        Self::with_targets(n, 100.0, 0.01)
    }

    pub fn with_targets(n: usize, pi_hub: f64, pi_spoke: f64) -> Result<Self, ProblemError> {
        if n == 0 {
            return Err(ProblemError::InvalidInstance("need at least one spoke per hub".into()));
        }
        if !(pi_hub > 0.0 && pi_spoke > 0.0 && pi_hub.is_finite() && pi_spoke.is_finite()) {
            return Err(ProblemError::InvalidInstance("targets must be positive".into()));
        }
        Ok(Self { n, pi_hub, pi_spoke })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state_count(&self) -> usize {
        2 + 2 * self.n
    }

    pub fn is_hub(&self, state: usize) -> bool {
        state < 2
    }

    /// The hub a spoke hangs from; hubs map to themselves.
    pub fn hub_of(&self, state: usize) -> usize {
        match state {
            s if s < 2 => s,
            s if s < 2 + self.n => HUB_A,
            _ => HUB_B,
        }
    }

    pub fn spoke(&self, hub: usize, i: usize) -> usize {
        debug_assert!(hub < 2 && i < self.n);
        2 + hub * self.n + i
    }

    pub fn log_pi(&self, state: usize) -> f64 {
        if self.is_hub(state) {
            self.pi_hub.ln()
        } else {
            self.pi_spoke.ln()
        }
    }

    pub fn neighbors(&self, state: usize) -> Vec<usize> {
        (0..self.degree(state)).map(|i| self.neighbor(state, i)).collect()
    }

    fn degree(&self, state: usize) -> usize {
        if self.is_hub(state) {
            self.n + 1
        } else {
            1
        }
    }

    fn neighbor(&self, state: usize, index: usize) -> usize {
        if !self.is_hub(state) {
            return self.hub_of(state);
        }
        if index == 0 {
            1 - state
        } else {
            self.spoke(state, index - 1)
        }
    }

    /// Metropolis probability of leaving `A` in one step at `T = 1`.
    pub fn exact_escape_probability(&self) -> f64 {
        let n = self.n as f64;
        1.0 / (n + 1.0) + n / (n + 1.0) * (self.pi_spoke / self.pi_hub).min(1.0)
    }

    /// Rejection-free probability of jumping `A -> B` at `T = 1`.
    pub fn exact_rf_hub_jump(&self) -> f64 {
        1.0 / (1.0 + self.n as f64 * (self.pi_spoke / self.pi_hub).min(1.0))
    }
}

/// Uniform proposal over each state's neighbors, accepted with the plain
/// Metropolis ratio `min{1, π(y)/π(x)}`.
#[derive(Debug, Clone)]
pub struct ToyModel<'a> {
    inst: &'a ToyLocalMaxInstance,
    initial: usize,
}

impl<'a> ToyModel<'a> {
    /// Starts at hub `A`.
    pub fn new(inst: &'a ToyLocalMaxInstance) -> Self {
        Self {
            inst,
            initial: HUB_A,
        }
    }

    pub fn starting_at(mut self, state: usize) -> Result<Self, ProblemError> {
        if state >= self.inst.state_count() {
            return Err(ProblemError::DimensionMismatch {
                expected: self.inst.state_count(),
                found: state,
            });
        }
        self.initial = state;
        Ok(self)
    }

    pub fn instance(&self) -> &ToyLocalMaxInstance {
        self.inst
    }
}

impl ProblemModel for ToyModel<'_> {
    type State = usize;
    type Move = usize;
    type Cache = ();

    fn initial_state(&self) -> usize {
        self.initial
    }

    fn log_target(&self, state: &usize) -> f64 {
        self.inst.log_pi(*state)
    }

    fn build_cache(&self, _: &usize) {}

    fn candidate_log_target(&self, state: &usize, _: &(), mv: &usize) -> f64 {
        self.inst.log_pi(self.inst.neighbor(*state, *mv))
    }

    fn apply(&self, state: &mut usize, _: &mut (), mv: &usize) {
        *state = self.inst.neighbor(*state, *mv);
    }

    fn propose<R: Rng + ?Sized>(&self, state: &usize, _: &(), rng: &mut R) -> usize {
        rng.random_range(0..self.inst.degree(*state))
    }

    fn encode_state(&self, state: &usize) -> String {
        match *state {
            HUB_A => "A".into(),
            HUB_B => "B".into(),
            s => {
                let hub = if self.inst.hub_of(s) == HUB_A { 'A' } else { 'B' };
                let i = (s - 2) % self.inst.n + 1;
                format!("{hub}{i}")
            }
        }
    }

    fn decode_state(&self, encoded: &str) -> Option<usize> {
        let mut chars = encoded.chars();
        let hub = match chars.next()? {
            'A' => HUB_A,
            'B' => HUB_B,
            _ => return None,
        };
        let rest = chars.as_str();
        if rest.is_empty() {
            return Some(hub);
        }
        let i: usize = rest.parse().ok()?;
        (1..=self.inst.n).contains(&i).then(|| self.inst.spoke(hub, i - 1))
    }
}

impl FiniteNeighborhood for ToyModel<'_> {
    fn neighbor_count(&self, state: &usize) -> usize {
        self.inst.degree(*state)
    }

    fn neighbor_state(&self, state: &usize, index: usize) -> usize {
        self.inst.neighbor(*state, index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_shape() {
        let inst = ToyLocalMaxInstance::new(3).unwrap();
        assert_eq!(inst.state_count(), 8);
        assert_eq!(inst.neighbors(HUB_A), vec![HUB_B, 2, 3, 4]);
        assert_eq!(inst.neighbors(HUB_B), vec![HUB_A, 5, 6, 7]);
        for s in 2..5 {
            assert_eq!(inst.neighbors(s), vec![HUB_A]);
        }
        for s in 5..8 {
            assert_eq!(inst.neighbors(s), vec![HUB_B]);
        }
    }

    #[test]
    fn adjacency_is_symmetric() {
        let inst = ToyLocalMaxInstance::new(6).unwrap();
        for s in 0..inst.state_count() {
            for t in inst.neighbors(s) {
                assert!(inst.neighbors(t).contains(&s));
            }
        }
    }

    #[test]
    fn closed_forms_at_ten_spokes() {
        let inst = ToyLocalMaxInstance::new(10).unwrap();
        let escape = 1.0 / 11.0 + 10.0 / 11.0 * 1e-4;
        assert!((inst.exact_escape_probability() - escape).abs() < 1e-15);
        assert!((inst.exact_rf_hub_jump() - 1.0 / 1.001).abs() < 1e-15);
    }

    #[test]
    fn state_codec_round_trip() {
        let inst = ToyLocalMaxInstance::new(12).unwrap();
        let model = ToyModel::new(&inst);
        for s in 0..inst.state_count() {
            let e = model.encode_state(&s);
            assert_eq!(model.decode_state(&e), Some(s), "{e}");
        }
        assert_eq!(model.decode_state("A13"), None);
        assert_eq!(model.decode_state("C"), None);
    }
}
