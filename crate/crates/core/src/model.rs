//! The interface every chain driver works against.
//!
//! A model owns its target `log π`, a proposal mechanism and a per-run cache
//! that makes candidate evaluation cheap. Drivers never touch `π` directly:
//! infeasible states carry `log π = -inf` and are treated as zero-weight
//! candidates.

use std::fmt::Debug;

use rand::Rng;

pub trait ProblemModel {
    type State: Clone + PartialEq + Debug;
    type Move: Clone + Debug;
    /// Derived data kept in sync with the current state by [`apply`].
    ///
    /// [`apply`]: ProblemModel::apply
    type Cache;

    fn initial_state(&self) -> Self::State;

    fn log_target(&self, state: &Self::State) -> f64;

    fn build_cache(&self, state: &Self::State) -> Self::Cache;

    /// `log π` of the state reached by `mv`, evaluated against the cache.
    fn candidate_log_target(&self, state: &Self::State, cache: &Self::Cache, mv: &Self::Move)
        -> f64;

    fn apply(&self, state: &mut Self::State, cache: &mut Self::Cache, mv: &Self::Move);

    /// Draws one move from the proposal `Q(x, .)`.
    fn propose<R: Rng + ?Sized>(
        &self,
        state: &Self::State,
        cache: &Self::Cache,
        rng: &mut R,
    ) -> Self::Move;

    /// `log Q(y, x) - log Q(x, y)` for the Hastings correction. Zero for
    /// symmetric proposals, and for models that deliberately use the plain
    /// Metropolis ratio.
    fn log_proposal_ratio(&self, _state: &Self::State, _mv: &Self::Move) -> f64 {
        0.0
    }

    /// Value reported to users for a state; defaults to `log π`.
    fn objective(&self, state: &Self::State) -> f64 {
        self.log_target(state)
    }

    fn encode_state(&self, state: &Self::State) -> String;

    fn decode_state(&self, encoded: &str) -> Option<Self::State>;
}

/// Models whose neighborhoods are finite and indexed `0..neighbor_count`.
pub trait FiniteNeighborhood: ProblemModel<Move = usize> {
    fn neighbor_count(&self, state: &Self::State) -> usize;

    /// `log Q(x, y_i)`; uniform over the neighborhood unless overridden.
    fn proposal_log_weight(&self, state: &Self::State, _index: usize) -> f64 {
        -(self.neighbor_count(state) as f64).ln()
    }

    fn neighbor_state(&self, state: &Self::State, index: usize) -> Self::State {
        let mut next = state.clone();
        let mut cache = self.build_cache(&next);
        self.apply(&mut next, &mut cache, &index);
        next
    }

    /// Index `i` with `neighbor_state(state, i) == *other`, if any.
    fn neighbor_index_of(&self, state: &Self::State, other: &Self::State) -> Option<usize> {
        (0..self.neighbor_count(state)).find(|&i| self.neighbor_state(state, i) == *other)
    }
}

/// Models with unbounded neighborhoods from which finite candidate sets are
/// drawn at random.
pub trait SampledNeighborhood: ProblemModel {
    fn draw_candidates<R: Rng + ?Sized>(
        &self,
        state: &Self::State,
        cache: &Self::Cache,
        count: usize,
        rng: &mut R,
    ) -> Vec<Self::Move>;
}

pub(crate) mod bits {
    use rand::Rng;

    pub fn encode(bits: &[bool]) -> String {
        bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn decode(s: &str, n: usize) -> Option<Vec<bool>> {
        if s.len() != n {
            return None;
        }
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect()
    }

    /// Position of the single differing bit, if the vectors are at Hamming
    /// distance exactly one.
    pub fn single_flip(a: &[bool], b: &[bool]) -> Option<usize> {
        if a.len() != b.len() {
            return None;
        }
        let mut found = None;
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            if x != y {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<bool> {
        (0..n).map(|_| rng.random()).collect()
    }
}

pub use bits::random as random_bits;
