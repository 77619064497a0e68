//! 0-1 knapsack: maximize `v^T x` subject to `w^T x <= W`, with
//! `π(x) = 1(w^T x <= W) * v^T x`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::ProblemError;
use crate::model::{bits, FiniteNeighborhood, ProblemModel};

/// `log π` assigned to the empty knapsack. `π` is zero there, but the state
/// is feasible, so it gets a finite value far below every nonempty state:
/// leaving it is always accepted and entering it is never preferred.
pub const EMPTY_LOG_TARGET: f64 = -1.0e250;

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    capacity: f64,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl KnapsackInstance {
    pub fn new(capacity: f64, weights: Vec<f64>, values: Vec<f64>) -> Result<Self, ProblemError> {
        if weights.len() != values.len() {
            return Err(ProblemError::DimensionMismatch {
                expected: weights.len(),
                found: values.len(),
            });
        }
        if !(capacity.is_finite() && capacity > 0.0) {
            return Err(ProblemError::InvalidInstance(format!(
                "capacity must be positive, got {capacity}"
            )));
        }
        if weights
            .iter()
            .chain(&values)
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(ProblemError::InvalidInstance(
                "weights and values must be positive".into(),
            ));
        }
        Ok(Self {
            capacity,
            weights,
            values,
        })
    }

    /// Weights and values i.i.d. `Poisson(1000)`, redrawn on the (probability
    /// `e^-1000`) zero.
    pub fn generate<R: Rng + ?Sized>(n: usize, capacity: f64, rng: &mut R) -> Result<Self, ProblemError> {
        let poisson = Poisson::new(1000.0).unwrap();
        let draw = |rng: &mut R| loop {
            let v: f64 = poisson.sample(rng);
            if v > 0.0 {
                break v;
            }
        };
        let mut weights = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            weights.push(draw(rng));
            values.push(draw(rng));
        }
        Self::new(capacity, weights, values)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn totals(&self, x: &[bool]) -> (f64, f64) {
        x.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold((0.0, 0.0), |(w, v), (i, _)| (w + self.weights[i], v + self.values[i]))
    }

    fn log_target_from_totals(&self, weight: f64, value: f64) -> f64 {
        if weight > self.capacity {
            f64::NEG_INFINITY
        } else if value > 0.0 {
            value.ln()
        } else {
            EMPTY_LOG_TARGET
        }
    }
}

pub fn knapsack_log_target(inst: &KnapsackInstance, x: &[bool]) -> Result<f64, ProblemError> {
    if x.len() != inst.n() {
        return Err(ProblemError::DimensionMismatch {
            expected: inst.n(),
            found: x.len(),
        });
    }
    let (w, v) = inst.totals(x);
    Ok(inst.log_target_from_totals(w, v))
}

#[derive(Debug, Clone, Copy)]
pub struct KnapsackTotals {
    pub weight: f64,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct KnapsackModel<'a> {
    inst: &'a KnapsackInstance,
    initial: Vec<bool>,
}

impl<'a> KnapsackModel<'a> {
    /// Starts from the empty knapsack, which is always feasible.
    pub fn new(inst: &'a KnapsackInstance) -> Self {
        Self {
            inst,
            initial: vec![false; inst.n()],
        }
    }

    pub fn with_initial(mut self, x: Vec<bool>) -> Result<Self, ProblemError> {
        if x.len() != self.inst.n() {
            return Err(ProblemError::DimensionMismatch {
                expected: self.inst.n(),
                found: x.len(),
            });
        }
        self.initial = x;
        Ok(self)
    }
}

impl ProblemModel for KnapsackModel<'_> {
    type State = Vec<bool>;
    type Move = usize;
    type Cache = KnapsackTotals;

    fn initial_state(&self) -> Vec<bool> {
        self.initial.clone()
    }

    fn log_target(&self, state: &Vec<bool>) -> f64 {
        let (w, v) = self.inst.totals(state);
        self.inst.log_target_from_totals(w, v)
    }

    fn build_cache(&self, state: &Vec<bool>) -> KnapsackTotals {
        let (weight, value) = self.inst.totals(state);
        KnapsackTotals { weight, value }
    }

    fn candidate_log_target(&self, state: &Vec<bool>, cache: &KnapsackTotals, mv: &usize) -> f64 {
        let i = *mv;
        let sign = if state[i] { -1.0 } else { 1.0 };
        self.inst.log_target_from_totals(
            cache.weight + sign * self.inst.weights[i],
            cache.value + sign * self.inst.values[i],
        )
    }

    fn apply(&self, state: &mut Vec<bool>, cache: &mut KnapsackTotals, mv: &usize) {
        let i = *mv;
        let sign = if state[i] { -1.0 } else { 1.0 };
        cache.weight += sign * self.inst.weights[i];
        cache.value += sign * self.inst.values[i];
        state[i] = !state[i];
    }

    fn propose<R: Rng + ?Sized>(&self, _: &Vec<bool>, _: &KnapsackTotals, rng: &mut R) -> usize {
        rng.random_range(0..self.inst.n())
    }

    /// Total packed value `v^T x`, zero for infeasible states.
    fn objective(&self, state: &Vec<bool>) -> f64 {
        let (w, v) = self.inst.totals(state);
        if w > self.inst.capacity {
            0.0
        } else {
            v
        }
    }

    fn encode_state(&self, state: &Vec<bool>) -> String {
        bits::encode(state)
    }

    fn decode_state(&self, encoded: &str) -> Option<Vec<bool>> {
        bits::decode(encoded, self.inst.n())
    }
}

impl FiniteNeighborhood for KnapsackModel<'_> {
    fn neighbor_count(&self, _: &Vec<bool>) -> usize {
        self.inst.n()
    }

    fn neighbor_state(&self, state: &Vec<bool>, index: usize) -> Vec<bool> {
        let mut next = state.clone();
        next[index] = !next[index];
        next
    }

    fn neighbor_index_of(&self, state: &Vec<bool>, other: &Vec<bool>) -> Option<usize> {
        bits::single_flip(state, other)
    }
}
