//! Quadratic unconstrained binary optimization: maximize `x^T Q x` over
//! `x in {0,1}^n` with `Q` upper triangular, `π(x) = exp(x^T Q x)`.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::ProblemError;
use crate::model::{bits, FiniteNeighborhood, ProblemModel};

#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    n: usize,
    /// Dense row-major `n x n`, zero below the diagonal.
    q: Vec<f64>,
}

impl QuboInstance {
    pub fn from_dense(n: usize, q: Vec<f64>) -> Result<Self, ProblemError> {
        if q.len() != n * n {
            return Err(ProblemError::DimensionMismatch {
                expected: n * n,
                found: q.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if q[i * n + j] != 0.0 {
                    return Err(ProblemError::InvalidInstance(format!(
                        "Q[{i}][{j}] below the diagonal is nonzero"
                    )));
                }
            }
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::InvalidInstance("Q has non-finite entries".into()));
        }
        Ok(Self { n, q })
    }

    /// From the row-major upper triangle (diagonal included), the layout used
    /// in instance files.
    pub fn from_upper_triangle(n: usize, upper: &[f64]) -> Result<Self, ProblemError> {
        let expected = n * (n + 1) / 2;
        if upper.len() != expected {
            return Err(ProblemError::DimensionMismatch {
                expected,
                found: upper.len(),
            });
        }
        let mut q = vec![0.0; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i..n {
                q[i * n + j] = *it.next().unwrap();
            }
        }
        Self::from_dense(n, q)
    }

    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| self.q[i * n + j])
            .collect()
    }

    /// `Q_ij ~ Normal(0, 100^2)` for `i <= j` (or `i < j` without the
    /// diagonal).
    pub fn generate<R: Rng + ?Sized>(n: usize, with_diagonal: bool, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, 100.0).unwrap();
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                if i == j && !with_diagonal {
                    continue;
                }
                q[i * n + j] = normal.sample(rng);
            }
        }
        Self { n, q }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    /// `Q_ij + Q_ji` for `i != j`.
    fn coupling(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j] + self.q[j * self.n + i]
    }
}

pub fn qubo_log_target(inst: &QuboInstance, x: &[bool]) -> Result<f64, ProblemError> {
    if x.len() != inst.n {
        return Err(ProblemError::DimensionMismatch {
            expected: inst.n,
            found: x.len(),
        });
    }
    Ok(quadratic_form(inst, x))
}

fn quadratic_form(inst: &QuboInstance, x: &[bool]) -> f64 {
    let n = inst.n;
    let mut total = 0.0;
    for i in (0..n).filter(|&i| x[i]) {
        let row = &inst.q[i * n..(i + 1) * n];
        total += (i..n).filter(|&j| x[j]).map(|j| row[j]).sum::<f64>();
    }
    total
}

/// Local fields for single-bit flips.
///
/// `field[i] = Q_ii + sum_{j != i} (Q_ij + Q_ji) x_j`, so flipping bit `i`
/// changes the objective by `(1 - 2 x_i) * field[i]`.
#[derive(Debug, Clone)]
pub struct QuboGains {
    field: Vec<f64>,
    value: f64,
    flips_since_rebuild: usize,
}

const GAIN_REBUILD_PERIOD: usize = 4096;

impl QuboGains {
    pub fn new(inst: &QuboInstance, x: &[bool]) -> Self {
        let n = inst.n;
        let field = (0..n)
            .map(|i| {
                inst.get(i, i)
                    + (0..n)
                        .filter(|&j| j != i && x[j])
                        .map(|j| inst.coupling(i, j))
                        .sum::<f64>()
            })
            .collect();
        Self {
            field,
            value: quadratic_form(inst, x),
            flips_since_rebuild: 0,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    fn delta(&self, x: &[bool], i: usize) -> f64 {
        if x[i] {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    /// Flips bit `i` of `x` and updates the fields in `O(n)`.
    pub fn flip(&mut self, inst: &QuboInstance, x: &mut [bool], i: usize) {
        self.value += self.delta(x, i);
        let sign = if x[i] { -1.0 } else { 1.0 };
        x[i] = !x[i];
        for j in (0..inst.n).filter(|&j| j != i) {
            self.field[j] += sign * inst.coupling(i, j);
        }
        self.flips_since_rebuild += 1;
        if self.flips_since_rebuild >= GAIN_REBUILD_PERIOD {
            *self = QuboGains::new(inst, x);
        }
    }
}

/// Objective change from flipping bit `i`, in `O(1)` from the cache. Debug
/// builds re-derive `field[i]` from `x` and report a stale cache.
pub fn qubo_flip_delta(
    inst: &QuboInstance,
    x: &[bool],
    i: usize,
    gains: &QuboGains,
) -> Result<f64, ProblemError> {
    if x.len() != inst.n || gains.field.len() != inst.n {
        return Err(ProblemError::DimensionMismatch {
            expected: inst.n,
            found: x.len(),
        });
    }
    if cfg!(debug_assertions) {
        let fresh = inst.get(i, i)
            + (0..inst.n)
                .filter(|&j| j != i && x[j])
                .map(|j| inst.coupling(i, j))
                .sum::<f64>();
        let scale = 1.0 + fresh.abs();
        if (fresh - gains.field[i]).abs() > 1e-6 * scale {
            return Err(ProblemError::StaleCache { index: i });
        }
    }
    Ok(gains.delta(x, i))
}

/// Single-bit-flip chain model over a QUBO instance.
#[derive(Debug, Clone)]
pub struct QuboModel<'a> {
    inst: &'a QuboInstance,
    initial: Vec<bool>,
}

impl<'a> QuboModel<'a> {
    /// Starts from the all-zeros vector.
    pub fn new(inst: &'a QuboInstance) -> Self {
        Self {
            inst,
            initial: vec![false; inst.n],
        }
    }

    pub fn with_initial(mut self, x: Vec<bool>) -> Result<Self, ProblemError> {
        if x.len() != self.inst.n {
            return Err(ProblemError::DimensionMismatch {
                expected: self.inst.n,
                found: x.len(),
            });
        }
        self.initial = x;
        Ok(self)
    }

    pub fn instance(&self) -> &QuboInstance {
        self.inst
    }
}

impl ProblemModel for QuboModel<'_> {
    type State = Vec<bool>;
    type Move = usize;
    type Cache = QuboGains;

    fn initial_state(&self) -> Vec<bool> {
        self.initial.clone()
    }

    fn log_target(&self, state: &Vec<bool>) -> f64 {
        quadratic_form(self.inst, state)
    }

    fn build_cache(&self, state: &Vec<bool>) -> QuboGains {
        QuboGains::new(self.inst, state)
    }

    fn candidate_log_target(&self, state: &Vec<bool>, cache: &QuboGains, mv: &usize) -> f64 {
        cache.value + cache.delta(state, *mv)
    }

    fn apply(&self, state: &mut Vec<bool>, cache: &mut QuboGains, mv: &usize) {
        cache.flip(self.inst, state, *mv);
    }

    fn propose<R: Rng + ?Sized>(&self, _: &Vec<bool>, _: &QuboGains, rng: &mut R) -> usize {
        rng.random_range(0..self.inst.n)
    }

    fn encode_state(&self, state: &Vec<bool>) -> String {
        bits::encode(state)
    }

    fn decode_state(&self, encoded: &str) -> Option<Vec<bool>> {
        bits::decode(encoded, self.inst.n)
    }
}

impl FiniteNeighborhood for QuboModel<'_> {
    fn neighbor_count(&self, _: &Vec<bool>) -> usize {
        self.inst.n
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
