//! Quadratic programming on the open probability simplex: maximize
//! `x^T Q x` subject to `x_i in (0, 1)` and `sum x_i = 1`.
//!
//! Moves pick a coordinate `r` and a shift `s`, set `y_r = x_r + s` and
//! rescale the remaining coordinates by `(1 - y_r) / (1 - x_r)`, which keeps
//! the sum at one. A shift that pushes `y_r` out of `(0, 1)` yields an
//! infeasible candidate with `log π = -inf`.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::ProblemError;
use crate::model::{ProblemModel, SampledNeighborhood};
use crate::problems::qubo::QuboInstance;

pub const DEFAULT_STEP_SIGMA: f64 = 0.1;

/// Accepted moves between explicit renormalizations of the state.
pub const RENORMALIZE_EVERY: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexQpInstance {
    q: QuboInstance,
    step_sigma: f64,
}

impl SimplexQpInstance {
    pub fn new(q: QuboInstance, step_sigma: f64) -> Result<Self, ProblemError> {
        if !(step_sigma.is_finite() && step_sigma > 0.0) {
            return Err(ProblemError::InvalidInstance(format!(
                "step sigma must be positive, got {step_sigma}"
            )));
        }
        Ok(Self { q, step_sigma })
    }

    pub fn generate<R: Rng + ?Sized>(n: usize, step_sigma: f64, rng: &mut R) -> Result<Self, ProblemError> {
        Self::new(QuboInstance::generate(n, true, rng), step_sigma)
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn matrix(&self) -> &QuboInstance {
        &self.q
    }

    pub fn step_sigma(&self) -> f64 {
        self.step_sigma
    }

    fn quadratic(&self, x: &[f64]) -> f64 {
        let n = self.n();
        let mut total = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in i..n {
                row += self.q.get(i, j) * x[j];
            }
            total += x[i] * row;
        }
        total
    }

    /// Column `r` of `Q + Q^T`.
    fn sym_entry(&self, i: usize, r: usize) -> f64 {
        self.q.get(i, r) + self.q.get(r, i)
    }
}

pub fn simplex_log_target(inst: &SimplexQpInstance, x: &[f64]) -> Result<f64, ProblemError> {
    if x.len() != inst.n() {
        return Err(ProblemError::DimensionMismatch {
            expected: inst.n(),
            found: x.len(),
        });
    }
    if x.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(inst.quadratic(x))
}

/// Moves coordinate `r` by `shift` and rescales the rest. `None` if the
/// result leaves the open simplex.
pub fn shift_coordinate(x: &[f64], r: usize, shift: f64) -> Option<Vec<f64>> {
    let yr = x[r] + shift;
    if !(yr > 0.0 && yr < 1.0) {
        return None;
    }
    let scale = (1.0 - yr) / (1.0 - x[r]);
    let y: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(n, &v)| if n == r { yr } else { v * scale })
        .collect();
    y.iter().all(|&v| v > 0.0 && v < 1.0).then_some(y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateMove {
    pub coord: usize,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexCandidate {
    pub mv: CoordinateMove,
    /// `None` when the candidate is infeasible.
    pub point: Option<Vec<f64>>,
}

/// One proposal draw: `r` uniform, `s ~ Normal(0, sigma^2)`, and the mirrored
/// pair `y` (shift `+s`) and `y'` (shift `-s`).
pub fn simplex_propose<R: Rng + ?Sized>(
    inst: &SimplexQpInstance,
    x: &[f64],
    rng: &mut R,
) -> (SimplexCandidate, SimplexCandidate) {
    let (plus, minus) = draw_pair(inst, rng);
    let candidate = |mv: CoordinateMove| SimplexCandidate {
        mv,
        point: shift_coordinate(x, mv.coord, mv.shift),
    };
    (candidate(plus), candidate(minus))
}

fn draw_pair<R: Rng + ?Sized>(inst: &SimplexQpInstance, rng: &mut R) -> (CoordinateMove, CoordinateMove) {
    let coord = rng.random_range(0..inst.n());
    let shift = Normal::new(0.0, inst.step_sigma).unwrap().sample(rng);
    (
        CoordinateMove { coord, shift },
        CoordinateMove {
            coord,
            shift: -shift,
        },
    )
}

/// `value = x^T Q x` and `grad = (Q + Q^T) x`, enough to score any
/// coordinate move in `O(n)` without a full quadratic form.
#[derive(Debug, Clone)]
pub struct SimplexCache {
    value: f64,
    grad: Vec<f64>,
    accepted: usize,
}

#[derive(Debug, Clone)]
pub struct SimplexQpModel<'a> {
    inst: &'a SimplexQpInstance,
    initial: Vec<f64>,
}

impl<'a> SimplexQpModel<'a> {
    /// Starts at the barycenter `(1/n, ..., 1/n)`.
    pub fn new(inst: &'a SimplexQpInstance) -> Self {
        let n = inst.n();
        Self {
            inst,
            initial: vec![1.0 / n as f64; n],
        }
    }

    pub fn with_initial(mut self, x: Vec<f64>) -> Result<Self, ProblemError> {
        if x.len() != self.inst.n() {
            return Err(ProblemError::DimensionMismatch {
                expected: self.inst.n(),
                found: x.len(),
            });
        }
        self.initial = x;
        Ok(self)
    }

    fn scored_shift(&self, x: &[f64], cache: &SimplexCache, mv: &CoordinateMove) -> Option<(f64, f64)> {
        let r = mv.coord;
        let xr = x[r];
        let yr = xr + mv.shift;
        if !(yr > 0.0 && yr < 1.0) {
            return None;
        }
        let scale = (1.0 - yr) / (1.0 - xr);
        let feasible = x
            .iter()
            .enumerate()
            .all(|(n, &v)| n == r || (v * scale > 0.0 && v * scale < 1.0));
        if !feasible {
            return None;
        }
        // split x^T Q x into the part without r, the cross term and Q_rr
        let qrr = self.inst.q.get(r, r);
        let cross = cache.grad[r] - 2.0 * qrr * xr;
        let rest = cache.value - xr * cross - xr * xr * qrr;
        let value = scale * scale * rest + scale * yr * cross + yr * yr * qrr;
        Some((value, scale))
    }
}

impl ProblemModel for SimplexQpModel<'_> {
    type State = Vec<f64>;
    type Move = CoordinateMove;
    type Cache = SimplexCache;

    fn initial_state(&self) -> Vec<f64> {
        self.initial.clone()
    }

    fn log_target(&self, state: &Vec<f64>) -> f64 {
        simplex_log_target(self.inst, state).unwrap_or(f64::NEG_INFINITY)
    }

    fn build_cache(&self, state: &Vec<f64>) -> SimplexCache {
        let n = self.inst.n();
        let grad = (0..n)
            .map(|i| (0..n).map(|j| self.inst.sym_entry(i, j) * state[j]).sum())
            .collect();
        SimplexCache {
            value: self.inst.quadratic(state),
            grad,
            accepted: 0,
        }
    }

    fn candidate_log_target(&self, state: &Vec<f64>, cache: &SimplexCache, mv: &CoordinateMove) -> f64 {
        self.scored_shift(state, cache, mv)
            .map_or(f64::NEG_INFINITY, |(value, _)| value)
    }

    fn apply(&self, state: &mut Vec<f64>, cache: &mut SimplexCache, mv: &CoordinateMove) {
        let Some((value, scale)) = self.scored_shift(state, cache, mv) else {
            debug_assert!(false, "applied an infeasible simplex move");
            return;
        };
        let r = mv.coord;
        let xr = state[r];
        let yr = xr + mv.shift;
        for (i, g) in cache.grad.iter_mut().enumerate() {
            let col = self.inst.sym_entry(i, r);
            *g = scale * (*g - xr * col) + yr * col;
        }
        for (n, v) in state.iter_mut().enumerate() {
            if n == r {
                *v = yr;
            } else {
                *v *= scale;
            }
        }
        cache.value = value;
        cache.accepted += 1;
        if cache.accepted.is_multiple_of(RENORMALIZE_EVERY) {
            let total: f64 = state.iter().sum();
            state.iter_mut().for_each(|v| *v /= total);
            let accepted = cache.accepted;
            *cache = self.build_cache(state);
            cache.accepted = accepted;
        }
    }

    fn propose<R: Rng + ?Sized>(&self, _: &Vec<f64>, _: &SimplexCache, rng: &mut R) -> CoordinateMove {
        draw_pair(self.inst, rng).0
    }

    fn encode_state(&self, state: &Vec<f64>) -> String {
        state
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    fn decode_state(&self, encoded: &str) -> Option<Vec<f64>> {
        let x: Vec<f64> = encoded
            .split(';')
            .map(|p| p.parse().ok())
            .collect::<Option<_>>()?;
        (x.len() == self.inst.n()).then_some(x)
    }
}

impl SampledNeighborhood for SimplexQpModel<'_> {
    /// `count / 2` mirrored pairs `(r, +s)`, `(r, -s)`, plus one unpaired
    /// draw when `count` is odd.
    fn draw_candidates<R: Rng + ?Sized>(
        &self,
        _: &Vec<f64>,
        _: &SimplexCache,
        count: usize,
        rng: &mut R,
    ) -> Vec<CoordinateMove> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count / 2 {
            let (a, b) = draw_pair(self.inst, rng);
            out.push(a);
            out.push(b);
        }
        if count % 2 == 1 {
            out.push(draw_pair(self.inst, rng).0);
        }
        out
    }
}
