//! Partial neighbor sets for PNS.
//!
//! For index-flip neighborhoods a subset is a set of neighbor indices. Since
//! flipping an index twice returns to the start, `Y ∈ N_k(X) ⇔ X ∈ N_k(Y)`
//! holds automatically. Subsets are drawn without looking at target values.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PnsMethod {
    /// Fresh uniform random subset every step.
    #[serde(rename = "A")]
    RandomEveryStep,
    /// Fresh uniform random subset every 10 steps.
    #[serde(rename = "B")]
    RandomEvery10,
    /// One of two fixed blocks, chosen uniformly every step.
    #[serde(rename = "C")]
    SystematicEveryStep,
    /// One of two fixed blocks, chosen uniformly every 10 steps.
    #[serde(rename = "D")]
    SystematicEvery10,
}

impl PnsMethod {
    pub const ALL: [PnsMethod; 4] = [
        PnsMethod::RandomEveryStep,
        PnsMethod::RandomEvery10,
        PnsMethod::SystematicEveryStep,
        PnsMethod::SystematicEvery10,
    ];

    pub fn refresh_period(self) -> usize {
        match self {
            PnsMethod::RandomEveryStep | PnsMethod::SystematicEveryStep => 1,
            PnsMethod::RandomEvery10 | PnsMethod::SystematicEvery10 => 10,
        }
    }

    pub fn is_systematic(self) -> bool {
        matches!(self, PnsMethod::SystematicEveryStep | PnsMethod::SystematicEvery10)
    }

    pub fn letter(self) -> char {
        match self {
            PnsMethod::RandomEveryStep => 'A',
            PnsMethod::RandomEvery10 => 'B',
            PnsMethod::SystematicEveryStep => 'C',
            PnsMethod::SystematicEvery10 => 'D',
        }
    }
}

impl fmt::Display for PnsMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for PnsMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(PnsMethod::RandomEveryStep),
            "B" => Ok(PnsMethod::RandomEvery10),
            "C" => Ok(PnsMethod::SystematicEveryStep),
            "D" => Ok(PnsMethod::SystematicEvery10),
            _ => Err(format!("unknown subset method '{s}', expected A, B, C or D")),
        }
    }
}

/// How many neighbors a partial set holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetSize {
    /// `max(1, round(fraction * |N(X)|))`, fraction in `(0, 1]`.
    Fraction(f64),
    /// A fixed count; for sampled neighborhoods this is the number of drawn
    /// candidates.
    Count(usize),
}

impl SubsetSize {
    pub fn resolve(self, neighbors: usize) -> Result<usize, RunError> {
        match self {
            SubsetSize::Fraction(f) => Ok(((f * neighbors as f64).round() as usize).max(1)),
            SubsetSize::Count(k) if k <= neighbors => Ok(k),
            SubsetSize::Count(k) => Err(RunError::Config(format!(
                "subset of {k} requested from {neighbors} neighbors"
            ))),
        }
    }
}

/// Two disjoint blocks of neighbor indices covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    blocks: [Vec<usize>; 2],
}

impl Partition {
    pub fn new(first: Vec<usize>, second: Vec<usize>) -> Self {
        let mut blocks = [first, second];
        blocks.iter_mut().for_each(|b| b.sort_unstable());
        Self { blocks }
    }

    /// `{0, ..., n/2 - 1}` and `{n/2, ..., n - 1}`.
    pub fn halves(n: usize) -> Self {
        let mid = n / 2;
        Self::new((0..mid).collect(), (mid..n).collect())
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn validate(&self, n: usize) -> Result<(), RunError> {
        let mut seen = vec![false; n];
        for &i in self.blocks.iter().flatten() {
            if i >= n || seen[i] {
                return Err(RunError::Config(format!(
                    "partition blocks must be disjoint and within 0..{n}"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|&s| !s) || self.blocks.iter().any(Vec::is_empty) {
            return Err(RunError::Config(format!(
                "partition blocks must be nonempty and cover 0..{n}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnsStrategy {
    pub method: PnsMethod,
    pub size: SubsetSize,
    pub refresh_period: usize,
    /// Fixed blocks for the systematic methods; halves of the neighborhood
    /// when unset.
    pub partition: Option<Partition>,
}

impl PnsStrategy {
    /// Random methods accept any fraction in `(0, 1]`. Systematic methods
    /// pick between two halves, so they require a fraction of exactly 1/2
    /// unless an explicit partition is supplied.
    pub fn new(method: PnsMethod, fraction: f64) -> Result<Self, RunError> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(RunError::Config(format!(
                "subset fraction must lie in (0, 1], got {fraction}"
            )));
        }
        if method.is_systematic() && fraction != 0.5 {
            return Err(RunError::Config(format!(
                "method {method} alternates between two halves; fraction must be 0.5"
            )));
        }
        Ok(Self {
            method,
            size: SubsetSize::Fraction(fraction),
            refresh_period: method.refresh_period(),
            partition: None,
        })
    }

    /// Method A with `fraction`.
    pub fn random(fraction: f64) -> Result<Self, RunError> {
        Self::new(PnsMethod::RandomEveryStep, fraction)
    }

    /// Method A with a fixed candidate count.
    pub fn random_count(count: usize) -> Result<Self, RunError> {
        if count == 0 {
            return Err(RunError::Config("subset count must be positive".into()));
        }
        Ok(Self {
            method: PnsMethod::RandomEveryStep,
            size: SubsetSize::Count(count),
            refresh_period: 1,
            partition: None,
        })
    }

    pub fn with_partition(mut self, partition: Partition) -> Result<Self, RunError> {
        if !self.method.is_systematic() {
            return Err(RunError::Config(format!(
                "method {} draws random subsets and takes no partition",
                self.method
            )));
        }
        self.partition = Some(partition);
        Ok(self)
    }

    /// Number of neighbors evaluated per step for a neighborhood of size `n`.
    pub fn evaluations_per_step(&self, n: usize) -> Result<usize, RunError> {
        if self.method.is_systematic() {
            let p = self.partition.clone().unwrap_or_else(|| Partition::halves(n));
            // blocks may differ by one; report the larger
            return Ok(p.block(0).len().max(p.block(1).len()));
        }
        self.size.resolve(n)
    }

    pub fn drawer(&self) -> SubsetDrawer {
        SubsetDrawer {
            strategy: self.clone(),
            current: Vec::new(),
            current_n: 0,
            steps_since_refresh: 0,
        }
    }
}

/// Stateful subset source for one run: holds the active subset between
/// refreshes for Methods B and D.
#[derive(Debug, Clone)]
pub struct SubsetDrawer {
    strategy: PnsStrategy,
    current: Vec<usize>,
    current_n: usize,
    steps_since_refresh: usize,
}

impl SubsetDrawer {
    /// The partial neighbor set (sorted indices) for the next step over a
    /// neighborhood of size `n`. A full-size subset is `0..n` with no random
    /// draw, so a fraction of 1 behaves exactly like full rejection-free.
    pub fn next<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<&[usize], RunError> {
        let due = self.current.is_empty()
            || self.current_n != n
            || self.steps_since_refresh.is_multiple_of(self.strategy.refresh_period);
        if due {
            self.refresh(n, rng)?;
        }
        self.steps_since_refresh += 1;
        Ok(&self.current)
    }

    /// Replaces the active subset immediately, e.g. after an all-infeasible
    /// draw, and restarts the refresh period.
    pub fn redraw<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<&[usize], RunError> {
        self.refresh(n, rng)?;
        self.steps_since_refresh = 1;
        Ok(&self.current)
    }

    fn refresh<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<(), RunError> {
        if n == 0 {
            return Err(RunError::Config("state has no neighbors".into()));
        }
        self.current_n = n;
        self.steps_since_refresh = 0;
        self.current.clear();
        if self.strategy.method.is_systematic() {
            let partition = match &self.strategy.partition {
                Some(p) => p.clone(),
                None => Partition::halves(n),
            };
            partition.validate(n)?;
            let b = rng.random_range(0..2);
            self.current.extend_from_slice(partition.block(b));
        } else {
            let size = self.strategy.size.resolve(n)?;
            if size == n {
                self.current.extend(0..n);
            } else {
                self.current.extend(index::sample(rng, n, size).iter());
                self.current.sort_unstable();
            }
        }
        Ok(())
    }
}

/// One partial neighbor set for a fresh drawer; see [`SubsetDrawer::next`].
pub fn draw_partial_neighbors<R: Rng + ?Sized>(
    strategy: &PnsStrategy,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>, RunError> {
    Ok(strategy.drawer().next(n, rng)?.to_vec())
}
