//! 3-regular 3-XOR benchmark instances with a planted unique optimum.
//!
//! A random mod-2 system `A x = b` with exactly three ones per row and `A`
//! invertible is cast as the cubic Ising cost
//! `H(s) = sum_i (-1)^{b_i} s_a s_b s_c` over the triples of each row. With
//! `s_j = 1 - 2 x_j`, `H(s) = n - 2 F(x)` where `F` counts violated
//! equations, so `H <= n` with equality exactly at the unique solution.

use rand::seq::index;
use rand::Rng;

use crate::error::ProblemError;
use crate::model::{bits, FiniteNeighborhood, ProblemModel};
use crate::problems::gf2::{gf2_solve, Gf2Matrix};

pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub vars: [usize; 3],
    pub coefficient: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingXorInstance {
    n: usize,
    clauses: Vec<Clause>,
    planted: Vec<i8>,
    a_matrix: Vec<Vec<bool>>,
    b_vector: Vec<bool>,
    incidence: Vec<Vec<usize>>,
}

impl IsingXorInstance {
    /// Builds an instance from a system whose rows each hold three ones.
    /// Fails unless `A` is invertible over GF(2).
    pub fn from_system(a_matrix: Vec<Vec<bool>>, b_vector: Vec<bool>) -> Result<Self, ProblemError> {
        let n = a_matrix.len();
        if b_vector.len() != n {
            return Err(ProblemError::DimensionMismatch {
                expected: n,
                found: b_vector.len(),
            });
        }
        let mut triples = Vec::with_capacity(n);
        for (i, row) in a_matrix.iter().enumerate() {
            if row.len() != n {
                return Err(ProblemError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            let ones: Vec<usize> = (0..n).filter(|&j| row[j]).collect();
            let triple: [usize; 3] = ones.as_slice().try_into().map_err(|_| {
                ProblemError::InvalidInstance(format!("row {i} has {} ones, expected 3", ones.len()))
            })?;
            triples.push(triple);
        }
        let x = gf2_solve(&Gf2Matrix::from_rows(&a_matrix), &b_vector)
            .ok_or_else(|| ProblemError::InvalidInstance("A is singular over GF(2)".into()))?;
        let planted = x.iter().map(|&xi| if xi { -1 } else { 1 }).collect();

        // duplicate triples accumulate into one clause
        let mut clauses: Vec<Clause> = Vec::with_capacity(n);
        for (triple, &b) in triples.iter().zip(&b_vector) {
            let coefficient = if b { -1 } else { 1 };
            match clauses.iter_mut().find(|c| c.vars == *triple) {
                Some(c) => c.coefficient += coefficient,
                None => clauses.push(Clause {
                    vars: *triple,
                    coefficient,
                }),
            }
        }
        let mut incidence = vec![Vec::new(); n];
        for (t, c) in clauses.iter().enumerate() {
            for &v in &c.vars {
                incidence[v].push(t);
            }
        }
        Ok(Self {
            n,
            clauses,
            planted,
            a_matrix,
            b_vector,
            incidence,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn planted(&self) -> &[i8] {
        &self.planted
    }

    /// The planted optimum as a bit vector, `x_j = (1 - s_j) / 2`.
    pub fn planted_bits(&self) -> Vec<bool> {
        self.planted.iter().map(|&s| s == -1).collect()
    }

    pub fn a_matrix(&self) -> &[Vec<bool>] {
        &self.a_matrix
    }

    pub fn b_vector(&self) -> &[bool] {
        &self.b_vector
    }

    fn energy_of_bits(&self, x: &[bool]) -> i64 {
        self.clauses
            .iter()
            .map(|c| {
                let odd = c.vars.iter().filter(|&&v| x[v]).count() % 2 == 1;
                if odd {
                    -c.coefficient
                } else {
                    c.coefficient
                }
            })
            .sum()
    }
}

/// Samples a 3R3XOR instance of size `n`: rows uniform over the `C(n, 3)`
/// triples, resampled until `A` is invertible, then `b` uniform.
pub fn generate_3r3xor<R: Rng + ?Sized>(
    n: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<IsingXorInstance, ProblemError> {
    if n < 3 {
        return Err(ProblemError::InvalidInstance(format!(
            "3R3XOR needs n >= 3, got {n}"
        )));
    }
    for _ in 0..max_attempts {
        let a: Vec<Vec<bool>> = (0..n)
            .map(|_| {
                let mut row = vec![false; n];
                for j in index::sample(rng, n, 3) {
                    row[j] = true;
                }
                row
            })
            .collect();
        let b: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        match IsingXorInstance::from_system(a, b) {
            Ok(inst) => return Ok(inst),
            Err(ProblemError::InvalidInstance(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(ProblemError::GenerationFailed {
        attempts: max_attempts,
    })
}

/// Number of equations of `A x = b (mod 2)` that `x` violates.
pub fn count_violations(inst: &IsingXorInstance, x: &[bool]) -> Result<usize, ProblemError> {
    if x.len() != inst.n {
        return Err(ProblemError::DimensionMismatch {
            expected: inst.n,
            found: x.len(),
        });
    }
    Ok(inst
        .a_matrix
        .iter()
        .zip(&inst.b_vector)
        .filter(|(row, &b)| {
            let parity = row.iter().zip(x).filter(|(&a, &xj)| a && xj).count() % 2 == 1;
            parity != b
        })
        .count())
}

pub fn ising_energy(inst: &IsingXorInstance, s: &[i8]) -> Result<i64, ProblemError> {
    if s.len() != inst.n {
        return Err(ProblemError::DimensionMismatch {
            expected: inst.n,
            found: s.len(),
        });
    }
    if let Some((index, &value)) = s.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
        return Err(ProblemError::InvalidSpin {
            index,
            value: value as i64,
        });
    }
    Ok(inst
        .clauses
        .iter()
        .map(|c| c.coefficient * c.vars.iter().map(|&v| s[v] as i64).product::<i64>())
        .sum())
}

/// Clause products and per-spin local sums.
///
/// `field[j] = sum over clauses t containing j of M_t * prod_t`; flipping
/// spin `j` changes `H` by `-2 field[j]`.
#[derive(Debug, Clone)]
pub struct XorCache {
    products: Vec<i8>,
    field: Vec<i64>,
    energy: i64,
}

#[derive(Debug, Clone)]
pub struct IsingXorModel<'a> {
    inst: &'a IsingXorInstance,
    initial: Vec<bool>,
}

impl<'a> IsingXorModel<'a> {
    /// Starts from all spins up (all-zeros bits).
    pub fn new(inst: &'a IsingXorInstance) -> Self {
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
}

impl ProblemModel for IsingXorModel<'_> {
    type State = Vec<bool>;
    type Move = usize;
    type Cache = XorCache;

    fn initial_state(&self) -> Vec<bool> {
        self.initial.clone()
    }

    fn log_target(&self, state: &Vec<bool>) -> f64 {
        self.inst.energy_of_bits(state) as f64
    }

    fn build_cache(&self, state: &Vec<bool>) -> XorCache {
        let products: Vec<i8> = self
            .inst
            .clauses
            .iter()
            .map(|c| {
                if c.vars.iter().filter(|&&v| state[v]).count() % 2 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        let field = (0..self.inst.n)
            .map(|j| {
                self.inst.incidence[j]
                    .iter()
                    .map(|&t| self.inst.clauses[t].coefficient * products[t] as i64)
                    .sum()
            })
            .collect();
        let energy = self
            .inst
            .clauses
            .iter()
            .zip(&products)
            .map(|(c, &p)| c.coefficient * p as i64)
            .sum();
        XorCache {
            products,
            field,
            energy,
        }
    }

    fn candidate_log_target(&self, _: &Vec<bool>, cache: &XorCache, mv: &usize) -> f64 {
        (cache.energy - 2 * cache.field[*mv]) as f64
    }

    fn apply(&self, state: &mut Vec<bool>, cache: &mut XorCache, mv: &usize) {
        let j = *mv;
        cache.energy -= 2 * cache.field[j];
        for &t in &self.inst.incidence[j] {
            let clause = &self.inst.clauses[t];
            let old = clause.coefficient * cache.products[t] as i64;
            cache.products[t] = -cache.products[t];
            for &u in clause.vars.iter().filter(|&&u| u != j) {
                cache.field[u] -= 2 * old;
            }
        }
        cache.field[j] = -cache.field[j];
        state[j] = !state[j];
    }

    fn propose<R: Rng + ?Sized>(&self, _: &Vec<bool>, _: &XorCache, rng: &mut R) -> usize {
        rng.random_range(0..self.inst.n)
    }

    fn encode_state(&self, state: &Vec<bool>) -> String {
        bits::encode(state)
    }

    fn decode_state(&self, encoded: &str) -> Option<Vec<bool>> {
        bits::decode(encoded, self.inst.n)
    }
}

impl FiniteNeighborhood for IsingXorModel<'_> {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn spins(x: &[bool]) -> Vec<i8> {
        x.iter().map(|&b| if b { -1 } else { 1 }).collect()
    }

    #[test]
    fn planted_attains_n() {
        let mut rng = RngStream::new(41, 0);
        for n in [5, 8, 12, 24, 40] {
            let inst = generate_3r3xor(n, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
            assert_eq!(ising_energy(&inst, inst.planted()).unwrap(), n as i64);
            assert_eq!(count_violations(&inst, &inst.planted_bits()).unwrap(), 0);
            for c in inst.clauses() {
                assert!(c.vars[0] < c.vars[1] && c.vars[1] < c.vars[2]);
            }
        }
    }

    #[test]
    fn brute_force_maximum_is_unique_at_n8() {
        let mut rng = RngStream::new(42, 0);
        let inst = generate_3r3xor(8, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
        let mut best = i64::MIN;
        let mut count = 0;
        for code in 0u32..256 {
            let s: Vec<i8> = (0..8).map(|j| if code >> j & 1 == 1 { -1 } else { 1 }).collect();
            let h = ising_energy(&inst, &s).unwrap();
            if h > best {
                best = h;
                count = 1;
            } else if h == best {
                count += 1;
            }
        }
        assert_eq!(best, 8);
        assert_eq!(count, 1);
    }

    #[test]
    fn energy_violation_identity() {
        let mut rng = RngStream::new(43, 0);
        let inst = generate_3r3xor(12, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
        for _ in 0..1000 {
            let x = bits::random(12, &mut rng);
            let f = count_violations(&inst, &x).unwrap() as i64;
            assert_eq!(ising_energy(&inst, &spins(&x)).unwrap(), 12 - 2 * f);
        }
    }

    #[test]
    fn complement_of_planted_violates_everything() {
        let mut rng = RngStream::new(44, 0);
        let inst = generate_3r3xor(12, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
        let comp: Vec<bool> = inst.planted_bits().iter().map(|b| !b).collect();
        assert_eq!(count_violations(&inst, &comp).unwrap(), 12);
    }

    #[test]
    fn global_flip_negates_energy() {
        let mut rng = RngStream::new(45, 0);
        let inst = generate_3r3xor(10, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
        for _ in 0..100 {
            let s = spins(&bits::random(10, &mut rng));
            let neg: Vec<i8> = s.iter().map(|v| -v).collect();
            assert_eq!(
                ising_energy(&inst, &neg).unwrap(),
                -ising_energy(&inst, &s).unwrap()
            );
        }
    }

    #[test]
    fn energy_matches_triple_loop_on_dense_clauses() {
        // all C(10, 3) triples with random signs, evaluated through M[a][b][c]
        let mut rng = RngStream::new(46, 0);
        let n = 10;
        let mut clauses = Vec::new();
        let mut m = vec![vec![vec![0i64; n]; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let coef = if rng.random::<bool>() { 1 } else { -1 };
                    m[a][b][c] = coef;
                    clauses.push(Clause {
                        vars: [a, b, c],
                        coefficient: coef,
                    });
                }
            }
        }
        let mut inst = generate_3r3xor(n, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
        inst.clauses = clauses;
        for _ in 0..200 {
            let s = spins(&bits::random(n, &mut rng));
            let mut h = 0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if a < b && b < c {
                            h += m[a][b][c] * (s[a] * s[b] * s[c]) as i64;
                        }
                    }
                }
            }
            assert_eq!(ising_energy(&inst, &s).unwrap(), h);
        }
    }

    #[test]
    fn invalid_spin() {
        let mut rng = RngStream::new(47, 0);
        let inst = generate_3r3xor(5, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
        assert_eq!(
            ising_energy(&inst, &[1, 1, 0, 1, 1]),
            Err(ProblemError::InvalidSpin { index: 2, value: 0 })
        );
    }

    #[test]
    fn incremental_flips_track_energy() {
        let mut rng = RngStream::new(48, 0);
        let inst = generate_3r3xor(24, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
        let model = IsingXorModel::new(&inst);
        let mut x = bits::random(24, &mut rng);
        let mut cache = model.build_cache(&x);
        for _ in 0..2000 {
            let j = rng.random_range(0..24);
            let predicted = model.candidate_log_target(&x, &cache, &j);
            model.apply(&mut x, &mut cache, &j);
            assert_eq!(predicted, model.log_target(&x));
            assert_eq!(predicted as i64, ising_energy(&inst, &spins(&x)).unwrap());
        }
    }

    #[test]
    fn retry_budget_exhaustion() {
        // n = 3 forces every row to the same triple, which is singular
        let mut rng = RngStream::new(49, 0);
        assert_eq!(
            generate_3r3xor(3, 5, &mut rng),
            Err(ProblemError::GenerationFailed { attempts: 5 })
        );
    }
}
