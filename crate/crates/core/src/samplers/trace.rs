use std::io::Write;

use serde::Serialize;

use crate::model::ProblemModel;

/// The states `X_0, X_1, ...` of a chain with their `log π`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace<S> {
    pub states: Vec<S>,
    pub log_targets: Vec<f64>,
}

impl<S> ChainTrace<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Plain time average of `h` over the trace.
    pub fn mean_of<F: FnMut(&S) -> f64>(&self, mut h: F) -> f64 {
        self.states.iter().map(&mut h).sum::<f64>() / self.states.len() as f64
    }
}

/// Jump states `J_k` (no two consecutive equal), their multiplicities `M_k`
/// and, when produced by a rejection-free run, the escape probabilities
/// `p(J_k)` that generated each multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpChainRecord<S> {
    pub jump_states: Vec<S>,
    pub log_targets: Vec<f64>,
    pub multiplicities: Vec<u64>,
    pub escape_probs: Option<Vec<f64>>,
}

impl<S> JumpChainRecord<S> {
    pub fn len(&self) -> usize {
        self.jump_states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jump_states.is_empty()
    }

    /// `Σ M_k`: the length of the underlying Metropolis chain.
    pub fn total_steps(&self) -> u64 {
        self.multiplicities.iter().sum()
    }
}

/// Merges immediately repeated states into one jump state whose multiplicity
/// is the run length.
pub fn jump_collapse<S: Clone + PartialEq>(trace: &ChainTrace<S>) -> JumpChainRecord<S> {
    let mut record = JumpChainRecord {
        jump_states: Vec::new(),
        log_targets: Vec::new(),
        multiplicities: Vec::new(),
        escape_probs: None,
    };
    for (state, &log_pi) in trace.states.iter().zip(&trace.log_targets) {
        match record.jump_states.last() {
            Some(last) if last == state => *record.multiplicities.last_mut().unwrap() += 1,
            _ => {
                record.jump_states.push(state.clone());
                record.log_targets.push(log_pi);
                record.multiplicities.push(1);
            }
        }
    }
    record
}

/// `Σ M_k h(J_k) / Σ M_k`.
pub fn weighted_expectation<S, F: FnMut(&S) -> f64>(record: &JumpChainRecord<S>, mut h: F) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (state, &m) in record.jump_states.iter().zip(&record.multiplicities) {
        num += m as f64 * h(state);
        den += m as f64;
    }
    num / den
}

#[derive(Serialize)]
struct ChainRow<'a> {
    step: usize,
    state_id: &'a str,
    log_target: f64,
    multiplicity: u64,
}

fn write_rows<W: Write, S, M: ProblemModel<State = S>>(
    writer: W,
    model: &M,
    rows: impl Iterator<Item = (usize, S, f64, u64)>,
) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for (step, state, log_target, multiplicity) in rows {
        let id = model.encode_state(&state);
        out.serialize(ChainRow {
            step,
            state_id: &id,
            log_target,
            multiplicity,
        })?;
    }
    out.flush()?;
    Ok(())
}

/// CSV with columns `step,state_id,log_target,multiplicity` (multiplicity is
/// 1 for every row of a plain trace).
pub fn write_trace_csv<W: Write, M: ProblemModel>(
    writer: W,
    model: &M,
    trace: &ChainTrace<M::State>,
) -> csv::Result<()> {
    write_rows(
        writer,
        model,
        trace
            .states
            .iter()
            .zip(&trace.log_targets)
            .enumerate()
            .map(|(k, (s, &lp))| (k, s.clone(), lp, 1)),
    )
}

pub fn write_jump_csv<W: Write, M: ProblemModel>(
    writer: W,
    model: &M,
    record: &JumpChainRecord<M::State>,
) -> csv::Result<()> {
    write_rows(
        writer,
        model,
        record
            .jump_states
            .iter()
            .zip(&record.log_targets)
            .zip(&record.multiplicities)
            .enumerate()
            .map(|(k, ((s, &lp), &m))| (k, s.clone(), lp, m)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_of(ids: &str) -> ChainTrace<char> {
        ChainTrace {
            states: ids.chars().collect(),
            log_targets: vec![0.0; ids.len()],
        }
    }

    #[test]
    fn worked_example_collapses() {
        let r = jump_collapse(&trace_of("abbbaaccccdda"));
        assert_eq!(r.jump_states, "abacda".chars().collect::<Vec<_>>());
        assert_eq!(r.multiplicities, vec![1, 3, 2, 4, 2, 1]);
        assert_eq!(r.escape_probs, None);
    }

    #[test]
    fn single_state() {
        let r = jump_collapse(&trace_of("a"));
        assert_eq!(r.jump_states, vec!['a']);
        assert_eq!(r.multiplicities, vec![1]);
    }

    #[test]
    fn no_repeats_gives_unit_multiplicities() {
        let r = jump_collapse(&trace_of("abcbcda"));
        assert!(r.multiplicities.iter().all(|&m| m == 1));
        assert_eq!(r.len(), 7);
    }

    #[test]
    fn weighted_expectation_arithmetic() {
        let r = JumpChainRecord {
            jump_states: vec!['a', 'b'],
            log_targets: vec![0.0, 0.0],
            multiplicities: vec![1, 3],
            escape_probs: None,
        };
        assert_eq!(weighted_expectation(&r, |&s| if s == 'b' { 1.0 } else { 0.0 }), 0.75);
        assert_eq!(weighted_expectation(&r, |_| 1.0), 1.0);
    }
}
