//! Exhaustive linearizability search in the style of Wing and Gong, with
//! failed `(linearized set, model state)` pairs memoized.

use std::collections::HashSet;

use thiserror::Error;

use super::history::{EventKind, History};
use crate::oracle::{Op, OpResult, OracleSet};

/// Largest number of operations a history may contain.
pub const MAX_OPS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HistoryError {
    #[error("event {index}: thread {thread} responds without a pending invocation")]
    UnmatchedResponse { index: usize, thread: usize },
    #[error("event {index}: thread {thread} invokes while a call is pending")]
    NestedInvocation { index: usize, thread: usize },
    #[error("event {index}: response does not match the pending operation")]
    MismatchedResponse { index: usize },
    #[error("event {index}: response carries no result")]
    MissingResult { index: usize },
    #[error("event {index}: tick {tick} goes backwards")]
    TickOrder { index: usize, tick: u64 },
    #[error("thread {thread} never responds to its last invocation")]
    PendingAtEnd { thread: usize },
    #[error("{0} operations exceed the checker limit of {MAX_OPS}")]
    TooLarge(usize),
}

/// One completed call extracted from a history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub thread: usize,
    pub invoked: u64,
    pub responded: u64,
    pub op: Op<u64>,
    pub result: OpResult<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A witness order, as indices into the extracted operations.
    Linearizable(Vec<usize>),
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_linearizable(&self) -> bool {
        matches!(self, Verdict::Linearizable(_))
    }
}

/// The longest prefix that could be linearized, and the operations none of
/// which could be placed after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub prefix: Vec<Operation>,
    pub stuck: Vec<Operation>,
}

/// Pairs invocations with responses and validates the event sequence.
pub fn operations(history: &History) -> Result<Vec<Operation>, HistoryError> {
    let mut pending: Vec<Option<(u64, Op<u64>)>> = Vec::new();
    let mut ops = Vec::new();
    let mut last_tick = None;
    for (index, e) in history.events.iter().enumerate() {
        if last_tick.is_some_and(|t| e.tick < t) {
            return Err(HistoryError::TickOrder { index, tick: e.tick });
        }
        last_tick = Some(e.tick);
        if pending.len() <= e.thread {
            pending.resize(e.thread + 1, None);
        }
        match e.kind {
            EventKind::Invoke => {
                if pending[e.thread].is_some() {
                    return Err(HistoryError::NestedInvocation {
                        index,
                        thread: e.thread,
                    });
                }
                pending[e.thread] = Some((e.tick, e.op.clone()));
            }
            EventKind::Respond => {
                let (invoked, op) = pending[e.thread].take().ok_or(
                    HistoryError::UnmatchedResponse {
                        index,
                        thread: e.thread,
                    },
                )?;
                if op != e.op {
                    return Err(HistoryError::MismatchedResponse { index });
                }
                let result = e
                    .result
                    .clone()
                    .ok_or(HistoryError::MissingResult { index })?;
                ops.push(Operation {
                    thread: e.thread,
                    invoked,
                    responded: e.tick,
                    op,
                    result,
                });
            }
        }
    }
    if let Some(thread) = pending.iter().position(Option::is_some) {
        return Err(HistoryError::PendingAtEnd { thread });
    }
    if ops.len() > MAX_OPS {
        return Err(HistoryError::TooLarge(ops.len()));
    }
    ops.sort_by_key(|o| o.invoked);
    Ok(ops)
}

/// `must_precede[i]` has bit `j` set when `j` responded before `i` was
/// invoked. Equal ticks count as concurrent.
fn precedence(ops: &[Operation]) -> Vec<u64> {
    ops.iter()
        .map(|a| {
            ops.iter()
                .enumerate()
                .filter(|(_, b)| b.responded < a.invoked)
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect()
}

struct Search<'a> {
    ops: &'a [Operation],
    must_precede: Vec<u64>,
    failed: HashSet<(u64, OracleSet<u64>)>,
    order: Vec<usize>,
    best: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, done: u64, state: &OracleSet<u64>) -> bool {
        if done.count_ones() as usize == self.ops.len() {
            return true;
        }
        if self.failed.contains(&(done, state.clone())) {
            return false;
        }
        for i in 0..self.ops.len() {
            let bit = 1u64 << i;
            if done & bit != 0 || self.must_precede[i] & !done != 0 {
                continue;
            }
            let op = &self.ops[i];
            let next = if op.op.is_mutation() {
                let (result, next) = state.apply(&op.op);
                if result != op.result {
                    continue;
                }
                next
            } else {
                if state.peek(&op.op).as_ref() != Some(&op.result) {
                    continue;
                }
                state.clone()
            };
            self.order.push(i);
            if self.order.len() > self.best.len() {
                self.best = self.order.clone();
            }
            if self.run(done | bit, &next) {
                return true;
            }
            self.order.pop();
        }
        self.failed.insert((done, state.clone()));
        false
    }
}

/// Searches for an order of the history's operations that respects
/// real-time precedence and reproduces every recorded result on the oracle.
/// An accepted history's witness has already been replayed once more.
pub fn check_linearizable(history: &History) -> Result<Verdict, HistoryError> {
    let ops = operations(history)?;
    let mut search = Search {
        ops: &ops,
        must_precede: precedence(&ops),
        failed: HashSet::new(),
        order: Vec::with_capacity(ops.len()),
        best: Vec::new(),
    };
    if search.run(0, &OracleSet::new()) {
        let witness = search.order;
        assert!(
            verify_witness(&ops, &witness),
            "checker produced an invalid witness"
        );
        return Ok(Verdict::Linearizable(witness));
    }
    let done = search.best.iter().fold(0u64, |m, &i| m | 1 << i);
    let prefix = search.best.iter().map(|&i| ops[i].clone()).collect();
    let stuck = (0..ops.len())
        .filter(|&i| done & 1 << i == 0 && search.must_precede[i] & !done == 0)
        .map(|i| ops[i].clone())
        .collect();
    Ok(Verdict::Counterexample(Counterexample { prefix, stuck }))
}

/// True when `order` is a permutation of `ops` that respects real-time
/// precedence and replays through the oracle with every recorded result.
pub fn verify_witness(ops: &[Operation], order: &[usize]) -> bool {
    if order.len() != ops.len() {
        return false;
    }
    let mut seen = vec![false; ops.len()];
    let mut state = OracleSet::new();
    for &i in order {
        if i >= ops.len() || seen[i] {
            return false;
        }
        // Everything that finished before `i` started must already be placed.
        if ops
            .iter()
            .enumerate()
            .any(|(j, o)| o.responded < ops[i].invoked && !seen[j])
        {
            return false;
        }
        seen[i] = true;
        if state.apply_in_place(&ops[i].op) != ops[i].result {
            return false;
        }
    }
    true
}

/// Tries every permutation. Exponential; meant for cross-checking
/// [`check_linearizable`] on tiny histories.
pub fn naive_linearizable(history: &History) -> Result<bool, HistoryError> {
    fn permute(ops: &[Operation], order: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if order.len() == ops.len() {
            return verify_witness(ops, order);
        }
        for i in 0..ops.len() {
            if !used[i] {
                used[i] = true;
                order.push(i);
                if permute(ops, order, used) {
                    return true;
                }
                order.pop();
                used[i] = false;
            }
        }
        false
    }
    let ops = operations(history)?;
    Ok(permute(
        &ops,
        &mut Vec::with_capacity(ops.len()),
        &mut vec![false; ops.len()],
    ))
}
