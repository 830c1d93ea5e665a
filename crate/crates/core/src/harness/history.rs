use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Barrier};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::array::DcvebArray;
use crate::oracle::{execute, Op, OpResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Invoke,
    Respond,
}

/// One invocation or response. Responses repeat the operation they answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub tick: u64,
    pub thread: usize,
    pub kind: EventKind,
    pub op: Op<u64>,
    pub result: Option<OpResult<u64>>,
}

impl fmt::Display for Event {
    /// `tick thread kind op args result`, with `-` for a missing result.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            EventKind::Invoke => "invoke",
            EventKind::Respond => "respond",
        };
        let args = match &self.op {
            Op::Insert(k, v) => format!("{k},{v}"),
            Op::Min | Op::Max => "-".to_string(),
            op => op.key().unwrap_or_default().to_string(),
        };
        let result = self
            .result
            .as_ref()
            .map_or_else(|| "-".to_string(), ToString::to_string);
        write!(
            f,
            "{} {} {} {} {} {}",
            self.tick,
            self.thread,
            kind,
            self.op.name(),
            args,
            result
        )
    }
}

/// Events in tick order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct History {
    pub events: Vec<Event>,
}

impl History {
    pub fn builder() -> HistoryBuilder {
        HistoryBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Line-delimited text dump, one event per line.
    pub fn dump(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// Builds histories by hand, assigning consecutive ticks.
#[derive(Default)]
pub struct HistoryBuilder {
    events: Vec<Event>,
}

impl HistoryBuilder {
    pub fn invoke(mut self, thread: usize, op: Op<u64>) -> Self {
        let tick = self.events.len() as u64;
        self.events.push(Event {
            tick,
            thread,
            kind: EventKind::Invoke,
            op,
            result: None,
        });
        self
    }

    /// Responds to the last invocation of `thread`.
    pub fn respond(mut self, thread: usize, result: OpResult<u64>) -> Self {
        let op = self
            .events
            .iter()
            .rev()
            .find(|e| e.thread == thread && e.kind == EventKind::Invoke)
            .map(|e| e.op.clone())
            .expect("respond without a prior invoke on this thread");
        let tick = self.events.len() as u64;
        self.events.push(Event {
            tick,
            thread,
            kind: EventKind::Respond,
            op,
            result: Some(result),
        });
        self
    }

    /// Invoke immediately followed by its response.
    pub fn call(self, thread: usize, op: Op<u64>, result: OpResult<u64>) -> Self {
        self.invoke(thread, op).respond(thread, result)
    }

    pub fn build(self) -> History {
        History {
            events: self.events,
        }
    }
}

/// Random operation over keys `[0, key_range)`. Insert values are unique per
/// `(thread, index)` so a read identifies the write it saw.
pub fn random_op(rng: &mut impl Rng, key_range: u64, thread: usize, index: usize) -> Op<u64> {
    let k = rng.gen_range(0..key_range);
    match rng.gen_range(0..10) {
        0..=2 => Op::Insert(k, (thread * 1000 + index) as u64 + 1),
        3..=4 => Op::Delete(k),
        5 => Op::Get(k),
        6..=7 => Op::Successor(k),
        8 => Op::Predecessor(k),
        _ => {
            if rng.gen_bool(0.5) {
                Op::Min
            } else {
                Op::Max
            }
        }
    }
}

/// Runs `threads` workers, each issuing `ops_per_thread` random operations
/// on a fresh binary-branching array, and logs every call.
pub fn record_history(threads: usize, ops_per_thread: usize, key_range: u64, seed: u64) -> History {
    let array = DcvebArray::with_branching(2).expect("2 is a valid branching factor");
    record_history_on(&array, threads, ops_per_thread, key_range, seed)
}

/// Like [`record_history`], against a caller-supplied array.
pub fn record_history_on(
    array: &DcvebArray<u64>,
    threads: usize,
    ops_per_thread: usize,
    key_range: u64,
    seed: u64,
) -> History {
    let clock = AtomicU64::new(0);
    let start = Arc::new(Barrier::new(threads));
    let mut events: Vec<Event> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|thread| {
                let clock = &clock;
                let start = Arc::clone(&start);
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(thread as u64 + 1);
                    let ops: Vec<_> = (0..ops_per_thread)
                        .map(|i| random_op(&mut rng, key_range, thread, i))
                        .collect();
                    let mut log = Vec::with_capacity(2 * ops_per_thread);
                    start.wait();
                    for op in ops {
                        let tick = clock.fetch_add(1, Ordering::SeqCst);
                        log.push(Event {
                            tick,
                            thread,
                            kind: EventKind::Invoke,
                            op: op.clone(),
                            result: None,
                        });
                        let result = execute(array, &op);
                        let tick = clock.fetch_add(1, Ordering::SeqCst);
                        log.push(Event {
                            tick,
                            thread,
                            kind: EventKind::Respond,
                            op,
                            result: Some(result),
                        });
                    }
                    log
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("history worker panicked"))
            .collect()
    });
    events.sort_by_key(|e| e.tick);
    History { events }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::Entry;

    #[test]
    fn single_thread_history_has_two_events_per_op() {
        let h = record_history(1, 3, 8, 7);
        assert_eq!(h.len(), 6);
        for (i, e) in h.events.iter().enumerate() {
            assert_eq!(e.tick, i as u64);
            let expected = if i % 2 == 0 { EventKind::Invoke } else { EventKind::Respond };
            assert_eq!(e.kind, expected);
        }
    }

    #[test]
    fn recording_is_seeded() {
        let ops = |h: &History| h.events.iter().map(|e| e.op.clone()).collect::<Vec<_>>();
        let a = record_history(1, 6, 8, 42);
        let b = record_history(1, 6, 8, 42);
        assert_eq!(ops(&a), ops(&b));
        assert_eq!(a, b);
    }

    #[test]
    fn dump_format() {
        let h = History::builder()
            .call(0, Op::Insert(3, 30), OpResult::Ack)
            .invoke(1, Op::Get(3))
            .respond(1, OpResult::Found(Some(Entry::new(3, 30))))
            .call(1, Op::Min, OpResult::Found(None))
            .build();
        assert_eq!(
            h.dump(),
            "0 0 invoke insert 3,30 -\n\
             1 0 respond insert 3,30 ok\n\
             2 1 invoke get 3 -\n\
             3 1 respond get 3 3=30\n\
             4 1 invoke min - -\n\
             5 1 respond min - none\n"
        );
    }
}
