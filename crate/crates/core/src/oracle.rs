//! Sequential reference model backed by a `BTreeMap`.

use std::collections::BTreeMap;
use std::fmt;

use crate::array::{DcvebArray, Entry};
use crate::index_math::MAX_KEY;

/// One call against an ordered map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Op<V> {
    Insert(u64, V),
    Delete(u64),
    Get(u64),
    Successor(u64),
    Predecessor(u64),
    Min,
    Max,
}

/// What a call returned.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpResult<V> {
    /// Insert or delete completed.
    Ack,
    /// Insert refused because the key is too large.
    Rejected,
    /// Answer of a query.
    Found(Option<Entry<V>>),
}

impl<V> Op<V> {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Insert(..) => "insert",
            Op::Delete(_) => "delete",
            Op::Get(_) => "get",
            Op::Successor(_) => "successor",
            Op::Predecessor(_) => "predecessor",
            Op::Min => "min",
            Op::Max => "max",
        }
    }

    pub fn key(&self) -> Option<u64> {
        match self {
            Op::Insert(k, _)
            | Op::Delete(k)
            | Op::Get(k)
            | Op::Successor(k)
            | Op::Predecessor(k) => Some(*k),
            Op::Min | Op::Max => None,
        }
    }

    pub fn is_mutation(&self) -> bool {
        matches!(self, Op::Insert(..) | Op::Delete(_))
    }
}

impl<V: fmt::Display> fmt::Display for Op<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Insert(k, v) => write!(f, "insert {k} {v}"),
            Op::Min | Op::Max => write!(f, "{}", self.name()),
            _ => write!(f, "{} {}", self.name(), self.key().unwrap_or_default()),
        }
    }
}

impl<V: fmt::Display> fmt::Display for OpResult<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpResult::Ack => write!(f, "ok"),
            OpResult::Rejected => write!(f, "rejected"),
            OpResult::Found(None) => write!(f, "none"),
            OpResult::Found(Some(e)) => write!(f, "{}={}", e.key, e.value),
        }
    }
}

/// The ground-truth ordered map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OracleSet<V> {
    entries: BTreeMap<u64, V>,
}

impl<V: Clone> OracleSet<V> {
    pub fn new() -> Self {
        OracleSet {
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    /// Result of `op` and the state after it; `self` is left unchanged.
    pub fn apply(&self, op: &Op<V>) -> (OpResult<V>, OracleSet<V>) {
        let mut next = self.clone();
        let result = next.apply_in_place(op);
        (result, next)
    }

    /// Result of `op` without modifying the state. For queries this equals
    /// `apply(op).0` without the copy.
    pub fn peek(&self, op: &Op<V>) -> Option<OpResult<V>> {
        let entry = |(k, v): (&u64, &V)| Entry::new(*k, v.clone());
        let found = match *op {
            Op::Insert(..) | Op::Delete(_) => return None,
            Op::Get(k) => self.entries.get(&k).map(|v| Entry::new(k, v.clone())),
            Op::Successor(k) => self.entries.range(k..).next().map(entry),
            Op::Predecessor(k) => self.entries.range(..=k).next_back().map(entry),
            Op::Min => self.entries.iter().next().map(entry),
            Op::Max => self.entries.iter().next_back().map(entry),
        };
        Some(OpResult::Found(found))
    }

    pub fn apply_in_place(&mut self, op: &Op<V>) -> OpResult<V> {
        match op {
            Op::Insert(k, _) if *k > MAX_KEY => OpResult::Rejected,
            Op::Insert(k, v) => {
                self.entries.insert(*k, v.clone());
                OpResult::Ack
            }
            Op::Delete(k) => {
                self.entries.remove(k);
                OpResult::Ack
            }
            query => self.peek(query).expect("queries always have a result"),
        }
    }
}

/// Runs `op` against the concurrent array and reports the result in the
/// oracle's vocabulary.
pub fn execute<V>(array: &DcvebArray<V>, op: &Op<V>) -> OpResult<V>
where
    V: Clone + Send + Sync + 'static,
{
    match op {
        Op::Insert(k, v) => match array.insert(*k, v.clone()) {
            Ok(()) => OpResult::Ack,
            Err(_) => OpResult::Rejected,
        },
        Op::Delete(k) => {
            array.delete(*k);
            OpResult::Ack
        }
        Op::Get(k) => OpResult::Found(array.get(*k)),
        Op::Successor(k) => OpResult::Found(array.successor(*k)),
        Op::Predecessor(k) => OpResult::Found(array.predecessor(*k)),
        Op::Min => OpResult::Found(array.minimum()),
        Op::Max => OpResult::Found(array.maximum()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(pairs: &[(u64, char)]) -> OracleSet<char> {
        let mut s = OracleSet::new();
        for &(k, v) in pairs {
            s.apply_in_place(&Op::Insert(k, v));
        }
        s
    }

    #[test]
    fn successor_is_ceiling() {
        let s = set(&[(5, 'A'), (130, 'C')]);
        let (r, next) = s.apply(&Op::Successor(6));
        assert_eq!(r, OpResult::Found(Some(Entry::new(130, 'C'))));
        assert_eq!(next, s);
        assert_eq!(
            s.apply(&Op::Successor(5)).0,
            OpResult::Found(Some(Entry::new(5, 'A')))
        );
    }

    #[test]
    fn delete_of_missing_key_is_noop() {
        let s = set(&[(5, 'A')]);
        let (r, next) = s.apply(&Op::Delete(9));
        assert_eq!(r, OpResult::Ack);
        assert_eq!(next, s);
    }

    #[test]
    fn min_of_empty_is_none() {
        let s: OracleSet<char> = OracleSet::new();
        assert_eq!(s.apply(&Op::Min).0, OpResult::Found(None));
        assert_eq!(s.apply(&Op::Max).0, OpResult::Found(None));
    }

    #[test]
    fn apply_leaves_input_untouched() {
        let s = set(&[(1, 'a')]);
        let (_, next) = s.apply(&Op::Insert(2, 'b'));
        assert_eq!(s.len(), 1);
        assert_eq!(next.len(), 2);
    }

    #[test]
    fn oversized_insert_is_rejected() {
        let mut s: OracleSet<char> = OracleSet::new();
        assert_eq!(s.apply_in_place(&Op::Insert(MAX_KEY + 1, 'x')), OpResult::Rejected);
        assert!(s.is_empty());
    }

    proptest! {
        #[test]
        fn neighbour_queries_match_scan(keys in prop::collection::btree_set(0u64..200, 0..40), q in 0u64..220) {
            let s = {
                let mut s = OracleSet::new();
                for &k in &keys {
                    s.apply_in_place(&Op::Insert(k, k * 10));
                }
                s
            };
            let ceil = keys.iter().copied().filter(|&k| k >= q).min();
            let floor = keys.iter().copied().filter(|&k| k <= q).max();
            let key_of = |r: OpResult<u64>| match r {
                OpResult::Found(e) => e.map(|e| { assert_eq!(e.value, e.key * 10); e.key }),
                other => panic!("unexpected {other:?}"),
            };
            prop_assert_eq!(key_of(s.apply(&Op::Successor(q)).0), ceil);
            prop_assert_eq!(key_of(s.apply(&Op::Predecessor(q)).0), floor);
            prop_assert_eq!(key_of(s.apply(&Op::Min).0), keys.iter().next().copied());
            prop_assert_eq!(key_of(s.apply(&Op::Max).0), keys.iter().next_back().copied());
            prop_assert_eq!(key_of(s.apply(&Op::Get(q)).0), keys.contains(&q).then_some(q));
        }
    }
}
