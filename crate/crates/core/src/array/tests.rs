use super::*;
use crate::oracle::{execute, Op, OracleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn keys<V: Clone + Send + Sync + 'static>(a: &DcvebArray<V>) -> Vec<u64> {
    let mut out = Vec::new();
    let mut next = a.successor(0);
    while let Some(e) = next {
        out.push(e.key);
        next = a.successor(e.key + 1);
    }
    out
}

fn root_summary<V>(a: &DcvebArray<V>) -> Summary {
    let guard = &epoch::pin();
    a.param(guard).root(guard).summary()
}

fn snap(size: u128, height: usize) -> CapacitySnapshot {
    CapacitySnapshot { size, height }
}

#[test]
fn new_array_is_empty() {
    let a: DcvebArray<char> = DcvebArray::with_config(64, 11).unwrap();
    assert_eq!(a.capacity_snapshot(), snap(64, 1));
    assert_eq!(a.successor(0), None);
    for k in [0, 1, 63, 64, 4095, MAX_KEY] {
        assert_eq!(a.get(k), None);
    }
    assert!(root_summary(&a).is_empty());
}

#[test]
fn construction_rejects_bad_parameters() {
    assert_eq!(
        DcvebArray::<u8>::with_branching(3).unwrap_err(),
        Error::InvalidBranching(3)
    );
    assert_eq!(
        DcvebArray::<u8>::with_branching(128).unwrap_err(),
        Error::InvalidBranching(128)
    );
    assert_eq!(
        DcvebArray::<u8>::with_config(64, 10).unwrap_err(),
        Error::InvalidMaxRep {
            given: 10,
            required: 11
        }
    );
    assert_eq!(DcvebArray::<u8>::new().max_rep(), 11);
    assert_eq!(DcvebArray::<u8>::with_branching(2).unwrap().max_rep(), 63);
}

#[test]
fn insert_then_get() {
    let a = DcvebArray::new();
    a.insert(5, 'A').unwrap();
    assert_eq!(a.get(5), Some(Entry::new(5, 'A')));
    assert_eq!(a.get(4), None);
}

#[test]
fn insert_beyond_size_grows() {
    let a = DcvebArray::new();
    a.insert(70, 'B').unwrap();
    assert_eq!(a.capacity_snapshot(), snap(4096, 2));
    assert_eq!(a.get(70), Some(Entry::new(70, 'B')));
}

#[test]
fn insert_overwrites() {
    let a = DcvebArray::new();
    a.insert(5, 'A').unwrap();
    a.insert(5, 'B').unwrap();
    assert_eq!(a.get(5), Some(Entry::new(5, 'B')));
    assert_eq!(keys(&a), vec![5]);
}

#[test]
fn oversized_key_is_rejected() {
    let a = DcvebArray::new();
    assert_eq!(a.insert(MAX_KEY + 1, 1), Err(Error::KeyTooLarge(MAX_KEY + 1)));
    a.insert(MAX_KEY, 2).unwrap();
    assert_eq!(a.capacity_snapshot().height, 11);
    assert_eq!(a.get(MAX_KEY), Some(Entry::new(MAX_KEY, 2)));
    assert_eq!(a.maximum().map(|e| e.key), Some(MAX_KEY));
    assert_eq!(a.get(MAX_KEY + 1), None);
    a.delete(MAX_KEY + 1);
    a.delete(MAX_KEY);
    assert_eq!(a.capacity_snapshot(), snap(64, 1));
}

#[test]
fn grow_builds_child_zero_chain() {
    let a = DcvebArray::<char>::new();
    let old_root = {
        let guard = &epoch::pin();
        a.param(guard).root(guard) as *const ArrayHolder<char>
    };
    a.insert(70, 'B').unwrap();
    let guard = &epoch::pin();
    let root = a.param(guard).root(guard);
    // Child 0 (the old root) has no bit: it is empty. Key 70 lives under child 1.
    assert_eq!(root.summary(), a.branching.child_mask(1));
    assert!(std::ptr::eq(root.child(0, guard).unwrap(), old_root));
}

#[test]
fn grow_multiplies_capacity() {
    let a = DcvebArray::<u8>::with_branching(4).unwrap();
    a.insert(3, 0).unwrap();
    let before = a.capacity_snapshot();
    a.insert(4u64.pow(3), 1).unwrap();
    let after = a.capacity_snapshot();
    let k = after.height - before.height;
    assert_eq!(k, 3);
    assert_eq!(after.size, before.size * 4u128.pow(k as u32));
}

#[test]
fn get_follows_digit_path() {
    let a = DcvebArray::new();
    a.insert(130, 'C').unwrap();
    assert_eq!(a.get(130), Some(Entry::new(130, 'C')));
    let guard = &epoch::pin();
    let ap = a.param(guard);
    let trail = a.make_path(130, ap, guard);
    assert_eq!(trail.pos.as_slice(), &[2, 2]);
    assert_eq!(trail.reached, 2);
    assert!(trail.leaf.is_some());
    a.delete(130);
    assert_eq!(a.get(130), None);
}

#[test]
fn make_path_stops_early() {
    let a = DcvebArray::new();
    {
        let guard = &epoch::pin();
        let trail = a.make_path(0, a.param(guard), guard);
        assert_eq!(trail.reached, 0);
        assert!(trail.leaf.is_none());
    }
    a.insert(130, 'C').unwrap();
    let guard = &epoch::pin();
    let trail = a.make_path(131, a.param(guard), guard);
    assert_eq!(trail.reached, 1);
    assert_eq!(trail.pos.as_slice(), &[2, 3]);
}

#[test]
fn delete_on_empty_is_noop() {
    let a = DcvebArray::<u8>::new();
    a.delete(0);
    a.delete(1000);
    assert_eq!(a.capacity_snapshot(), snap(64, 1));
    assert!(root_summary(&a).is_empty());
}

#[test]
fn delete_clears_path() {
    let a = DcvebArray::new();
    a.insert(5, 'A').unwrap();
    a.delete(5);
    assert_eq!(a.get(5), None);
    assert!(root_summary(&a).is_empty());
    let guard = &epoch::pin();
    let root = a.param(guard).root(guard);
    assert!((0..64).all(|p| root.child(p, guard).is_none()));
}

#[test]
fn delete_keeps_neighbours() {
    let a = DcvebArray::new();
    a.insert(5, 'A').unwrap();
    a.insert(6, 'B').unwrap();
    a.delete(5);
    assert_eq!(a.successor(0), Some(Entry::new(6, 'B')));
}

#[test]
fn sole_element_delete_empties_every_level() {
    // n = 4, height 3: 20 = [1,1,0], 40 = [2,2,0], 1 = [0,0,1].
    let a = DcvebArray::with_branching(4).unwrap();
    for k in [1, 20, 40] {
        a.insert(k, 0u8).unwrap();
    }
    a.delete(20);
    let guard = &epoch::pin();
    let ap = a.param(guard);
    assert_eq!(ap.height, 3);
    let root = ap.root(guard);
    let b = a.branching;
    assert_eq!(root.summary(), b.child_mask(0) | b.child_mask(2));
    // The emptied node may stay linked, but with nothing below it.
    if let Some(mid) = root.child(1, guard) {
        assert!(mid.summary().is_empty());
        assert!((0..4).all(|p| mid.child(p, guard).is_none()));
    }
}

#[test]
fn emptied_tree_collapses_to_height_one() {
    let a = DcvebArray::new();
    a.insert(70, 'B').unwrap();
    assert_eq!(a.capacity_snapshot(), snap(4096, 2));
    a.delete(70);
    assert_eq!(a.capacity_snapshot(), snap(64, 1));
    assert!(root_summary(&a).is_empty());
}

#[test]
fn grow_flags_non_empty_old_tree() {
    let a = DcvebArray::new();
    a.insert(3, 'A').unwrap();
    a.insert(70, 'B').unwrap();
    let b = a.branching;
    assert_eq!(root_summary(&a), b.child_mask(0) | b.child_mask(1));
}

#[test]
fn sibling_delete_leaves_sibling_bit() {
    let a = DcvebArray::new();
    a.insert(64, 'x').unwrap();
    a.insert(65, 'y').unwrap();
    a.delete(64);
    let guard = &epoch::pin();
    let root = a.param(guard).root(guard);
    let parent = root.child(1, guard).unwrap();
    assert_eq!(parent.summary(), a.branching.child_mask(1));
    // The vacated leaf may stay linked with a null value.
    if let Some(leaf) = parent.child(0, guard) {
        assert!(leaf.read_leaf(guard).is_none());
    }
}

#[test]
fn propagation_stops_at_branching_ancestor() {
    // n = 4, height 3: keys 0b01_00_00 = 16 and 0b01_10_00 = 24 share the
    // level-1 node under root child 1.
    let a = DcvebArray::with_branching(4).unwrap();
    a.insert(16, 'a').unwrap();
    a.insert(24, 'b').unwrap();
    a.insert(48, 'c').unwrap();
    a.delete(16);
    let guard = &epoch::pin();
    let root = a.param(guard).root(guard);
    let b = a.branching;
    assert_eq!(root.summary(), b.child_mask(1) | b.child_mask(3));
    let mid = root.child(1, guard).unwrap();
    assert_eq!(mid.summary(), b.child_mask(2));
}

#[test]
fn trim_returns_to_height_one() {
    let a = DcvebArray::new();
    a.insert(70, 'B').unwrap();
    a.delete(70);
    a.insert(3, 'A').unwrap();
    a.insert(64, 'C').unwrap();
    assert_eq!(a.capacity_snapshot(), snap(4096, 2));
    a.delete(64);
    assert_eq!(a.capacity_snapshot(), snap(64, 1));
    assert_eq!(a.get(3), Some(Entry::new(3, 'A')));
    assert_eq!(a.minimum(), a.maximum());
}

#[test]
fn trim_is_noop_at_height_one_or_when_other_children_remain() {
    let a = DcvebArray::new();
    a.insert(3, 'A').unwrap();
    a.insert(4, 'B').unwrap();
    a.delete(4);
    assert_eq!(a.capacity_snapshot(), snap(64, 1));

    a.insert(5 * 64, 'C').unwrap();
    a.insert(7 * 64, 'D').unwrap();
    a.delete(7 * 64);
    // Children 0 and 5 remain.
    assert_eq!(a.capacity_snapshot(), snap(4096, 2));
}

#[test]
fn trim_removes_several_levels() {
    let a = DcvebArray::new();
    a.insert(1, ()).unwrap();
    a.insert(1 << 40, ()).unwrap();
    assert_eq!(a.capacity_snapshot().height, 7);
    a.delete(1 << 40);
    assert_eq!(a.capacity_snapshot(), snap(64, 1));
    assert_eq!(keys(&a), vec![1]);
}

#[test]
fn required_heights_for_31_and_63_bit_keys() {
    let a = DcvebArray::new();
    a.insert((1 << 31) - 1, ()).unwrap();
    assert_eq!(a.capacity_snapshot().height, 6);
    a.insert(MAX_KEY, ()).unwrap();
    assert_eq!(a.capacity_snapshot().height, 11);
}

#[test]
fn successor_and_predecessor() {
    let a = DcvebArray::new();
    assert_eq!(a.predecessor(10), None);
    a.insert(5, 'A').unwrap();
    a.insert(130, 'C').unwrap();
    assert_eq!(a.successor(5), Some(Entry::new(5, 'A')));
    assert_eq!(a.successor(6), Some(Entry::new(130, 'C')));
    assert_eq!(a.successor(131), None);
    assert_eq!(a.successor(1 << 20), None);
    assert_eq!(a.predecessor(129), Some(Entry::new(5, 'A')));
    assert_eq!(a.predecessor(4), None);
    assert_eq!(a.predecessor(4095), Some(Entry::new(130, 'C')));
    assert_eq!(a.predecessor(u64::MAX), Some(Entry::new(130, 'C')));
}

#[test]
fn successor_ascends_from_leftmost_path() {
    let a = DcvebArray::new();
    a.insert(130, 'C').unwrap();
    assert_eq!(a.successor(0), Some(Entry::new(130, 'C')));
}

#[test]
fn min_and_max() {
    let a = DcvebArray::new();
    assert_eq!(a.minimum(), None);
    assert_eq!(a.maximum(), None);
    a.insert(130, 'C').unwrap();
    assert_eq!(a.minimum(), a.maximum());
    a.insert(5, 'A').unwrap();
    assert_eq!(a.minimum(), Some(Entry::new(5, 'A')));
    assert_eq!(a.maximum(), Some(Entry::new(130, 'C')));
}

#[test]
fn search_skips_linked_but_emptied_subtrees() {
    let a = DcvebArray::with_branching(2).unwrap();
    for k in 0..32 {
        a.insert(k, k).unwrap();
    }
    for k in (0..32).filter(|k| k % 7 != 3) {
        a.delete(k);
    }
    assert_eq!(keys(&a), vec![3, 10, 17, 24, 31]);
    for q in 0..40 {
        let ceil = [3, 10, 17, 24, 31].into_iter().find(|&k| k >= q);
        let floor = [3, 10, 17, 24, 31].into_iter().rev().find(|&k| k <= q);
        assert_eq!(a.successor(q).map(|e| e.key), ceil, "successor({q})");
        assert_eq!(a.predecessor(q).map(|e| e.key), floor, "predecessor({q})");
    }
}

#[test]
fn quiescent_clone_is_independent() {
    let a = DcvebArray::new();
    a.insert(1, 10).unwrap();
    a.insert(700, 20).unwrap();
    let b = a.quiescent_clone();
    a.delete(1);
    assert_eq!(b.get(1), Some(Entry::new(1, 10)));
    assert_eq!(keys(&b), vec![1, 700]);
    assert_eq!(b.capacity_snapshot(), a.capacity_snapshot());
}

#[test]
fn random_sequences_match_oracle() {
    for n in [2, 4, 8, 64] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let a = DcvebArray::with_branching(n).unwrap();
        let mut o = OracleSet::new();
        for i in 0..20_000u64 {
            let k = if rng.gen_bool(0.05) {
                rng.gen_range(0..1 << 20)
            } else {
                rng.gen_range(0..300)
            };
            let op = match rng.gen_range(0..7) {
                0 | 1 => Op::Insert(k, i),
                2 | 3 => Op::Delete(k),
                4 => Op::Get(k),
                5 => Op::Successor(k),
                _ => Op::Predecessor(k),
            };
            assert_eq!(execute(&a, &op), o.apply_in_place(&op), "n={n} step {i}: {op:?}");
        }
        assert_eq!(keys(&a), o.keys().collect::<Vec<_>>());
    }
}

#[test]
fn drop_releases_values() {
    use std::sync::Arc;
    let probe = Arc::new(());
    {
        let a = DcvebArray::new();
        for k in 0..200 {
            a.insert(k * 3, Arc::clone(&probe)).unwrap();
        }
        for k in 0..100 {
            a.delete(k * 3);
        }
        a.insert(1 << 30, Arc::clone(&probe)).unwrap();
    }
    // Retired values are freed lazily by the collector; flush it.
    for _ in 0..64 {
        epoch::pin().flush();
    }
    assert_eq!(Arc::strong_count(&probe), 1);
}
