use std::sync::Arc;
use std::thread;

use dcveb::harness::checker::check_linearizable;
use dcveb::harness::history::record_history_on;
use dcveb::harness::walk::quiescent_walk;
use dcveb::DcvebArray;

#[test]
fn disjoint_inserters_lose_nothing() {
    let array = Arc::new(DcvebArray::with_branching(4).unwrap());
    let handles: Vec<_> = (0..4u64)
        .map(|t| {
            let array = array.clone();
            thread::spawn(move || {
                // Interleaved stripes so threads share parents.
                for i in 0..5_000u64 {
                    array.insert(i * 4 + t, t).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    let walk = quiescent_walk(&array);
    assert!(walk.is_clean(), "{:?}", walk.violations);
    assert_eq!(walk.element_count, 20_000);
    for k in 0..20_000u64 {
        assert_eq!(array.get(k).map(|e| e.value), Some(k % 4));
    }
}

#[test]
fn concurrent_growth_from_many_threads() {
    let array = Arc::new(DcvebArray::with_branching(2).unwrap());
    let handles: Vec<_> = (0..8u32)
        .map(|t| {
            let array = array.clone();
            thread::spawn(move || {
                for shift in (0..40).step_by(3) {
                    array.insert((1u64 << shift) + u64::from(t), t).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    let walk = quiescent_walk(&array);
    assert!(walk.is_clean(), "{:?}", walk.violations);
    assert_eq!(array.get((1 << 39) + 7).map(|e| e.value), Some(7));
}

#[test]
fn inserts_and_deletes_of_the_same_keys_settle_clean() {
    let array = Arc::new(DcvebArray::with_branching(8).unwrap());
    let handles: Vec<_> = (0..4u64)
        .map(|t| {
            let array = array.clone();
            thread::spawn(move || {
                for i in 0..20_000u64 {
                    let k = (i * 31 + t * 7) % 700;
                    if (i + t) % 2 == 0 {
                        array.insert(k, i).unwrap();
                    } else {
                        array.delete(k);
                    }
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    let walk = quiescent_walk(&array);
    assert!(walk.is_clean(), "{:?}", walk.violations);
    for k in 0..700 {
        array.delete(k);
    }
    assert_eq!(array.minimum(), None);
    assert_eq!(array.capacity_snapshot().height, 1);
}

#[test]
fn wide_histories_are_linearizable() {
    for seed in 0..200 {
        // Keys past 63 make the threads race on growth and trimming.
        let array = DcvebArray::with_branching(64).unwrap();
        let history = record_history_on(&array, 3, 5, 200, seed);
        let verdict = check_linearizable(&history).unwrap();
        assert!(verdict.is_linearizable(), "seed {seed}\n{}", history.dump());
    }
}
