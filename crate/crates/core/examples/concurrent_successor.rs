//! Successor queries keep finding a pinned key while other threads churn the
//! keys around it.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;

use dcveb::DcvebArray;

const PINNED: u64 = 5_000;

fn main() -> dcveb::Result<()> {
    let map = Arc::new(DcvebArray::new());
    map.insert(PINNED, "pinned")?;
    let stop = Arc::new(AtomicBool::new(false));
    let misses = Arc::new(AtomicU64::new(0));

    let churn: Vec<_> = (0..2u64)
        .map(|t| {
            let (map, stop) = (map.clone(), stop.clone());
            thread::spawn(move || {
                let mut k = t;
                while !stop.load(Ordering::Relaxed) {
                    k = (k * 6364136223846793005 + 1442695040888963407) % 20_000;
                    if k != PINNED {
                        map.insert(k, "churn").unwrap();
                        map.delete(k);
                    }
                }
            })
        })
        .collect();

    let queries: Vec<_> = (0..2u64)
        .map(|t| {
            let (map, misses) = (map.clone(), misses.clone());
            thread::spawn(move || {
                for i in 0..200_000u64 {
                    let q = (i * 7 + t) % (PINNED + 1);
                    match map.successor(q) {
                        Some(e) if e.key <= PINNED => {}
                        _ => {
                            misses.fetch_add(1, Ordering::Relaxed);
                        }
                    }
                }
            })
        })
        .collect();

    for q in queries {
        q.join().unwrap();
    }
    stop.store(true, Ordering::Relaxed);
    for c in churn {
        c.join().unwrap();
    }
    println!("400000 successor queries, {} missed the pinned key", misses.load(Ordering::Relaxed));
    Ok(())
}
