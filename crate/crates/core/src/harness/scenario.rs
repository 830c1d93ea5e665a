//! Two-thread races steered through the array's hook points.
//!
//! Hooks only ever signal or wait with a timeout, so a scenario that goes
//! wrong reports a failure instead of hanging.

use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::walk::quiescent_walk;
use crate::array::hooks::{HookPoint, OpKind};
use crate::array::DcvebArray;

pub const SCENARIOS: [&str; 3] = [
    "insert-vs-trim",
    "grow-vs-delete-residue",
    "two-inserters-one-parent",
];

const WAIT: Duration = Duration::from_secs(5);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown scenario {0:?}")]
pub struct UnknownScenario(pub String);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScenarioReport {
    pub name: String,
    pub iterations: usize,
    pub failures: Vec<String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A latch that opens once `count` signals arrived.
#[derive(Default)]
struct Gate {
    count: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn signal(&self) {
        *self.count.lock().unwrap() += 1;
        self.cv.notify_all();
    }

    /// False on timeout.
    fn wait_for(&self, count: usize) -> bool {
        let guard = self.count.lock().unwrap();
        let (_count, timeout) = self
            .cv
            .wait_timeout_while(guard, WAIT, |c| *c < count)
            .unwrap();
        !timeout.timed_out()
    }
}

/// Runs the named scenario `iterations` times with interleavings drawn from
/// `seed`.
pub fn scripted_scenario(
    name: &str,
    iterations: usize,
    seed: u64,
) -> Result<ScenarioReport, UnknownScenario> {
    let run: fn(&mut ChaCha8Rng) -> Result<(), String> = match name {
        "insert-vs-trim" => insert_vs_trim,
        "grow-vs-delete-residue" => grow_vs_delete_residue,
        "two-inserters-one-parent" => two_inserters_one_parent,
        other => return Err(UnknownScenario(other.to_string())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ScenarioReport {
        name: name.to_string(),
        iterations,
        failures: Vec::new(),
    };
    for i in 0..iterations {
        if let Err(e) = run(&mut rng) {
            report.failures.push(format!("iteration {i}: {e}"));
        }
    }
    Ok(report)
}

fn check_contents(array: &DcvebArray<u64>, expected: &[u64]) -> Result<(), String> {
    let walk = quiescent_walk(array);
    if !walk.is_clean() {
        return Err(format!("walk violations {:?}", walk.violations));
    }
    if walk.element_count != expected.len() {
        return Err(format!(
            "expected {} elements, found {}",
            expected.len(),
            walk.element_count
        ));
    }
    for &k in expected {
        if array.get(k).is_none() {
            return Err(format!("key {k} lost"));
        }
    }
    Ok(())
}

fn join2(
    a: impl FnOnce() + Send,
    b: impl FnOnce() + Send,
) -> Result<(), String> {
    std::thread::scope(|s| {
        let ha = s.spawn(a);
        let hb = s.spawn(b);
        let ra = ha.join();
        let rb = hb.join();
        if ra.is_err() || rb.is_err() {
            Err("worker panicked".to_string())
        } else {
            Ok(())
        }
    })
}

/// Height 2 with keys 3 and 70. One thread deletes 70, which makes the root
/// only-child-zero and starts a trim; the other inserts either into child 0
/// (trim must still succeed and keep the key) or into another child (trim
/// must back off).
fn insert_vs_trim(rng: &mut ChaCha8Rng) -> Result<(), String> {
    const DELETED: u64 = 70;
    let array = DcvebArray::new();
    array.insert(3, 3).unwrap();
    array.insert(DELETED, DELETED).unwrap();
    let key: u64 = if rng.gen_bool(0.5) { 5 } else { 130 };
    // 0: insert snapshots, then waits for the trim to start.
    // 1: trim waits for the insert to snapshot.
    // 2: no steering.
    let variant = rng.gen_range(0..3);

    let snapshotted = Arc::new(Gate::default());
    let trimming = Arc::new(Gate::default());
    let timed_out = Arc::new(Mutex::new(false));
    {
        let (snapshotted, trimming, timed_out) =
            (snapshotted.clone(), trimming.clone(), timed_out.clone());
        array.set_hook(Some(Arc::new(move |point, k| match point {
            HookPoint::AfterSnapshot(OpKind::Insert) if k == key => {
                snapshotted.signal();
                if variant == 0 && !trimming.wait_for(1) {
                    *timed_out.lock().unwrap() = true;
                }
            }
            HookPoint::BeforeTrimLock => {
                trimming.signal();
                if variant == 1 && !snapshotted.wait_for(1) {
                    *timed_out.lock().unwrap() = true;
                }
            }
            _ => {}
        })));
    }
    let array_ref = &array;
    join2(
        move || array_ref.insert(key, key).unwrap(),
        move || array_ref.delete(DELETED),
    )?;
    array.set_hook(None);
    if *timed_out.lock().unwrap() {
        return Err(format!("variant {variant}: interleaving not reached"));
    }
    check_contents(&array, &[3, key])?;
    let height = array.capacity_snapshot().height;
    let expected = if key < 64 { 1 } else { 2 };
    if height != expected {
        return Err(format!("key {key}: height {height}, expected {expected}"));
    }
    Ok(())
}

/// Height 1 holding only key 5. One thread deletes 5 while the other inserts
/// 70, growing the tree. Whatever the order, no bit may stay set over the
/// emptied old root.
fn grow_vs_delete_residue(rng: &mut ChaCha8Rng) -> Result<(), String> {
    const GROWN: u64 = 70;
    let array = DcvebArray::new();
    array.insert(5, 5).unwrap();
    // 0: the delete snapshots the old tree, then waits for the grow to be
    //    about to publish; it removes 5 from the old root afterwards.
    // 1: the delete clears its leaf first; the grow waits for that.
    // 2: no steering.
    let variant = rng.gen_range(0..3);

    let delete_snapshot = Arc::new(Gate::default());
    let publishing = Arc::new(Gate::default());
    let del_interned = Arc::new(Gate::default());
    let timed_out = Arc::new(Mutex::new(false));
    {
        let (delete_snapshot, publishing, del_interned, timed_out) = (
            delete_snapshot.clone(),
            publishing.clone(),
            del_interned.clone(),
            timed_out.clone(),
        );
        array.set_hook(Some(Arc::new(move |point, _| {
            let ok = match point {
                HookPoint::AfterSnapshot(OpKind::Delete) => {
                    delete_snapshot.signal();
                    variant != 0 || publishing.wait_for(1)
                }
                HookPoint::AfterSnapshot(OpKind::Insert) => {
                    variant != 0 || delete_snapshot.wait_for(1)
                }
                HookPoint::BeforePublish => {
                    publishing.signal();
                    true
                }
                HookPoint::BetweenDelInternAndClean => {
                    del_interned.signal();
                    true
                }
                _ => true,
            };
            let ok = ok && match point {
                HookPoint::AfterSnapshot(OpKind::Insert) if variant == 1 => {
                    del_interned.wait_for(1)
                }
                _ => true,
            };
            if !ok {
                *timed_out.lock().unwrap() = true;
            }
        })));
    }
    let array_ref = &array;
    join2(
        move || array_ref.insert(GROWN, GROWN).unwrap(),
        move || array_ref.delete(5),
    )?;
    array.set_hook(None);
    if *timed_out.lock().unwrap() {
        return Err(format!("variant {variant}: interleaving not reached"));
    }
    check_contents(&array, &[GROWN])?;
    let snap = array.capacity_snapshot();
    if snap.height != 2 {
        return Err(format!("height {} after growth", snap.height));
    }
    Ok(())
}

/// Empty height-1 tree; two threads insert 64 and 65, both needing the same
/// grow and the same new parent.
fn two_inserters_one_parent(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let array = DcvebArray::new();
    let steer = rng.gen_bool(0.7);
    let both_snapshotted = Arc::new(Gate::default());
    let timed_out = Arc::new(Mutex::new(false));
    {
        let (gate, timed_out) = (both_snapshotted.clone(), timed_out.clone());
        let first = Arc::new(Mutex::new([true, true]));
        array.set_hook(Some(Arc::new(move |point, k| {
            if point != HookPoint::AfterSnapshot(OpKind::Insert) || !steer {
                return;
            }
            // Rendezvous only on each inserter's first snapshot.
            let slot = (k - 64) as usize;
            let is_first = std::mem::replace(&mut first.lock().unwrap()[slot], false);
            if is_first {
                gate.signal();
                if !gate.wait_for(2) {
                    *timed_out.lock().unwrap() = true;
                }
            }
        })));
    }
    let array_ref = &array;
    join2(
        move || array_ref.insert(64, 64).unwrap(),
        move || array_ref.insert(65, 65).unwrap(),
    )?;
    array.set_hook(None);
    if *timed_out.lock().unwrap() {
        return Err("inserters did not meet".into());
    }
    check_contents(&array, &[64, 65])?;
    let guard = &crossbeam_epoch::pin();
    let root = array.param(guard).root(guard);
    let parent = root
        .child(1, guard)
        .ok_or_else(|| "parent missing".to_string())?;
    let b = array.branching();
    if parent.summary() != (b.child_mask(0) | b.child_mask(1)) {
        return Err(format!("parent summary {:b}", parent.summary()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_is_rejected() {
        assert_eq!(
            scripted_scenario("nope", 1, 0),
            Err(UnknownScenario("nope".into()))
        );
    }

    #[test]
    fn every_scenario_passes_briefly() {
        for name in SCENARIOS {
            let report = scripted_scenario(name, 50, 1).unwrap();
            assert!(report.passed(), "{name}: {:?}", report.failures);
        }
    }
}
