use std::sync::Mutex;

use crossbeam_skiplist::SkipMap;

use crate::array::DcvebArray;
use crate::oracle::{Op, OpResult, OracleSet};

/// The four calls the workload makes.
pub trait DynamicSet: Send + Sync {
    fn insert(&self, key: u64, value: u64);
    fn delete(&self, key: u64);
    fn get(&self, key: u64) -> Option<u64>;
    /// Smallest stored key `>= key`.
    fn successor(&self, key: u64) -> Option<u64>;
}

impl DynamicSet for DcvebArray<u64> {
    fn insert(&self, key: u64, value: u64) {
        DcvebArray::insert(self, key, value).expect("bench keys fit");
    }

    fn delete(&self, key: u64) {
        DcvebArray::delete(self, key);
    }

    fn get(&self, key: u64) -> Option<u64> {
        DcvebArray::get(self, key).map(|e| e.value)
    }

    fn successor(&self, key: u64) -> Option<u64> {
        DcvebArray::successor(self, key).map(|e| e.key)
    }
}

/// The sequential oracle behind one global lock.
#[derive(Default)]
pub struct LockedOracle(Mutex<OracleSet<u64>>);

impl LockedOracle {
    fn found(&self, op: &Op<u64>) -> Option<crate::Entry<u64>> {
        match self.0.lock().unwrap().peek(op) {
            Some(OpResult::Found(e)) => e,
            _ => None,
        }
    }
}

impl DynamicSet for LockedOracle {
    fn insert(&self, key: u64, value: u64) {
        self.0.lock().unwrap().apply_in_place(&Op::Insert(key, value));
    }

    fn delete(&self, key: u64) {
        self.0.lock().unwrap().apply_in_place(&Op::Delete(key));
    }

    fn get(&self, key: u64) -> Option<u64> {
        self.found(&Op::Get(key)).map(|e| e.value)
    }

    fn successor(&self, key: u64) -> Option<u64> {
        self.found(&Op::Successor(key)).map(|e| e.key)
    }
}

impl DynamicSet for SkipMap<u64, u64> {
    fn insert(&self, key: u64, value: u64) {
        SkipMap::insert(self, key, value);
    }

    fn delete(&self, key: u64) {
        SkipMap::remove(self, &key);
    }

    fn get(&self, key: u64) -> Option<u64> {
        SkipMap::get(self, &key).map(|e| *e.value())
    }

    fn successor(&self, key: u64) -> Option<u64> {
        SkipMap::lower_bound(self, std::ops::Bound::Included(&key)).map(|e| *e.key())
    }
}

pub fn adapter_names() -> &'static [&'static str] {
    &["dcveb", "locked-oracle", "skiplist"]
}

pub fn make_adapter(name: &str) -> Option<Box<dyn DynamicSet>> {
    Some(match name {
        "dcveb" => Box::new(DcvebArray::<u64>::new()),
        "locked-oracle" => Box::new(LockedOracle::default()),
        "skiplist" => Box::new(SkipMap::<u64, u64>::new()),
        _ => return None,
    })
}
