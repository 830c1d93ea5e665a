//! Full-tree invariant check, valid only while no thread mutates the array.

use std::fmt;
use std::sync::atomic::Ordering;

use crossbeam_epoch::{self as epoch, Guard};

use crate::array::node::{ArrayHolder, VACANT};
use crate::array::DcvebArray;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Invariant {
    /// A set summary bit over a null child.
    BitOverNull,
    /// A set summary bit over a subtree with no element.
    BitOverEmpty,
    /// A clear summary bit over a subtree that holds elements.
    ClearBitOverElements,
    /// Summary bits beyond the branching factor.
    StrayBits,
    /// Leaf value and index disagree about occupancy.
    LeafOccupancy,
    /// Leaf index differs from the key its path spells.
    LeafIndex,
    /// Node shape does not match its level.
    Shape,
    /// A reachable node is marked as trimmed away.
    Detached,
    /// Published size is not `n^height`.
    Size,
    /// More internal nodes than a full tree of this height has.
    MemoryBound,
    /// Iterated successor queries disagree with the reachable leaves.
    SuccessorChain,
}

/// A broken invariant and the child positions leading to the node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub invariant: Invariant,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WalkReport {
    pub element_count: usize,
    pub internal_node_count: usize,
    pub leaf_node_count: usize,
    pub height: usize,
    pub violations: Vec<Violation>,
}

impl WalkReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for WalkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "height {} elements {} internal {} leaves {} violations {}",
            self.height,
            self.element_count,
            self.internal_node_count,
            self.leaf_node_count,
            self.violations.len()
        )
    }
}

struct Walker<'a> {
    n: usize,
    height: usize,
    report: &'a mut WalkReport,
    keys: Vec<u64>,
    path: Vec<usize>,
}

impl Walker<'_> {
    fn flag(&mut self, invariant: Invariant) {
        self.report.violations.push(Violation {
            path: self.path.clone(),
            invariant,
        });
    }

    /// Returns the number of elements below `node`.
    fn visit<V>(&mut self, node: &ArrayHolder<V>, level: usize, guard: &Guard) -> usize {
        if node.detached.load(Ordering::Acquire) {
            self.flag(Invariant::Detached);
        }
        if level == self.height {
            return self.visit_leaf(node, guard);
        }
        self.report.internal_node_count += 1;
        if node.children.len() != self.n {
            self.flag(Invariant::Shape);
            return 0;
        }
        let summary = node.summary();
        let b = crate::index_math::Branching::new(self.n).expect("walked array has valid n");
        if summary.bits() & !b.full().bits() != 0 {
            self.flag(Invariant::StrayBits);
        }
        let mut total = 0;
        for p in 0..self.n {
            let bit = b.test_child(summary, p);
            self.path.push(p);
            match node.child(p, guard) {
                None => {
                    if bit {
                        self.flag(Invariant::BitOverNull);
                    }
                }
                Some(child) => {
                    let count = self.visit(child, level + 1, guard);
                    total += count;
                    if bit && count == 0 {
                        self.flag(Invariant::BitOverEmpty);
                    }
                    if !bit && count > 0 {
                        self.flag(Invariant::ClearBitOverElements);
                    }
                }
            }
            self.path.pop();
        }
        total
    }

    fn visit_leaf<V>(&mut self, node: &ArrayHolder<V>, guard: &Guard) -> usize {
        self.report.leaf_node_count += 1;
        if !node.children.is_empty() {
            self.flag(Invariant::Shape);
        }
        let has_value = !node.value.load(Ordering::Acquire, guard).is_null();
        let index = node.index.load(Ordering::Acquire);
        if has_value != (index != VACANT) {
            self.flag(Invariant::LeafOccupancy);
        }
        if !has_value {
            return 0;
        }
        let key = self
            .path
            .iter()
            .fold(0u64, |acc, &d| acc * self.n as u64 + d as u64);
        if index != VACANT && index as u64 != key {
            self.flag(Invariant::LeafIndex);
        }
        self.keys.push(key);
        1
    }
}

/// Checks every reachable node. Must not run concurrently with mutators.
pub fn quiescent_walk<V: Clone + Send + Sync + 'static>(array: &DcvebArray<V>) -> WalkReport {
    let guard = &epoch::pin();
    let ap = array.param(guard);
    let b = array.branching();
    let n = b.get();
    let mut report = WalkReport {
        height: ap.height,
        ..WalkReport::default()
    };
    if b.capacity(ap.height).ok() != Some(ap.size) {
        report.violations.push(Violation {
            path: vec![],
            invariant: Invariant::Size,
        });
    }
    let mut walker = Walker {
        n,
        height: ap.height,
        report: &mut report,
        keys: Vec::new(),
        path: Vec::new(),
    };
    let count = walker.visit(ap.root(guard), 0, guard);
    let keys = std::mem::take(&mut walker.keys);
    report.element_count = count;

    let bound = (ap.size - 1) / (n as u128 - 1);
    if report.internal_node_count as u128 > bound {
        report.violations.push(Violation {
            path: vec![],
            invariant: Invariant::MemoryBound,
        });
    }

    let mut chain = Vec::with_capacity(keys.len());
    let mut next = array.successor(0);
    while let Some(e) = next {
        if chain.last().is_some_and(|&last| e.key <= last) || chain.len() > keys.len() {
            break;
        }
        chain.push(e.key);
        next = e.key.checked_add(1).and_then(|k| array.successor(k));
    }
    if chain != keys {
        report.violations.push(Violation {
            path: vec![],
            invariant: Invariant::SuccessorChain,
        });
    }
    report
}
