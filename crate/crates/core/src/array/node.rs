use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};

use crossbeam_epoch::{self as epoch, Atomic, Guard, Shared};
use parking_lot::RwLock;

use crate::index_math::Summary;

/// Vacancy mark of a leaf's key slot.
pub(crate) const VACANT: i64 = -1;

/// One tree node. Internal nodes use `children` and `summary`; leaves use
/// `value` and `index` and have no child slots.
pub(crate) struct ArrayHolder<V> {
    pub(crate) children: Box<[Atomic<ArrayHolder<V>>]>,
    pub(crate) summary: AtomicU64,
    pub(crate) value: Atomic<V>,
    pub(crate) index: AtomicI64,
    pub(crate) lock: RwLock<()>,
    /// Set on a root that was trimmed away. Its child 0 is still live, so its
    /// child slots must never be released.
    pub(crate) detached: AtomicBool,
}

impl<V> ArrayHolder<V> {
    pub(crate) fn internal(n: usize) -> Self {
        Self::with_summary(n, Summary::EMPTY)
    }

    pub(crate) fn with_summary(n: usize, summary: Summary) -> Self {
        ArrayHolder {
            children: (0..n).map(|_| Atomic::null()).collect(),
            summary: AtomicU64::new(summary.bits()),
            value: Atomic::null(),
            index: AtomicI64::new(VACANT),
            lock: RwLock::new(()),
            detached: AtomicBool::new(false),
        }
    }

    pub(crate) fn leaf() -> Self {
        Self::with_summary(0, Summary::EMPTY)
    }

    pub(crate) fn summary(&self) -> Summary {
        Summary(self.summary.load(Ordering::Acquire))
    }

    pub(crate) fn child<'g>(&self, p: usize, guard: &'g Guard) -> Option<&'g ArrayHolder<V>> {
        // SAFETY: child pointers are only ever reclaimed through the epoch
        // collector, and `guard` keeps the current epoch pinned.
        unsafe { self.children[p].load(Ordering::Acquire, guard).as_ref() }
    }

    pub(crate) fn child_is(&self, p: usize, node: &ArrayHolder<V>, guard: &Guard) -> bool {
        std::ptr::eq(
            self.children[p].load(Ordering::Acquire, guard).as_raw(),
            node,
        )
    }

    /// `(key, value)` stored in a leaf, if it is occupied.
    pub(crate) fn read_leaf<'g>(&self, guard: &'g Guard) -> Option<(u64, &'g V)> {
        let value = self.value.load(Ordering::Acquire, guard);
        let index = self.index.load(Ordering::Acquire);
        // SAFETY: values are retired through the epoch collector only.
        let value = unsafe { value.as_ref() }?;
        (index != VACANT).then_some((index as u64, value))
    }
}

impl<V> Drop for ArrayHolder<V> {
    fn drop(&mut self) {
        // SAFETY: a node is dropped only once nobody can reach it, and a
        // non-null value slot is owned by the node.
        unsafe {
            let guard = epoch::unprotected();
            let value = self.value.load(Ordering::Relaxed, guard);
            if !value.is_null() {
                drop(value.into_owned());
            }
        }
    }
}

/// Retires `node` and, recursively, every subtree still hanging off it.
///
/// Each slot is emptied with a swap, so a node is handed to the collector by
/// exactly one thread even when several release the same region.
///
/// # Safety
/// `node` must have just been unlinked from its only parent slot by the
/// caller's swap, under `guard`.
pub(crate) unsafe fn retire_subtree<V>(node: Shared<'_, ArrayHolder<V>>, guard: &Guard) {
    let holder = node.deref();
    // Trimmed roots lead back into the live tree through child 0.
    let skip = usize::from(holder.detached.load(Ordering::Acquire));
    for slot in holder.children.iter().skip(skip) {
        let child = slot.swap(Shared::null(), Ordering::AcqRel, guard);
        if !child.is_null() {
            retire_subtree(child, guard);
        }
    }
    guard.defer_destroy(node);
}

/// Frees a whole subtree immediately.
///
/// # Safety
/// No other thread may reference any node below `node`.
pub(crate) unsafe fn free_subtree<V>(node: Shared<'_, ArrayHolder<V>>) {
    let guard = epoch::unprotected();
    for slot in node.deref().children.iter() {
        let child = slot.load(Ordering::Relaxed, guard);
        if !child.is_null() {
            free_subtree(child);
        }
    }
    drop(node.into_owned());
}
