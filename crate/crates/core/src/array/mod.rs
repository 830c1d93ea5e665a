//! The concurrent array itself.
//!
//! The tree has `height` levels of internal nodes followed by one level of
//! leaves, each leaf holding at most one key. Inserts descend with
//! hand-over-hand read locks and set summary bits on the way down. Deletes
//! clear a leaf under write locks on the leaf and its parent, then walk back
//! up clearing bits of subtrees that became empty. Queries take no locks.
//!
//! The published [`ArrayParam`] record (root, height, size) is swapped
//! atomically when an insert grows the tree upwards or a delete trims a
//! root whose only child is child 0. A global readers-writer lock keeps an
//! insert from locking a root that trimming is about to discard.
//!
//! Detached nodes stay readable until every thread that could hold a
//! reference has left its epoch; memory is reclaimed by `crossbeam-epoch`.

#[cfg(feature = "hooks")]
pub mod hooks;
pub(crate) mod node;
mod search;

use std::sync::atomic::Ordering;

use crossbeam_epoch::{self as epoch, Atomic, Guard, Owned, Shared};
use parking_lot::{RwLock, RwLockReadGuard, RwLockWriteGuard};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::index_math::{atomic_set_child, Branching, Summary, MAX_KEY};
use node::{free_subtree, retire_subtree, ArrayHolder};

#[cfg(feature = "hooks")]
use hooks::{Hook, HookPoint, OpKind};

macro_rules! hook {
    ($array:expr, $point:expr, $key:expr) => {
        #[cfg(feature = "hooks")]
        $array.fire_hook($point, $key);
    };
}

/// A stored key and a copy of its value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Entry<V> {
    pub key: u64,
    pub value: V,
}

impl<V> Entry<V> {
    pub fn new(key: u64, value: V) -> Self {
        Entry { key, value }
    }
}

/// Size and height of the currently published tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapacitySnapshot {
    pub size: u128,
    pub height: usize,
}

/// Immutable description of one version of the tree.
pub(crate) struct ArrayParam<V> {
    pub(crate) size: u128,
    pub(crate) height: usize,
    root: Atomic<ArrayHolder<V>>,
}

impl<V> ArrayParam<V> {
    pub(crate) fn root<'g>(&self, guard: &'g Guard) -> &'g ArrayHolder<V> {
        // SAFETY: the root of a published record is never null, and nodes are
        // reclaimed through the epoch collector only.
        unsafe { self.root.load(Ordering::Acquire, guard).deref() }
    }
}

/// Nodes and positions visited on the way from the root towards one key.
///
/// `nodes[k]` and `pos[k]` are the node at level `k` and the digit looked up
/// in it. `reached` counts the levels that were fully descended; when it
/// equals the height the leaf is in `leaf`.
pub(crate) struct PathTrail<'g, V> {
    pub(crate) nodes: SmallVec<[&'g ArrayHolder<V>; 16]>,
    pub(crate) pos: SmallVec<[usize; 16]>,
    pub(crate) reached: usize,
    pub(crate) leaf: Option<&'g ArrayHolder<V>>,
}

/// A freshly published record with its root read-locked.
type Published<'g, V> = (Shared<'g, ArrayParam<V>>, RwLockReadGuard<'g, ()>);

enum RootLock<'g, V> {
    Read(Shared<'g, ArrayParam<V>>, RwLockReadGuard<'g, ()>),
    Write(Shared<'g, ArrayParam<V>>, RwLockWriteGuard<'g, ()>),
}

/// Dynamic concurrent van Emde Boas array: an ordered map from 63-bit
/// integer keys to values, safe for unrestricted concurrent use.
///
/// ```
/// use dcveb::DcvebArray;
///
/// let map = DcvebArray::new();
/// map.insert(5, "five").unwrap();
/// map.insert(130, "one thirty").unwrap();
/// assert_eq!(map.successor(6).map(|e| e.key), Some(130));
/// assert_eq!(map.predecessor(129).map(|e| e.value), Some("five"));
/// ```
pub struct DcvebArray<V> {
    ap: Atomic<ArrayParam<V>>,
    ap_lock: RwLock<()>,
    branching: Branching,
    max_rep: usize,
    #[cfg(feature = "hooks")]
    hook: RwLock<Option<Hook>>,
    /// Lets unhooked arrays skip the lock above.
    #[cfg(feature = "hooks")]
    hook_armed: std::sync::atomic::AtomicBool,
}

impl<V: Clone + Send + Sync + 'static> Default for DcvebArray<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V> std::fmt::Debug for DcvebArray<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let guard = &epoch::pin();
        let ap = self.param(guard);
        f.debug_struct("DcvebArray")
            .field("n", &self.branching.get())
            .field("height", &ap.height)
            .field("size", &ap.size)
            .finish()
    }
}

impl<V: Clone + Send + Sync + 'static> DcvebArray<V> {
    /// Empty array with 64 children per node.
    pub fn new() -> Self {
        Self::with_branching(Branching::DEFAULT.get()).expect("default branching is valid")
    }

    /// Empty array with `n` children per node and the smallest safe bound on
    /// cleanup repetitions.
    pub fn with_branching(n: usize) -> Result<Self> {
        let branching = Branching::new(n)?;
        Self::with_config(n, branching.required_height(MAX_KEY))
    }

    /// Empty array with `n` children per node and at most `max_rep` cleanup
    /// passes per delete. `max_rep` must cover the height needed for the
    /// largest key.
    pub fn with_config(n: usize, max_rep: usize) -> Result<Self> {
        let branching = Branching::new(n)?;
        let required = branching.required_height(MAX_KEY);
        if max_rep < required {
            return Err(Error::InvalidMaxRep {
                given: max_rep,
                required,
            });
        }
        let root = Owned::new(ArrayHolder::internal(n));
        let ap = ArrayParam {
            size: branching.capacity(1)?,
            height: 1,
            root: Atomic::from(root),
        };
        Ok(DcvebArray {
            ap: Atomic::new(ap),
            ap_lock: RwLock::new(()),
            branching,
            max_rep,
            #[cfg(feature = "hooks")]
            hook: RwLock::new(None),
            #[cfg(feature = "hooks")]
            hook_armed: Default::default(),
        })
    }

    pub fn branching(&self) -> Branching {
        self.branching
    }

    pub fn max_rep(&self) -> usize {
        self.max_rep
    }

    pub fn capacity_snapshot(&self) -> CapacitySnapshot {
        let guard = &epoch::pin();
        let ap = self.param(guard);
        CapacitySnapshot {
            size: ap.size,
            height: ap.height,
        }
    }

    /// Stores `value` under `key`, replacing any previous value. Grows the
    /// tree first when `key` does not fit.
    pub fn insert(&self, key: u64, value: V) -> Result<()> {
        if key > MAX_KEY {
            return Err(Error::KeyTooLarge(key));
        }
        let guard = &epoch::pin();
        let (ap_ptr, mut held) = loop {
            match self.lock_published_root(key, guard) {
                RootLock::Read(ap_ptr, held) => break (ap_ptr, held),
                RootLock::Write(ap_ptr, old_root_lock) => {
                    if let Some(grown) = self.grow_and_publish(key, ap_ptr, old_root_lock, guard)? {
                        break grown;
                    }
                }
            }
        };

        // SAFETY: published records are only reclaimed through the collector.
        let ap = unsafe { ap_ptr.deref() };
        let height = ap.height;
        let mut node = ap.root(guard);
        for level in 0..height {
            let lp = self.branching.digit(key, level, height);
            if level != 0 {
                // Lock the child before the parent lock is released.
                held = node.lock.read();
            }
            atomic_set_child(&node.summary, self.branching.child_mask(lp));
            node = self.child_or_create(node, lp, level + 1 == height, guard);
        }

        let old = node.value.swap(Owned::new(value), Ordering::AcqRel, guard);
        node.index.store(key as i64, Ordering::Release);
        drop(held);
        if !old.is_null() {
            // SAFETY: swapped out of the leaf, so no new reader can find it.
            unsafe { guard.defer_destroy(old) };
        }
        Ok(())
    }

    /// Returns the entry stored under `key`.
    pub fn get(&self, key: u64) -> Option<Entry<V>> {
        let guard = &epoch::pin();
        let ap = self.param(guard);
        if key as u128 >= ap.size {
            return None;
        }
        let mut node = ap.root(guard);
        for level in 0..ap.height {
            let lp = self.branching.digit(key, level, ap.height);
            if !self.branching.test_child(node.summary(), lp) {
                return None;
            }
            node = node.child(lp, guard)?;
        }
        let value = node.value.load(Ordering::Acquire, guard);
        // SAFETY: values are reclaimed through the collector only.
        unsafe { value.as_ref() }.map(|v| Entry::new(key, v.clone()))
    }

    pub fn contains_key(&self, key: u64) -> bool {
        self.get(key).is_some()
    }

    /// Removes the entry under `key`, if any.
    pub fn delete(&self, key: u64) {
        if key > MAX_KEY {
            return;
        }
        let guard = &epoch::pin();
        let ap_ptr = self.ap.load(Ordering::Acquire, guard);
        hook!(self, HookPoint::AfterSnapshot(OpKind::Delete), key);
        // SAFETY: published records are only reclaimed through the collector.
        let ap = unsafe { ap_ptr.deref() };
        if key as u128 >= ap.size {
            return;
        }
        let trail = self.make_path(key, ap, guard);
        if trail.reached < ap.height || !self.del_intern(&trail, guard) {
            return;
        }
        hook!(self, HookPoint::BetweenDelInternAndClean, key);

        // A tree grown after our snapshot may still flag the removed key on
        // the levels above the old root.
        let mut seen = ap_ptr;
        for _ in 0..self.max_rep {
            let current = self.ap.load(Ordering::Acquire, guard);
            if current == seen {
                break;
            }
            // SAFETY: as above.
            self.delete_clean(key, unsafe { current.deref() }, guard);
            seen = current;
        }
        self.top_trim(guard);
    }

    pub fn minimum(&self) -> Option<Entry<V>> {
        self.successor(0)
    }

    pub fn maximum(&self) -> Option<Entry<V>> {
        // Floor searches clamp to the snapshot's last key, size - 1.
        self.predecessor(u64::MAX)
    }

    /// Locks the root of the published record: for reading when `key` fits,
    /// for writing when the tree has to grow first. Retries until the locked
    /// root is still the published one, so no insert ever enters a root that
    /// a grow has already replaced.
    fn lock_published_root<'g>(&self, key: u64, guard: &'g Guard) -> RootLock<'g, V> {
        loop {
            let _ap_lock = self.ap_lock.read();
            let ap_ptr = self.ap.load(Ordering::Acquire, guard);
            hook!(self, HookPoint::AfterSnapshot(OpKind::Insert), key);
            // SAFETY: published records are only reclaimed through the collector.
            let ap = unsafe { ap_ptr.deref() };
            let lock = if (key as u128) < ap.size {
                RootLock::Read(ap_ptr, ap.root(guard).lock.read())
            } else {
                RootLock::Write(ap_ptr, ap.root(guard).lock.write())
            };
            if self.ap.load(Ordering::Acquire, guard) == ap_ptr {
                return lock;
            }
        }
    }

    /// Publishes a taller tree whose new top levels lead to the old root
    /// through child 0, then read-locks the new root. The old tree is not
    /// touched. Returns `None` if the record changed under us.
    fn grow_and_publish<'g>(
        &self,
        key: u64,
        ap_ptr: Shared<'g, ArrayParam<V>>,
        old_root_lock: RwLockWriteGuard<'g, ()>,
        guard: &'g Guard,
    ) -> Result<Option<Published<'g, V>>> {
        // SAFETY: published records are only reclaimed through the collector.
        let current = unsafe { ap_ptr.deref() };
        let height = self.branching.required_height(key);
        let size = self.branching.capacity(height)?;
        let n = self.branching.get();
        // The write lock keeps the old root's summary still, so child 0 is
        // flagged exactly when the old tree holds something.
        let old_root = current.root.load(Ordering::Acquire, guard);
        let chain_summary = if current.root(guard).summary().is_empty() {
            Summary::EMPTY
        } else {
            self.branching.child_mask(0)
        };

        let mut top = old_root;
        for _ in current.height..height {
            let node = ArrayHolder::with_summary(n, chain_summary);
            node.children[0].store(top, Ordering::Relaxed);
            top = Owned::new(node).into_shared(guard);
        }
        let grown = Owned::new(ArrayParam {
            size,
            height,
            root: Atomic::null(),
        });
        grown.root.store(top, Ordering::Relaxed);
        let grown = grown.into_shared(guard);
        // SAFETY: `grown` was allocated above and is not yet shared.
        let grown_lock = unsafe { grown.deref() }.root(guard).lock.read();
        hook!(self, HookPoint::BeforePublish, key);
        match self
            .ap
            .compare_exchange(ap_ptr, grown, Ordering::AcqRel, Ordering::Acquire, guard)
        {
            Ok(_) => {
                drop(old_root_lock);
                // SAFETY: the old record is unreachable now; its root lives on
                // as child 0 of the new chain.
                unsafe { guard.defer_destroy(ap_ptr) };
                Ok(Some((grown, grown_lock)))
            }
            Err(_) => {
                drop(grown_lock);
                drop(old_root_lock);
                // SAFETY: the failed record was never published.
                unsafe { discard_grown(grown, old_root, guard) };
                Ok(None)
            }
        }
    }

    fn child_or_create<'g>(
        &self,
        node: &'g ArrayHolder<V>,
        lp: usize,
        leaf: bool,
        guard: &'g Guard,
    ) -> &'g ArrayHolder<V> {
        if let Some(child) = node.child(lp, guard) {
            return child;
        }
        let fresh = if leaf {
            ArrayHolder::leaf()
        } else {
            ArrayHolder::internal(self.branching.get())
        };
        let slot = &node.children[lp];
        let installed = match slot.compare_exchange(
            Shared::null(),
            Owned::new(fresh),
            Ordering::AcqRel,
            Ordering::Acquire,
            guard,
        ) {
            Ok(ptr) => ptr,
            Err(e) => e.current,
        };
        // SAFETY: the slot is non-null after the exchange either way, and the
        // parent's read lock keeps deleters from emptying it.
        unsafe { installed.deref() }
    }

    pub(crate) fn make_path<'g>(
        &self,
        key: u64,
        ap: &ArrayParam<V>,
        guard: &'g Guard,
    ) -> PathTrail<'g, V> {
        let height = ap.height;
        let mut trail = PathTrail {
            nodes: SmallVec::with_capacity(height),
            pos: SmallVec::with_capacity(height),
            reached: 0,
            leaf: None,
        };
        let mut node = ap.root(guard);
        for level in 0..height {
            let lp = self.branching.digit(key, level, height);
            trail.nodes.push(node);
            trail.pos.push(lp);
            if !self.branching.test_child(node.summary(), lp) {
                return trail;
            }
            match node.child(lp, guard) {
                Some(child) => node = child,
                None => return trail,
            }
            trail.reached = level + 1;
        }
        trail.leaf = Some(node);
        trail
    }

    /// Clears the leaf at the end of a complete trail and propagates the
    /// removal upwards. Returns false if the leaf was already vacant or no
    /// longer attached to its parent.
    fn del_intern(&self, trail: &PathTrail<'_, V>, guard: &Guard) -> bool {
        let h = trail.nodes.len();
        let parent = trail.nodes[h - 1];
        let lp = trail.pos[h - 1];
        let leaf = trail.leaf.expect("complete trail ends in a leaf");

        let parent_lock = parent.lock.write();
        let leaf_lock = leaf.lock.write();
        if !parent.child_is(lp, leaf, guard) {
            return false;
        }
        let old = leaf.value.swap(Shared::null(), Ordering::AcqRel, guard);
        if old.is_null() {
            return false;
        }
        leaf.index.store(node::VACANT, Ordering::Release);
        // SAFETY: swapped out under the parent's write lock.
        unsafe { guard.defer_destroy(old) };

        let remaining = self.clear_bit(parent, lp);
        if remaining.is_empty() {
            self.release_children(parent, guard);
        }
        drop(leaf_lock);
        drop(parent_lock);
        if remaining.is_empty() {
            self.propagate_up(trail, h - 1, guard);
        }
        true
    }

    /// Walks from `trail.nodes[child_level]` towards the root, clearing the
    /// parent's bit for every child that is empty and still attached.
    fn propagate_up(&self, trail: &PathTrail<'_, V>, mut child_level: usize, guard: &Guard) {
        while child_level > 0 {
            let level = child_level - 1;
            let node = trail.nodes[level];
            let child = trail.nodes[child_level];
            let lp = trail.pos[level];

            let _node_lock = node.lock.write();
            let _child_lock = child.lock.write();
            if !node.child_is(lp, child, guard) || !child.summary().is_empty() {
                return;
            }
            if !self.clear_bit(node, lp).is_empty() {
                return;
            }
            self.release_children(node, guard);
            child_level = level;
        }
    }

    /// Repairs summary bits on the path to `key` in the tree described by
    /// `ap` that still claim a subtree holding the removed key.
    fn delete_clean(&self, key: u64, ap: &ArrayParam<V>, guard: &Guard) {
        let trail = self.make_path(key, ap, guard);
        let h = ap.height;
        if trail.reached == h {
            let parent = trail.nodes[h - 1];
            let lp = trail.pos[h - 1];
            let leaf = trail.leaf.expect("complete trail ends in a leaf");
            let remaining = {
                let _parent_lock = parent.lock.write();
                let _leaf_lock = leaf.lock.write();
                let vacant = leaf.value.load(Ordering::Acquire, guard).is_null();
                if !vacant
                    || !parent.child_is(lp, leaf, guard)
                    || !self.branching.test_child(parent.summary(), lp)
                {
                    return;
                }
                let remaining = self.clear_bit(parent, lp);
                if remaining.is_empty() {
                    self.release_children(parent, guard);
                }
                remaining
            };
            if remaining.is_empty() {
                self.propagate_up(&trail, h - 1, guard);
            }
            return;
        }

        let level = trail.reached;
        let node = trail.nodes[level];
        let lp = trail.pos[level];
        if self.branching.test_child(node.summary(), lp) {
            // Bit set over an empty slot.
            let remaining = {
                let _lock = node.lock.write();
                if !self.branching.test_child(node.summary(), lp) || node.child(lp, guard).is_some()
                {
                    return;
                }
                let remaining = self.clear_bit(node, lp);
                if remaining.is_empty() {
                    self.release_children(node, guard);
                }
                remaining
            };
            if remaining.is_empty() {
                self.propagate_up(&trail, level, guard);
            }
        } else if level > 0 {
            // `node` may be an emptied subtree its parent still flags.
            self.propagate_up(&trail, level, guard);
        }
    }

    /// Removes root levels whose only occupied child is child 0, one level
    /// per iteration, never going below height 1. An empty tree collapses
    /// straight to a fresh height-1 root.
    fn top_trim(&self, guard: &Guard) {
        loop {
            let ap_ptr = self.ap.load(Ordering::Acquire, guard);
            // SAFETY: published records are only reclaimed through the collector.
            let ap = unsafe { ap_ptr.deref() };
            let root = ap.root(guard);
            if ap.height == 1 {
                return;
            }
            let summary = root.summary();
            let lonely = if summary.is_empty() {
                Shared::null()
            } else if self.branching.is_only_child_zero(summary) {
                let lonely = root.children[0].load(Ordering::Acquire, guard);
                if lonely.is_null() {
                    return;
                }
                lonely
            } else {
                return;
            };
            hook!(self, HookPoint::BeforeTrimLock, 0);

            let _ap_lock = self.ap_lock.write();
            let _root_lock = root.lock.write();
            if self.ap.load(Ordering::Acquire, guard) != ap_ptr {
                continue;
            }
            let (trimmed, detach) = if lonely.is_null() {
                if !root.summary().is_empty() {
                    return;
                }
                let fresh = Owned::new(ArrayHolder::internal(self.branching.get()));
                let trimmed = ArrayParam {
                    size: self.branching.get() as u128,
                    height: 1,
                    root: Atomic::from(fresh),
                };
                (trimmed, false)
            } else {
                if !self.branching.is_only_child_zero(root.summary())
                    || root.children[0].load(Ordering::Acquire, guard) != lonely
                {
                    return;
                }
                let trimmed = ArrayParam {
                    size: ap.size >> self.branching.bits_per_level(),
                    height: ap.height - 1,
                    root: Atomic::null(),
                };
                trimmed.root.store(lonely, Ordering::Relaxed);
                (trimmed, true)
            };
            root.detached.store(detach, Ordering::Release);
            match self.ap.compare_exchange(
                ap_ptr,
                Owned::new(trimmed),
                Ordering::AcqRel,
                Ordering::Acquire,
                guard,
            ) {
                Ok(_) => {
                    let root_ptr = ap.root.load(Ordering::Acquire, guard);
                    // SAFETY: the old record and root are unreachable for new
                    // operations. A detached root keeps child 0, the new
                    // root; everything else below it is empty and referenced
                    // only from here.
                    unsafe {
                        retire_subtree(root_ptr, guard);
                        guard.defer_destroy(ap_ptr);
                    }
                }
                Err(e) => {
                    root.detached.store(false, Ordering::Release);
                    // SAFETY: never published.
                    if !detach {
                        unsafe { free_subtree(e.new.root.load(Ordering::Relaxed, guard)) };
                    }
                }
            }
        }
    }

    /// Caller holds `node`'s write lock.
    fn clear_bit(&self, node: &ArrayHolder<V>, lp: usize) -> Summary {
        let mask = self.branching.child_mask(lp).bits();
        let before = node.summary.fetch_and(!mask, Ordering::AcqRel);
        self.branching.clear_child(Summary(before), lp)
    }

    /// Physically unlinks every child of an emptied node. Caller holds
    /// `node`'s write lock.
    fn release_children(&self, node: &ArrayHolder<V>, guard: &Guard) {
        // A trimmed root's child 0 is the live root.
        let skip = usize::from(node.detached.load(Ordering::Acquire));
        for slot in node.children.iter().skip(skip) {
            let child = slot.swap(Shared::null(), Ordering::AcqRel, guard);
            if !child.is_null() {
                // SAFETY: unlinked from its only parent slot by this swap.
                unsafe { retire_subtree(child, guard) };
            }
        }
    }

    /// Deep copy of the reachable tree. Only meaningful while no other thread
    /// mutates the array.
    pub fn quiescent_clone(&self) -> Self {
        fn copy<V: Clone>(node: &ArrayHolder<V>, guard: &Guard) -> Owned<ArrayHolder<V>> {
            let fresh = ArrayHolder::with_summary(node.children.len(), node.summary());
            fresh
                .index
                .store(node.index.load(Ordering::Acquire), Ordering::Relaxed);
            // SAFETY: see `ArrayHolder::read_leaf`.
            if let Some(v) = unsafe { node.value.load(Ordering::Acquire, guard).as_ref() } {
                fresh.value.store(Owned::new(v.clone()), Ordering::Relaxed);
            }
            for (p, slot) in fresh.children.iter().enumerate() {
                if let Some(child) = node.child(p, guard) {
                    slot.store(copy(child, guard), Ordering::Relaxed);
                }
            }
            Owned::new(fresh)
        }

        let guard = &epoch::pin();
        let ap = self.param(guard);
        let clone = ArrayParam {
            size: ap.size,
            height: ap.height,
            root: Atomic::null(),
        };
        clone.root.store(copy(ap.root(guard), guard), Ordering::Relaxed);
        DcvebArray {
            ap: Atomic::new(clone),
            ap_lock: RwLock::new(()),
            branching: self.branching,
            max_rep: self.max_rep,
            #[cfg(feature = "hooks")]
            hook: RwLock::new(None),
            #[cfg(feature = "hooks")]
            hook_armed: Default::default(),
        }
    }
}

impl<V> DcvebArray<V> {
    pub(crate) fn param<'g>(&self, guard: &'g Guard) -> &'g ArrayParam<V> {
        // SAFETY: `ap` is never null and records are reclaimed through the
        // collector only.
        unsafe { self.ap.load(Ordering::Acquire, guard).deref() }
    }
}

#[cfg(feature = "hooks")]
impl<V> DcvebArray<V> {
    pub fn set_hook(&self, hook: Option<Hook>) {
        let mut slot = self.hook.write();
        self.hook_armed.store(hook.is_some(), Ordering::Release);
        *slot = hook;
    }

    fn fire_hook(&self, point: HookPoint, key: u64) {
        if !self.hook_armed.load(Ordering::Acquire) {
            return;
        }
        let hook = self.hook.read().clone();
        if let Some(hook) = hook {
            hook(point, key);
        }
    }
}

/// Frees the chain built by a `grow` whose publication failed.
///
/// # Safety
/// `grown` must never have been published.
unsafe fn discard_grown<V>(
    grown: Shared<'_, ArrayParam<V>>,
    old_root: Shared<'_, ArrayHolder<V>>,
    guard: &Guard,
) {
    let grown = grown.into_owned();
    let mut node = grown.root.load(Ordering::Relaxed, guard);
    while node != old_root {
        let next = node.deref().children[0].load(Ordering::Relaxed, guard);
        drop(node.into_owned());
        node = next;
    }
}

impl<V> Drop for DcvebArray<V> {
    fn drop(&mut self) {
        // SAFETY: `&mut self` means no operation is in flight; everything
        // reachable from the published root belongs to this array, and
        // retired nodes are no longer reachable from it.
        unsafe {
            let guard = epoch::unprotected();
            let ap = self.ap.swap(Shared::null(), Ordering::Relaxed, guard);
            if !ap.is_null() {
                let ap = ap.into_owned();
                let root = ap.root.load(Ordering::Relaxed, guard);
                free_subtree(root);
            }
        }
    }
}

#[cfg(test)]
mod tests;
