use crossbeam_epoch::{self as epoch, Guard};
use smallvec::SmallVec;

use super::node::ArrayHolder;
use super::{ArrayParam, DcvebArray, Entry};
use crate::index_math::{Branching, Summary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    /// Smallest key >= the query.
    Ceiling,
    /// Largest key <= the query.
    Floor,
}

impl Direction {
    /// Next occupied child strictly past `from` in this direction.
    fn next(self, b: Branching, s: Summary, from: usize) -> Option<usize> {
        match self {
            Direction::Ceiling => b.min_child_above(s, Some(from)),
            Direction::Floor => b.max_child_below(s, Some(from)),
        }
    }

    /// First occupied child of a node entered from the side.
    fn first(self, b: Branching, s: Summary) -> Option<usize> {
        match self {
            Direction::Ceiling => b.min_child_above(s, None),
            Direction::Floor => b.max_child_below(s, None),
        }
    }
}

impl<V: Clone + Send + Sync + 'static> DcvebArray<V> {
    /// Entry with the smallest key `>= key`.
    pub fn successor(&self, key: u64) -> Option<Entry<V>> {
        let guard = &epoch::pin();
        self.search_in(self.param(guard), key, Direction::Ceiling, guard)
    }

    /// Entry with the largest key `<= key`.
    pub fn predecessor(&self, key: u64) -> Option<Entry<V>> {
        let guard = &epoch::pin();
        self.search_in(self.param(guard), key, Direction::Floor, guard)
    }

    fn search_in(
        &self,
        ap: &ArrayParam<V>,
        key: u64,
        dir: Direction,
        guard: &Guard,
    ) -> Option<Entry<V>> {
        let b = self.branching;
        let h = ap.height;
        let root = ap.root(guard);
        if root.summary().is_empty() {
            return None;
        }
        let key = if key as u128 >= ap.size {
            match dir {
                Direction::Ceiling => return None,
                Direction::Floor => (ap.size - 1) as u64,
            }
        } else {
            key
        };

        let mut nodes: SmallVec<[&ArrayHolder<V>; 16]> = SmallVec::from_elem(root, h);
        let mut pos: SmallVec<[usize; 16]> = SmallVec::from_elem(0, h);

        // Follow the query's own digits as far as they lead.
        let mut node = root;
        let mut level = 0;
        while level < h {
            let lp = b.digit(key, level, h);
            nodes[level] = node;
            pos[level] = lp;
            if !b.test_child(node.summary(), lp) {
                break;
            }
            match node.child(lp, guard) {
                Some(child) => node = child,
                None => break,
            }
            level += 1;
        }
        if level == h {
            if let Some(entry) = leaf_entry(node, guard) {
                return Some(entry);
            }
            level = h - 1;
        }

        // `level` is the deepest level whose position has been tried. Look
        // past it, climbing while nothing is left on this side.
        let mut level = level as isize;
        'ascend: loop {
            let mut candidate = None;
            while level >= 0 {
                let l = level as usize;
                candidate = dir.next(b, nodes[l].summary(), pos[l]);
                if candidate.is_some() {
                    break;
                }
                level -= 1;
            }
            let mut p = candidate?;

            // Descend along the first occupied child in the search direction.
            loop {
                let l = level as usize;
                pos[l] = p;
                let Some(child) = nodes[l].child(p, guard) else {
                    // Emptied under us: retry past `p` on the same level.
                    continue 'ascend;
                };
                if l + 1 == h {
                    if let Some(entry) = leaf_entry(child, guard) {
                        return Some(entry);
                    }
                    continue 'ascend;
                }
                match dir.first(b, child.summary()) {
                    Some(q) => {
                        nodes[l + 1] = child;
                        level += 1;
                        p = q;
                    }
                    // Entered an empty subtree; resume past it.
                    None => continue 'ascend,
                }
            }
        }
    }
}

fn leaf_entry<V: Clone>(leaf: &ArrayHolder<V>, guard: &Guard) -> Option<Entry<V>> {
    leaf.read_leaf(guard)
        .map(|(key, value)| Entry::new(key, value.clone()))
}
