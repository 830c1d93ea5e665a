//! Summary bit-vector arithmetic and key decomposition.
//!
//! A summary is one machine word holding an `n`-bit occupancy vector for the
//! children of a node. Child position `p` lives at bit `n - 1 - p` counted from
//! the least-significant bit, so child 0 is the most-significant of the `n`
//! bits and "leftmost set bit" means "smallest occupied child".
//!
//! Keys are split into base-`n` digits, most significant first; digit `k`
//! selects the child at tree level `k`.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Largest key the structure stores. Leaves keep keys in a signed slot that
/// uses `-1` as the vacancy mark, so keys are limited to 63 bits.
pub const MAX_KEY: u64 = i64::MAX as u64;

/// Occupancy vector of one node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Summary(pub u64);

impl Summary {
    pub const EMPTY: Summary = Summary(0);

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn bits(self) -> u64 {
        self.0
    }
}

impl std::ops::BitOr for Summary {
    type Output = Summary;

    fn bitor(self, rhs: Summary) -> Summary {
        Summary(self.0 | rhs.0)
    }
}

impl std::fmt::Binary for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Binary::fmt(&self.0, f)
    }
}

/// Result of [`atomic_set_child`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOutcome {
    WasAlreadySet,
    DidSet,
}

/// Branching factor `n` of the tree: a power of two between 2 and 64.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Branching {
    n: u32,
    shift: u32,
}

impl Default for Branching {
    fn default() -> Self {
        Branching::DEFAULT
    }
}

impl Branching {
    pub const DEFAULT: Branching = Branching { n: 64, shift: 6 };

    pub fn new(n: usize) -> Result<Branching> {
        if !(2..=64).contains(&n) || !n.is_power_of_two() {
            return Err(Error::InvalidBranching(n));
        }
        Ok(Branching {
            n: n as u32,
            shift: n.trailing_zeros(),
        })
    }

    pub fn get(self) -> usize {
        self.n as usize
    }

    /// `log2(n)`: bits consumed by one tree level.
    pub fn bits_per_level(self) -> u32 {
        self.shift
    }

    /// Word with exactly the `n` usable summary bits set.
    pub fn full(self) -> Summary {
        Summary(u64::MAX >> (64 - self.n))
    }

    fn bit_index(self, p: usize) -> u32 {
        assert!(
            p < self.n as usize,
            "child position {p} out of range for n={}",
            self.n
        );
        self.n - 1 - p as u32
    }

    fn position_of_bit(self, bit: u32) -> usize {
        (self.n - 1 - bit) as usize
    }

    pub fn child_mask(self, p: usize) -> Summary {
        Summary(1u64 << self.bit_index(p))
    }

    pub fn test_child(self, s: Summary, p: usize) -> bool {
        s.0 & self.child_mask(p).0 != 0
    }

    pub fn clear_child(self, s: Summary, p: usize) -> Summary {
        Summary(s.0 & !self.child_mask(p).0)
    }

    /// Smallest occupied child strictly after `after`, or the smallest
    /// occupied child at all when `after` is `None`.
    pub fn min_child_above(self, s: Summary, after: Option<usize>) -> Option<usize> {
        let candidates = match after {
            None => s.0 & self.full().0,
            // Children q > p sit at bit indices below n-1-p.
            Some(p) => s.0 & ((1u64 << self.bit_index(p)) - 1),
        };
        if candidates == 0 {
            None
        } else {
            Some(self.position_of_bit(63 - candidates.leading_zeros()))
        }
    }

    /// Largest occupied child strictly before `before`, or the largest
    /// occupied child at all when `before` is `None`.
    pub fn max_child_below(self, s: Summary, before: Option<usize>) -> Option<usize> {
        let candidates = match before {
            None => s.0 & self.full().0,
            Some(p) => {
                let above = self.bit_index(p) + 1;
                if above >= 64 {
                    0
                } else {
                    s.0 & self.full().0 & !((1u64 << above) - 1)
                }
            }
        };
        if candidates == 0 {
            None
        } else {
            Some(self.position_of_bit(candidates.trailing_zeros()))
        }
    }

    /// True iff child 0 is the only occupied child.
    pub fn is_only_child_zero(self, s: Summary) -> bool {
        s == self.child_mask(0)
    }

    /// `n^height`, the number of keys a tree of that height addresses.
    pub fn capacity(self, height: usize) -> Result<u128> {
        if height == 0 {
            return Err(Error::ZeroHeight);
        }
        let bits = (self.shift as usize)
            .checked_mul(height)
            .filter(|b| *b < 128)
            .ok_or(Error::CapacityOverflow { height })?;
        Ok(1u128 << bits)
    }

    /// Smallest `h >= 1` with `n^h > key`.
    pub fn required_height(self, key: u64) -> usize {
        let key_bits = 64 - key.leading_zeros();
        key_bits.div_ceil(self.shift).max(1) as usize
    }

    /// Digit of `key` at tree `level` for a tree of the given height. The
    /// caller guarantees `key < n^height`.
    #[inline]
    pub fn digit(self, key: u64, level: usize, height: usize) -> usize {
        let shift = self.shift * (height - 1 - level) as u32;
        (key.checked_shr(shift).unwrap_or(0) & (self.n as u64 - 1)) as usize
    }

    pub fn digits(self, key: u64, height: usize) -> Result<KeyDigits> {
        let capacity = self.capacity(height)?;
        if key as u128 >= capacity {
            return Err(Error::KeyOutOfRange {
                key,
                height,
                capacity,
            });
        }
        Ok(KeyDigits {
            key,
            digits: (0..height).map(|k| self.digit(key, k, height)).collect(),
        })
    }
}

/// Base-`n` decomposition of a key, most significant digit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyDigits {
    pub key: u64,
    pub digits: Vec<usize>,
}

impl KeyDigits {
    pub fn height(&self) -> usize {
        self.digits.len()
    }

    /// Rebuilds the key from its digits.
    pub fn reconstruct(&self, branching: Branching) -> u64 {
        let n = branching.get() as u64;
        self.digits.iter().fold(0u64, |acc, &d| acc * n + d as u64)
    }
}

/// Sets the bit selected by `mask` with a read/compare-and-swap loop.
///
/// Callers hold at least a read lock on the owning node, so concurrent
/// writers can only add bits; the loop therefore fails at most `n` times.
pub fn atomic_set_child(cell: &AtomicU64, mask: Summary) -> SetOutcome {
    let mut current = cell.load(Ordering::Acquire);
    loop {
        if current & mask.0 != 0 {
            return SetOutcome::WasAlreadySet;
        }
        match cell.compare_exchange_weak(
            current,
            current | mask.0,
            Ordering::AcqRel,
            Ordering::Acquire,
        ) {
            Ok(_) => return SetOutcome::DidSet,
            Err(actual) => current = actual,
        }
    }
}
