//! Interleaving hooks for scripted race tests.
//!
//! Built only with the `hooks` feature; without it the hook sites in the
//! array compile to nothing.

use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Insert,
    Delete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HookPoint {
    /// The operation has read the published array parameters. For inserts
    /// this fires while the global parameter lock is still read-held and the
    /// root is not yet locked.
    AfterSnapshot(OpKind),
    /// An insert has built a taller tree and is about to publish it.
    BeforePublish,
    /// A delete removed its element and is about to look for residue left by
    /// concurrent growth.
    BetweenDelInternAndClean,
    /// Root trimming is about to take the global parameter lock.
    BeforeTrimLock,
}

pub type Hook = Arc<dyn Fn(HookPoint, u64) + Send + Sync>;
