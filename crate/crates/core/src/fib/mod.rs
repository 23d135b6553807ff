//! The FIB variants and their common interface.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::filter::FilterError;
use crate::hash::PrefixHash;
use crate::name::Name;

mod bloom;
mod hashed;
mod reference;

pub use bloom::{BloomFib, CountingBloomFib, PerFaceFib};
pub use hashed::HashFib;
pub use reference::ReferenceFib;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FibError {
    #[error("face {face} is outside 1..={face_count}")]
    InvalidFace { face: u32, face_count: usize },
    #[error("the root name cannot be a FIB prefix")]
    RootPrefix,
    #[error("prefix {prefix} collides with stored prefix {existing} (hash {hash:08x})")]
    HashCollision {
        prefix: Name,
        existing: Name,
        hash: u32,
    },
    #[error("prefix {prefix} is not assigned to face {face}")]
    AssociationAbsent { prefix: Name, face: u32 },
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// A face number, counted from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId(u32);

impl FaceId {
    /// Returns `None` for face 0.
    pub fn new(index: u32) -> Option<Self> {
        (index >= 1).then_some(FaceId(index))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub(crate) fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Bit vector `[b_1 .. b_F]` of the faces a prefix is assigned to.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FaceSet {
    face_count: usize,
    words: Vec<u64>,
}

impl FaceSet {
    pub fn new(face_count: usize) -> Self {
        FaceSet {
            face_count,
            words: vec![0; face_count.div_ceil(64)],
        }
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    fn check(&self, face: FaceId) -> Result<usize, FibError> {
        let slot = face.slot();
        if slot < self.face_count {
            Ok(slot)
        } else {
            Err(FibError::InvalidFace {
                face: face.get(),
                face_count: self.face_count,
            })
        }
    }

    /// Sets `face`. Returns whether it was newly set.
    pub fn insert(&mut self, face: FaceId) -> Result<bool, FibError> {
        let slot = self.check(face)?;
        let (w, b) = (slot / 64, slot % 64);
        let fresh = self.words[w] >> b & 1 == 0;
        self.words[w] |= 1 << b;
        Ok(fresh)
    }

    /// Clears `face`. Returns whether it was set.
    pub fn remove(&mut self, face: FaceId) -> bool {
        let Ok(slot) = self.check(face) else {
            return false;
        };
        let (w, b) = (slot / 64, slot % 64);
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        was
    }

    pub fn contains(&self, face: FaceId) -> bool {
        match self.check(face) {
            Ok(slot) => self.words[slot / 64] >> (slot % 64) & 1 == 1,
            Err(_) => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.face_count)
            .filter(move |&s| self.words[s / 64] >> (s % 64) & 1 == 1)
            .map(|s| FaceId(s as u32 + 1))
    }

    /// True if every face in `other` is also in `self`.
    pub fn is_superset(&self, other: &FaceSet) -> bool {
        other
            .words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !self.words.get(i).copied().unwrap_or(0) == 0)
    }
}

impl fmt::Debug for FaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, face) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{face}")?;
        }
        f.write_str("}")
    }
}

/// Outcome of a longest-prefix-match lookup. `depth` is the component count
/// of the matched prefix, 0 when nothing matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupResult {
    pub depth: usize,
    pub faces: FaceSet,
}

impl LookupResult {
    pub fn miss(face_count: usize) -> Self {
        LookupResult {
            depth: 0,
            faces: FaceSet::new(face_count),
        }
    }

    pub fn is_match(&self) -> bool {
        self.depth > 0
    }
}

/// Lookup and insertion shared by every FIB variant.
pub trait Fib {
    fn face_count(&self) -> usize;

    /// Assigns `prefix` to `face`.
    fn insert(&mut self, prefix: &Name, face: FaceId) -> Result<(), FibError>;

    /// Longest prefix match of `interest`.
    fn lookup(&self, interest: &Name) -> LookupResult;

    /// Payload size in bits, without allocator or struct overhead.
    fn size_bits(&self) -> u64;
}

/// FIB variants that can drop a prefix-to-face assignment.
pub trait RemovableFib: Fib {
    fn remove(&mut self, prefix: &Name, face: FaceId) -> Result<(), FibError>;
}

pub(crate) fn check_prefix(prefix: &Name) -> Result<(), FibError> {
    if prefix.is_root() {
        Err(FibError::RootPrefix)
    } else {
        Ok(())
    }
}

pub(crate) fn check_face(face: FaceId, face_count: usize) -> Result<(), FibError> {
    if face.slot() < face_count {
        Ok(())
    } else {
        Err(FibError::InvalidFace {
            face: face.get(),
            face_count,
        })
    }
}

pub(crate) fn collision(prefix: &Name, existing: &Name, hash: PrefixHash) -> FibError {
    FibError::HashCollision {
        prefix: prefix.clone(),
        existing: existing.clone(),
        hash: hash.0,
    }
}
