use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{
    check_face, check_prefix, collision, FaceId, FaceSet, Fib, FibError, LookupResult, RemovableFib,
};
use crate::hash::{hash_prefix, prefix_hashes, PrefixHash};
use crate::name::Name;

/// FIB whose prefixes are replaced by 32-bit hashes.
///
/// Lookup hashes the interest once, component by component, then probes the
/// snapshots from the whole name down to the first component and stops at the
/// first stored hash. Hash collisions between an interest prefix and a stored
/// hash are not detectable at lookup time.
///
/// The forwarding payload is `entries`, sorted by hash. `origins` is the
/// control-plane record of which prefix produced each hash; lookups never
/// read it and it is not counted in [`Fib::size_bits`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashFib {
    face_count: usize,
    entries: Vec<(PrefixHash, FaceSet)>,
    origins: BTreeMap<PrefixHash, Name>,
}

impl HashFib {
    pub fn new(face_count: usize) -> Self {
        HashFib {
            face_count,
            entries: Vec::new(),
            origins: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(PrefixHash, FaceSet)] {
        &self.entries
    }

    fn position(&self, hash: PrefixHash) -> Result<usize, usize> {
        self.entries.binary_search_by_key(&hash, |(h, _)| *h)
    }
}

impl Fib for HashFib {
    fn face_count(&self) -> usize {
        self.face_count
    }

    fn insert(&mut self, prefix: &Name, face: FaceId) -> Result<(), FibError> {
        check_prefix(prefix)?;
        check_face(face, self.face_count)?;
        let hash = hash_prefix(prefix).ok_or(FibError::RootPrefix)?;
        match self.position(hash) {
            Ok(i) => {
                let existing = &self.origins[&hash];
                if existing != prefix {
                    return Err(collision(prefix, existing, hash));
                }
                self.entries[i].1.insert(face)?;
            }
            Err(i) => {
                let mut faces = FaceSet::new(self.face_count);
                faces.insert(face)?;
                self.entries.insert(i, (hash, faces));
                self.origins.insert(hash, prefix.clone());
            }
        }
        Ok(())
    }

    fn lookup(&self, interest: &Name) -> LookupResult {
        let snapshots = prefix_hashes(interest);
        for (i, hash) in snapshots.iter().enumerate().rev() {
            if let Ok(pos) = self.position(*hash) {
                return LookupResult {
                    depth: i + 1,
                    faces: self.entries[pos].1.clone(),
                };
            }
        }
        LookupResult::miss(self.face_count)
    }

    /// `N * (32 + F)`.
    fn size_bits(&self) -> u64 {
        self.entries.len() as u64 * (32 + self.face_count as u64)
    }
}

impl RemovableFib for HashFib {
    fn remove(&mut self, prefix: &Name, face: FaceId) -> Result<(), FibError> {
        let absent = || FibError::AssociationAbsent {
            prefix: prefix.clone(),
            face: face.get(),
        };
        let hash = hash_prefix(prefix).ok_or_else(absent)?;
        if self.origins.get(&hash) != Some(prefix) {
            return Err(absent());
        }
        let i = self.position(hash).map_err(|_| absent())?;
        if !self.entries[i].1.remove(face) {
            return Err(absent());
        }
        if self.entries[i].1.is_empty() {
            self.entries.remove(i);
            self.origins.remove(&hash);
        }
        Ok(())
    }
}
