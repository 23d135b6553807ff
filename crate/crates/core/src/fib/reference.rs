use alloc::vec::Vec;

use super::{check_face, check_prefix, FaceId, FaceSet, Fib, FibError, LookupResult, RemovableFib};
use crate::name::Name;

/// The uncompressed FIB: a list of `(prefix, faces)` tuples kept in strictly
/// ascending shortlex order of the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceFib {
    face_count: usize,
    entries: Vec<(Name, FaceSet)>,
}

impl ReferenceFib {
    pub fn new(face_count: usize) -> Self {
        ReferenceFib {
            face_count,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Name, FaceSet)] {
        &self.entries
    }

    pub fn get(&self, prefix: &Name) -> Option<&FaceSet> {
        self.entries
            .binary_search_by(|(n, _)| n.cmp(prefix))
            .ok()
            .map(|i| &self.entries[i].1)
    }
}

impl Fib for ReferenceFib {
    fn face_count(&self) -> usize {
        self.face_count
    }

    fn insert(&mut self, prefix: &Name, face: FaceId) -> Result<(), FibError> {
        check_prefix(prefix)?;
        check_face(face, self.face_count)?;
        match self.entries.binary_search_by(|(n, _)| n.cmp(prefix)) {
            Ok(i) => {
                self.entries[i].1.insert(face)?;
            }
            Err(i) => {
                let mut faces = FaceSet::new(self.face_count);
                faces.insert(face)?;
                self.entries.insert(i, (prefix.clone(), faces));
            }
        }
        Ok(())
    }

    fn lookup(&self, interest: &Name) -> LookupResult {
        let components = interest.components();
        for depth in (1..=components.len()).rev() {
            let probe = &components[..depth];
            if let Ok(i) = self
                .entries
                .binary_search_by(|(n, _)| n.components().cmp(probe))
            {
                return LookupResult {
                    depth,
                    faces: self.entries[i].1.clone(),
                };
            }
        }
        LookupResult::miss(self.face_count)
    }

    /// Sum over entries of the serialized prefix bits plus one bit per face.
    fn size_bits(&self) -> u64 {
        self.entries
            .iter()
            .map(|(n, _)| 8 * n.encoded_size() as u64 + self.face_count as u64)
            .sum()
    }
}

impl RemovableFib for ReferenceFib {
    fn remove(&mut self, prefix: &Name, face: FaceId) -> Result<(), FibError> {
        let absent = || FibError::AssociationAbsent {
            prefix: prefix.clone(),
            face: face.get(),
        };
        let i = self
            .entries
            .binary_search_by(|(n, _)| n.cmp(prefix))
            .map_err(|_| absent())?;
        if !self.entries[i].1.remove(face) {
            return Err(absent());
        }
        if self.entries[i].1.is_empty() {
            self.entries.remove(i);
        }
        Ok(())
    }
}
