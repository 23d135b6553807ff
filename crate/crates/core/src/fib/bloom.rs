use alloc::vec::Vec;

use super::{check_face, check_prefix, FaceId, FaceSet, Fib, FibError, LookupResult, RemovableFib};
use crate::filter::{
    BloomFilter, CountingBloomFilter, FilterError, FilterParams, MembershipFilter,
};
use crate::hash::{index_family, FramedName};
use crate::name::Name;

/// One membership filter per face, all sharing the same `(m, k)`.
///
/// The filters hold the framed serialization of every prefix assigned to
/// their face. They keep no record of which pairs were inserted, so inserting
/// the same `(prefix, face)` twice counts twice.
#[derive(Debug, Clone, PartialEq)]
pub struct PerFaceFib<T> {
    params: FilterParams,
    filters: Vec<T>,
}

/// Per-face Bloom filters. Assignments cannot be removed.
pub type BloomFib = PerFaceFib<BloomFilter>;

/// Per-face counting Bloom filters with 4-bit counters.
pub type CountingBloomFib = PerFaceFib<CountingBloomFilter>;

impl<T: MembershipFilter> PerFaceFib<T> {
    pub fn new(face_count: usize, params: FilterParams) -> Self {
        PerFaceFib {
            params,
            filters: (0..face_count).map(|_| T::with_params(params)).collect(),
        }
    }

    /// Filters sized for `capacity` prefixes per face at probability `fpp`.
    pub fn with_capacity(face_count: usize, capacity: u64, fpp: f64) -> Result<Self, FilterError> {
        Ok(Self::new(face_count, FilterParams::new(capacity, fpp)?))
    }

    pub fn params(&self) -> &FilterParams {
        &self.params
    }

    pub fn filter(&self, face: FaceId) -> Option<&T> {
        self.filters.get(face.slot())
    }

    pub fn filters(&self) -> &[T] {
        &self.filters
    }
}

impl<T: MembershipFilter> Fib for PerFaceFib<T> {
    fn face_count(&self) -> usize {
        self.filters.len()
    }

    fn insert(&mut self, prefix: &Name, face: FaceId) -> Result<(), FibError> {
        check_prefix(prefix)?;
        check_face(face, self.filters.len())?;
        self.filters[face.slot()].insert(FramedName::new(prefix).as_bytes());
        Ok(())
    }

    /// Probes every face's filter at each depth, longest first, and returns
    /// the union of all faces that answer at the first depth with any hit.
    fn lookup(&self, interest: &Name) -> LookupResult {
        let framed = FramedName::new(interest);
        let mut slots = Vec::with_capacity(self.params.k() as usize);
        for depth in (1..=framed.depth()).rev() {
            let fam = index_family(framed.prefix(depth), self.params.k(), self.params.m());
            slots.clear();
            slots.extend(fam.indices());

            let mut faces = FaceSet::new(self.filters.len());
            for (slot, filter) in self.filters.iter().enumerate() {
                if filter.contains_slots(&slots) {
                    // slot < face_count by construction
                    let _ = faces.insert(FaceId(slot as u32 + 1));
                }
            }
            if !faces.is_empty() {
                return LookupResult { depth, faces };
            }
        }
        LookupResult::miss(self.filters.len())
    }

    /// `m * F` for Bloom filters, `4 * m * F` for counting filters.
    fn size_bits(&self) -> u64 {
        self.filters.iter().map(MembershipFilter::size_bits).sum()
    }
}

impl RemovableFib for CountingBloomFib {
    fn remove(&mut self, prefix: &Name, face: FaceId) -> Result<(), FibError> {
        let absent = || FibError::AssociationAbsent {
            prefix: prefix.clone(),
            face: face.get(),
        };
        let filter = self.filters.get_mut(face.slot()).ok_or_else(absent)?;
        filter
            .remove(FramedName::new(prefix).as_bytes())
            .map_err(|_| absent())
    }
}
