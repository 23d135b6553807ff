//! Bloom filters and 4-bit counting Bloom filters sized from a capacity and a
//! target false-positive probability.

use alloc::vec;
use alloc::vec::Vec;

use crate::hash::index_family;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("filter capacity must be at least 1")]
    ZeroCapacity,
    #[error("false-positive probability {0} is outside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("element is not present in the counting filter")]
    NotPresent,
}

/// Size of a Bloom filter in bits for `capacity` elements at false-positive
/// probability `fpp`: `ceil(-capacity * ln(fpp) / ln(2)^2)`.
pub fn size_bf(capacity: u64, fpp: f64) -> Result<u64, FilterError> {
    FilterParams::new(capacity, fpp).map(|p| p.m())
}

/// Optimal slot count `m` and index count `k` for a capacity and target
/// false-positive probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    capacity: u64,
    fpp: f64,
    m: u64,
    k: u32,
}

impl FilterParams {
    pub fn new(capacity: u64, fpp: f64) -> Result<Self, FilterError> {
        if capacity == 0 {
            return Err(FilterError::ZeroCapacity);
        }
        if !(fpp > 0.0 && fpp < 1.0) {
            return Err(FilterError::ProbabilityOutOfRange(fpp));
        }
        let ln2 = core::f64::consts::LN_2;
        let n = capacity as f64;
        let m = libm::ceil(-n * libm::log(fpp) / (ln2 * ln2)) as u64;
        let k = (libm::round(m as f64 / n * ln2) as u32).max(1);
        Ok(FilterParams {
            capacity,
            fpp,
            m,
            k,
        })
    }

    /// Capacity `N_BF` at which the target probability holds.
    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn fpp(&self) -> f64 {
        self.fpp
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Predicted false-positive rate after `fill` distinct insertions:
    /// `(1 - e^(-k * fill / m))^k`.
    pub fn predicted_fpr(&self, fill: u64) -> f64 {
        let k = f64::from(self.k);
        libm::pow(1.0 - libm::exp(-k * fill as f64 / self.m as f64), k)
    }
}

/// Operations shared by both filter kinds.
pub trait MembershipFilter {
    fn with_params(params: FilterParams) -> Self;
    fn params(&self) -> &FilterParams;
    fn insert(&mut self, element: &[u8]);
    fn contains(&self, element: &[u8]) -> bool {
        let fam = index_family(element, self.params().k(), self.params().m());
        let slots: Vec<usize> = fam.indices().collect();
        self.contains_slots(&slots)
    }
    /// True if every slot in `slots` is set.
    fn contains_slots(&self, slots: &[usize]) -> bool;
    /// Elements inserted (minus those removed).
    fn inserted(&self) -> u64;
    /// Payload size in bits.
    fn size_bits(&self) -> u64;

    /// True once more elements were inserted than the filter was sized for;
    /// the target false-positive probability no longer holds.
    fn over_capacity(&self) -> bool {
        self.inserted() > self.params().capacity()
    }
}

/// Plain Bloom filter over `m` single-bit slots.
#[derive(Debug, Clone, PartialEq)]
pub struct BloomFilter {
    params: FilterParams,
    words: Vec<u64>,
    inserted: u64,
}

impl BloomFilter {
    pub fn new(params: FilterParams) -> Self {
        BloomFilter {
            params,
            words: vec![0; params.m().div_ceil(64) as usize],
            inserted: 0,
        }
    }

    pub fn bit(&self, slot: usize) -> bool {
        self.words[slot / 64] >> (slot % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }
}

impl MembershipFilter for BloomFilter {
    fn with_params(params: FilterParams) -> Self {
        BloomFilter::new(params)
    }

    fn params(&self) -> &FilterParams {
        &self.params
    }

    fn insert(&mut self, element: &[u8]) {
        let fam = index_family(element, self.params.k(), self.params.m());
        for i in fam.indices() {
            self.words[i / 64] |= 1 << (i % 64);
        }
        self.inserted += 1;
    }

    fn contains_slots(&self, slots: &[usize]) -> bool {
        slots.iter().all(|&i| self.bit(i))
    }

    fn inserted(&self) -> u64 {
        self.inserted
    }

    fn size_bits(&self) -> u64 {
        self.params.m()
    }
}

/// Counting Bloom filter with `m` four-bit counters packed two per byte.
///
/// A counter that reaches 15 is saturated and stays at 15: it is never
/// decremented again, so elements sharing it can never become false
/// negatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingBloomFilter {
    params: FilterParams,
    nibbles: Vec<u8>,
    inserted: u64,
}

impl CountingBloomFilter {
    pub const SATURATED: u8 = 15;

    pub fn new(params: FilterParams) -> Self {
        CountingBloomFilter {
            params,
            nibbles: vec![0; params.m().div_ceil(2) as usize],
            inserted: 0,
        }
    }

    pub fn counter(&self, slot: usize) -> u8 {
        (self.nibbles[slot / 2] >> (4 * (slot % 2))) & 0x0f
    }

    fn set_counter(&mut self, slot: usize, value: u8) {
        let shift = 4 * (slot % 2);
        let byte = &mut self.nibbles[slot / 2];
        *byte = (*byte & !(0x0f << shift)) | ((value & 0x0f) << shift);
    }

    pub fn counters(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.params.m() as usize).map(move |i| self.counter(i))
    }

    pub fn counter_sum(&self) -> u64 {
        self.counters().map(u64::from).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nibbles.iter().all(|&b| b == 0)
    }

    pub fn saturated_slots(&self) -> usize {
        self.counters().filter(|&c| c == Self::SATURATED).count()
    }

    /// Removes one copy of `element`. Rejected, leaving the filter unchanged,
    /// if any of its counters is too low to have been set by it.
    pub fn remove(&mut self, element: &[u8]) -> Result<(), FilterError> {
        let fam = index_family(element, self.params.k(), self.params.m());
        let mut slots: Vec<usize> = fam.indices().collect();
        slots.sort_unstable();

        // (slot, multiplicity) runs
        let mut runs: Vec<(usize, u8)> = Vec::with_capacity(slots.len());
        for s in slots {
            match runs.last_mut() {
                Some((last, n)) if *last == s => *n += 1,
                _ => runs.push((s, 1)),
            }
        }

        let removable = runs.iter().all(|&(slot, n)| {
            let c = self.counter(slot);
            c == Self::SATURATED || c >= n
        });
        if !removable {
            return Err(FilterError::NotPresent);
        }
        for (slot, n) in runs {
            let c = self.counter(slot);
            if c != Self::SATURATED {
                self.set_counter(slot, c - n);
            }
        }
        self.inserted = self.inserted.saturating_sub(1);
        Ok(())
    }
}

impl MembershipFilter for CountingBloomFilter {
    fn with_params(params: FilterParams) -> Self {
        CountingBloomFilter::new(params)
    }

    fn params(&self) -> &FilterParams {
        &self.params
    }

    fn insert(&mut self, element: &[u8]) {
        let fam = index_family(element, self.params.k(), self.params.m());
        for i in fam.indices() {
            let c = self.counter(i);
            if c < Self::SATURATED {
                self.set_counter(i, c + 1);
            }
        }
        self.inserted += 1;
    }

    fn contains_slots(&self, slots: &[usize]) -> bool {
        slots.iter().all(|&i| self.counter(i) > 0)
    }

    fn inserted(&self) -> u64 {
        self.inserted
    }

    fn size_bits(&self) -> u64 {
        4 * self.params.m()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sizes_match_reference_values() {
        assert_eq!(size_bf(4, 1e-6), Ok(116));
        assert_eq!(size_bf(5, 1e-6), Ok(144));
        assert_eq!(size_bf(6, 1e-6), Ok(173));
        assert_eq!(size_bf(10, 1e-6), Ok(288));
        assert_eq!(size_bf(25, 1e-6), Ok(719));
        assert_eq!(FilterParams::new(5, 1e-6).unwrap().k(), 20);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(size_bf(0, 0.5), Err(FilterError::ZeroCapacity));
        assert!(matches!(
            size_bf(3, 0.0),
            Err(FilterError::ProbabilityOutOfRange(_))
        ));
        assert!(matches!(
            size_bf(3, 1.0),
            Err(FilterError::ProbabilityOutOfRange(_))
        ));
        assert!(matches!(
            size_bf(3, f64::NAN),
            Err(FilterError::ProbabilityOutOfRange(_))
        ));
    }

    #[test]
    fn k_is_at_least_one() {
        let p = FilterParams::new(1000, 0.9).unwrap();
        assert_eq!(p.k(), 1);
    }

    fn params() -> FilterParams {
        FilterParams::new(5, 1e-6).unwrap()
    }

    #[test]
    fn empty_filters_answer_absent() {
        let bf = BloomFilter::new(params());
        let cbf = CountingBloomFilter::new(params());
        assert!(!bf.contains(b"/de"));
        assert!(!cbf.contains(b""));
        assert!(!bf.over_capacity());
    }

    #[test]
    fn one_insert_sets_at_most_k_bits() {
        let mut bf = BloomFilter::new(params());
        bf.insert(b"/de/fhl");
        assert!(bf.contains(b"/de/fhl"));
        assert!(bf.count_ones() <= 20);
        assert!(bf.count_ones() >= 1);
        assert_eq!(bf.size_bits(), 144);
    }

    #[test]
    fn counting_insert_twice_remove_once() {
        let mut cbf = CountingBloomFilter::new(params());
        cbf.insert(b"x");
        cbf.insert(b"x");
        cbf.remove(b"x").unwrap();
        assert!(cbf.contains(b"x"));
        assert_eq!(cbf.inserted(), 1);
        cbf.remove(b"x").unwrap();
        assert!(cbf.is_empty());
        assert!(!cbf.contains(b"x"));
    }

    #[test]
    fn remove_from_empty_is_rejected() {
        let mut cbf = CountingBloomFilter::new(params());
        let before = cbf.clone();
        assert_eq!(cbf.remove(b"ghost"), Err(FilterError::NotPresent));
        assert_eq!(cbf, before);
    }

    #[test]
    fn saturated_counters_are_sticky() {
        let p = FilterParams::new(1, 0.5).unwrap();
        assert_eq!(p.k(), 1);
        let mut cbf = CountingBloomFilter::new(p);
        for _ in 0..20 {
            cbf.insert(b"hot");
        }
        assert_eq!(cbf.saturated_slots(), 1);
        for _ in 0..20 {
            cbf.remove(b"hot").unwrap();
        }
        assert!(cbf.contains(b"hot"));
        assert_eq!(cbf.saturated_slots(), 1);
    }

    #[test]
    fn over_capacity_is_reported() {
        let mut bf = BloomFilter::new(params());
        for i in 0..6u8 {
            bf.insert(&[i]);
        }
        assert!(bf.over_capacity());
    }

    #[test]
    fn fpr_at_capacity_is_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for fpp in [0.01, 0.001] {
            let p = FilterParams::new(1000, fpp).unwrap();
            let mut bf = BloomFilter::new(p);
            for _ in 0..1000 {
                let e: [u8; 16] = rng.random();
                bf.insert(&[&[0u8][..], &e].concat());
            }
            let probes = 200_000;
            let hits = (0..probes)
                .filter(|_| {
                    let e: [u8; 16] = rng.random();
                    bf.contains(&[&[1u8][..], &e].concat())
                })
                .count();
            let rate = hits as f64 / probes as f64;
            assert!(rate <= 2.0 * fpp, "fpp {fpp}: rate {rate}");
        }
    }

    #[test]
    fn small_filters_hold_their_target() {
        // A 5-element filter at 1e-3 has only 72 slots.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = FilterParams::new(5, 1e-3).unwrap();
        let probes = 400_000;
        let mut hits = 0;
        for _ in 0..40 {
            let mut bf = BloomFilter::new(p);
            for _ in 0..5 {
                let e: [u8; 16] = rng.random();
                bf.insert(&[&[0u8][..], &e].concat());
            }
            hits += (0..probes / 40)
                .filter(|_| {
                    let e: [u8; 16] = rng.random();
                    bf.contains(&[&[1u8][..], &e].concat())
                })
                .count();
        }
        let rate = hits as f64 / probes as f64;
        assert!(rate <= 2e-3, "rate {rate}");
    }

    fn elements() -> impl Strategy<Value = Vec<Vec<u8>>> {
        prop::collection::vec(prop::collection::vec(any::<u8>(), 1..12), 0..100)
    }

    proptest! {
        #[test]
        fn no_false_negatives(es in elements()) {
            let p = FilterParams::new(20, 0.01).unwrap();
            let mut bf = BloomFilter::new(p);
            let mut cbf = CountingBloomFilter::new(p);
            for e in &es {
                bf.insert(e);
                cbf.insert(e);
            }
            for e in &es {
                prop_assert!(bf.contains(e));
                prop_assert!(cbf.contains(e));
            }
            prop_assert!(bf.count_ones() <= es.len() as u64 * u64::from(p.k()));
        }

        #[test]
        fn bloom_and_counting_agree(es in elements(), probes in elements()) {
            let p = FilterParams::new(8, 0.05).unwrap();
            let mut bf = BloomFilter::new(p);
            let mut cbf = CountingBloomFilter::new(p);
            for e in &es {
                bf.insert(e);
                cbf.insert(e);
            }
            for e in es.iter().chain(&probes) {
                prop_assert_eq!(bf.contains(e), cbf.contains(e));
            }
        }

        #[test]
        fn insert_then_remove_all_restores_zero(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = FilterParams::new(100, 0.01).unwrap();
            let mut cbf = CountingBloomFilter::new(p);
            let es: Vec<[u8; 8]> = (0..100).map(|_| rng.random()).collect();
            for e in &es {
                cbf.insert(e);
            }
            prop_assume!(cbf.saturated_slots() == 0);
            prop_assert_eq!(cbf.counter_sum(), 100 * u64::from(p.k()));
            for e in &es {
                prop_assert!(cbf.remove(e).is_ok());
            }
            prop_assert!(cbf.is_empty());
            prop_assert_eq!(cbf.inserted(), 0);
        }
    }
}
