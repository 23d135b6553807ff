//! Hash primitives shared by the FIB variants.
//!
//! Every hash here is keyed SipHash-1-3 with fixed keys, so all sizes,
//! lookups and Monte Carlo runs are reproducible across builds.
//!
//! A prefix is hashed over its framed serialization: each component is
//! preceded by its length as a LEB128 varint (a single byte for components
//! shorter than 128 bytes). Component boundaries therefore change the hash,
//! so `/ab` and `/a/b` are distinct inputs.

use alloc::vec::Vec;
use core::hash::Hasher;

use siphasher::sip::SipHasher13;

use crate::name::{Component, Name};

/// Fixed hash keys. Changing any of these changes every hash value the crate
/// produces.
pub mod seeds {
    /// Keys for the 32-bit prefix hash stored in `HashFib`.
    pub const PREFIX: (u64, u64) = (0x6363_6e2d_6669_6231, 0x7072_6566_6978_6873);
    /// Keys for the Bloom filter base index `h1`.
    pub const INDEX_BASE: (u64, u64) = (0x9e37_79b9_7f4a_7c15, 0xbf58_476d_1ce4_e5b9);
    /// Keys for the Bloom filter index step `h2`.
    pub const INDEX_STEP: (u64, u64) = (0x94d0_49bb_1331_11eb, 0x2545_f491_4f6c_dd1d);
}

/// 32-bit hash of a name prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrefixHash(pub u32);

/// Incremental prefix hasher. Clone it to snapshot the state after a
/// component.
#[derive(Debug, Clone)]
pub struct HashState {
    inner: SipHasher13,
    components: usize,
}

impl Default for HashState {
    fn default() -> Self {
        Self::new()
    }
}

impl HashState {
    pub fn new() -> Self {
        HashState {
            inner: SipHasher13::new_with_keys(seeds::PREFIX.0, seeds::PREFIX.1),
            components: 0,
        }
    }

    pub fn feed(&mut self, component: &Component) {
        let mut buf = Vec::with_capacity(component.len() + 2);
        push_framed(&mut buf, component);
        self.inner.write(&buf);
        self.components += 1;
    }

    /// Number of components fed so far.
    pub fn depth(&self) -> usize {
        self.components
    }

    pub fn finish(&self) -> PrefixHash {
        PrefixHash(self.inner.finish() as u32)
    }
}

/// Hashes a whole prefix. Returns `None` for the root name, which is never a
/// FIB prefix.
pub fn hash_prefix(prefix: &Name) -> Option<PrefixHash> {
    if prefix.is_root() {
        return None;
    }
    let mut state = HashState::new();
    for c in prefix.components() {
        state.feed(c);
    }
    Some(state.finish())
}

/// Hash snapshots for every prefix depth of `name`; element `d - 1` is the
/// hash of the first `d` components. Each component is hashed once.
pub fn prefix_hashes(name: &Name) -> Vec<PrefixHash> {
    let mut state = HashState::new();
    name.components()
        .iter()
        .map(|c| {
            state.feed(c);
            state.finish()
        })
        .collect()
}

fn push_framed(out: &mut Vec<u8>, component: &Component) {
    let mut len = component.len();
    loop {
        let byte = (len & 0x7f) as u8;
        len >>= 7;
        if len == 0 {
            out.push(byte);
            break;
        }
        out.push(byte | 0x80);
    }
    out.extend_from_slice(component.as_bytes());
}

/// Framed serialization of a name, plus the byte offset at which each prefix
/// depth ends (`ends[d - 1]` is the length of the first `d` components).
#[derive(Debug, Clone, Default)]
pub struct FramedName {
    bytes: Vec<u8>,
    ends: Vec<usize>,
}

impl FramedName {
    pub fn new(name: &Name) -> Self {
        let mut out = FramedName::default();
        for c in name.components() {
            push_framed(&mut out.bytes, c);
            out.ends.push(out.bytes.len());
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.ends.len()
    }

    /// Serialized bytes of the first `depth` components.
    pub fn prefix(&self, depth: usize) -> &[u8] {
        match depth {
            0 => &[],
            d => &self.bytes[..self.ends[d - 1]],
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

/// `k` Bloom filter indices in `[0, m)` by double hashing over the full
/// 64-bit state: `index_i = mix(h1 + i * h2) mod m`.
///
/// Reducing `h1` and `h2` modulo a small `m` first would leave only about
/// `m^2` distinct index patterns, and the false-positive rate of a
/// 144-slot filter would sit near 1e-3 whatever `k` is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexFamily {
    k: u32,
    m: u64,
    h1: u64,
    h2: u64,
}

impl IndexFamily {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn h1(&self) -> u64 {
        self.h1
    }

    pub fn h2(&self) -> u64 {
        self.h2
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..u64::from(self.k))
            .map(move |i| (mix(self.h1.wrapping_add(i.wrapping_mul(self.h2))) % self.m) as usize)
    }
}

/// splitmix64 finalizer: a bijection on u64 with full avalanche.
fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives `k` indices in `[0, m)` for `element`. `k` and `m` are raised to 1
/// if zero.
pub fn index_family(element: &[u8], k: u32, m: u64) -> IndexFamily {
    let mut base = SipHasher13::new_with_keys(seeds::INDEX_BASE.0, seeds::INDEX_BASE.1);
    base.write(element);
    let mut step = SipHasher13::new_with_keys(seeds::INDEX_STEP.0, seeds::INDEX_STEP.1);
    step.write(element);
    IndexFamily {
        k: k.max(1),
        m: m.max(1),
        h1: base.finish(),
        h2: step.finish() | 1,
    }
}
