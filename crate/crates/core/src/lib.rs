//! Forwarding information base (FIB) variants for content-centric networking.
//!
//! Four FIB layouts share one lookup interface:
//!
//! * [`ReferenceFib`]: a shortlex-sorted list of `(prefix, face bit vector)` tuples.
//! * [`HashFib`]: prefixes replaced by 32-bit hashes.
//! * [`BloomFib`]: one Bloom filter per face.
//! * [`CountingBloomFib`]: one counting Bloom filter (4-bit counters) per face.
//!
//! [`size_model`] evaluates the memory footprint of each layout in closed form.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod fib;
pub mod filter;
pub mod hash;
pub mod name;
pub mod size_model;

pub use fib::{
    BloomFib, CountingBloomFib, FaceId, FaceSet, Fib, FibError, HashFib, LookupResult,
    ReferenceFib, RemovableFib,
};
pub use filter::{size_bf, BloomFilter, CountingBloomFilter, FilterError, FilterParams};
pub use hash::{hash_prefix, index_family, HashState, IndexFamily, PrefixHash};
pub use name::{Component, Name, NameError};
pub use size_model::{ModelConfig, ModelError, SizeReport, Variant};
