//! Closed-form memory model for the four FIB variants.
//!
//! With `N` prefixes of `L` encoded bytes each, `F` faces, filter capacity
//! `N_BF` and false-positive target `P_FP`:
//!
//! | variant  | bits                          |
//! |----------|-------------------------------|
//! | FIB      | `N * (8L + F)`                |
//! | FIB-Hash | `N * (32 + F)`                |
//! | FIB-BF   | `size_bf(N_BF, P_FP) * F`     |
//! | FIB-CBF  | `4 * size_bf(N_BF, P_FP) * F` |

use core::fmt;
use core::str::FromStr;

use crate::filter::{size_bf, FilterError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("{0} must be at least 1")]
    NotPositive(&'static str),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("configurations differ in more than the prefix count")]
    Mismatched,
    #[error("entry {0} has no components")]
    EmptyPrefix(usize),
    #[error("unknown variant {0:?}")]
    UnknownVariant(alloc::string::String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Fib,
    FibHash,
    FibBf,
    FibCbf,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Fib,
        Variant::FibHash,
        Variant::FibBf,
        Variant::FibCbf,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Fib => "FIB",
            Variant::FibHash => "FIB-Hash",
            Variant::FibBf => "FIB-BF",
            Variant::FibCbf => "FIB-CBF",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fib" | "reference" | "ref" => Ok(Variant::Fib),
            "fib-hash" | "hash" => Ok(Variant::FibHash),
            "fib-bf" | "bf" | "bloom" => Ok(Variant::FibBf),
            "fib-cbf" | "cbf" | "counting" => Ok(Variant::FibCbf),
            _ => Err(ModelError::UnknownVariant(s.into())),
        }
    }
}

/// How the per-face filter capacity is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    /// `ceil(N / F)`: prefixes spread evenly over the faces.
    PerFace,
    Fixed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub prefixes: u64,
    pub faces: u64,
    /// Encoded prefix length in bytes, separators included.
    pub prefix_bytes: u64,
    pub capacity: Capacity,
    pub fpp: f64,
}

impl ModelConfig {
    /// Defaults to the even-spread capacity `ceil(N / F)`.
    pub fn new(prefixes: u64, faces: u64, prefix_bytes: u64, fpp: f64) -> Self {
        ModelConfig {
            prefixes,
            faces,
            prefix_bytes,
            capacity: Capacity::PerFace,
            fpp,
        }
    }

    pub fn with_capacity(mut self, capacity: u64) -> Self {
        self.capacity = Capacity::Fixed(capacity);
        self
    }

    pub fn with_prefixes(mut self, prefixes: u64) -> Self {
        self.prefixes = prefixes;
        self
    }

    pub fn filter_capacity(&self) -> u64 {
        match self.capacity {
            Capacity::PerFace => self.prefixes.div_ceil(self.faces.max(1)),
            Capacity::Fixed(n) => n,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        for (value, what) in [
            (self.prefixes, "prefix count"),
            (self.faces, "face count"),
            (self.prefix_bytes, "prefix length"),
            (self.filter_capacity(), "filter capacity"),
        ] {
            if value == 0 {
                return Err(ModelError::NotPositive(what));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeReport {
    pub fib_bits: u64,
    pub fib_hash_bits: u64,
    pub fib_bf_bits: u64,
    pub fib_cbf_bits: u64,
}

impl SizeReport {
    pub fn bits(&self, variant: Variant) -> u64 {
        match variant {
            Variant::Fib => self.fib_bits,
            Variant::FibHash => self.fib_hash_bits,
            Variant::FibBf => self.fib_bf_bits,
            Variant::FibCbf => self.fib_cbf_bits,
        }
    }
}

pub fn model_sizes(cfg: &ModelConfig) -> Result<SizeReport, ModelError> {
    cfg.validate()?;
    let (n, f) = (cfg.prefixes, cfg.faces);
    let bf = size_bf(cfg.filter_capacity(), cfg.fpp)? * f;
    Ok(SizeReport {
        fib_bits: n * (8 * cfg.prefix_bytes + f),
        fib_hash_bits: n * (32 + f),
        fib_bf_bits: bf,
        fib_cbf_bits: 4 * bf,
    })
}

/// `|size(a) - size(b)|` for one variant, where `a` and `b` differ only in
/// the prefix count.
pub fn size_difference(
    a: &ModelConfig,
    b: &ModelConfig,
    variant: Variant,
) -> Result<u64, ModelError> {
    if a.with_prefixes(0) != b.with_prefixes(0) {
        return Err(ModelError::Mismatched);
    }
    let sa = model_sizes(a)?.bits(variant);
    let sb = model_sizes(b)?.bits(variant);
    Ok(sa.abs_diff(sb))
}

/// The real prefix length `L*` at which `N * (8L* + F)` equals the filter FIB
/// size `c * size_bf(N_BF, P_FP) * F` (`c = 4` for counting filters).
pub fn breakeven_point(
    prefixes: u64,
    faces: u64,
    capacity: u64,
    fpp: f64,
    counting: bool,
) -> Result<f64, ModelError> {
    if prefixes == 0 {
        return Err(ModelError::NotPositive("prefix count"));
    }
    if faces == 0 {
        return Err(ModelError::NotPositive("face count"));
    }
    let factor = if counting { 4 } else { 1 };
    let filter_bits = (factor * size_bf(capacity, fpp)? * faces) as f64;
    Ok((filter_bits / prefixes as f64 - faces as f64) / 8.0)
}

/// Break-even prefix length in bytes: [`breakeven_point`] rounded to the
/// nearest integer, never below 0.
pub fn breakeven_prefix_len(
    prefixes: u64,
    faces: u64,
    capacity: u64,
    fpp: f64,
    counting: bool,
) -> Result<u64, ModelError> {
    let point = breakeven_point(prefixes, faces, capacity, fpp, counting)?;
    Ok(libm::round(point.max(0.0)) as u64)
}

/// Variant size divided by the reference FIB size.
pub fn size_ratio(cfg: &ModelConfig, variant: Variant) -> Result<f64, ModelError> {
    let sizes = model_sizes(cfg)?;
    Ok(sizes.bits(variant) as f64 / sizes.fib_bits as f64)
}

/// Exact reference FIB size from per-entry component byte lengths:
/// `sum_n [ sum_m (8 * |Comp_nm| + 8) + F ]`.
pub fn reference_fib_exact_size<I, C>(entries: I, faces: u64) -> Result<u64, ModelError>
where
    I: IntoIterator<Item = C>,
    C: IntoIterator<Item = usize>,
{
    let mut total = 0;
    for (i, entry) in entries.into_iter().enumerate() {
        let mut components = 0;
        for len in entry {
            total += 8 * len as u64 + 8;
            components += 1;
        }
        if components == 0 {
            return Err(ModelError::EmptyPrefix(i));
        }
        total += faces;
    }
    Ok(total)
}
