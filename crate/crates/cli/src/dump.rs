//! FIB dump files and prefix-to-face mapping analysis.
//!
//! A dump is line-oriented text:
//!
//! ```text
//! # comment
//! node aachen          (optional label)
//! faces 10             (optional; otherwise the largest face id)
//! /de/fhl 3,7
//! /com/example 1
//! ```
//!
//! Names use the percent-encoded name syntax; face ids are decimal and start
//! at 1. A `#` at the start of a line or after whitespace starts a comment.
//! Blank lines are ignored. Header lines must precede the first association.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ccn_fib_core::size_model::{breakeven_point, model_sizes, ModelConfig, Variant};
use ccn_fib_core::{FaceId, Name, NameError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct DumpError {
    pub line: usize,
    pub kind: DumpErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DumpErrorKind {
    #[error("bad name: {0}")]
    Name(#[from] NameError),
    #[error("the root name cannot be a FIB prefix")]
    RootPrefix,
    #[error("expected `<name> <face>[,<face>...]`")]
    Syntax,
    #[error("bad face id {0:?}")]
    BadFace(String),
    #[error("face id {face} exceeds the declared face count {declared}")]
    FaceOutOfRange { face: u32, declared: usize },
    #[error("duplicate prefix {prefix} (first on line {first_line})")]
    DuplicatePrefix { prefix: Name, first_line: usize },
    #[error("bad `{0}` header")]
    BadHeader(&'static str),
    #[error("header lines must precede associations")]
    LateHeader,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FibDump {
    pub node_label: String,
    pub declared_faces: Option<usize>,
    pub associations: Vec<(Name, BTreeSet<FaceId>)>,
}

impl FibDump {
    /// Declared face count, or the largest referenced face id.
    pub fn face_count(&self) -> usize {
        self.declared_faces.unwrap_or_else(|| {
            self.associations
                .iter()
                .flat_map(|(_, faces)| faces.iter())
                .map(|f| f.get() as usize)
                .max()
                .unwrap_or(0)
        })
    }

    pub fn prefix_count(&self) -> usize {
        self.associations.len()
    }
}

fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

pub fn parse_dump(text: &str) -> Result<FibDump, DumpError> {
    let mut dump = FibDump::default();
    let mut first_seen: BTreeMap<Name, usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |kind| DumpError { line, kind };
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        let rest: Vec<&str> = tokens.collect();

        if !head.starts_with('/') {
            if !dump.associations.is_empty() {
                return Err(err(DumpErrorKind::LateHeader));
            }
            match head {
                "faces" => {
                    let [count] = rest[..] else {
                        return Err(err(DumpErrorKind::BadHeader("faces")));
                    };
                    let count = count
                        .parse()
                        .map_err(|_| err(DumpErrorKind::BadHeader("faces")))?;
                    if dump.declared_faces.replace(count).is_some() {
                        return Err(err(DumpErrorKind::BadHeader("faces")));
                    }
                }
                "node" if !rest.is_empty() => dump.node_label = rest.join(" "),
                "node" => return Err(err(DumpErrorKind::BadHeader("node"))),
                _ => return Err(err(DumpErrorKind::Syntax)),
            }
            continue;
        }

        let [face_list] = rest[..] else {
            return Err(err(DumpErrorKind::Syntax));
        };
        let name: Name = head.parse().map_err(|e| err(DumpErrorKind::Name(e)))?;
        if name.is_root() {
            return Err(err(DumpErrorKind::RootPrefix));
        }
        let mut faces = BTreeSet::new();
        for token in face_list.split(',') {
            let face = token
                .parse::<u32>()
                .ok()
                .and_then(FaceId::new)
                .ok_or_else(|| err(DumpErrorKind::BadFace(token.to_string())))?;
            if let Some(declared) = dump.declared_faces {
                if face.get() as usize > declared {
                    return Err(err(DumpErrorKind::FaceOutOfRange {
                        face: face.get(),
                        declared,
                    }));
                }
            }
            faces.insert(face);
        }
        if let Some(&first_line) = first_seen.get(&name) {
            return Err(err(DumpErrorKind::DuplicatePrefix {
                prefix: name,
                first_line,
            }));
        }
        first_seen.insert(name.clone(), line);
        dump.associations.push((name, faces));
    }
    Ok(dump)
}

/// Shape of the prefix-to-face relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mapping {
    OneToOne,
    OneToN,
    NToOne,
    Mixed,
}

impl Mapping {
    pub fn label(self) -> &'static str {
        match self {
            Mapping::OneToOne => "one_to_one",
            Mapping::OneToN => "one_to_n",
            Mapping::NToOne => "n_to_one",
            Mapping::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classification thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// A mean count at or below this is "mostly one".
    pub mostly_one: f64,
    /// `N / F` range counted as `N ≈ F`.
    pub balance: (f64, f64),
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            mostly_one: 1.5,
            balance: (0.5, 2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingProfile {
    pub prefixes: usize,
    pub faces: usize,
    /// Prefix count on each face, index 0 is face 1.
    pub per_face: Vec<usize>,
    /// faces-per-prefix -> number of prefixes
    pub faces_per_prefix: BTreeMap<usize, usize>,
    /// prefixes-per-face -> number of faces, empty faces included
    pub prefixes_per_face: BTreeMap<usize, usize>,
    /// encoded prefix length in bytes -> number of prefixes
    pub prefix_lengths: BTreeMap<usize, usize>,
    /// Mean faces per prefix.
    pub mean_faces_per_prefix: f64,
    /// Mean prefixes per non-empty face.
    pub mean_prefixes_per_face: f64,
    pub mapping: Mapping,
}

impl MappingProfile {
    pub fn max_per_face(&self) -> usize {
        self.per_face.iter().copied().max().unwrap_or(0)
    }

    /// Lower median of the encoded prefix lengths.
    pub fn median_prefix_len(&self) -> Option<usize> {
        if self.prefixes == 0 {
            return None;
        }
        let target = (self.prefixes - 1) / 2;
        let mut seen = 0;
        for (&len, &count) in &self.prefix_lengths {
            seen += count;
            if seen > target {
                return Some(len);
            }
        }
        None
    }

    /// Even spread: no face carries more than twice `ceil(N / F)` prefixes.
    pub fn evenly_spread(&self) -> bool {
        self.faces > 0 && self.max_per_face() <= 2 * self.prefixes.div_ceil(self.faces)
    }
}

pub fn profile(dump: &FibDump) -> MappingProfile {
    profile_with(dump, &Thresholds::default())
}

pub fn profile_with(dump: &FibDump, thresholds: &Thresholds) -> MappingProfile {
    let faces = dump.face_count();
    let prefixes = dump.prefix_count();
    let mut per_face = vec![0usize; faces];
    let mut faces_per_prefix = BTreeMap::new();
    let mut prefix_lengths = BTreeMap::new();
    for (name, set) in &dump.associations {
        *faces_per_prefix.entry(set.len()).or_insert(0) += 1;
        *prefix_lengths.entry(name.encoded_size()).or_insert(0) += 1;
        for f in set {
            per_face[f.get() as usize - 1] += 1;
        }
    }
    let mut prefixes_per_face = BTreeMap::new();
    for &count in &per_face {
        *prefixes_per_face.entry(count).or_insert(0) += 1;
    }

    let links: usize = per_face.iter().sum();
    let busy_faces = per_face.iter().filter(|&&c| c > 0).count();
    let mean_faces_per_prefix = ratio(links, prefixes);
    let mean_prefixes_per_face = ratio(links, busy_faces);
    let balance = ratio(prefixes, faces);

    let one = thresholds.mostly_one;
    let (lo, hi) = thresholds.balance;
    let mapping = match (mean_faces_per_prefix <= one, mean_prefixes_per_face <= one) {
        (true, true) if (lo..=hi).contains(&balance) => Mapping::OneToOne,
        (false, true) => Mapping::OneToN,
        (true, false) => Mapping::NToOne,
        _ => Mapping::Mixed,
    };

    MappingProfile {
        prefixes,
        faces,
        per_face,
        faces_per_prefix,
        prefixes_per_face,
        prefix_lengths,
        mean_faces_per_prefix,
        mean_prefixes_per_face,
        mapping,
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Counts of encoded prefix lengths in bins of `bin_width` bytes, keyed by
/// the bin's lower bound. A width of 0 is treated as 1.
pub fn prefix_length_histogram(dump: &FibDump, bin_width: usize) -> BTreeMap<usize, usize> {
    let w = bin_width.max(1);
    let mut bins = BTreeMap::new();
    for (name, _) in &dump.associations {
        *bins.entry(name.encoded_size() / w * w).or_insert(0) += 1;
    }
    bins
}

/// Operating requirements that the mapping shape alone does not reveal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Requirements {
    /// Prefixes must be removable at runtime.
    pub removal: bool,
    /// False-positive target for the filter-based variants.
    pub fpp: f64,
}

impl Default for Requirements {
    fn default() -> Self {
        Requirements {
            removal: false,
            fpp: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub variant: Variant,
    pub rationale: String,
}

pub fn recommend(profile: &MappingProfile, req: &Requirements) -> Recommendation {
    let hash = |why: String| Recommendation {
        variant: Variant::FibHash,
        rationale: why,
    };
    let why = match profile.mapping {
        Mapping::NToOne => None,
        Mapping::OneToOne => Some("one_to_one: each per-face filter would hold about one prefix"),
        Mapping::OneToN => Some("one_to_n: every prefix would be stored once per face"),
        Mapping::Mixed => Some("mixed: no n_to_one structure for per-face filters to exploit"),
    };
    if let Some(why) = why {
        return hash(format!("{why}; hashing saves memory under any mapping"));
    }
    if !profile.evenly_spread() {
        return hash(format!(
            "n_to_one but uneven: busiest face holds {} prefixes, more than 2*ceil(N/F) = {}",
            profile.max_per_face(),
            2 * profile.prefixes.div_ceil(profile.faces)
        ));
    }
    if !req.removal {
        return Recommendation {
            variant: Variant::FibBf,
            rationale: "n_to_one with prefixes evenly spread over faces and no removal needed"
                .into(),
        };
    }

    let capacity = profile.prefixes.div_ceil(profile.faces) as u64;
    let median = profile.median_prefix_len().unwrap_or(0) as u64;
    let (n, f) = (profile.prefixes as u64, profile.faces as u64);
    let sizes =
        model_sizes(&ModelConfig::new(n, f, median.max(1), req.fpp).with_capacity(capacity));
    let breakeven = breakeven_point(n, f, capacity, req.fpp, true);
    match (sizes, breakeven) {
        (Ok(s), Ok(point)) if s.fib_cbf_bits < s.fib_bits => Recommendation {
            variant: Variant::FibCbf,
            rationale: format!(
                "n_to_one with removal; counting filters beat the reference FIB above {point:.2} bytes and the median prefix is {median} bytes"
            ),
        },
        (_, Ok(point)) => hash(format!(
            "n_to_one with removal, but counting filters only save memory above {point:.2} bytes and the median prefix is {median} bytes"
        )),
        (_, Err(e)) => hash(format!("size model unavailable: {e}")),
    }
}
