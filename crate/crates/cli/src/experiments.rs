//! Monte Carlo experiments: filter false-positive rates, lookup agreement
//! with the reference FIB, 32-bit hash collision rate and lookup throughput.

use std::collections::HashSet;
use std::time::Instant;

use rand::Rng;

use ccn_fib_core::filter::{FilterError, MembershipFilter};
use ccn_fib_core::hash::{hash_prefix, FramedName};
use ccn_fib_core::{
    BloomFib, BloomFilter, Component, CountingBloomFib, CountingBloomFilter, FaceId, Fib, FibError,
    FilterParams, HashFib, LookupResult, Name, ReferenceFib, RemovableFib, Variant,
};

use crate::workload::{random_fib, random_interest, trial_rng, InstanceParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("variant {0} is not supported by this experiment")]
    Unsupported(Variant),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Fib(#[from] FibError),
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = hits as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    // centre and half cancel exactly at the edges; rounding must not leak
    let lo = if hits == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if hits >= trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FprReport {
    pub variant: Variant,
    pub capacity: u64,
    pub fpp: f64,
    pub m: u64,
    pub k: u32,
    pub fill: u64,
    pub probes: u64,
    pub hits: u64,
    /// `(1 - e^(-k fill / m))^k`
    pub predicted: f64,
}

impl FprReport {
    pub const CSV_HEADER: &'static str =
        "variant,capacity,fpp,m,k,fill,probes,hits,rate,predicted,ci95_low,ci95_high";

    pub fn rate(&self) -> f64 {
        self.hits as f64 / self.probes.max(1) as f64
    }

    pub fn csv_row(&self) -> String {
        let (lo, hi) = wilson_interval(self.hits, self.probes);
        format!(
            "{},{},{:e},{},{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e}",
            self.variant,
            self.capacity,
            self.fpp,
            self.m,
            self.k,
            self.fill,
            self.probes,
            self.hits,
            self.rate(),
            self.predicted,
            lo,
            hi
        )
    }
}

fn tagged_element<R: Rng>(rng: &mut R, tag: u8) -> [u8; 17] {
    let mut e = [0u8; 17];
    e[0] = tag;
    rng.fill(&mut e[1..]);
    e
}

/// Fills one filter with `fill` random elements, then probes `probes` fresh
/// ones. Inserted and probe elements carry different tag bytes, so every hit
/// is a false positive.
pub fn run_fpr(
    variant: Variant,
    capacity: u64,
    fpp: f64,
    fill: u64,
    probes: u64,
    seed: u64,
) -> Result<FprReport, ExperimentError> {
    let params = FilterParams::new(capacity, fpp)?;
    let hits = match variant {
        Variant::FibBf => count_false_positives(BloomFilter::new(params), fill, probes, seed),
        Variant::FibCbf => {
            count_false_positives(CountingBloomFilter::new(params), fill, probes, seed)
        }
        other => return Err(ExperimentError::Unsupported(other)),
    };
    Ok(FprReport {
        variant,
        capacity,
        fpp,
        m: params.m(),
        k: params.k(),
        fill,
        probes,
        hits,
        predicted: params.predicted_fpr(fill),
    })
}

fn count_false_positives<T: MembershipFilter>(
    mut filter: T,
    fill: u64,
    probes: u64,
    seed: u64,
) -> u64 {
    let mut rng = trial_rng(seed, 0);
    for _ in 0..fill {
        filter.insert(&tagged_element(&mut rng, 0));
    }
    let mut rng = trial_rng(seed, 1);
    (0..probes)
        .filter(|_| filter.contains(&tagged_element(&mut rng, 1)))
        .count() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OracleCounts {
    pub trials: u64,
    /// Same depth and same faces as the reference.
    pub exact: u64,
    /// Matched deeper than the reference.
    pub depth_inflations: u64,
    /// Same depth, strictly more faces than the reference.
    pub face_supersets: u64,
    /// Shallower than the reference, missing faces at equal depth, or a
    /// counting filter that did not return to zero after removing everything.
    pub violations: u64,
    /// Prefixes dropped at build time because their 32-bit hash collided.
    pub insert_collisions: u64,
    /// Counting-filter round trips skipped because a counter saturated.
    pub saturated_skips: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub variant: Variant,
    pub params: InstanceParams,
    pub fpp: f64,
    pub counts: OracleCounts,
    /// Face-superset events predicted by the filters' false-positive rates
    /// (union bound over the faces outside the true set). Zero for the hash
    /// variant.
    pub expected_supersets: f64,
    /// Depth inflations predicted the same way, over the depths deeper than
    /// the true match.
    pub expected_inflations: f64,
}

impl OracleReport {
    pub const CSV_HEADER: &'static str = "variant,prefixes,faces,fpp,trials,exact,depth_inflations,face_supersets,violations,insert_collisions,saturated_skips,expected_supersets,expected_inflations";

    pub fn csv_row(&self) -> String {
        let c = &self.counts;
        format!(
            "{},{},{},{:e},{},{},{},{},{},{},{},{:.4},{:.4}",
            self.variant,
            self.params.prefixes,
            self.params.faces,
            self.fpp,
            c.trials,
            c.exact,
            c.depth_inflations,
            c.face_supersets,
            c.violations,
            c.insert_collisions,
            c.saturated_skips,
            self.expected_supersets,
            self.expected_inflations
        )
    }
}

/// Compares `got` against the reference answer. `exact_faces` demands equal
/// face sets at equal depth (hash FIB); otherwise a superset is lawful.
fn tally(counts: &mut OracleCounts, got: &LookupResult, truth: &LookupResult, exact_faces: bool) {
    use std::cmp::Ordering::*;
    match got.depth.cmp(&truth.depth) {
        Less => counts.violations += 1,
        Greater => counts.depth_inflations += 1,
        Equal if got.faces == truth.faces => counts.exact += 1,
        Equal if !exact_faces && got.faces.is_superset(&truth.faces) => counts.face_supersets += 1,
        Equal => counts.violations += 1,
    }
}

/// Builds `trials` random FIB instances, resolves one random interest in
/// each with `variant` and with the reference FIB, and tallies agreement.
///
/// Filter capacity is the busiest face's load, so every instance is within
/// capacity.
pub fn run_oracle(
    variant: Variant,
    params: InstanceParams,
    fpp: f64,
    trials: u64,
    seed: u64,
) -> Result<OracleReport, ExperimentError> {
    if !matches!(variant, Variant::FibHash | Variant::FibBf | Variant::FibCbf) {
        return Err(ExperimentError::Unsupported(variant));
    }
    FilterParams::new(1, fpp)?;

    let mut counts = OracleCounts::default();
    let (mut expected_supersets, mut expected_inflations) = (0.0, 0.0);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let assoc = random_fib(&mut rng, &params);
        let mut reference = ReferenceFib::new(params.faces);
        counts.trials += 1;

        match variant {
            Variant::FibHash => {
                let mut fib = HashFib::new(params.faces);
                for (name, faces) in &assoc {
                    for &f in faces {
                        match fib.insert(name, f) {
                            Ok(()) => reference.insert(name, f)?,
                            Err(FibError::HashCollision { .. }) => counts.insert_collisions += 1,
                            Err(e) => return Err(e.into()),
                        }
                    }
                }
                let names: Vec<Name> = assoc.iter().map(|(n, _)| n.clone()).collect();
                let interest = random_interest(&mut rng, &names, &params);
                tally(
                    &mut counts,
                    &fib.lookup(&interest),
                    &reference.lookup(&interest),
                    true,
                );
            }
            Variant::FibBf | Variant::FibCbf => {
                let mut load = vec![0u64; params.faces];
                for (_, faces) in &assoc {
                    for f in faces {
                        load[f.get() as usize - 1] += 1;
                    }
                }
                let capacity = load.iter().copied().max().unwrap_or(1).max(1);
                let filter_params = FilterParams::new(capacity, fpp)?;
                for (name, faces) in &assoc {
                    for &f in faces {
                        reference.insert(name, f)?;
                    }
                }
                let names: Vec<Name> = assoc.iter().map(|(n, _)| n.clone()).collect();
                let interest = random_interest(&mut rng, &names, &params);
                let truth = reference.lookup(&interest);

                let fpr: Vec<f64> = load
                    .iter()
                    .map(|&l| filter_params.predicted_fpr(l))
                    .collect();
                if truth.is_match() {
                    expected_supersets += fpr
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| {
                            !truth
                                .faces
                                .contains(FaceId::new(i as u32 + 1).expect("i + 1 > 0"))
                        })
                        .map(|(_, p)| p)
                        .sum::<f64>();
                }
                let deeper = interest.len() - truth.depth;
                expected_inflations += deeper as f64 * fpr.iter().sum::<f64>();

                if variant == Variant::FibBf {
                    let mut fib = BloomFib::new(params.faces, filter_params);
                    for (name, faces) in &assoc {
                        for &f in faces {
                            fib.insert(name, f)?;
                        }
                    }
                    tally(&mut counts, &fib.lookup(&interest), &truth, false);
                } else {
                    let mut fib = CountingBloomFib::new(params.faces, filter_params);
                    for (name, faces) in &assoc {
                        for &f in faces {
                            fib.insert(name, f)?;
                        }
                    }
                    tally(&mut counts, &fib.lookup(&interest), &truth, false);
                    if fib.filters().iter().any(|f| f.saturated_slots() > 0) {
                        counts.saturated_skips += 1;
                        continue;
                    }
                    let mut clean = true;
                    for (name, faces) in &assoc {
                        for &f in faces {
                            clean &= fib.remove(name, f).is_ok();
                        }
                    }
                    clean &= fib.filters().iter().all(CountingBloomFilter::is_empty);
                    if !clean {
                        counts.violations += 1;
                    }
                }
            }
            Variant::Fib => unreachable!("rejected above"),
        }
    }
    Ok(OracleReport {
        variant,
        params,
        fpp,
        counts,
        expected_supersets,
        expected_inflations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionReport {
    pub stored: u64,
    pub distinct_hashes: u64,
    pub probes: u64,
    pub false_matches: u64,
}

impl CollisionReport {
    pub const CSV_HEADER: &'static str =
        "stored,distinct_hashes,probes,false_matches,rate,expected";

    pub fn rate(&self) -> f64 {
        self.false_matches as f64 / self.probes.max(1) as f64
    }

    /// Chance that a fresh prefix hits one of the stored 32-bit values.
    pub fn expected(&self) -> f64 {
        self.distinct_hashes as f64 / 4_294_967_296.0
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6e},{:.6e}",
            self.stored,
            self.distinct_hashes,
            self.probes,
            self.false_matches,
            self.rate(),
            self.expected()
        )
    }
}

fn random_prefix<R: Rng>(rng: &mut R, tag: &Component) -> Name {
    let body: [u8; 12] = rng.random();
    Name::from_components(vec![
        tag.clone(),
        Component::new(body.to_vec()).expect("non-empty"),
    ])
}

/// Stores `stored` random prefixes as 32-bit hashes, then counts how many of
/// `probes` fresh prefixes hash onto a stored value. Stored and probe names
/// live under different first components, so every match is a collision.
pub fn run_collisions(stored: u64, probes: u64, seed: u64) -> CollisionReport {
    let stored_tag = Component::new(*b"stored").expect("non-empty");
    let probe_tag = Component::new(*b"probe").expect("non-empty");

    let mut rng = trial_rng(seed, 0);
    let table: HashSet<u32> = (0..stored)
        .map(|_| {
            hash_prefix(&random_prefix(&mut rng, &stored_tag))
                .expect("non-root")
                .0
        })
        .collect();

    let mut rng = trial_rng(seed, 1);
    let false_matches = (0..probes)
        .filter(|_| {
            let h = hash_prefix(&random_prefix(&mut rng, &probe_tag)).expect("non-root");
            table.contains(&h.0)
        })
        .count() as u64;

    CollisionReport {
        stored,
        distinct_hashes: table.len() as u64,
        probes,
        false_matches,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub variant: Variant,
    pub prefixes: usize,
    pub faces: usize,
    pub interests: u64,
    /// FNV-1a over the framed interest names; identical for identical
    /// workloads.
    pub workload_checksum: u64,
    pub matched: u64,
    pub elapsed_secs: f64,
}

impl BenchReport {
    pub const CSV_HEADER: &'static str =
        "variant,prefixes,faces,interests,workload_checksum,matched,elapsed_s,lookups_per_s";

    pub fn lookups_per_sec(&self) -> f64 {
        self.interests as f64 / self.elapsed_secs.max(f64::MIN_POSITIVE)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:016x},{},{:.6},{:.0}",
            self.variant,
            self.prefixes,
            self.faces,
            self.interests,
            self.workload_checksum,
            self.matched,
            self.elapsed_secs,
            self.lookups_per_sec()
        )
    }
}

fn fnv1a(mut state: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        state ^= u64::from(b);
        state = state.wrapping_mul(0x0100_0000_01b3);
    }
    state
}

/// One FIB with `params`, then timed lookups of `interests` pre-generated
/// interests.
pub fn run_bench(
    variant: Variant,
    params: InstanceParams,
    fpp: f64,
    interests: u64,
    seed: u64,
) -> Result<BenchReport, ExperimentError> {
    let mut rng = trial_rng(seed, 0);
    let assoc = random_fib(&mut rng, &params);
    let names: Vec<Name> = assoc.iter().map(|(n, _)| n.clone()).collect();
    let mut rng = trial_rng(seed, 1);
    let workload: Vec<Name> = (0..interests)
        .map(|_| random_interest(&mut rng, &names, &params))
        .collect();
    let checksum = workload.iter().fold(0xcbf2_9ce4_8422_2325, |acc, n| {
        fnv1a(acc, FramedName::new(n).as_bytes())
    });

    let capacity = params.prefixes.div_ceil(params.faces.max(1)).max(1) as u64;
    let mut fib: Box<dyn Fib> = match variant {
        Variant::Fib => Box::new(ReferenceFib::new(params.faces)),
        Variant::FibHash => Box::new(HashFib::new(params.faces)),
        Variant::FibBf => Box::new(BloomFib::with_capacity(params.faces, capacity, fpp)?),
        Variant::FibCbf => Box::new(CountingBloomFib::with_capacity(
            params.faces,
            capacity,
            fpp,
        )?),
    };
    for (name, faces) in &assoc {
        for &f in faces {
            match fib.insert(name, f) {
                Ok(()) | Err(FibError::HashCollision { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }

    let start = Instant::now();
    let matched = workload.iter().filter(|n| fib.lookup(n).is_match()).count() as u64;
    let elapsed_secs = start.elapsed().as_secs_f64();

    Ok(BenchReport {
        variant,
        prefixes: params.prefixes,
        faces: params.faces,
        interests,
        workload_checksum: checksum,
        matched,
        elapsed_secs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_filter_has_zero_rate() {
        let r = run_fpr(Variant::FibBf, 100, 0.01, 0, 10_000, 1).unwrap();
        assert_eq!(r.hits, 0);
        assert_eq!(r.rate(), 0.0);
        assert_eq!(r.predicted, 0.0);
    }

    #[test]
    fn over_capacity_degrades() {
        let at = run_fpr(Variant::FibBf, 1000, 0.01, 1000, 200_000, 5).unwrap();
        let over = run_fpr(Variant::FibBf, 1000, 0.01, 2000, 200_000, 5).unwrap();
        assert!(over.rate() > at.rate());
        assert!(over.predicted > at.predicted);
    }

    #[test]
    fn counting_and_plain_filters_agree() {
        let a = run_fpr(Variant::FibBf, 200, 0.05, 200, 50_000, 11).unwrap();
        let b = run_fpr(Variant::FibCbf, 200, 0.05, 200, 50_000, 11).unwrap();
        assert_eq!(a.hits, b.hits);
    }

    #[test]
    fn unsupported_variants() {
        assert!(run_fpr(Variant::FibHash, 10, 0.1, 1, 1, 1).is_err());
        assert!(run_oracle(Variant::Fib, InstanceParams::default(), 0.1, 1, 1).is_err());
    }

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson_interval(10, 1000);
        assert!(lo < 0.01 && 0.01 < hi);
        assert_eq!(wilson_interval(0, 100).0, 0.0);
    }

    #[test]
    fn oracle_small_runs_are_lawful_and_deterministic() {
        let p = InstanceParams::default();
        for v in [Variant::FibHash, Variant::FibBf, Variant::FibCbf] {
            let a = run_oracle(v, p, 1e-6, 200, 3).unwrap();
            assert_eq!(a.counts.violations, 0, "{v}");
            assert_eq!(a.counts.trials, 200);
            assert_eq!(a, run_oracle(v, p, 1e-6, 200, 3).unwrap());
        }
    }

    #[test]
    fn bench_workload_is_seeded() {
        let p = InstanceParams::default();
        let a = run_bench(Variant::Fib, p, 1e-6, 2_000, 8).unwrap();
        let b = run_bench(Variant::FibHash, p, 1e-6, 2_000, 8).unwrap();
        assert_eq!(a.workload_checksum, b.workload_checksum);
        assert_eq!(a.matched, b.matched);
        assert!(a.lookups_per_sec().is_finite() && a.lookups_per_sec() > 0.0);
        let c = run_bench(Variant::Fib, p, 1e-6, 2_000, 9).unwrap();
        assert_ne!(a.workload_checksum, c.workload_checksum);
    }
}
