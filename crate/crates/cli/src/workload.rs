//! Seeded random FIB instances and interest workloads.
//!
//! Names are drawn from a fixed 16-symbol component alphabet so that random
//! prefixes share structure the way real namespaces do. Every trial gets its
//! own ChaCha stream derived from the run seed, so results do not depend on
//! trial scheduling.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ccn_fib_core::{Component, FaceId, Name};

pub const ALPHABET: [&str; 16] = [
    "a", "b", "c", "d", "ab", "cd", "ef", "gh", "abc", "def", "ghi", "jkl", "abcd", "efgh", "ijkl",
    "mnop",
];

/// RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceParams {
    pub prefixes: usize,
    pub faces: usize,
    pub max_components: usize,
    /// Chance that a prefix gets a second, random face on top of its
    /// round-robin face.
    pub extra_face_prob: f64,
    /// Chance that an interest extends a stored prefix rather than being
    /// drawn at random.
    pub hit_prob: f64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            prefixes: 50,
            faces: 10,
            max_components: 6,
            extra_face_prob: 0.0,
            hit_prob: 0.7,
        }
    }
}

pub fn random_name<R: Rng>(rng: &mut R, max_components: usize) -> Name {
    let len = rng.random_range(1..=max_components.max(1));
    (0..len).map(|_| random_component(rng)).collect()
}

fn random_component<R: Rng>(rng: &mut R) -> Component {
    let sym = ALPHABET.choose(rng).expect("non-empty alphabet");
    Component::new(sym.as_bytes()).expect("non-empty symbol")
}

/// A random FIB: distinct prefixes, each on its round-robin face
/// `i mod F + 1` plus an optional extra face.
pub fn random_fib<R: Rng>(rng: &mut R, params: &InstanceParams) -> Vec<(Name, Vec<FaceId>)> {
    let faces = params.faces.max(1);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(params.prefixes);
    // The alphabet admits far more names than any sensible N; the attempt
    // cap only guards degenerate parameters.
    let mut attempts = 0;
    while out.len() < params.prefixes && attempts < 1000 * params.prefixes.max(1) {
        attempts += 1;
        let name = random_name(rng, params.max_components);
        if !seen.insert(name.clone()) {
            continue;
        }
        let primary = out.len() % faces + 1;
        let mut assigned = vec![face(primary)];
        if rng.random_bool(params.extra_face_prob.clamp(0.0, 1.0)) {
            let extra = rng.random_range(1..=faces);
            if extra != primary {
                assigned.push(face(extra));
            }
        }
        out.push((name, assigned));
    }
    out
}

/// An interest: usually a stored prefix extended by up to two components,
/// otherwise a random name.
pub fn random_interest<R: Rng>(rng: &mut R, prefixes: &[Name], params: &InstanceParams) -> Name {
    match prefixes.choose(rng) {
        Some(base) if rng.random_bool(params.hit_prob.clamp(0.0, 1.0)) => {
            let mut name = base.clone();
            for _ in 0..rng.random_range(0..=2) {
                name.push(random_component(rng));
            }
            name
        }
        _ => random_name(rng, params.max_components),
    }
}

fn face(i: usize) -> FaceId {
    FaceId::new(i as u32).expect("faces count from 1")
}
