#![allow(dead_code)]

use fmchow::{large_from_weights, LargeFamily, Weights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIZES: [(u32, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (3, 2)];

#[derive(Clone, Debug)]
pub struct Instance {
    pub d: u32,
    pub n: usize,
    pub label: String,
    pub weights: Vec<String>,
    pub family: LargeFamily,
}

/// Rationals `p/q` with `q <= 6`, drawn from a stream seeded by `(d, n, k)`.
pub fn random_weights(d: u32, n: usize, k: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 * d as u64 + 10 * n as u64 + k);
    (0..n)
        .map(|_| {
            let q: u32 = rng.gen_range(1..=6);
            let p: u32 = rng.gen_range(0..=q);
            format!("{p}/{q}")
        })
        .collect()
}

pub fn weight_vectors(d: u32, n: usize) -> Vec<(String, Vec<String>)> {
    let half: Vec<String> = std::iter::once("1".to_string())
        .chain(std::iter::repeat_n("1/2".to_string(), n - 1))
        .collect();
    vec![
        ("ones".into(), vec!["1".into(); n]),
        ("half".into(), half),
        ("zeros".into(), vec!["0".into(); n]),
        ("random1".into(), random_weights(d, n, 1)),
        ("random2".into(), random_weights(d, n, 2)),
    ]
}

/// The full test matrix of sizes and weight vectors.
pub fn matrix() -> Vec<Instance> {
    let mut out = Vec::new();
    for (d, n) in SIZES {
        for (label, weights) in weight_vectors(d, n) {
            let family = large_from_weights(&Weights::parse(&weights).unwrap());
            out.push(Instance {
                d,
                n,
                label,
                weights,
                family,
            });
        }
    }
    out
}

pub fn describe(i: &Instance) -> String {
    format!(
        "d={} n={} {}({}) |L|={}",
        i.d,
        i.n,
        i.label,
        i.weights.join(","),
        i.family.len()
    )
}
