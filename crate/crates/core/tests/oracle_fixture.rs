//! Frozen brute-force oracle values used by the lower-bound quality check.
//!
//! Regenerate with `cargo test --test oracle_fixture -- --ignored`.

use std::path::PathBuf;

use dpmult::multiplier::{brute_force_opnorm, mult_upper_bound_l1w};
use dpmult::{Exponent, FinSeq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const DIM: usize = 4;
const SAMPLES: usize = 1_000_000;

#[derive(Serialize, Deserialize)]
struct Entry {
    p: f64,
    b: FinSeq,
    dim: usize,
    samples: usize,
    seed: u64,
    oracle: f64,
}

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/oracle.json")
}

fn symbols() -> Vec<(f64, Vec<f64>)> {
    let mut out = vec![
        (1.0, vec![1.0, 1.0]),
        (2.0, vec![1.0, 1.0]),
        (2.0, vec![1.0, -1.0]),
        (1.5, vec![1.0, -1.0]),
        (2.0, vec![0.0, 1.0, 1.0]),
        (3.0, vec![1.0, 0.5, 0.25]),
        (2.0, vec![1.0, -2.0, 1.0]),
        (1.5, vec![0.3, -1.0, 0.7, 0.2]),
    ];
    let ps = [1.0, 1.5, 2.0, 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..12 {
        let len = rng.random_range(2..=8);
        let b = (0..len)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    (rng.random_range(-1.0f64..1.0) * 1e4).round() / 1e4
                }
            })
            .collect();
        out.push((ps[i % 4], b));
    }
    out
}

fn load() -> Vec<Entry> {
    serde_json::from_str(&std::fs::read_to_string(fixture_path()).unwrap()).unwrap()
}

#[test]
#[ignore]
fn regenerate() {
    let entries: Vec<Entry> = symbols()
        .into_iter()
        .enumerate()
        .map(|(i, (p, b))| {
            let b = FinSeq::from_real(&b).unwrap();
            let seed = 1000 + i as u64;
            let oracle = brute_force_opnorm(&b, Exponent::new(p).unwrap(), DIM, SAMPLES, seed).unwrap();
            Entry { p, b, dim: DIM, samples: SAMPLES, seed, oracle }
        })
        .collect();
    std::fs::write(fixture_path(), serde_json::to_string_pretty(&entries).unwrap() + "\n").unwrap();
}

#[test]
fn fixture_is_consistent() {
    let entries = load();
    assert_eq!(entries.len(), 20);
    for e in &entries {
        let p = Exponent::new(e.p).unwrap();
        assert!(e.oracle > 0.0);
        assert!(e.oracle <= mult_upper_bound_l1w(&e.b, p) * (1.0 + 1e-12));
        assert!(e.oracle >= dpmult::norm(&e.b, dpmult::NormKind::dp(p)) - 1e-12);
    }
}

#[test]
fn fixture_reproduces() {
    let e = &load()[0];
    let v = brute_force_opnorm(&e.b, Exponent::new(e.p).unwrap(), e.dim, e.samples, e.seed).unwrap();
    assert_eq!(v, e.oracle);
}
