//! Brute-force estimate of the multiplier norm over low-dimensional inputs.
//!
//! Independent of the ascent in `search`: plain random sampling followed by
//! random perturbation of the best samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ratio;
use crate::error::{Error, Result};
use crate::seqcore::{Exponent, FinSeq};

pub const ORACLE_MAX_DIM: usize = 6;
pub const ORACLE_MIN_SAMPLES: usize = 100_000;

const BATCH: usize = 4096;
const KEEP: usize = 8;
const REFINE_ITERS: usize = 3000;

fn sample(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                if rng.random_bool(0.25) {
                    0.0
                } else {
                    let m: f64 = rng.random_range(0.0..1.0);
                    if rng.random_bool(0.5) { m } else { -m }
                }
            })
            .collect();
        if v.iter().any(|&x| x != 0.0) {
            return v;
        }
    }
}

fn eval(v: &[f64], b: &FinSeq, p: Exponent) -> f64 {
    ratio(&FinSeq::from_real(v).expect("finite"), b, p)
}

fn refine(start: Vec<f64>, b: &FinSeq, p: Exponent, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = start;
    let mut best = eval(&x, b, p);
    let mut sigma = 0.1 * x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut fails = 0;
    for _ in 0..REFINE_ITERS {
        let trial: Vec<f64> = x.iter().map(|&v| v + sigma * rng.random_range(-1.0..1.0)).collect();
        let r = eval(&trial, b, p);
        if r > best {
            best = r;
            x = trial;
            fails = 0;
        } else {
            fails += 1;
            if fails == 50 {
                sigma *= 0.5;
                fails = 0;
            }
        }
    }
    best
}

/// Best ratio found over real inputs supported on `0..dim`.
///
/// Requires `dim <= 6` and `samples >= 1e5`; deterministic for fixed `seed`
/// regardless of the thread count.
pub fn brute_force_opnorm(b: &FinSeq, p: Exponent, dim: usize, samples: usize, seed: u64) -> Result<f64> {
    if dim == 0 || dim > ORACLE_MAX_DIM {
        return Err(Error::OracleDimension(dim));
    }
    if samples < ORACLE_MIN_SAMPLES {
        return Err(Error::OracleSamples(samples));
    }
    let batches = samples.div_ceil(BATCH);
    let mut top: Vec<(f64, usize, Vec<f64>)> = (0..batches)
        .into_par_iter()
        .flat_map_iter(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ batch as u64);
            let n = BATCH.min(samples - batch * BATCH);
            let mut local: Vec<(f64, usize, Vec<f64>)> = (0..n)
                .map(|i| {
                    let v = sample(&mut rng, dim);
                    (eval(&v, b, p), batch * BATCH + i, v)
                })
                .collect();
            local.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            local.truncate(KEEP);
            local
        })
        .collect();
    top.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    top.truncate(KEEP);
    let refined: Vec<f64> = top
        .into_par_iter()
        .map(|(r, i, v)| r.max(refine(v, b, p, seed ^ i as u64)))
        .collect();
    Ok(refined.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::canonical;

    #[test]
    fn guards() {
        let b = canonical(0, 1).unwrap();
        let p = Exponent::new(2.0).unwrap();
        assert!(matches!(brute_force_opnorm(&b, p, 7, 100_000, 0), Err(Error::OracleDimension(7))));
        assert!(matches!(brute_force_opnorm(&b, p, 3, 99_999, 0), Err(Error::OracleSamples(_))));
    }

    #[test]
    fn canonical_symbol_value() {
        let b = canonical(2, 3).unwrap();
        let p = Exponent::new(2.0).unwrap();
        let v = brute_force_opnorm(&b, p, 3, 100_000, 5).unwrap();
        assert!(v <= 3f64.sqrt() * (1.0 + 1e-12));
        assert!(v >= 3f64.sqrt() * (1.0 - 1e-3));
    }
}
