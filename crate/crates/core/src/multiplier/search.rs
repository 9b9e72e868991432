//! Certified lower bounds by probing and deterministic ascent.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{best_upper_bound, ratio, thm35_witness, LowerSource, MultiplierBounds};
use crate::error::{Error, Result};
use crate::seqcore::{canonical, Exponent, FinSeq};

/// Number of ascent starts that receive budget.
const ASCENT_STARTS: usize = 6;
const RANDOM_PROBES: usize = 16;
const RANDOM_STARTS: usize = 32;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub seq: FinSeq,
    pub source: LowerSource,
}

impl Probe {
    pub fn new(seq: FinSeq, source: LowerSource) -> Self {
        Self { seq, source }
    }
}

impl From<FinSeq> for Probe {
    /// Canonical vectors are labelled as such, everything else as a search probe.
    fn from(seq: FinSeq) -> Self {
        let source = match seq.support_start() {
            Some(0) if seq.support_len() == 1 => LowerSource::E0Probe,
            Some(m) if seq.support_len() == m + 1 => LowerSource::CanonicalProbe,
            _ => LowerSource::RandomSearch,
        };
        Self { seq, source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchOptions {
    /// Also randomise phases of search vectors (real otherwise).
    pub complex_phases: bool,
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize, complex: bool) -> Vec<Complex64> {
    (0..dim)
        .map(|_| {
            let r = rng.random_range(0.1..1.0);
            if complex {
                Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
            } else if rng.random_bool(0.5) {
                Complex64::new(r, 0.0)
            } else {
                Complex64::new(-r, 0.0)
            }
        })
        .collect()
}

fn to_seq(v: Vec<Complex64>) -> FinSeq {
    FinSeq::new(v).expect("search vectors are finite")
}

/// `e_0..e_8`, block witnesses for `2^n <= 256` and seeded random vectors.
pub fn default_probes(b: &FinSeq, p: Exponent, seed: u64, opts: SearchOptions) -> Vec<Probe> {
    let mut probes: Vec<Probe> = (0..=8)
        .map(|k| Probe::from(canonical(k, k + 1).expect("in range")))
        .collect();
    for n in 0..=8 {
        if let Ok(w) = thm35_witness(b, n, p) {
            probes.push(Probe::new(w.witness, LowerSource::Thm35Witness));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..RANDOM_PROBES {
        let dim = 1 + i % 8;
        probes.push(Probe::new(to_seq(random_vector(&mut rng, dim, opts.complex_phases)), LowerSource::RandomSearch));
    }
    probes
}

/// Ascent start points; they depend only on `(b, seed, opts)`.
fn ascent_starts(b: &FinSeq, seed: u64, opts: SearchOptions) -> Vec<Vec<Complex64>> {
    let mut starts = Vec::new();
    for dim in 1..=6usize {
        for mask in 0..1u32 << (dim - 1) {
            starts.push(
                (0..dim)
                    .map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { Complex64::new(-1.0, 0.0) } else { Complex64::new(1.0, 0.0) })
                    .collect(),
            );
        }
    }
    // phase-reversed b, the finite-dimensional Cauchy-Schwarz candidate
    let head: Vec<Complex64> = b.coeffs().iter().take(8).rev().map(|c| c.conj()).collect();
    if head.iter().any(|c| c.norm() > 0.0) {
        starts.push(head);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for i in 0..RANDOM_STARTS {
        starts.push(random_vector(&mut rng, 2 + i % 7, opts.complex_phases));
    }
    starts
}

/// Coordinate ascent with multiplicative steps; each coordinate keeps its own
/// step, halved after a failed pair of trials. Zero coordinates move
/// additively by `step * max|x|`. Stops after `budget` ratio evaluations.
fn ascend(b: &FinSeq, p: Exponent, start: Vec<Complex64>, budget: usize, complex: bool) -> (f64, FinSeq) {
    let mut x = start;
    x.push(Complex64::default());
    let dim = x.len();
    let mut best = ratio(&to_seq(x.clone()), b, p);
    let mut steps = vec![0.5f64; dim];
    let mut phase_steps = vec![0.5f64; dim];
    let mut used = 0usize;
    let mut i = 0usize;
    while used < budget {
        if steps.iter().chain(if complex { &phase_steps[..] } else { &[][..] }).all(|&s| s < MIN_STEP) {
            break;
        }
        let coord = i % dim;
        let rotate = complex && (i / dim) % 2 == 1;
        i += 1;
        let step = if rotate { phase_steps[coord] } else { steps[coord] };
        if step < MIN_STEP {
            continue;
        }
        let scale = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut improved = false;
        for sign in [1.0, -1.0] {
            if used >= budget {
                break;
            }
            let mut trial = x.clone();
            let c = trial[coord];
            trial[coord] = if rotate {
                c * Complex64::from_polar(1.0, sign * step * std::f64::consts::PI)
            } else if c.norm() == 0.0 {
                Complex64::new(sign * step * scale, 0.0)
            } else {
                c * (1.0 + sign * step)
            };
            used += 1;
            let r = ratio(&to_seq(trial.clone()), b, p);
            if r > best {
                best = r;
                x = trial;
                improved = true;
                break;
            }
        }
        if !improved {
            if rotate {
                phase_steps[coord] *= 0.5;
            } else {
                steps[coord] *= 0.5;
            }
        }
    }
    (best, to_seq(x))
}

/// [`mult_lower_bound_with`] with real search vectors.
pub fn mult_lower_bound(b: &FinSeq, p: Exponent, probes: &[Probe], budget: usize, seed: u64) -> Result<MultiplierBounds> {
    mult_lower_bound_with(b, p, probes, budget, seed, SearchOptions::default())
}

/// Certified bracket for `||b||_{M(d_p)}`.
///
/// The lower bound is the best ratio over `probes` and over `budget` ascent
/// evaluations from internal starts. Starts depend only on `(b, seed)` and
/// each ascent is a prefix of the one with more budget, so the result is
/// monotone in both the probe set and the budget.
pub fn mult_lower_bound_with(
    b: &FinSeq,
    p: Exponent,
    probes: &[Probe],
    budget: usize,
    seed: u64,
    opts: SearchOptions,
) -> Result<MultiplierBounds> {
    if probes.is_empty() {
        return Err(Error::EmptyProbes);
    }
    if b.is_zero() {
        return Err(Error::ZeroSymbol);
    }
    let scored: Vec<(f64, usize)> = probes
        .par_iter()
        .enumerate()
        .map(|(i, pr)| (ratio(&pr.seq, b, p), i))
        .collect();
    let (mut lower, idx) = argmax(&scored);
    let mut witness = probes[idx].seq.clone();
    let mut source = probes[idx].source;

    if budget > 0 {
        let starts = ascent_starts(b, seed, opts);
        let mut ranked: Vec<(f64, usize)> = starts
            .par_iter()
            .enumerate()
            .map(|(i, s)| (ratio(&to_seq(s.clone()), b, p), i))
            .collect();
        ranked.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        let m = ASCENT_STARTS.min(ranked.len());
        let share = budget / m;
        let extra = budget % m;
        let results: Vec<(f64, FinSeq)> = ranked[..m]
            .par_iter()
            .enumerate()
            .map(|(k, &(_, i))| ascend(b, p, starts[i].clone(), share + usize::from(k < extra), opts.complex_phases))
            .collect();
        for (r, w) in results {
            if r > lower {
                lower = r;
                witness = w;
                source = super::LowerSource::Ascent;
            }
        }
    }

    let (upper, upper_source) = best_upper_bound(b, p);
    Ok(MultiplierBounds { lower, upper, lower_source: source, upper_source, lower_witness: witness })
}

/// Largest value, first index on ties.
fn argmax(scored: &[(f64, usize)]) -> (f64, usize) {
    scored
        .iter()
        .copied()
        .fold((f64::NEG_INFINITY, usize::MAX), |acc, x| if x.0 > acc.0 { x } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn canonical_symbol_is_exact() {
        let p = exp(2.0);
        let b = canonical(5, 6).unwrap();
        let bounds = mult_lower_bound(&b, p, &default_probes(&b, p, 0, SearchOptions::default()), 200, 0).unwrap();
        assert_relative_eq!(bounds.lower, 6f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(bounds.upper.unwrap(), 6f64.sqrt(), max_relative = 1e-14);
        assert_eq!(bounds.lower_source, LowerSource::E0Probe);
    }

    #[test]
    fn rejects_empty_and_zero() {
        let p = exp(2.0);
        let b = FinSeq::from_real(&[1.0]).unwrap();
        assert!(matches!(mult_lower_bound(&b, p, &[], 10, 0), Err(Error::EmptyProbes)));
        let probes = vec![Probe::from(canonical(0, 1).unwrap())];
        assert!(matches!(mult_lower_bound(&FinSeq::zeros(2), p, &probes, 10, 0), Err(Error::ZeroSymbol)));
    }

    #[test]
    fn ascent_improves_on_probes() {
        let p = exp(2.0);
        let b = FinSeq::from_real(&[1.0, -1.0]).unwrap();
        let probes = vec![Probe::from(canonical(0, 1).unwrap())];
        let base = mult_lower_bound(&b, p, &probes, 0, 1).unwrap();
        let searched = mult_lower_bound(&b, p, &probes, 2000, 1).unwrap();
        assert!(searched.lower >= base.lower);
        assert!(searched.lower > 1.0);
        assert!(searched.is_valid());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = exp(1.5);
        let b = FinSeq::from_real(&[0.3, -1.0, 0.7, 0.2]).unwrap();
        let probes = default_probes(&b, p, 7, SearchOptions::default());
        let x = mult_lower_bound(&b, p, &probes, 500, 7).unwrap();
        let y = mult_lower_bound(&b, p, &probes, 500, 7).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn complex_phases_flag() {
        let p = exp(2.0);
        let b = FinSeq::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        let opts = SearchOptions { complex_phases: true };
        let probes = default_probes(&b, p, 3, opts);
        let r = mult_lower_bound_with(&b, p, &probes, 400, 3, opts).unwrap();
        assert!(r.is_valid());
        assert!(r.lower >= 1.0);
    }
}
