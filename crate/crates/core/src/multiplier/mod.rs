//! Brackets on the multiplier norm
//! `||b||_{M(d_p)} = sup_{a != 0} ||a * b||_{d_p} / ||a||_{d_p}`.
//!
//! Lower bounds are always realised by an explicit witness `a`, so each one
//! is certified. Upper bounds come from the weighted ℓ¹ triangle inequality
//! and from the d_pp ∩ ℓ¹ sufficiency estimate with an explicit constant.

mod oracle;
mod search;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::sum::{suffix_sums, CompensatedSum};
use crate::seqcore::{convolve, dp_norm, norm, Exponent, FinSeq, NormKind, NormTag};

pub use oracle::{brute_force_opnorm, ORACLE_MAX_DIM, ORACLE_MIN_SAMPLES};
pub use search::{default_probes, mult_lower_bound, mult_lower_bound_with, Probe, SearchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LowerSource {
    E0Probe,
    CanonicalProbe,
    Thm35Witness,
    RandomSearch,
    Ascent,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UpperSource {
    L1wSum,
    Thm42Constant,
    ExactEm,
    None,
}

/// `lower <= ||b||_{M(d_p)} <= upper`. `upper == None` stands for +inf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplierBounds {
    pub lower: f64,
    pub upper: Option<f64>,
    pub lower_source: LowerSource,
    pub upper_source: UpperSource,
    #[serde(rename = "witness")]
    pub lower_witness: FinSeq,
}

impl MultiplierBounds {
    pub fn is_valid(&self) -> bool {
        self.upper.is_none_or(|u| self.lower <= u * (1.0 + 1e-12))
    }
}

/// `||a * b||_{d_p} / ||a||_{d_p}`; zero for `a = 0`.
pub fn ratio(a: &FinSeq, b: &FinSeq, p: Exponent) -> f64 {
    let den = dp_norm(a, p);
    if den == 0.0 {
        return 0.0;
    }
    dp_norm(&convolve(a, b), p) / den
}

/// Phase-reversed witness for the ℓ¹ necessity argument at block `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm35Witness {
    pub n: u32,
    pub witness: FinSeq,
    /// `||a * b||_{d_p} / ||a||_{d_p}` actually achieved.
    pub ratio: f64,
    /// `2^{n/p} (sum_{j <= 2^n} |b_j|) / (2^n + 1)^{1/p}`, which `ratio` dominates.
    pub guaranteed: f64,
}

/// Builds `a_{2^n - j} = |b_j| / b_j` for `0 <= j <= 2^n` (zero where `b_j = 0`),
/// which aligns every phase in `(a * b)_{2^n} = sum_{j <= 2^n} |b_j|`.
pub fn thm35_witness(b: &FinSeq, n: u32, p: Exponent) -> Result<Thm35Witness> {
    let start = b.support_start().ok_or(Error::ZeroSymbol)?;
    if n >= 40 {
        return Err(Error::InvalidParameter(format!("block index {n} too large")));
    }
    let m = 1usize << n;
    if m < start {
        return Err(Error::WitnessBelowSupport { n, start });
    }
    let mut coeffs = vec![Complex64::default(); m + 1];
    let mut l1 = CompensatedSum::new();
    for j in 0..=m.min(b.len().saturating_sub(1)) {
        let bj = b.get(j);
        let r = bj.norm();
        if r > 0.0 {
            // adding +0 turns the -0 imaginary part of a real conjugate into +0
            coeffs[m - j] = bj.conj() / r + Complex64::default();
            l1.add(r);
        }
    }
    let witness = FinSeq::new(coeffs)?;
    let ratio = ratio(&witness, b, p);
    let mf = m as f64;
    let guaranteed = (mf / (mf + 1.0)).powf(p.inv()) * l1.value();
    Ok(Thm35Witness { n, witness, ratio, guaranteed })
}

/// Smallest `n` with `2^n >= max(len, 1)` for the support length of `b`.
pub fn covering_block(b: &FinSeq) -> u32 {
    let len = b.support_len().max(1);
    len.next_power_of_two().trailing_zeros()
}

/// `sum_n |b_n| (n+1)^{1/p}`, the triangle inequality over `b = sum b_n e_n`
/// with `||e_n||_{M(d_p)} = (n+1)^{1/p}`.
pub fn mult_upper_bound_l1w(b: &FinSeq, p: Exponent) -> f64 {
    norm(b, NormKind::new(NormTag::L1w, p).expect("l1w accepts every exponent"))
}

/// Constant `K` in `||b * a||_{d_p} <= K ||a||_{d_p} max(||b||_1, ||b||_{d_pp})`, p > 1.
///
/// With `B(x) = sum_n 2^n sup_{[2^n, 2^{n+1})} |x_k|^p` and `x = a * b`:
///
/// * `||x||_{d_p} <= sup|x| + 2^{1/p} B(x)^{1/p}` (condensation on the majorant),
/// * `sup|x| <= ||b||_1 ||a||_{d_p}`,
/// * splitting `(a*b)_k` at `j = k/2` and Minkowski:
///   `B(x)^{1/p} <= ||b||_1 (3 B(a))^{1/p} + (1 + 2^p)^{1/p} ||a||_{d_p} ||b||_{d_pp}`,
///   where the head part uses the neighbouring-block overlap (factor 3) and the
///   tail part uses Hölder on `sum_{i < 2^n} |a_i|` and the overlap of the
///   `2^{np}`-weighted blocks `(2^{n-1}, 2^{n+1})` (factor `1 + 2^p`),
/// * `B(a) <= 2 ||a||_{d_p}^p`.
///
/// Hence `K = 1 + 2^{1/p} (6^{1/p} + (1 + 2^p)^{1/p})`.
pub fn thm42_constant(p: Exponent) -> Result<f64> {
    if p.is_one() {
        return Err(Error::NeedsPAboveOne(p.p()));
    }
    let ip = p.inv();
    Ok(1.0 + 2f64.powf(ip) * (6f64.powf(ip) + (1.0 + 2f64.powf(p.p())).powf(ip)))
}

/// `K max(||b||_1, ||b||_{d_pp})` with [`thm42_constant`].
pub fn mult_upper_bound_thm42(b: &FinSeq, p: Exponent) -> Result<f64> {
    let k = thm42_constant(p)?;
    let dpp = norm(b, NormKind::new(NormTag::Dpp, p)?);
    Ok(k * b.l1().max(dpp))
}

/// Best available certified upper bound and its provenance.
pub fn best_upper_bound(b: &FinSeq, p: Exponent) -> (Option<f64>, UpperSource) {
    let l1w = mult_upper_bound_l1w(b, p);
    let mut best = (l1w, UpperSource::L1wSum);
    if let Ok(t) = mult_upper_bound_thm42(b, p) {
        if t < best.0 {
            best = (t, UpperSource::Thm42Constant);
        }
    }
    // c e_m has norm |c| (m+1)^{1/p} exactly
    if let Some(m) = b.support_start() {
        if b.support_len() == m + 1 {
            return (Some(b.get(m).norm() * ((m + 1) as f64).powf(p.inv())), UpperSource::ExactEm);
        }
    }
    (Some(best.0), best.1)
}

/// Running partial sums of
/// `sum_n 2^n sup_{2^n <= k < 2^{n+1}} |sum_{k/2 < j <= k} b_j a_{k-j}|^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm41Report {
    pub partial_sums: Vec<f64>,
    /// Block terms `2^n sup |...|^p`, before summation.
    pub terms: Vec<f64>,
    pub probe: FinSeq,
    pub p: Exponent,
}

impl Thm41Report {
    /// `partial_sums[n] - partial_sums[n-1]`, taken from the unsummed terms.
    pub fn increments(&self) -> &[f64] {
        &self.terms
    }
}

impl Serialize for Thm41Report {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.partial_sums.serialize(s)
    }
}

/// Block terms of the functional, exactly from the finite supports.
pub fn thm41_terms(b: &FinSeq, a: &FinSeq, p: Exponent, n_max: u32) -> Vec<f64> {
    let last = (a.len() + b.len()).saturating_sub(2);
    (0..=n_max)
        .map(|n| {
            if n >= 63 || (1usize << n) > last {
                return 0.0;
            }
            let lo = 1usize << n;
            let hi = (lo << 1).min(last + 1);
            let sup = (lo..hi)
                .map(|k| {
                    let inner: Complex64 = (k / 2 + 1..=k.min(b.len() - 1))
                        .filter(|&j| k - j < a.len())
                        .map(|j| b.get(j) * a.get(k - j))
                        .sum();
                    inner.norm()
                })
                .fold(0.0, f64::max);
            (lo as f64) * sup.powf(p.p())
        })
        .collect()
}

pub fn thm41_functional(b: &FinSeq, a: &FinSeq, p: Exponent, n_max: u32) -> Thm41Report {
    let terms = if a.is_empty() || b.is_empty() {
        vec![0.0; n_max as usize + 1]
    } else {
        thm41_terms(b, a, p, n_max)
    };
    let mut acc = CompensatedSum::new();
    let partial_sums = terms
        .iter()
        .map(|&t| {
            acc.add(t);
            acc.value()
        })
        .collect();
    Thm41Report { partial_sums, terms, probe: a.clone(), p }
}

/// Certified ceiling for the functional:
/// `(2^{1/p} ||a*b||_{d_p} + 6^{1/p} ||b||_1 ||a||_{d_p})^p`.
pub fn thm41_ceiling(b: &FinSeq, a: &FinSeq, p: Exponent) -> f64 {
    let ip = p.inv();
    let ab = dp_norm(&convolve(a, b), p);
    (2f64.powf(ip) * ab + 6f64.powf(ip) * b.l1() * dp_norm(a, p)).powf(p.p())
}

/// Upper bound on `||T_b - sum_{j <= n} b_j S^j||`: the weighted ℓ¹ norm of the tail.
pub fn taylor_tail_bound(b: &FinSeq, p: Exponent, n: usize) -> f64 {
    mult_upper_bound_l1w(&b.tail_after(n), p)
}

/// [`taylor_tail_bound`] for every `n < len(b)` via one backward suffix scan.
pub fn taylor_tail_table(b: &FinSeq, p: Exponent) -> Vec<f64> {
    let ip = p.inv();
    let weighted: Vec<f64> = b
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| ((n + 1) as f64).powf(ip) * c.norm())
        .collect();
    let s = suffix_sums(&weighted);
    (0..b.len()).map(|n| s[n + 1]).collect()
}

pub type Matrix = Vec<Vec<Complex64>>;

/// `dim x dim` finite section of `T_b`: lower triangular Toeplitz, `M[i][j] = b_{i-j}`.
pub fn toeplitz_section(b: &FinSeq, dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i >= j { b.get(i - j) } else { Complex64::default() }).collect())
        .collect()
}

pub fn mat_mul(x: &Matrix, y: &Matrix) -> Matrix {
    let n = x.len();
    let m = y.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..y.len()).map(|k| x[i][k] * y[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Largest entry of `T_b S - S T_b` on the finite section.
///
/// Sections of lower triangular Toeplitz operators only see indices below the
/// cut, so the whole block is unaffected by truncation.
pub fn shift_commutator_defect(b: &FinSeq, dim: usize) -> f64 {
    let t = toeplitz_section(b, dim);
    let s = toeplitz_section(&FinSeq::from_real(&[0.0, 1.0]).expect("finite"), dim);
    let ts = mat_mul(&t, &s);
    let st = mat_mul(&s, &t);
    ts.iter()
        .flatten()
        .zip(st.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::canonical;
    use approx::assert_relative_eq;

    fn real(v: &[f64]) -> FinSeq {
        FinSeq::from_real(v).unwrap()
    }

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn witness_for_positive_symbol_at_block_zero() {
        let b = real(&[2.0, 3.0, 1.0]);
        for p in [1.0, 2.0, 3.0] {
            let w = thm35_witness(&b, 0, exp(p)).unwrap();
            assert_eq!(w.witness, real(&[1.0, 1.0]));
            assert!(w.ratio >= (2.0 + 3.0) / 2f64.powf(1.0 / p) - 1e-12);
            assert!(w.ratio >= w.guaranteed - 1e-12);
        }
    }

    #[test]
    fn witness_for_identity_symbol() {
        // e_0 is the identity: ratio exactly 1, guaranteed value strictly below 1
        let e0 = canonical(0, 1).unwrap();
        for n in 0..6 {
            let w = thm35_witness(&e0, n, exp(2.0)).unwrap();
            assert_eq!(w.ratio, 1.0);
            let m = (1u64 << n) as f64;
            assert_relative_eq!(w.guaranteed, (m / (m + 1.0)).sqrt(), max_relative = 1e-15);
            assert!(w.guaranteed < 1.0);
        }
    }

    #[test]
    fn witness_aligns_complex_phases() {
        let b = FinSeq::new(vec![Complex64::new(0.0, 1.0), Complex64::new(-1.0, 1.0), Complex64::new(0.5, 0.0)]).unwrap();
        let w = thm35_witness(&b, 2, exp(1.5)).unwrap();
        let conv = convolve(&w.witness, &b);
        assert_relative_eq!(conv.get(4).re, b.l1(), max_relative = 1e-14);
        assert!(conv.get(4).im.abs() < 1e-14);
        assert!(w.ratio >= w.guaranteed - 1e-12);
    }

    #[test]
    fn witness_rejects_block_below_support() {
        let b = canonical(5, 6).unwrap();
        assert!(matches!(thm35_witness(&b, 2, exp(2.0)), Err(Error::WitnessBelowSupport { n: 2, start: 5 })));
        assert!(thm35_witness(&b, 3, exp(2.0)).is_ok());
        assert!(matches!(thm35_witness(&FinSeq::zeros(3), 1, exp(2.0)), Err(Error::ZeroSymbol)));
    }

    #[test]
    fn l1w_upper_bound_examples() {
        for m in [0usize, 1, 4, 9] {
            for p in [1.0, 2.0, 3.0] {
                let e = canonical(m, m + 1).unwrap();
                assert_relative_eq!(mult_upper_bound_l1w(&e, exp(p)), ((m + 1) as f64).powf(1.0 / p), max_relative = 1e-15);
            }
        }
        assert_eq!(mult_upper_bound_l1w(&real(&[1.0, 1.0]), exp(1.0)), 3.0);
    }

    #[test]
    fn thm42_needs_p_above_one() {
        assert!(matches!(mult_upper_bound_thm42(&real(&[1.0]), exp(1.0)), Err(Error::NeedsPAboveOne(_))));
        let k = thm42_constant(exp(2.0)).unwrap();
        assert_relative_eq!(k, 1.0 + 2f64.sqrt() * (6f64.sqrt() + 5f64.sqrt()), max_relative = 1e-15);
        // e_0: max(||e_0||_1, ||e_0||_{d_pp}) = 1
        assert_relative_eq!(mult_upper_bound_thm42(&real(&[1.0]), exp(2.0)).unwrap(), k);
        assert!(k >= 1.0);
    }

    #[test]
    fn thm42_bound_on_truncated_sparse_family() {
        // b_{2^k} = 2^{-k} for k <= 10: finite bound for the truncation
        let mut v = vec![0.0; 1025];
        for k in 0..=10 {
            v[1 << k] = 0.5f64.powi(k);
        }
        let b = real(&v);
        let p = exp(2.0);
        let ub = mult_upper_bound_thm42(&b, p).unwrap();
        assert!(ub.is_finite());
        // d_pp norm^p grows linearly with the number of blocks kept: 1 + 11
        let dpp = norm(&b, NormKind::new(NormTag::Dpp, p).unwrap());
        assert_relative_eq!(dpp * dpp, 12.0, max_relative = 1e-14);
    }

    #[test]
    fn upper_bound_exact_on_scaled_canonicals() {
        let b = canonical(3, 4).unwrap().scale(Complex64::new(0.0, -2.0));
        let (u, src) = best_upper_bound(&b, exp(2.0));
        assert_eq!(src, UpperSource::ExactEm);
        assert_relative_eq!(u.unwrap(), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn thm41_identity_symbol_is_zero() {
        let e0 = canonical(0, 1).unwrap();
        let a = real(&[1.0, -2.0, 0.5, 3.0, 1.0, 1.0, 2.0]);
        let r = thm41_functional(&e0, &a, exp(2.0), 8);
        assert!(r.partial_sums.iter().all(|&s| s == 0.0));
        assert_eq!(r.partial_sums.len(), 9);
    }

    #[test]
    fn thm41_sparse_symbol_increments() {
        let mut v = vec![0.0; 1025];
        for k in 0..=10 {
            v[1 << k] = 0.5f64.powi(k);
        }
        let b = real(&v);
        let a = canonical(0, 1).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let r = thm41_functional(&b, &a, exp(p), 10);
            for (n, &inc) in r.increments().iter().enumerate() {
                let expect = 2f64.powi(n as i32) * 0.5f64.powi(n as i32).powf(p);
                assert_relative_eq!(inc, expect, max_relative = 1e-12);
            }
            assert!(r.partial_sums.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn taylor_tail_examples() {
        let b = real(&[1.0, 0.5, 0.25, 0.125]);
        let p = exp(2.0);
        assert_eq!(taylor_tail_bound(&b, p, 3), 0.0);
        assert_eq!(taylor_tail_bound(&b, p, 10), 0.0);
        let e = canonical(4, 5).unwrap();
        assert_relative_eq!(taylor_tail_bound(&e, p, 3), 5f64.sqrt(), max_relative = 1e-15);
        let table = taylor_tail_table(&b, p);
        for (n, &t) in table.iter().enumerate() {
            assert_relative_eq!(t, taylor_tail_bound(&b, p, n), max_relative = 1e-14);
        }
    }

    #[test]
    fn sections_commute_with_shift() {
        let b = real(&[3.0, -1.0, 4.0, 1.0, -5.0, 9.0]);
        assert_eq!(shift_commutator_defect(&b, 12), 0.0);
        let s = toeplitz_section(&canonical(1, 2).unwrap(), 3);
        assert_eq!(s[1][0], Complex64::new(1.0, 0.0));
        assert_eq!(s[0][1], Complex64::new(0.0, 0.0));
    }
}
