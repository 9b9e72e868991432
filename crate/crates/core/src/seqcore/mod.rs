//! Finite complex sequences and the norms of the d_p family.
//!
//! Every object here is finitely supported, so the d_p, d_pp, ces and weighted
//! norms are exact finite computations: all tail suprema past the stored
//! length vanish. Infinite sequences live in [`crate::families`] as symbols.

mod io;
pub mod sum;

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use sum::{compensated_sum, CompensatedSum};

pub use io::{parse_inline, read_seq_arg};

/// Lengths at or above this switch [`convolve`] to the tiled kernel.
pub const BLOCKED_THRESHOLD: usize = 4096;
const TILE: usize = 256;

/// Finitely supported complex sequence `(a_0, ..., a_{len-1}, 0, 0, ...)`.
///
/// Trailing zeros are allowed and ignored by equality.
#[derive(Clone, Debug, Default)]
pub struct FinSeq {
    coeffs: Vec<Complex64>,
}

impl FinSeq {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient `n`, zero past the stored length.
    pub fn get(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Index of the first nonzero coefficient.
    pub fn support_start(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.re != 0.0 || c.im != 0.0)
    }

    /// Length with trailing zeros removed.
    pub fn support_len(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.re != 0.0 || c.im != 0.0)
            .map_or(0, |i| i + 1)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn padded(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < len {
            coeffs.resize(len, Complex64::default());
        }
        Self { coeffs }
    }

    /// Keeps indices `< len`.
    pub fn truncated(&self, len: usize) -> Self {
        Self { coeffs: self.coeffs.iter().take(len).copied().collect() }
    }

    /// `a - sum_{j <= n} a_j e_j`: zeroes indices `0..=n`, keeps the rest in place.
    pub fn tail_after(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        for c in coeffs.iter_mut().take(n.saturating_add(1)) {
            *c = Complex64::default();
        }
        Self { coeffs }
    }

    pub fn sup_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1(&self) -> f64 {
        compensated_sum(self.coeffs.iter().map(|c| c.norm()))
    }
}

impl PartialEq for FinSeq {
    fn eq(&self, other: &Self) -> bool {
        let n = self.len().max(other.len());
        (0..n).all(|i| self.get(i) == other.get(i))
    }
}

impl fmt::Display for FinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "{}", c)?;
            }
        }
        write!(f, ")")
    }
}

fn zip_pad(a: &FinSeq, b: &FinSeq, op: impl Fn(Complex64, Complex64) -> Complex64) -> FinSeq {
    let n = a.len().max(b.len());
    FinSeq { coeffs: (0..n).map(|i| op(a.get(i), b.get(i))).collect() }
}

impl Add for &FinSeq {
    type Output = FinSeq;
    fn add(self, rhs: &FinSeq) -> FinSeq {
        zip_pad(self, rhs, |x, y| x + y)
    }
}

impl Sub for &FinSeq {
    type Output = FinSeq;
    fn sub(self, rhs: &FinSeq) -> FinSeq {
        zip_pad(self, rhs, |x, y| x - y)
    }
}

impl Neg for &FinSeq {
    type Output = FinSeq;
    fn neg(self) -> FinSeq {
        FinSeq { coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

/// Conjugate index of an exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conjugate {
    Finite(f64),
    Infinite,
}

impl Conjugate {
    pub fn finite(self) -> Option<f64> {
        match self {
            Conjugate::Finite(q) => Some(q),
            Conjugate::Infinite => None,
        }
    }
}

/// Exact rational form of `x` when it is a dyadic fraction with denominator `<= 2^20`.
fn dyadic_ratio(x: f64) -> Option<Ratio<i64>> {
    let mut den = 1i64;
    while den <= 1 << 20 {
        let scaled = x * den as f64;
        if scaled.fract() == 0.0 && scaled.abs() < (1i64 << 52) as f64 {
            return Some(Ratio::new(scaled as i64, den));
        }
        den *= 2;
    }
    None
}

/// Exponent `1 <= p < inf`.
///
/// Keeps an exact rational form when one is known; the symbolic classifier
/// in [`crate::families`] needs it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    p: f64,
    exact: Option<Ratio<i64>>,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self { p, exact: dyadic_ratio(p) })
    }

    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num < den {
            return Err(Error::InvalidExponent(num as f64 / den as f64));
        }
        let r = Ratio::new(num, den);
        Ok(Self { p: *r.numer() as f64 / *r.denom() as f64, exact: Some(r) })
    }

    /// Exponent whose conjugate is `q` (`q > 1`).
    pub fn from_conjugate(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::InvalidExponent(q));
        }
        Self::new(q / (q - 1.0))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn inv(&self) -> f64 {
        1.0 / self.p
    }

    pub fn exact(&self) -> Option<Ratio<i64>> {
        self.exact
    }

    pub fn q(&self) -> Conjugate {
        if self.p == 1.0 {
            Conjugate::Infinite
        } else {
            Conjugate::Finite(self.p / (self.p - 1.0))
        }
    }

    pub fn is_one(&self) -> bool {
        self.p == 1.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) if *r.denom() != 1 => write!(f, "{}/{}", r.numer(), r.denom()),
            _ => write!(f, "{}", self.p),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `"2"`, `"1.5"` or `"3/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?;
            let d: i64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?;
            Self::rational(n, d)
        } else {
            let p: f64 = s.parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?;
            Self::new(p)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.p)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = f64::deserialize(d)?;
        Exponent::new(p).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormTag {
    /// Plain ℓ^p.
    Lp,
    /// d_p: ℓ^p norm of the least decreasing majorant.
    Dp,
    /// Dyadic expression with blocks `[2^n, 2^{n+1})`.
    DpDyadicA,
    /// Dyadic expression with blocks `(2^n, 2^{n+1}]` plus both head suprema.
    DpDyadicB,
    /// Cesàro norm over the stored window.
    Ces,
    /// d_pp: dyadic blocks weighted by `2^{np}`.
    Dpp,
    /// Weighted ℓ¹ with weight `(n+1)^{1/p}`.
    L1w,
}

impl NormTag {
    pub const ALL: [NormTag; 7] = [
        NormTag::Lp,
        NormTag::Dp,
        NormTag::DpDyadicA,
        NormTag::DpDyadicB,
        NormTag::Ces,
        NormTag::Dpp,
        NormTag::L1w,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NormTag::Lp => "lp",
            NormTag::Dp => "dp",
            NormTag::DpDyadicA => "dp_dyadic_a",
            NormTag::DpDyadicB => "dp_dyadic_b",
            NormTag::Ces => "ces",
            NormTag::Dpp => "dpp",
            NormTag::L1w => "l1w",
        }
    }
}

impl FromStr for NormTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        NormTag::ALL
            .into_iter()
            .find(|tag| tag.name() == t)
            .ok_or_else(|| Error::Parse(format!("unknown norm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormKind {
    tag: NormTag,
    exponent: Exponent,
}

impl NormKind {
    pub fn new(tag: NormTag, exponent: Exponent) -> Result<Self> {
        if tag == NormTag::Ces && exponent.is_one() {
            return Err(Error::CesExponent(exponent.p()));
        }
        Ok(Self { tag, exponent })
    }

    pub fn dp(exponent: Exponent) -> Self {
        Self { tag: NormTag::Dp, exponent }
    }

    pub fn tag(&self) -> NormTag {
        self.tag
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }
}

/// Lower and upper condensation constants `(c, C)` with
/// `c ||a||_{d_p} <= dyadic(a) <= C ||a||_{d_p}` for both dyadic forms.
///
/// From `sum_{k>=1} c_k <= sum_n 2^n c_{2^n} <= 2 sum_{k>=1} c_k` applied to the
/// p-th power of the majorant: `c = 2^{-1/p}`, `C = 2^{1/p}`.
pub fn dyadic_constants(p: Exponent) -> (f64, f64) {
    let c = 2f64.powf(p.inv());
    (1.0 / c, c)
}

/// `e_n` padded with zeros to `len`.
pub fn canonical(n: usize, len: usize) -> Result<FinSeq> {
    if len <= n {
        return Err(Error::CanonicalOutOfRange { index: n, len });
    }
    let mut s = FinSeq::zeros(len);
    s.coeffs[n] = Complex64::new(1.0, 0.0);
    Ok(s)
}

/// Suffix maxima of `values` in one backward scan.
pub(crate) fn suffix_max(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    let mut run = 0.0f64;
    for v in out.iter_mut().rev() {
        run = run.max(*v);
        *v = run;
    }
    out
}

/// Least decreasing majorant `â_n = max_{k >= n} |a_k|`.
pub fn suffix_majorant(a: &FinSeq) -> FinSeq {
    let m = suffix_max(&a.moduli());
    FinSeq { coeffs: m.into_iter().map(|x| Complex64::new(x, 0.0)).collect() }
}

/// `(sum_i (w_i / scale)^p)^{1/p} * scale` with a compensated accumulator.
fn scaled_p_sum(values: impl Iterator<Item = f64>, scale: f64, p: f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    let mut acc = CompensatedSum::new();
    if p == 1.0 {
        for v in values {
            acc.add(v / scale);
        }
        return scale * acc.value();
    }
    for v in values {
        if v != 0.0 {
            acc.add((v / scale).powf(p));
        }
    }
    scale * acc.value().powf(1.0 / p)
}

/// Suprema of `values` over the dyadic blocks `[2^n, 2^{n+1}) ∩ [0, len)`.
pub fn dyadic_block_sups(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut lo = 1usize;
    while lo < values.len() {
        let hi = (2 * lo).min(values.len());
        out.push(values[lo..hi].iter().copied().fold(0.0, f64::max));
        lo *= 2;
    }
    out
}

/// Suprema over the shifted blocks `(2^n, 2^{n+1}]`.
fn shifted_block_sups(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut lo = 1usize;
    while lo + 1 < values.len() {
        let hi = (2 * lo + 1).min(values.len());
        out.push(values[lo + 1..hi].iter().copied().fold(0.0, f64::max));
        lo *= 2;
    }
    out
}

fn dp_from_moduli(mods: &[f64], p: f64) -> f64 {
    let maj = suffix_max(mods);
    let scale = maj.first().copied().unwrap_or(0.0);
    scaled_p_sum(maj.into_iter(), scale, p)
}

/// Value of the selected norm.
pub fn norm(a: &FinSeq, kind: NormKind) -> f64 {
    let p = kind.exponent.p();
    let mods = a.moduli();
    let sup = mods.iter().copied().fold(0.0, f64::max);
    match kind.tag {
        NormTag::Lp => scaled_p_sum(mods.into_iter(), sup, p),
        NormTag::Dp => dp_from_moduli(&mods, p),
        NormTag::DpDyadicA => {
            let blocks = dyadic_block_sups(&mods);
            let terms = blocks.iter().enumerate().map(|(n, &s)| {
                // 2^n * s^p == (2^{n/p} s)^p
                2f64.powf(n as f64 / p) * s
            });
            scaled_p_sum(std::iter::once(sup).chain(terms), sup, p)
        }
        NormTag::DpDyadicB => {
            let tail_sup = mods.iter().skip(1).copied().fold(0.0, f64::max);
            let blocks = shifted_block_sups(&mods);
            let terms = blocks.iter().enumerate().map(|(n, &s)| 2f64.powf(n as f64 / p) * s);
            scaled_p_sum([sup, tail_sup].into_iter().chain(terms), sup, p)
        }
        NormTag::Ces => {
            let mut run = CompensatedSum::new();
            let avgs: Vec<f64> = mods
                .iter()
                .enumerate()
                .map(|(n, &m)| {
                    run.add(m);
                    run.value() / (n + 1) as f64
                })
                .collect();
            let scale = avgs.iter().copied().fold(0.0, f64::max);
            scaled_p_sum(avgs.into_iter(), scale, p)
        }
        NormTag::Dpp => {
            let blocks = dyadic_block_sups(&mods);
            let terms: Vec<f64> = blocks
                .iter()
                .enumerate()
                .map(|(n, &s)| 2f64.powi(n as i32) * s)
                .collect();
            let scale = terms.iter().copied().fold(sup, f64::max);
            scaled_p_sum(std::iter::once(sup).chain(terms), scale, p)
        }
        NormTag::L1w => {
            let ip = 1.0 / p;
            compensated_sum(mods.iter().enumerate().map(|(n, &m)| ((n + 1) as f64).powf(ip) * m))
        }
    }
}

/// `||a||_{d_p}`.
pub fn dp_norm(a: &FinSeq, p: Exponent) -> f64 {
    norm(a, NormKind::dp(p))
}

/// Exact Cauchy product, length `len(a) + len(b) - 1`.
pub fn convolve(a: &FinSeq, b: &FinSeq) -> FinSeq {
    if a.len().max(b.len()) >= BLOCKED_THRESHOLD && a.len().min(b.len()) > TILE {
        convolve_blocked(a, b)
    } else {
        convolve_schoolbook(a, b)
    }
}

pub fn convolve_schoolbook(a: &FinSeq, b: &FinSeq) -> FinSeq {
    if a.is_empty() || b.is_empty() {
        return FinSeq::default();
    }
    let mut out = vec![Complex64::default(); a.len() + b.len() - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x.re == 0.0 && x.im == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(&b.coeffs) {
            *o += x * y;
        }
    }
    FinSeq { coeffs: out }
}

/// Tiled schoolbook product; keeps a `TILE`-sized window of each operand hot.
pub fn convolve_blocked(a: &FinSeq, b: &FinSeq) -> FinSeq {
    if a.is_empty() || b.is_empty() {
        return FinSeq::default();
    }
    let mut out = vec![Complex64::default(); a.len() + b.len() - 1];
    for (ia, a_tile) in a.coeffs.chunks(TILE).enumerate() {
        let a0 = ia * TILE;
        for (ib, b_tile) in b.coeffs.chunks(TILE).enumerate() {
            let b0 = ib * TILE;
            for (i, &x) in a_tile.iter().enumerate() {
                let dst = &mut out[a0 + b0 + i..a0 + b0 + i + b_tile.len()];
                for (o, &y) in dst.iter_mut().zip(b_tile) {
                    *o += x * y;
                }
            }
        }
    }
    FinSeq { coeffs: out }
}

/// `f_b(z) = sum_n b_n z^n` by Horner's rule.
pub fn eval_symbol(b: &FinSeq, z: Complex64) -> Complex64 {
    b.coeffs
        .iter()
        .rev()
        .fold(Complex64::default(), |acc, &c| acc * z + c)
}
