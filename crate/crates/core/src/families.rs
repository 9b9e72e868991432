//! Infinite symbol families with exact dyadic block data, and a classifier
//! deciding membership in ℓ¹, ℓ¹(w_p), d_p, d_pp and d_1.
//!
//! Membership is decided symbolically: every test series has terms
//! `C 2^{αk} k^β` (up to constants), and the series converges iff `α < 0`,
//! or `α = 0` and `β < -1`. Exponents are exact rationals.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::seqcore::{Exponent, FinSeq};

pub type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

fn qf(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(q(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 12 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10i64.pow(frac.len() as u32);
        let neg = int.starts_with('-');
        let ip: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let fp: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = ip.abs() * den + fp;
        return Ok(q(if neg { -num } else { num }, den));
    }
    Ok(Q::from_integer(s.parse().map_err(|_| bad())?))
}

fn fmt_q(x: Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn ser_q<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(*x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    /// `b_n = 1/(n+1)`, the coefficients of `-log(1-z)/z`.
    Harmonic,
    /// `b_n = (n+1)^{-σ}`.
    Power { sigma: Q },
    /// `b_{2^k} = 2^{-αk} k^{-β}`, zero elsewhere; `k = 0` is dropped when `β != 0`.
    DyadicSparse { alpha: Q, beta: Q },
    /// `b_n = 1/(k 2^k)` on `[2^k, 2^{k+1})` for `k >= 1`, `b_0 = b_1 = 0`.
    DyadicBlock,
    /// `b_n = r^n`, `0 < r < 1`.
    Geometric { r: Q },
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Harmonic => write!(f, "harmonic"),
            FamilySpec::Power { sigma } => write!(f, "power:sigma={}", fmt_q(sigma)),
            FamilySpec::DyadicSparse { alpha, beta } if beta.is_zero() => write!(f, "sparse:alpha={}", fmt_q(alpha)),
            FamilySpec::DyadicSparse { alpha, beta } => write!(f, "sparse:alpha={},beta={}", fmt_q(alpha), fmt_q(beta)),
            FamilySpec::DyadicBlock => write!(f, "block"),
            FamilySpec::Geometric { r } => write!(f, "geometric:r={}", fmt_q(r)),
        }
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// `harmonic`, `power:sigma=3/2`, `sparse:alpha=1/2[,beta=1]`, `block`, `geometric:r=1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut params = Vec::new();
        for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad parameter {kv:?}")))?;
            params.push((k.trim().to_ascii_lowercase(), parse_q(v)?));
        }
        let take = |name: &str| params.iter().find(|(k, _)| k == name).map(|(_, v)| *v);
        let known: &[&str] = match tag.to_ascii_lowercase().as_str() {
            "harmonic" | "block" | "dyadic_block" => &[],
            "power" => &["sigma"],
            "sparse" | "dyadic_sparse" => &["alpha", "beta"],
            "geometric" => &["r"],
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown parameter {k:?} for {tag}")));
        }
        let need = |name: &str| take(name).ok_or_else(|| Error::Parse(format!("{tag} needs {name}=...")));
        let spec = match tag.to_ascii_lowercase().as_str() {
            "harmonic" => FamilySpec::Harmonic,
            "block" | "dyadic_block" => FamilySpec::DyadicBlock,
            "power" => FamilySpec::Power { sigma: need("sigma")? },
            "sparse" | "dyadic_sparse" => FamilySpec::DyadicSparse { alpha: need("alpha")?, beta: take("beta").unwrap_or_default() },
            _ => FamilySpec::Geometric { r: need("r")? },
        };
        make_family(spec).map(|f| f.spec)
    }
}

/// `[c_lo, c_hi] * 2^{αk} k^β` for every `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerForm {
    pub c_lo: f64,
    pub c_hi: f64,
    #[serde(serialize_with = "ser_q")]
    pub alpha: Q,
    #[serde(serialize_with = "ser_q")]
    pub beta: Q,
}

impl PowerForm {
    pub fn eval(&self, k: u32) -> f64 {
        2f64.powf(qf(self.alpha) * k as f64) * (k as f64).powf(qf(self.beta))
    }

    fn pow(self, p: Q) -> Self {
        let pf = qf(p);
        PowerForm { c_lo: self.c_lo.powf(pf), c_hi: self.c_hi.powf(pf), alpha: self.alpha * p, beta: self.beta * p }
    }

    fn shift(self, da: Q, lo: f64, hi: f64) -> Self {
        PowerForm { c_lo: self.c_lo * lo, c_hi: self.c_hi * hi, alpha: self.alpha + da, beta: self.beta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BlockForm {
    Power(PowerForm),
    /// `r^{2^k}` up to polynomial factors: summable in every space here.
    DoublyExponential { r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub lo: f64,
    pub hi: f64,
}

impl Envelope {
    fn exact(v: f64) -> Self {
        Envelope { lo: v, hi: v }
    }

    fn scale(self, lo: f64, hi: f64) -> Self {
        Envelope { lo: self.lo * lo, hi: self.hi * hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicFamily {
    pub spec: FamilySpec,
}

/// Validates the decay parameters of `spec`.
pub fn make_family(spec: FamilySpec) -> Result<DyadicFamily> {
    let bad = |m: &str| Err(Error::InvalidParameter(format!("{spec}: {m}")));
    match spec {
        FamilySpec::Power { sigma } if !sigma.is_positive() => return bad("sigma must be positive"),
        FamilySpec::DyadicSparse { alpha, beta } if !alpha.is_positive() || beta.is_negative() => {
            return bad("need alpha > 0 and beta >= 0")
        }
        FamilySpec::Geometric { r } if !(r.is_positive() && r < Q::one()) => return bad("need 0 < r < 1"),
        _ => {}
    }
    Ok(DyadicFamily { spec })
}

impl DyadicFamily {
    pub fn name(&self) -> String {
        self.spec.to_string()
    }

    /// `b_n` in floating point.
    pub fn coeff(&self, n: usize) -> f64 {
        match self.spec {
            FamilySpec::Harmonic => 1.0 / (n + 1) as f64,
            FamilySpec::Power { sigma } => ((n + 1) as f64).powf(-qf(sigma)),
            FamilySpec::DyadicSparse { alpha, beta } => {
                if n == 0 || !n.is_power_of_two() {
                    return 0.0;
                }
                let k = n.trailing_zeros();
                if k == 0 && !beta.is_zero() {
                    return 0.0;
                }
                sparse_value(alpha, beta, k)
            }
            FamilySpec::DyadicBlock => {
                if n < 2 {
                    return 0.0;
                }
                let k = usize::BITS - 1 - n.leading_zeros();
                1.0 / (k as f64 * 2f64.powi(k as i32))
            }
            FamilySpec::Geometric { r } => qf(r).powf(n as f64),
        }
    }

    /// `b_0`, outside every dyadic block.
    pub fn head(&self) -> f64 {
        self.coeff(0)
    }

    /// `sup_{2^k <= n < 2^{k+1}} |b_n|` in closed form.
    pub fn block_sup(&self, k: u32) -> f64 {
        let lo = 2f64.powi(k as i32);
        match self.spec {
            FamilySpec::Harmonic => 1.0 / (lo + 1.0),
            FamilySpec::Power { sigma } => (lo + 1.0).powf(-qf(sigma)),
            FamilySpec::DyadicSparse { .. } | FamilySpec::DyadicBlock => self.coeff(1usize << k),
            FamilySpec::Geometric { r } => qf(r).powf(lo),
        }
    }

    /// `sum_{2^k <= n < 2^{k+1}} |b_n|`, exact where elementary.
    pub fn block_l1(&self, k: u32) -> Envelope {
        let lo = 2f64.powi(k as i32);
        match self.spec {
            FamilySpec::Harmonic => Envelope { lo: lo / (2.0 * lo), hi: lo / (lo + 1.0) },
            FamilySpec::Power { sigma } => {
                let s = qf(sigma);
                Envelope { lo: lo * (2.0 * lo).powf(-s), hi: lo * (lo + 1.0).powf(-s) }
            }
            FamilySpec::DyadicSparse { .. } => Envelope::exact(self.block_sup(k)),
            FamilySpec::DyadicBlock => Envelope::exact(if k == 0 { 0.0 } else { 1.0 / k as f64 }),
            FamilySpec::Geometric { r } => {
                let r = qf(r);
                let first = r.powf(lo);
                Envelope::exact(first * (1.0 - r.powf(lo)) / (1.0 - r))
            }
        }
    }

    /// `sum (n+1)^{1/p} |b_n|` over the block, bracketed by the extreme weights.
    pub fn block_l1w(&self, k: u32, p: Exponent) -> Envelope {
        let lo = 2f64.powi(k as i32);
        let w_lo = (lo + 1.0).powf(p.inv());
        match self.spec {
            FamilySpec::DyadicSparse { .. } => Envelope::exact(w_lo * self.block_sup(k)),
            _ => self.block_l1(k).scale(w_lo, (2.0 * lo).powf(p.inv())),
        }
    }

    pub fn sup_form(&self) -> BlockForm {
        let one = Q::one();
        let power = |c_lo, c_hi, alpha, beta| BlockForm::Power(PowerForm { c_lo, c_hi, alpha, beta });
        match self.spec {
            FamilySpec::Harmonic => power(0.5, 1.0, -one, Q::zero()),
            FamilySpec::Power { sigma } => power(2f64.powf(-qf(sigma)), 1.0, -sigma, Q::zero()),
            FamilySpec::DyadicSparse { alpha, beta } => power(1.0, 1.0, -alpha, -beta),
            FamilySpec::DyadicBlock => power(1.0, 1.0, -one, -one),
            FamilySpec::Geometric { r } => BlockForm::DoublyExponential { r: qf(r) },
        }
    }

    pub fn l1_form(&self) -> BlockForm {
        match (self.spec, self.sup_form()) {
            (FamilySpec::DyadicSparse { .. }, f) => f,
            // one block holds 2^k terms between the block's extreme values
            (FamilySpec::Harmonic, BlockForm::Power(f)) => BlockForm::Power(PowerForm { c_lo: 0.5, c_hi: 1.0, ..f.shift(Q::one(), 1.0, 1.0) }),
            (FamilySpec::Power { sigma }, BlockForm::Power(f)) => {
                BlockForm::Power(f.shift(Q::one(), 2f64.powf(-qf(sigma)), 1.0))
            }
            (_, BlockForm::Power(f)) => BlockForm::Power(f.shift(Q::one(), 1.0, 1.0)),
            (_, f) => f,
        }
    }

    pub fn l1w_form(&self, p: Exponent) -> Result<BlockForm> {
        let ip = exact(p)?.recip();
        let ipf = qf(ip);
        Ok(match self.l1_form() {
            BlockForm::Power(f) => BlockForm::Power(f.shift(ip, 1.0, 2f64.powf(ipf))),
            other => other,
        })
    }

    /// Form of the decisive test-series term for `space`.
    pub fn series_form(&self, space: Space, p: Exponent) -> Result<BlockForm> {
        let sup = self.sup_form();
        let power = |e: Q, extra: Q| -> BlockForm {
            match sup {
                BlockForm::Power(f) => BlockForm::Power(f.pow(e).shift(extra, 1.0, 1.0)),
                other => other,
            }
        };
        match space {
            Space::L1 => Ok(self.l1_form()),
            Space::L1w => self.l1w_form(p),
            Space::D1 => Ok(power(Q::one(), Q::one())),
            Space::Dp => {
                let e = exact(p)?;
                Ok(power(e, Q::one()))
            }
            Space::Dpp => {
                let e = exact(p)?;
                Ok(power(e, e))
            }
            Space::Lp | Space::Ces => {
                Err(Error::Undecidable(format!("{space} has no block test series in this classifier")))
            }
        }
    }

    /// Truncation `(b_0, ..., b_{n-1})`.
    pub fn realize(&self, n: usize) -> Result<FinSeq> {
        if n == 0 {
            return Err(Error::InvalidParameter("realize needs N >= 1".into()));
        }
        FinSeq::from_real(&(0..n).map(|i| self.coeff(i)).collect::<Vec<_>>())
    }
}

fn sparse_value(alpha: Q, beta: Q, k: u32) -> f64 {
    let a = qf(alpha) * k as f64;
    let mut v = 2f64.powf(-a);
    if !beta.is_zero() {
        v *= (k as f64).powf(-qf(beta));
    }
    v
}

fn exact(p: Exponent) -> Result<Q> {
    p.exact().ok_or_else(|| Error::Undecidable(format!("exponent {} has no exact rational form", p.p())))
}

/// Spaces the classifier knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    L1,
    L1w,
    Dp,
    Dpp,
    D1,
    Lp,
    Ces,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::L1 => "l1",
            Space::L1w => "l1w",
            Space::Dp => "dp",
            Space::Dpp => "dpp",
            Space::D1 => "d1",
            Space::Lp => "lp",
            Space::Ces => "ces",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Space::L1,
            "l1w" => Space::L1w,
            "dp" | "dp_dyadic_a" | "dp_dyadic_b" => Space::Dp,
            "dpp" => Space::Dpp,
            "d1" => Space::D1,
            "lp" => Space::Lp,
            "ces" => Space::Ces,
            other => return Err(Error::Parse(format!("unknown space {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    Member,
    NonMember,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    /// `α' < 0`.
    GeometricDecay,
    /// `α' = 0`, `β' < -1`.
    PSeriesConvergent,
    /// `α' = 0`, `β' >= -1`.
    PSeriesDivergent,
    /// `α' > 0`.
    GeometricGrowth,
    DoublyExponential,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub family: FamilySpec,
    pub space: Space,
    pub p: Exponent,
    pub verdict: Membership,
    pub rule: Rule,
    /// Decisive series term; absent for doubly exponential decay.
    pub certificate: Option<PowerForm>,
}

pub fn classify(family: &DyadicFamily, space: Space, p: Exponent) -> Result<MembershipVerdict> {
    let (verdict, rule, certificate) = match family.series_form(space, p)? {
        BlockForm::DoublyExponential { .. } => (Membership::Member, Rule::DoublyExponential, None),
        BlockForm::Power(f) => {
            let (v, r) = if f.alpha.is_negative() {
                (Membership::Member, Rule::GeometricDecay)
            } else if f.alpha.is_positive() {
                (Membership::NonMember, Rule::GeometricGrowth)
            } else if f.beta < -Q::one() {
                (Membership::Member, Rule::PSeriesConvergent)
            } else {
                (Membership::NonMember, Rule::PSeriesDivergent)
            };
            (v, r, Some(f))
        }
    };
    Ok(MembershipVerdict { family: family.spec, space, p, verdict, rule, certificate })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectation {
    pub space: Space,
    pub p: Exponent,
    pub expected: Membership,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRow {
    pub claim: String,
    pub family: FamilySpec,
    pub checks: Vec<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationOutcome {
    pub row: SeparationRow,
    pub verdicts: Vec<MembershipVerdict>,
    pub agrees: bool,
}

/// The inclusion diagram between ℓ¹(w_p), d_1, d_pp, ℓ¹ and d_p as
/// witness rows, for `p ∈ {3/2, 2, 3}`.
pub fn paper_separations() -> Vec<SeparationRow> {
    use Membership::{Member as M, NonMember as N};
    let ps = [q(3, 2), q(2, 1), q(3, 1)];
    let ex = |r: Q| Exponent::rational(*r.numer(), *r.denom()).expect("p >= 1");
    let mut rows = Vec::new();
    let row = |claim: String, family, checks: Vec<(Space, Q, Membership)>| SeparationRow {
        claim,
        family,
        checks: checks.into_iter().map(|(space, p, expected)| Expectation { space, p: ex(p), expected }).collect(),
    };
    for &p in &ps {
        let ps_ = fmt_q(p);
        let sparse = |alpha, beta| FamilySpec::DyadicSparse { alpha, beta };
        rows.push(row(
            format!("d_1 and d_pp are not contained in l1(w_p), p = {ps_}"),
            FamilySpec::Power { sigma: Q::one() + p.recip() },
            vec![(Space::D1, p, M), (Space::Dpp, p, M), (Space::L1w, p, N)],
        ));
        rows.push(row(
            format!("l1(w_p) is contained in neither d_1 nor d_pp, p = {ps_}"),
            sparse(Q::one(), Q::zero()),
            vec![(Space::L1w, p, M), (Space::D1, p, N), (Space::Dpp, p, N)],
        ));
        rows.push(row(
            format!("d_pp is a proper subspace of d_p; multiplier outside d_pp, p = {ps_}"),
            sparse(Q::one(), Q::zero()),
            vec![(Space::Dp, p, M), (Space::L1, p, M), (Space::Dpp, p, N)],
        ));
        rows.push(row(
            format!("d_pp is not contained in l1, p = {ps_}"),
            FamilySpec::DyadicBlock,
            vec![(Space::Dpp, p, M), (Space::L1, p, N), (Space::D1, p, N)],
        ));
        rows.push(row(
            format!("l1 is contained in neither d_pp nor d_p, p = {ps_}"),
            sparse(p.recip(), Q::zero()),
            vec![(Space::L1, p, M), (Space::Dpp, p, N), (Space::Dp, p, N)],
        ));
        rows.push(row(
            format!("d_1 is a proper subspace of d_pp ∩ l1, p = {ps_}"),
            sparse(Q::one(), Q::one()),
            vec![(Space::L1, p, M), (Space::Dpp, p, M), (Space::D1, p, N)],
        ));
        rows.push(row(
            format!("decreasing d_p sequence outside l1, p = {ps_}"),
            FamilySpec::Harmonic,
            vec![(Space::Dp, p, M), (Space::L1, p, N)],
        ));
        rows.push(row(
            format!("holomorphic past the closed disc lies in d_1, p = {ps_}"),
            FamilySpec::Geometric { r: q(1, 2) },
            vec![(Space::D1, p, M), (Space::L1w, p, M), (Space::Dpp, p, M)],
        ));
    }
    for (i, &p1) in ps.iter().enumerate() {
        for &p2 in &ps[i + 1..] {
            rows.push(row(
                format!("l1(w_{{p2}}) not in d_{{p1}} for p1 = {} < p2 = {}", fmt_q(p1), fmt_q(p2)),
                FamilySpec::DyadicSparse { alpha: p1.recip(), beta: Q::zero() },
                vec![(Space::Dp, p1, N), (Space::L1w, p2, M)],
            ));
        }
    }
    rows
}

/// Classifies every check of every row.
pub fn check_separations(rows: &[SeparationRow]) -> Result<Vec<SeparationOutcome>> {
    rows.iter()
        .map(|row| {
            let fam = make_family(row.family)?;
            let verdicts = row
                .checks
                .iter()
                .map(|c| classify(&fam, c.space, c.p))
                .collect::<Result<Vec<_>>>()?;
            let agrees = verdicts.iter().zip(&row.checks).all(|(v, c)| v.verdict == c.expected);
            Ok(SeparationOutcome { row: row.clone(), verdicts, agrees })
        })
        .collect()
}
