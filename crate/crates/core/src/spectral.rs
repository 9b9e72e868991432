//! Constructive spectral experiments for the right shift `S` and for `T_b`.
//!
//! Spectra are read off the symbol image `f_b(closed disc)`, never off
//! finite sections: every finite section of `S` is nilpotent, which
//! [`section_nilpotency_index`] makes explicit.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiplier::{mat_mul, mult_lower_bound, mult_upper_bound_l1w, toeplitz_section, Probe};
use crate::seqcore::sum::CompensatedSum;
use crate::seqcore::{canonical, eval_symbol, Exponent, FinSeq};

/// Geometric ratio above which a resolvent truncation is declared divergent.
pub const GROWTH_TOL: f64 = 1e-3;
/// Polynomial exponent above which it is declared divergent.
pub const POLY_TOL: f64 = 1e-3;

/// `||S^n|| = ||e_n||_{d_p} = (n+1)^{1/p}`.
///
/// The value is cross-checked against the multiplier bracket of `e_n`.
pub fn shift_power_norm(n: usize, p: Exponent) -> f64 {
    let value = ((n + 1) as f64).powf(p.inv());
    let e_n = canonical(n, n + 1).expect("in range");
    let probes = [Probe::from(canonical(0, 1).expect("in range"))];
    let lower = mult_lower_bound(&e_n, p, &probes, 0, 0).expect("nonzero symbol").lower;
    let upper = mult_upper_bound_l1w(&e_n, p);
    assert!((lower - value).abs() <= 1e-10 * value && (upper - value).abs() <= 1e-10 * value);
    value
}

/// `||S^n||^{1/n} = (n+1)^{1/(pn)}` for `n = 1..=n_max`.
pub fn spectral_radius_table(p: Exponent, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    Ok((1..=n_max).map(|n| ((n as f64).ln_1p() / (p.p() * n as f64)).exp()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Diverges,
    Converges,
    /// `lambda = 0`: `S a = e_0` has no solution at all.
    Impossible,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventReport {
    pub lambda: Complex64,
    pub p: Exponent,
    /// `||a^{(N)}||_{d_p}` for `N = 1..=N_max`; overflows to `inf` (JSON `null`).
    pub truncation_norms: Vec<f64>,
    /// Natural logarithms of the same norms, always finite.
    pub log_truncation_norms: Vec<f64>,
    pub growth_ratio: f64,
    pub poly_exponent: f64,
    pub verdict: Verdict,
}

/// Least-squares slope of `ys` against `xs`.
fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// `log ||x||_{d_p}` from `log |x_n|` without leaving the log domain.
fn log_dp_norm(log_mods: &[f64], p: f64) -> f64 {
    let mut maj = log_mods.to_vec();
    let mut run = f64::NEG_INFINITY;
    for v in maj.iter_mut().rev() {
        run = run.max(*v);
        *v = run;
    }
    let top = maj[0];
    let mut acc = CompensatedSum::new();
    for v in &maj {
        acc.add((p * (v - top)).exp());
    }
    top + acc.value().ln() / p
}

/// Solves `(S - lambda I) a = e_0` coordinatewise, `a_n = -1 / lambda^{n+1}`,
/// and follows the d_p norms of the truncations `a^{(N)}`.
///
/// The verdict fits `log ||a^{(N)}||` over the last half of the range, first
/// against `N` (geometric growth) and then against `log N` (polynomial growth).
pub fn resolvent_probe(lambda: Complex64, p: Exponent, n_max: usize) -> Result<ResolventReport> {
    if n_max < 4 {
        return Err(Error::InvalidParameter("N_max must be at least 4".into()));
    }
    if lambda == Complex64::default() {
        return Ok(ResolventReport {
            lambda,
            p,
            truncation_norms: Vec::new(),
            log_truncation_norms: Vec::new(),
            growth_ratio: f64::NAN,
            poly_exponent: f64::NAN,
            verdict: Verdict::Impossible,
        });
    }
    let log_r = lambda.norm().ln();
    let log_mods: Vec<f64> = (0..n_max).map(|n| -((n + 1) as f64) * log_r).collect();
    let logs: Vec<f64> = (1..=n_max)
        .into_par_iter()
        .map(|n| log_dp_norm(&log_mods[..n], p.p()))
        .collect();
    let half = n_max / 2;
    let xs: Vec<f64> = (half..=n_max).map(|n| n as f64).collect();
    let tail = &logs[half - 1..];
    let growth_ratio = ls_slope(&xs, tail).exp();
    let log_xs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let poly_exponent = ls_slope(&log_xs, tail);
    let verdict = if growth_ratio > 1.0 + GROWTH_TOL || poly_exponent > POLY_TOL {
        Verdict::Diverges
    } else {
        Verdict::Converges
    };
    Ok(ResolventReport {
        lambda,
        p,
        truncation_norms: logs.iter().map(|l| l.exp()).collect(),
        log_truncation_norms: logs,
        growth_ratio,
        poly_exponent,
        verdict,
    })
}

/// `||a||_{d_p}` of the full resolvent candidate for `|lambda| > 1`:
/// `|a_n| = r^{n+1}` with `r = 1/|lambda|` is its own majorant, so the norm is
/// `(r^p / (1 - r^p))^{1/p}`.
pub fn resolvent_closed_form(lambda: Complex64, p: Exponent) -> Option<f64> {
    let r = 1.0 / lambda.norm();
    (r < 1.0).then(|| {
        let rp = r.powf(p.p());
        (rp / (1.0 - rp)).powf(p.inv())
    })
}

/// `a^{[n]} = sum_{j <= n} lambda^{-j} e_j` and `(S - lambda I) a^{[n]}`,
/// which telescopes to `-lambda e_0 + lambda^{-n} e_{n+1}`.
pub fn range_witness_step8(lambda: Complex64, n: usize) -> Result<(FinSeq, FinSeq)> {
    if lambda == Complex64::default() {
        return Err(Error::ZeroLambda);
    }
    let mut a = Vec::with_capacity(n + 1);
    let mut cur = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        a.push(cur);
        cur /= lambda;
    }
    let image: Vec<Complex64> = (0..=n + 1)
        .map(|j| {
            let shifted = if j > 0 { a[j - 1] } else { Complex64::default() };
            let own = a.get(j).copied().unwrap_or_default();
            shifted - lambda * own
        })
        .collect();
    Ok((FinSeq::new(a)?, FinSeq::new(image)?))
}

/// Largest componentwise deviation of `(S - lambda I) a^{[n]}` from
/// `-lambda e_0 + lambda^{-n} e_{n+1}`, relative to the size of the terms
/// that cancel in each component.
pub fn step8_defect(lambda: Complex64, n: usize) -> Result<f64> {
    let (a, image) = range_witness_step8(lambda, n)?;
    let mut expected = vec![Complex64::default(); n + 2];
    expected[0] = -lambda;
    expected[n + 1] = a.get(n);
    Ok((0..n + 2)
        .map(|j| {
            let scale = (if j > 0 { a.get(j - 1).norm() } else { 0.0 }).max((lambda * a.get(j)).norm()).max(1.0);
            (image.get(j) - expected[j]).norm() / scale
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub radial: usize,
    pub angular: usize,
}

impl GridSpec {
    /// `(j / radial) e^{2 pi i k / angular}` for flat index `idx = (j-1) angular + k`.
    pub fn point(&self, idx: usize) -> Complex64 {
        let j = idx / self.angular + 1;
        let k = idx % self.angular;
        Complex64::from_polar(j as f64 / self.radial as f64, TAU * k as f64 / self.angular as f64)
    }

    pub fn len(&self) -> usize {
        self.radial * self.angular
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `f_b` on a polar grid of the closed unit disc.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCloud {
    pub points: Vec<Complex64>,
    pub grid: GridSpec,
}

impl SpectrumCloud {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * self.points.len() + 8);
        out.push_str("re,im\n");
        for z in &self.points {
            out.push_str(&format!("{:.16e},{:.16e}\n", z.re, z.im));
        }
        out
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Serialize for SpectrumCloud {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            grid: GridSpec,
            points: Vec<[f64; 2]>,
        }
        Out { grid: self.grid, points: self.points.iter().map(|z| [z.re, z.im]).collect() }.serialize(s)
    }
}

pub fn symbol_spectrum_image(b: &FinSeq, radial: usize, angular: usize) -> Result<SpectrumCloud> {
    if radial < 1 || angular < 3 {
        return Err(Error::InvalidParameter(format!("grid {radial}x{angular}: need radial >= 1, angular >= 3")));
    }
    let grid = GridSpec { radial, angular };
    let points = (0..grid.len()).into_par_iter().map(|i| eval_symbol(b, grid.point(i))).collect();
    Ok(SpectrumCloud { points, grid })
}

/// Norm of the point evaluation `delta_z` on the symbols of d_p, through the
/// ces_q description of the dual.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaZReport {
    pub z: Complex64,
    pub p: Exponent,
    pub n: usize,
    /// `(sum_{m < N} ((1 - |z|^{m+1}) / (m+1))^q)^{1/q} / (1 - |z|)`; for p = 1
    /// the largest Cesàro average of `(|z|^k)`, which is exactly 1.
    pub ces_norm_truncated: f64,
    /// `ces / p` (p > 1).
    pub lower_bound: f64,
    /// `(q-1)^{1/q} ces` (p > 1).
    pub upper_bound: f64,
    /// `zeta_N(q) = sum_{m <= N} m^{-q}`; absent for p = 1.
    pub zeta_q: Option<f64>,
    /// `zeta(q) - zeta_N(q) <= N^{1-q} / (q-1)`.
    pub zeta_tail_bound: Option<f64>,
    /// `zeta_N(q)^{1/q} / p`.
    pub zeta_lower: Option<f64>,
    /// `(q-1)^{1/q} zeta_N(q)^{1/q} / (1 - |z|)`.
    pub zeta_upper: Option<f64>,
}

impl DeltaZReport {
    /// `zeta_lower <= lower <= upper <= zeta_upper`, each side as computed.
    pub fn sandwich_holds(&self) -> bool {
        let slack = 1e-12;
        let inner = self.lower_bound <= self.upper_bound * (1.0 + slack);
        match (self.zeta_lower, self.zeta_upper) {
            (Some(lo), Some(hi)) => inner && lo <= self.lower_bound * (1.0 + slack) && self.upper_bound <= hi * (1.0 + slack),
            _ => inner,
        }
    }
}

pub fn delta_z_report(z: Complex64, p: Exponent, n: usize) -> Result<DeltaZReport> {
    let r = z.norm();
    if r >= 1.0 || r.is_nan() {
        return Err(Error::OutsideDisc(r));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let Some(q) = p.q().finite() else {
        // running sums of |z|^k never exceed the count of terms
        let mut run = 0.0;
        let mut pow = 1.0;
        let mut best = 0.0f64;
        for m in 0..n {
            run += pow;
            pow *= r;
            best = best.max(run / (m + 1) as f64);
        }
        return Ok(DeltaZReport {
            z,
            p,
            n,
            ces_norm_truncated: best,
            lower_bound: best,
            upper_bound: best,
            zeta_q: None,
            zeta_tail_bound: None,
            zeta_lower: None,
            zeta_upper: None,
        });
    };
    let mut s = CompensatedSum::new();
    let mut zeta = CompensatedSum::new();
    let mut pow = r;
    for m in 0..n {
        let k = (m + 1) as f64;
        s.add(((1.0 - pow) / k).powf(q));
        zeta.add(k.powf(-q));
        pow *= r;
    }
    let ces = s.value().powf(1.0 / q) / (1.0 - r);
    let c_hi = (q - 1.0).powf(1.0 / q);
    let zeta_q = zeta.value();
    Ok(DeltaZReport {
        z,
        p,
        n,
        ces_norm_truncated: ces,
        lower_bound: ces / p.p(),
        upper_bound: c_hi * ces,
        zeta_q: Some(zeta_q),
        zeta_tail_bound: Some((n as f64).powf(1.0 - q) / (q - 1.0)),
        zeta_lower: Some(zeta_q.powf(1.0 / q) / p.p()),
        zeta_upper: Some(c_hi * zeta_q.powf(1.0 / q) / (1.0 - r)),
    })
}

/// Smallest `k` with `(T_b section)^k = 0`, if any `k <= dim` works.
///
/// For `b_0 = 0` the section is strictly lower triangular, hence nilpotent
/// with spectrum `{0}`, whatever the spectrum of `T_b` itself.
pub fn section_nilpotency_index(b: &FinSeq, dim: usize) -> Option<usize> {
    let t = toeplitz_section(b, dim);
    let mut power = t.clone();
    for k in 1..=dim {
        if power.iter().flatten().all(|c| *c == Complex64::default()) {
            return Some(k);
        }
        power = mat_mul(&power, &t);
    }
    None
}

/// Eigenvalues of the finite section: its diagonal, `b_0` repeated.
pub fn section_eigenvalues(b: &FinSeq, dim: usize) -> Vec<Complex64> {
    vec![b.get(0); dim]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn shift_power_examples() {
        assert_eq!(shift_power_norm(0, exp(2.0)), 1.0);
        assert_relative_eq!(shift_power_norm(3, exp(2.0)), 2.0, max_relative = 1e-15);
        assert_relative_eq!(shift_power_norm(7, exp(1.0)), 8.0, max_relative = 1e-15);
    }

    #[test]
    fn radius_table() {
        assert_relative_eq!(spectral_radius_table(exp(1.0), 1).unwrap()[0], 2.0, max_relative = 1e-15);
        assert_relative_eq!(spectral_radius_table(exp(2.0), 1).unwrap()[0], 2f64.sqrt(), max_relative = 1e-15);
        let t = spectral_radius_table(exp(1.5), 500).unwrap();
        assert!(t.windows(2).all(|w| w[0] > w[1]) && t.iter().all(|&x| x > 1.0));
        assert!(spectral_radius_table(exp(1.0), 0).is_err());
    }

    #[test]
    fn resolvent_examples() {
        let half = resolvent_probe(Complex64::new(0.5, 0.0), exp(2.0), 256).unwrap();
        assert_eq!(half.verdict, Verdict::Diverges);
        assert_relative_eq!(half.growth_ratio, 2.0, max_relative = 1e-2);

        let one = resolvent_probe(Complex64::new(1.0, 0.0), exp(2.0), 256).unwrap();
        assert_eq!(one.verdict, Verdict::Diverges);
        for (n, v) in one.truncation_norms.iter().enumerate() {
            assert_relative_eq!(*v, ((n + 1) as f64).sqrt(), max_relative = 1e-12);
        }

        for p in [1.0, 2.0, 3.0] {
            let two = resolvent_probe(Complex64::new(0.0, 2.0), exp(p), 256).unwrap();
            assert_eq!(two.verdict, Verdict::Converges);
            let limit = (2f64.powf(p) - 1.0).powf(-1.0 / p);
            assert_relative_eq!(resolvent_closed_form(Complex64::new(2.0, 0.0), exp(p)).unwrap(), limit, max_relative = 1e-15);
            assert_relative_eq!(*two.truncation_norms.last().unwrap(), limit, max_relative = 1e-12);
            assert!(two.truncation_norms.windows(2).all(|w| w[0] <= w[1]));
        }

        let zero = resolvent_probe(Complex64::default(), exp(2.0), 64).unwrap();
        assert_eq!(zero.verdict, Verdict::Impossible);
    }

    #[test]
    fn step8_examples() {
        let (a, img) = range_witness_step8(Complex64::new(2.0, 0.0), 1).unwrap();
        assert_eq!(a, FinSeq::from_real(&[1.0, 0.5]).unwrap());
        assert_eq!(img, FinSeq::from_real(&[-2.0, 0.0, 0.5]).unwrap());
        let (a, img) = range_witness_step8(Complex64::new(1.0, 0.0), 0).unwrap();
        assert_eq!(a, FinSeq::from_real(&[1.0]).unwrap());
        assert_eq!(img, FinSeq::from_real(&[-1.0, 1.0]).unwrap());
        assert!(step8_defect(Complex64::new(0.0, 1.0), 2).unwrap() <= 1e-12);
        assert!(matches!(range_witness_step8(Complex64::default(), 3), Err(Error::ZeroLambda)));
    }

    #[test]
    fn spectrum_images() {
        let e1 = canonical(1, 2).unwrap();
        let cloud = symbol_spectrum_image(&e1, 8, 16).unwrap();
        assert_eq!(cloud.points.len(), 128);
        assert_relative_eq!(cloud.max_modulus(), 1.0, max_relative = 1e-15);
        let e0 = canonical(0, 1).unwrap();
        assert!(symbol_spectrum_image(&e0, 4, 5).unwrap().points.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
        let b = FinSeq::from_real(&[0.0, 1.0, 1.0]).unwrap();
        let cloud = symbol_spectrum_image(&b, 3, 12).unwrap();
        for k in 0..12 {
            let t = TAU * k as f64 / 12.0;
            let expect = Complex64::from_polar(1.0, t) + Complex64::from_polar(1.0, 2.0 * t);
            assert!((cloud.points[2 * 12 + k] - expect).norm() < 1e-14);
        }
        assert!(symbol_spectrum_image(&b, 0, 12).is_err());
        assert!(symbol_spectrum_image(&b, 2, 2).is_err());
    }

    #[test]
    fn delta_z_examples() {
        for r in [0.0, 0.3, 0.9] {
            let rep = delta_z_report(Complex64::from_polar(r, 1.0), exp(1.0), 100).unwrap();
            assert_eq!(rep.ces_norm_truncated, 1.0);
        }
        let rep = delta_z_report(Complex64::default(), exp(2.0), 10_000).unwrap();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((rep.ces_norm_truncated - zeta2.sqrt()).abs() <= rep.zeta_tail_bound.unwrap());
        let rep = delta_z_report(Complex64::new(0.5, 0.0), exp(2.0), 10_000).unwrap();
        assert!(rep.sandwich_holds());
        assert!(rep.zeta_lower.unwrap() <= rep.upper_bound);
        assert!(matches!(delta_z_report(Complex64::new(1.0, 0.0), exp(2.0), 10), Err(Error::OutsideDisc(_))));
    }

    #[test]
    fn finite_sections_of_shift_are_nilpotent() {
        let e1 = canonical(1, 2).unwrap();
        assert_eq!(section_nilpotency_index(&e1, 8), Some(8));
        assert!(section_eigenvalues(&e1, 8).iter().all(|z| *z == Complex64::default()));
        assert_eq!(section_nilpotency_index(&canonical(0, 1).unwrap(), 4), None);
    }
}
