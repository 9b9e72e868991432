//! Neumaier compensated summation.

/// Running compensated sum. Error stays O(ε) independent of the number of terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(values);
    acc.value()
}

/// Backward compensated suffix sums: `out[n] = sum_{k >= n} values[k]`, with one
/// trailing zero so that `out.len() == values.len() + 1`.
pub fn suffix_sums(values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; values.len() + 1];
    let mut acc = CompensatedSum::new();
    for (n, &v) in values.iter().enumerate().rev() {
        acc.add(v);
        out[n] = acc.value();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancels_catastrophic_terms() {
        let vals = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(vals), 2.0);
    }

    #[test]
    fn suffix_sums_match_direct() {
        let vals: Vec<f64> = (1..=50).map(|k| 1.0 / k as f64).collect();
        let s = suffix_sums(&vals);
        assert_eq!(s.len(), 51);
        assert_eq!(s[50], 0.0);
        for n in 0..50 {
            let direct = compensated_sum(vals[n..].iter().copied());
            assert!((s[n] - direct).abs() <= 1e-15 * direct);
        }
    }
}
