//! JSON and CSV forms of [`FinSeq`].
//!
//! JSON: `{"coeffs": [[re, im], ...]}`; on input a coefficient may also be a
//! bare number. CSV: one `re,im` pair per row.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FinSeq;
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCoeff {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Deserialize)]
struct RawSeq {
    coeffs: Vec<RawCoeff>,
}

#[derive(Serialize)]
struct SeqOut {
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for FinSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeqOut { coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSeq {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSeq::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .into_iter()
            .map(|c| match c {
                RawCoeff::Real(x) => Complex64::new(x, 0.0),
                RawCoeff::Pair([re, im]) => Complex64::new(re, im),
            })
            .collect();
        FinSeq::new(coeffs).map_err(D::Error::custom)
    }
}

impl FinSeq {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im\n");
        for c in &self.coeffs {
            let _ = writeln!(out, "{:.16e},{:.16e}", c.re, c.im);
        }
        out
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Parses an inline comma list of reals, e.g. `"0,1,0.5"`.
pub fn parse_inline(s: &str) -> Result<FinSeq> {
    let vals = s
        .split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad coefficient {t:?}"))))
        .collect::<Result<Vec<f64>>>()?;
    if vals.is_empty() {
        return Err(Error::Parse("empty sequence".into()));
    }
    FinSeq::from_real(&vals)
}

/// `@path.json` reads a file, anything else is an inline list.
pub fn read_seq_arg(arg: &str) -> Result<FinSeq> {
    match arg.strip_prefix('@') {
        Some(path) => FinSeq::read_json(Path::new(path)),
        None => parse_inline(arg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_bare_numbers_and_pairs() {
        let s = FinSeq::from_json_str(r#"{"coeffs": [1, [0.5, -2], 3.25]}"#).unwrap();
        assert_eq!(
            s.coeffs(),
            &[Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0), Complex64::new(3.25, 0.0)]
        );
    }

    #[test]
    fn writes_pairs() {
        let s = FinSeq::new(vec![Complex64::new(1.0, 2.0)]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"coeffs":[[1.0,2.0]]}"#);
        assert!(s.to_csv().starts_with("re,im\n1.0000000000000000e0,2.0000000000000000e0"));
    }

    #[test]
    fn inline_lists() {
        assert_eq!(parse_inline("0, 1,0.5").unwrap(), FinSeq::from_real(&[0.0, 1.0, 0.5]).unwrap());
        assert!(parse_inline("1,x").is_err());
        assert!(parse_inline("").is_err());
        assert!(FinSeq::from_json_str(r#"{"coeffs": ["a"]}"#).is_err());
    }
}
