//! Experiment reports and fixed-precision JSON output.

use std::io;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

/// One measured quantity and its tolerance; passes iff `violation <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub violation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, violation: f64, tolerance: f64) -> Self {
        Self { name: name.into(), violation, tolerance }
    }

    /// NaN violations fail.
    pub fn pass(&self) -> bool {
        self.violation <= self.tolerance
    }
}

/// Result of one experiment. `pass` is derived from `checks` whenever the
/// report is serialized, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub title: String,
    pub parameters: Value,
    pub results: Value,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn new(experiment_id: impl Into<String>, title: impl Into<String>) -> Self {
        Self {
            experiment_id: experiment_id.into(),
            title: title.into(),
            parameters: Value::Null,
            results: Value::Null,
            checks: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::pass)
    }

    /// Tolerance of the first check.
    pub fn tolerance(&self) -> f64 {
        self.checks.first().map_or(f64::NAN, |c| c.tolerance)
    }

    pub fn max_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.violation).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Serialize for ExperimentReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExperimentReport", 7)?;
        st.serialize_field("experiment_id", &self.experiment_id)?;
        st.serialize_field("title", &self.title)?;
        st.serialize_field("parameters", &self.parameters)?;
        st.serialize_field("results", &self.results)?;
        st.serialize_field("checks", &self.checks)?;
        st.serialize_field("tolerance", &self.tolerance())?;
        st.serialize_field("pass", &self.pass())?;
        st.end()
    }
}

/// Pretty printer writing every float with 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17 significant digits per float; non-finite floats become `null`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
