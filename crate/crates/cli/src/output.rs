//! Deterministic JSON and CSV emission: every float is written with 17
//! significant digits, lines end in LF.

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use std::io::{self, Write};

/// Float in scientific notation with 17 significant digits; non-finite
/// values become `NaN`, `inf` or `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Pretty JSON formatter that writes floats through [`fmt_f64`].
struct Pretty17<'a>(PrettyFormatter<'a>);

impl Formatter for Pretty17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes to pretty JSON with 17-digit floats (non-finite floats become
/// `null`) and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Pretty17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// CSV cell for a float, a string or an optional float.
pub enum Cell {
    F(f64),
    S(String),
    Opt(Option<f64>),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::Opt(Some(v)) => fmt_f64(*v),
            Cell::Opt(None) => String::new(),
            Cell::S(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
        }
    }
}

pub fn csv(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(Cell::render).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_floats_and_nan() {
        #[derive(Serialize)]
        struct T {
            a: f64,
            b: f64,
            c: Vec<u32>,
        }
        let s = to_json(&T { a: 0.5, b: f64::NAN, c: vec![1, 2] });
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"], 0.5);
        assert!(v["b"].is_null());
        assert!(s.contains("5.0000000000000000e-1"));
        assert!(!s.contains('\r'));
    }

    #[test]
    fn csv_quoting() {
        let s = csv(&["a", "b"], &[vec![Cell::F(1.0), Cell::S("x,y".into())], vec![Cell::Opt(None), Cell::S("z".into())]]);
        assert_eq!(s, "a,b\n1.0000000000000000e0,\"x,y\"\n,z\n");
    }
}
