//! Fixed-precision number formatting shared by every writer.

use std::io;

use serde_json::ser::{Formatter, PrettyFormatter};

pub const SIGNIFICANT_DIGITS: usize = 17;

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// removed, scientific notation outside `1e-4 <= |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON whose floats are written with [`format_g17`].
pub struct G17Formatter {
    inner: PrettyFormatter<'static>,
}

impl G17Formatter {
    pub fn new() -> Self {
        Self {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Default for G17Formatter {
    fn default() -> Self {
        Self::new()
    }
}

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serializes `value` as pretty JSON with 17-significant-digit floats and a
/// trailing newline.
pub fn to_json_g17<T: serde::Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter::new());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(format_g17(0.011), "0.010999999999999999");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(-2.5), "-2.5");
        assert_eq!(format_g17(44.006), "44.006");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(1.5e20), "1.5e+20");
        assert_eq!(format_g17(0.0001), "0.0001");
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(f64::NAN), "NaN");
        assert_eq!(format_g17(123456789.0), "123456789");
    }

    #[test]
    fn json_floats_use_fixed_precision() {
        let v = serde_json::json!({"a": 0.1, "b": [1.0, null], "c": 3});
        let text = String::from_utf8(to_json_g17(&v).unwrap()).unwrap();
        assert!(text.contains("\"a\": 0.10000000000000001"), "{text}");
        assert!(text.contains("\"c\": 3"), "{text}");
        assert!(text.ends_with("}\n"));
    }

    proptest! {
        #[test]
        fn round_trips_exactly(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let parsed: f64 = format_g17(x).parse().unwrap();
            prop_assert_eq!(parsed.to_bits(), x.to_bits());
        }
    }
}
