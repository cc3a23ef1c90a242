//! Number formatting for tabular output.

/// Significant digits used by every CSV writer in the crate.
pub const CSV_DIGITS: usize = 9;

/// Formats `x` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for decimal exponents in `[-5, digits)`, scientific
/// otherwise, trailing zeros removed. Infinities print as `inf` / `-inf`;
/// negative zero prints as `0`.
pub fn format_significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// [`format_significant`] with [`CSV_DIGITS`].
pub fn csv_number(x: f64) -> String {
    format_significant(x, CSV_DIGITS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(csv_number(0.194513), "0.194513");
        assert_eq!(csv_number(1.0), "1");
        assert_eq!(csv_number(-0.5), "-0.5");
        assert_eq!(csv_number(1.0 / 3.0), "0.333333333");
        assert_eq!(csv_number(12345678912.0), "1.23456789e10");
        assert_eq!(csv_number(1.5e-7), "1.5e-7");
        assert_eq!(csv_number(0.0001), "0.0001");
        assert_eq!(csv_number(f64::INFINITY), "inf");
        assert_eq!(csv_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(csv_number(999999999.6), "1e9");
        assert_eq!(csv_number(-0.0), "0");
    }

    proptest! {
        #[test]
        fn reparse_is_a_fixed_point(x in prop::num::f64::NORMAL) {
            let s = csv_number(x);
            let y: f64 = s.parse().unwrap();
            prop_assert_eq!(csv_number(y), s);
        }
    }
}
