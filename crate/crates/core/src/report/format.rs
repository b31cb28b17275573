use crate::extended::{Extended, ExtendedReal};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `value` with 12 significant digits in the style of C's `%.12g`: plain
/// notation for exponents in `[-5, 12)`, scientific otherwise, trailing
/// zeros dropped.
pub fn format_real(value: f64) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if value == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, value);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exponent) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(&format!("{value:.decimals$}"))
    } else {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exponent.abs())
    }
}

fn trim_zeros(text: &str) -> String {
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text.to_string()
    }
}

pub fn format_extended_real(value: &ExtendedReal) -> String {
    match value {
        Extended::Finite(v) => format_real(*v),
        Extended::Infinity => "inf".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_c_general_format() {
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(-0.5), "-0.5");
        assert_eq!(format_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_real(2.0 / 3.0 * 1e-3), "0.000666666666667");
        assert_eq!(format_real(1.5e-7), "1.5e-07");
        assert_eq!(format_real(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_real(999999999999.5), "1e+12");
        assert_eq!(format_real(f64::INFINITY), "inf");
        assert_eq!(format_real(0.0), "0");
    }

    #[test]
    fn extended_reals() {
        assert_eq!(format_extended_real(&Extended::Finite(0.25)), "0.25");
        assert_eq!(format_extended_real(&Extended::Infinity), "inf");
    }
}
