//! Decimal text for floats: 17 significant digits, `%.17g` layout.

/// Formats `x` like C's `%.17g`, so that parsing the text returns the
/// same bits. Non-finite values become `NaN`, `Inf` and `-Inf`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf".into() } else { "-Inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Cell text for an optional value; missing is `NA`.
pub fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), g17)
}

/// Parses a cell; `NA` and empty cells are missing.
pub fn parse_cell(s: &str) -> Option<std::result::Result<f64, std::num::ParseFloatError>> {
    let s = s.trim();
    if s.is_empty() || s == "NA" {
        None
    } else {
        Some(s.parse())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_layout() {
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(f64::NAN), "NaN");
    }

    #[test]
    fn round_trips_bits() {
        let mut state = 0x9E37_79B9_7F4A_7C15u64;
        for _ in 0..10_000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let x = f64::from_bits(state);
            if x.is_finite() {
                assert_eq!(g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x:e}");
            }
        }
        assert_eq!(g17(-0.0).parse::<f64>().unwrap().to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn missing_cells() {
        assert_eq!(cell(None), "NA");
        assert!(parse_cell(" NA ").is_none());
        assert!(parse_cell("").is_none());
        assert_eq!(parse_cell("2.5"), Some(Ok(2.5)));
    }
}
