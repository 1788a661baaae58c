//! Strict decimal grammar for numeric flags: `<real>` and `<real>[±<real>i]`.

use askey_core::C64;

fn is_decimal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > start
    };
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let mut seen = digits(&mut i);
    if i < b.len() && b[i] == b'.' {
        i += 1;
        seen |= digits(&mut i);
    }
    if !seen {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        if !digits(&mut i) {
            return false;
        }
    }
    i == b.len()
}

pub fn parse_real(s: &str) -> Result<f64, String> {
    if !is_decimal(s) {
        return Err(format!("'{s}' is not a decimal number"));
    }
    let v: f64 = s.parse().map_err(|e| format!("'{s}': {e}"))?;
    if !v.is_finite() {
        return Err(format!("'{s}' is out of range"));
    }
    Ok(v)
}

/// Parses `<real>` or `<real>±<real>i`, e.g. `1.5`, `1.0+0.5i`, `2e-1-3i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(parse_real(s)?, 0.0));
    };
    let b = body.as_bytes();
    let split = (1..b.len()).rev().find(|&p| (b[p] == b'+' || b[p] == b'-') && !matches!(b[p - 1], b'e' | b'E'));
    let Some(p) = split else {
        return Err(format!("'{s}' does not match <real>[±<real>i]"));
    };
    let (re, im) = (&body[..p], &body[p..]);
    match (parse_real(re), parse_real(im)) {
        (Ok(re), Ok(im)) => Ok(C64::new(re, im)),
        _ => Err(format!("'{s}' does not match <real>[±<real>i]")),
    }
}

/// Formats with 15 significant digits, trailing zeros dropped.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let trim = |s: String| if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    let e = format!("{v:.14e}");
    let (mant, exp) = e.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        trim(format!("{:.*}", (14 - exp) as usize, v))
    } else {
        format!("{}e{exp}", trim(mant.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_grammar() {
        assert_eq!(parse_complex("1.0+0.5i"), Ok(C64::new(1.0, 0.5)));
        assert_eq!(parse_complex("1"), Ok(C64::new(1.0, 0.0)));
        assert_eq!(parse_complex("-2e-3-1.5i"), Ok(C64::new(-2e-3, -1.5)));
        assert_eq!(parse_complex("1e+2+3i"), Ok(C64::new(100.0, 3.0)));
        assert_eq!(parse_complex(".5-.25i"), Ok(C64::new(0.5, -0.25)));
        for bad in ["", "i", "0.5i", "1+i", "1+2j", "nan", "inf", "1.0 + 0.5i", "1+2i3", "1e", "--1", "1e400"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(3.0), "3");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_sig(123456.789), "123456.789");
        assert_eq!(fmt_sig(1.2246467991473532e-16), "1.22464679914735e-16");
        assert_eq!(fmt_sig(2.5e20), "2.5e20");
        assert_eq!(fmt_sig(9.9999999999999999), "10");
    }
}
