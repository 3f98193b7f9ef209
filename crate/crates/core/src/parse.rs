//! Parsing of complex scalars and coefficient lists as they appear on the
//! command line: `re`, `imi`, or `re+imi` (e.g. `2`, `-1.5i`, `0.3-0.7i`),
//! lists comma-separated in ascending degree.

use crate::error::{Error, Result};
use crate::polyalg::UniPoly;
use crate::Complex;

pub fn parse_complex(text: &str) -> Result<Complex> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::invalid("complex", "empty input"));
    }
    if s == "inf" {
        return Err(Error::invalid(
            "complex",
            "infinity is not a valid coefficient",
        ));
    }
    if let Some(body) = s.strip_suffix('i') {
        // forms: "bi", "a+bi", "a-bi"
        if let Some(split) = split_at_sign(body) {
            let (re, im) = split;
            return Ok(Complex::new(parse_real(re)?, parse_signed_imag(im)?));
        }
        return Ok(Complex::new(0.0, parse_signed_imag(body)?));
    }
    Ok(Complex::new(parse_real(&s)?, 0.0))
}

/// Split "a+b" / "a-b" at the last sign that is not an exponent sign and
/// not leading.
fn split_at_sign(s: &str) -> Option<(&str, &str)> {
    let bytes = s.as_bytes();
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            return Some((&s[..i], &s[i..]));
        }
    }
    None
}

fn parse_real(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::invalid("complex", format!("cannot parse {s:?} as a number")))
}

fn parse_signed_imag(s: &str) -> Result<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(s),
    }
}

/// Comma-separated coefficients, ascending degree.
pub fn parse_coeff_list(text: &str) -> Result<Vec<Complex>> {
    text.split(',').map(parse_complex).collect()
}

pub fn parse_unipoly(text: &str) -> Result<UniPoly> {
    Ok(UniPoly::new(parse_coeff_list(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_forms() {
        assert_eq!(parse_complex("2").unwrap(), Complex::new(2.0, 0.0));
        assert_eq!(parse_complex("-0.25").unwrap(), Complex::new(-0.25, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex::new(1.0, 2.0));
        assert_eq!(parse_complex("1-2i").unwrap(), Complex::new(1.0, -2.0));
        assert_eq!(parse_complex("-1.5i").unwrap(), Complex::new(0.0, -1.5));
        assert_eq!(parse_complex("i").unwrap(), Complex::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-3+2.5e2i").unwrap(),
            Complex::new(0.001, 250.0)
        );
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn coefficient_lists() {
        let got = parse_coeff_list("0,0,1").unwrap();
        assert_eq!(got.len(), 3);
        assert_eq!(got[2], Complex::new(1.0, 0.0));
        let got = parse_coeff_list("0.25, 0, 1").unwrap();
        assert_eq!(got[0], Complex::new(0.25, 0.0));
    }
}
