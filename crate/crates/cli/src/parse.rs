//! Value parsers for command-line flags.

use lfmap::preimage::Window;
use num_complex::Complex64;

/// Parses `a`, `bi`, `a+bi` or `a-bi`, with optional whitespace; `i` alone
/// means `1i`.
pub fn complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse {text:?} as a complex number (expected a, bi, a+bi or a-bi)");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return match s.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Parses `"sigma0,sigma1,t0,t1"` into a nondegenerate window.
pub fn window(text: &str) -> Result<Window, String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("cannot parse window {text:?} (expected sigma0,sigma1,t0,t1)"))?;
    let [a, b, c, d] = parts[..] else {
        return Err(format!("window {text:?} needs exactly four numbers"));
    };
    let w = Window::new(a, b, c, d);
    if !(a < b && c < d) || parts.iter().any(|x| !x.is_finite()) {
        return Err(format!("window {text:?} is degenerate (need sigma0 < sigma1 and t0 < t1)"));
    }
    Ok(w)
}

/// Parses `WxH`.
pub fn size(text: &str) -> Result<(usize, usize), String> {
    let err = || format!("cannot parse size {text:?} (expected WIDTHxHEIGHT)");
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(err)?;
    let w: usize = w.trim().parse().map_err(|_| err())?;
    let h: usize = h.trim().parse().map_err(|_| err())?;
    if w == 0 || h == 0 {
        return Err(err());
    }
    Ok((w, h))
}

/// A strictly positive real.
pub fn positive(text: &str) -> Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("{text:?} is not a positive number")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        assert_eq!(complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(complex("0.5+14.134725i").unwrap(), c(0.5, 14.134725));
        assert_eq!(complex(" 2 - 3i ").unwrap(), c(2.0, -3.0));
        assert_eq!(complex("-2-3i").unwrap(), c(-2.0, -3.0));
        assert_eq!(complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(complex("1+i").unwrap(), c(1.0, 1.0));
        assert_eq!(complex("1e-3+2E+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(complex("-1e2").unwrap(), c(-100.0, 0.0));
    }

    #[test]
    fn complex_rejects_junk() {
        for bad in ["", "i+1", "1+2j", "abc", "1++2i", "nan", "inf+1i"] {
            assert!(complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn windows_and_sizes() {
        let w = window("-2, 6, 10, 30").unwrap();
        assert_eq!((w.sigma_min, w.sigma_max, w.t_min, w.t_max), (-2.0, 6.0, 10.0, 30.0));
        assert!(window("1,1,0,2").is_err());
        assert!(window("1,2,3").is_err());
        assert_eq!(size("600x1200").unwrap(), (600, 1200));
        assert!(size("0x3").is_err());
        assert!(positive("-1").is_err());
    }
}
