//! Value parsers for command-line flags.

use num_complex::Complex64;
use qchaos::boson::roots_of_unity;
use qchaos::measure::{W_CRITICAL, W_GOLDEN};
use qchaos::Point;

/// A float, or `wc` / `golden` for the two named weights.
pub fn weight(s: &str) -> Result<f64, String> {
    match s.trim() {
        "wc" | "w_c" => Ok(W_CRITICAL),
        "golden" => Ok(W_GOLDEN),
        other => other
            .parse()
            .map_err(|_| format!("expected a number, 'wc' or 'golden', got '{other}'")),
    }
}

/// `re,im` or a bare real number.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("expected 're,im', got '{s}'");
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Complex64::new(s.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

/// `x,y` or `x`.
pub fn point(s: &str) -> Result<Point, String> {
    complex(s).map(|z| Point::new(z.re, z.im))
}

/// A list of bath amplitudes given as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitudes(pub Vec<Complex64>);

/// A comma-separated list of floats given as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct Floats(pub Vec<f64>);

pub fn amplitudes(s: &str) -> Result<Amplitudes, String> {
    betas(s).map(Amplitudes)
}

/// `roots<M>`, `shifted-roots<M>` (roots moved by `2 + 2i`), or `re,im;re,im;…`.
pub fn betas(s: &str) -> Result<Vec<Complex64>, String> {
    let s = s.trim();
    let count = |tail: &str| -> Result<usize, String> {
        match tail.parse::<usize>() {
            Ok(m) if m > 0 => Ok(m),
            _ => Err(format!("bad vertex count in '{s}'")),
        }
    };
    if let Some(m) = s.strip_prefix("shifted-roots") {
        let shift = Complex64::new(2.0, 2.0);
        return Ok(roots_of_unity(count(m)?).into_iter().map(|b| b + shift).collect());
    }
    if let Some(m) = s.strip_prefix("roots") {
        return Ok(roots_of_unity(count(m)?));
    }
    s.split(';').map(complex).collect()
}

pub fn floats(s: &str) -> Result<Floats, String> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("bad number '{x}'")))
        .collect::<Result<_, _>>()
        .map(Floats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        assert_eq!(weight("0.25").unwrap(), 0.25);
        assert_eq!(weight("wc").unwrap(), W_CRITICAL);
        assert!(weight("half").is_err());
    }

    #[test]
    fn amplitude_lists() {
        assert_eq!(betas("roots3").unwrap().len(), 3);
        let s = betas("shifted-roots2").unwrap();
        assert_eq!(s[0], Complex64::new(3.0, 2.0));
        assert_eq!(betas("1,0; 0,-1").unwrap(), vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)]);
        assert!(betas("roots0").is_err());
        assert!(betas("1;x").is_err());
        assert_eq!(complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
    }
}
