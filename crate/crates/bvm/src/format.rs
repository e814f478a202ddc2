//! Text and binary formats: complex literals, paths, digit strings, grids, CSV
//! triplets and PGM/PPM rasters.

use std::fmt::Write as _;
use std::io::{self, Write};

use bvm_core::spectrum::{gray_levels, GridSpec, Raster};
use num_complex::Complex64;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {what} from `{input}`: {reason}")]
pub struct ParseError {
    pub what: &'static str,
    pub input: String,
    pub reason: String,
}

fn err(what: &'static str, input: &str, reason: impl Into<String>) -> ParseError {
    ParseError {
        what,
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Parses `re+imi` literals: `1.0+0.0i`, `-0.5-0.3i`, `2`, `0.3i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err("complex number", s, "empty"));
    }
    let num = |x: &str| -> Result<f64, ParseError> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x
                .parse::<f64>()
                .map_err(|e| err("complex number", s, e.to_string())),
        }
    };
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(num_strict(&t, s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(num_strict(&body[..k], s)?, num(&body[k..])?)),
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

fn num_strict(x: &str, s: &str) -> Result<f64, ParseError> {
    let v = x
        .parse::<f64>()
        .map_err(|e| err("complex number", s, e.to_string()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err("complex number", s, "not finite"))
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// `((s,m,r),…)`; the minimal path prints as `()`.
pub fn format_path(triples: &[(u32, u64, u32)]) -> String {
    let inner: Vec<String> = triples
        .iter()
        .map(|(s, m, r)| format!("({},{},{})", s, m, r))
        .collect();
    format!("({})", inner.join(","))
}

/// Structured form of a path: `[[level,source,order,range],…]`.
pub fn path_list(triples: &[(u32, u64, u32)]) -> String {
    let inner: Vec<String> = triples
        .iter()
        .enumerate()
        .map(|(k, (s, m, r))| format!("[{},{},{},{}]", k + 1, s, m, r))
        .collect();
    format!("[{}]", inner.join(","))
}

/// Structured form of a digit string: `[[δ1,γ1],…]`.
pub fn digit_list(pairs: &[(u32, u32)]) -> String {
    let inner: Vec<String> = pairs
        .iter()
        .map(|(d, g)| format!("[{},{}]", d, g))
        .collect();
    format!("[{}]", inner.join(","))
}

/// `((δ1,γ1),(δ2,γ2),…)`.
pub fn format_digits(pairs: &[(u32, u32)]) -> String {
    let inner: Vec<String> = pairs
        .iter()
        .map(|(d, g)| format!("({},{})", d, g))
        .collect();
    format!("({})", inner.join(","))
}

/// Parses `((1,2),(1,3),(1,1))`; the outer parentheses are optional and `()` is
/// the empty string.
pub fn parse_digits(s: &str) -> Result<Vec<(u32, u32)>, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = match t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        Some(r) if r.is_empty() || r.starts_with('(') => r,
        _ => t.as_str(),
    };
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = inner;
    loop {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| err("digit string", s, "expected `(`"))?;
        let close = body
            .find(')')
            .ok_or_else(|| err("digit string", s, "unbalanced parentheses"))?;
        let (d, g) = body[..close]
            .split_once(',')
            .ok_or_else(|| err("digit string", s, "each pair needs two digits"))?;
        let parse = |x: &str| {
            x.parse::<u32>()
                .map_err(|e| err("digit string", s, format!("digit `{}`: {}", x, e)))
        };
        out.push((parse(d)?, parse(g)?));
        rest = &body[close + 1..];
        if rest.is_empty() {
            break;
        }
        rest = rest
            .strip_prefix(',')
            .ok_or_else(|| err("digit string", s, "pairs must be separated by commas"))?;
    }
    Ok(out)
}

/// Parses `RE_MIN,RE_MAXxIM_MIN,IM_MAX:WxH`, e.g. `-2,2x-1.5,1.5:512x384`.
pub fn parse_grid(s: &str) -> Result<GridSpec, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (rect, size) = t
        .split_once(':')
        .ok_or_else(|| err("grid", s, "expected RE_MIN,RE_MAXxIM_MIN,IM_MAX:WxH"))?;
    let (re, im) = rect.split_once('x').ok_or_else(|| {
        err(
            "grid",
            s,
            "expected `x` between the real and imaginary ranges",
        )
    })?;
    let pair = |x: &str| -> Result<(f64, f64), ParseError> {
        let (a, b) = x
            .split_once(',')
            .ok_or_else(|| err("grid", s, format!("range `{}` needs two bounds", x)))?;
        let f = |v: &str| {
            v.parse::<f64>()
                .map_err(|e| err("grid", s, format!("bound `{}`: {}", v, e)))
        };
        Ok((f(a)?, f(b)?))
    };
    let (w, h) = size
        .split_once('x')
        .ok_or_else(|| err("grid", s, "size must be WxH"))?;
    let dim = |v: &str| {
        v.parse::<usize>()
            .map_err(|e| err("grid", s, format!("size `{}`: {}", v, e)))
    };
    GridSpec::new(pair(re)?, pair(im)?, dim(w)?, dim(h)?).map_err(|e| err("grid", s, e.to_string()))
}

/// 17 significant digits, positional notation for moderate magnitudes.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-6..=16).contains(&mag) {
        let decimals = (16 - mag).max(0) as usize;
        format!("{:.*}", decimals, v)
    } else {
        format!("{:.16e}", v)
    }
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `row,col,prob` lines under a header.
pub fn write_triplets<W: Write, P>(
    mut w: W,
    triplets: &[(u64, u64, P)],
    fmt: impl Fn(&P) -> String,
) -> io::Result<()> {
    let mut buf = String::from("row,col,prob\n");
    for (r, c, p) in triplets {
        let _ = writeln!(buf, "{},{},{}", r, c, fmt(p));
    }
    w.write_all(buf.as_bytes())
}

/// Binary PGM (P5, maxval 255).
pub fn encode_pgm(raster: &Raster, budget: usize) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend(gray_levels(&raster.data, budget));
    out
}

/// Binary PPM (P6): bounded pixels black, escapes on a blue-to-yellow ramp.
pub fn encode_ppm(raster: &Raster, budget: usize) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    for g in gray_levels(&raster.data, budget) {
        if g == 0 {
            out.extend([0, 0, 0]);
        } else {
            let t = u16::from(g);
            out.extend([g, (t * 3 / 4) as u8, (255 - t) as u8]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.0+0.0i").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(
            parse_complex("-0.5-0.3i").unwrap(),
            Complex64::new(-0.5, -0.3)
        );
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("0.3i").unwrap(), Complex64::new(0.0, 0.3));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-3+2E+1i").unwrap(),
            Complex64::new(1e-3, 20.0)
        );
        assert_eq!(
            parse_complex(" 1 - 2i ").unwrap(),
            Complex64::new(1.0, -2.0)
        );
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        let z = Complex64::new(0.25, -1.5);
        assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn digit_strings() {
        let d = parse_digits("((1,2),(1,3),(1,1))").unwrap();
        assert_eq!(d, [(1, 2), (1, 3), (1, 1)]);
        assert_eq!(format_digits(&d), "((1,2),(1,3),(1,1))");
        assert_eq!(parse_digits("(1,2),(0,0)").unwrap(), [(1, 2), (0, 0)]);
        assert_eq!(parse_digits("(3,0)").unwrap(), [(3, 0)]);
        assert_eq!(parse_digits("()").unwrap(), []);
        assert!(parse_digits("((1,2)").is_err());
        assert!(parse_digits("((1;2))").is_err());
        assert!(parse_digits("((1,-2))").is_err());
        assert_eq!(digit_list(&[(1, 2), (0, 0)]), "[[1,2],[0,0]]");
        assert_eq!(path_list(&[(2, 3, 2), (2, 2, 1)]), "[[1,2,3,2],[2,2,2,1]]");
        assert_eq!(path_list(&[]), "[]");
    }

    #[test]
    fn grids() {
        let g = parse_grid("-2,2x-1.5,1.5:64x48").unwrap();
        assert_eq!(
            (g.re_min, g.re_max, g.im_min, g.im_max),
            (-2.0, 2.0, -1.5, 1.5)
        );
        assert_eq!((g.width, g.height), (64, 48));
        assert!(parse_grid("-2,2:64x48").is_err());
        assert!(parse_grid("2,-2x-1,1:4x4").is_err());
        assert!(parse_grid("-2,2x-1,1:0x4").is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(format_f64(0.5), "0.50000000000000000");
        assert_eq!(format_f64(0.3).parse::<f64>().unwrap(), 0.3);
        assert_eq!(format_f64(1.0), "1.0000000000000000");
        assert_eq!(format_f64(1e-9).parse::<f64>().unwrap(), 1e-9);
        assert_eq!(format_f64(0.0), "0");
        let r = BigRational::new(3.into(), 10.into());
        assert_eq!(format_rational(&r), "3/10");
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_triplets(&mut out, &[(0, 0, 0.5), (0, 1, 0.5)], |p| format_f64(*p)).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "row,col,prob\n0,0,0.50000000000000000\n0,1,0.50000000000000000\n"
        );
    }

    #[test]
    fn raster_headers() {
        let r = Raster {
            width: 3,
            height: 1,
            data: vec![0, 1, 65],
        };
        assert_eq!(encode_pgm(&r, 64), b"P5\n3 1\n255\n\x00\xff\x01");
        let ppm = encode_ppm(&r, 64);
        assert!(ppm.starts_with(b"P6\n3 1\n255\n"));
        assert_eq!(ppm.len(), 11 + 9);
    }
}
