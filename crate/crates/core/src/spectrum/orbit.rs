use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float;

use super::SpectralParams;

/// Magnitude above which only `ln |z|` is tracked.
pub const HUGE: f64 = 1e100;

/// A coordinate of the fibered orbit: an exact floating-point value, or only its
/// log-magnitude once it has grown past [`HUGE`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coord {
    Value(Complex64),
    Huge(f64),
}

impl Coord {
    pub fn log_abs(&self) -> f64 {
        match *self {
            Coord::Value(z) => z.norm().ln(),
            Coord::Huge(l) => l,
        }
    }

    /// `|z| > r`, given `ln_r = ln r`.
    pub fn exceeds(&self, r: f64, ln_r: f64) -> bool {
        match *self {
            Coord::Value(z) => z.norm() > r,
            Coord::Huge(l) => l > ln_r,
        }
    }

    pub fn value(&self) -> Option<Complex64> {
        match *self {
            Coord::Value(z) => Some(z),
            Coord::Huge(_) => None,
        }
    }

    fn from_value(z: Complex64) -> Coord {
        if z.is_finite() && z.norm() <= HUGE {
            Coord::Value(z)
        } else {
            Coord::Huge(log_abs_robust(z))
        }
    }
}

fn log_abs_robust(z: Complex64) -> f64 {
    let n = z.norm();
    if n.is_finite() {
        n.ln()
    } else {
        f64::INFINITY
    }
}

/// `∏ z_j^{e_j}`.
///
/// When all coordinates with a positive exponent are equal the product is taken as
/// a single power, so equal coordinates with equal exponent sums stay bitwise equal.
pub fn monomial(zs: &[Complex64], exps: &[u32]) -> Complex64 {
    let mut first = None;
    let mut same = true;
    let mut total = 0usize;
    for (z, &e) in zs.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        total += e as usize;
        match first {
            None => first = Some(*z),
            Some(f) => same &= f == *z,
        }
    }
    let Some(f) = first else {
        return Complex64::new(1.0, 0.0);
    };
    if same {
        return num_traits::pow(f, total);
    }
    let mut acc: Option<Complex64> = None;
    for (z, &e) in zs.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        let t = num_traits::pow(*z, e as usize);
        acc = Some(match acc {
            None => t,
            Some(a) => a * t,
        });
    }
    acc.expect("at least one positive exponent")
}

fn log_monomial(zs: &[Coord], exps: &[u32]) -> f64 {
    let mut l = 0.0;
    for (z, &e) in zs.iter().zip(exps) {
        if e > 0 {
            l += f64::from(e) * z.log_abs();
        }
    }
    l
}

/// `(∏ z_j^{e_j} − (1 − p)) / p`, evaluated as `(∏ z_j^{e_j} − 1) / p + 1`. The
/// all-ones point is an exact fixed point of this form.
pub fn affine_monomial(zs: &[Coord], exps: &[u32], p: f64) -> Coord {
    let values: Option<Vec<Complex64>> = zs.iter().map(Coord::value).collect();
    if let Some(values) = values {
        let prod = monomial(&values, exps);
        if prod.is_finite() && prod.norm() <= HUGE {
            return Coord::from_value(affine(prod, p));
        }
    }
    let l = log_monomial(zs, exps);
    if l == f64::NEG_INFINITY {
        return Coord::Value(Complex64::new(-(1.0 - p) / p, 0.0));
    }
    Coord::Huge(l - p.ln())
}

/// `(z − 1) / p + 1`.
pub fn affine(z: Complex64, p: f64) -> Complex64 {
    (z - 1.0) / p + 1.0
}

/// One step of the fibered map at level `n` (coefficients of level `n`, `p_{n+1}`).
pub fn uw_step(u: Coord, w: Coord, n: usize, params: &SpectralParams) -> (Coord, Coord) {
    let [a, b, c, d] = params.coefficients(n);
    let p = params.p(n + 1);
    let zs = [u, w];
    (
        affine_monomial(&zs, &[a, b], p),
        affine_monomial(&zs, &[c, d], p),
    )
}

/// When to stop iterating.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    /// As soon as `u` escapes.
    U,
    /// As soon as either coordinate escapes.
    Either,
    /// Once both coordinates have escaped.
    Both,
    /// Never before the depth is reached.
    Never,
}

/// `(u_{F_n}, w_{F_n})` for `n = 0..=last`, with first escape indices.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberedOrbit {
    pub u: Vec<Coord>,
    pub w: Vec<Coord>,
    pub u_escape: Option<usize>,
    pub w_escape: Option<usize>,
    /// Whether `u_n = w_n` held bitwise at every computed step.
    pub components_equal: bool,
}

impl FiberedOrbit {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn max_log_u(&self) -> f64 {
        self.u
            .iter()
            .map(Coord::log_abs)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Iterates from `u_{F_0} = w_{F_0} = start` through index `depth` (inclusive).
pub fn orbit_from(
    start: Complex64,
    params: &SpectralParams,
    depth: usize,
    stop: Stop,
) -> FiberedOrbit {
    let r = params.radius();
    let ln_r = r.ln();
    let mut u = Coord::from_value(start);
    let mut w = u;
    let mut out = FiberedOrbit {
        u: Vec::with_capacity(depth + 1),
        w: Vec::with_capacity(depth + 1),
        u_escape: None,
        w_escape: None,
        components_equal: true,
    };
    for n in 0..=depth {
        if n > 0 {
            let next = uw_step(u, w, n, params);
            u = next.0;
            w = next.1;
        }
        out.components_equal &= u == w;
        out.u.push(u);
        out.w.push(w);
        if out.u_escape.is_none() && u.exceeds(r, ln_r) {
            out.u_escape = Some(n);
        }
        if out.w_escape.is_none() && w.exceeds(r, ln_r) {
            out.w_escape = Some(n);
        }
        let done = match stop {
            Stop::U => out.u_escape.is_some(),
            Stop::Either => out.u_escape.is_some() || out.w_escape.is_some(),
            Stop::Both => out.u_escape.is_some() && out.w_escape.is_some(),
            Stop::Never => false,
        };
        if done {
            break;
        }
    }
    out
}

/// The orbit seeded by `λ`.
pub fn fibered_orbit(
    lambda: Complex64,
    params: &SpectralParams,
    depth: usize,
    stop: Stop,
) -> FiberedOrbit {
    orbit_from(params.seed(lambda), params, depth, stop)
}
