use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::membership::{e_membership, f_membership, pt_membership, MembershipResult, SetKind};
use super::SpectralParams;
use crate::{Error, Result};

/// A rectangle of the `λ` plane sampled at `width × height` pixel centres. Row 0
/// is the top (largest imaginary part).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(re: (f64, f64), im: (f64, f64), width: usize, height: usize) -> Result<Self> {
        let g = GridSpec {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
            width,
            height,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidGrid(format!(
                "{}x{} has no pixels",
                self.width, self.height
            )));
        }
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::InvalidGrid(format!(
                "rectangle [{}, {}] x [{}, {}] is degenerate",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        Ok(())
    }

    /// Centre of pixel `(x, y)`, offset from the rectangle centre by exact
    /// half-integer multiples of the pixel size, so rectangles symmetric about the
    /// real axis sample exactly conjugate points in mirrored rows.
    pub fn pixel(&self, x: usize, y: usize) -> Complex64 {
        let dx = (self.re_max - self.re_min) / self.width as f64;
        let dy = (self.im_max - self.im_min) / self.height as f64;
        let cx = 0.5 * (self.re_min + self.re_max);
        let cy = 0.5 * (self.im_min + self.im_max);
        let ox = x as f64 + 0.5 - 0.5 * self.width as f64;
        let oy = 0.5 * self.height as f64 - y as f64 - 0.5;
        Complex64::new(cx + ox * dx, cy + oy * dy)
    }
}

/// Pixel codes, row-major: 0 for bounded, otherwise escape index + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u32>,
}

impl Raster {
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[u32] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn bounded_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 0).count()
    }

    /// The raster reflected top to bottom.
    pub fn mirrored(&self) -> Raster {
        let mut data = Vec::with_capacity(self.data.len());
        for y in (0..self.height).rev() {
            data.extend_from_slice(self.row(y));
        }
        Raster {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn gray(&self, budget: usize) -> Vec<u8> {
        gray_levels(&self.data, budget)
    }
}

/// Bounded pixels map to 0; escape codes `v ≥ 1` map affinely from 255 (escaped at
/// index 0) down to 1 (escaped at the last index).
pub fn gray_levels(codes: &[u32], budget: usize) -> Vec<u8> {
    let span = budget.max(1) as u64;
    codes
        .iter()
        .map(|&v| {
            if v == 0 {
                0
            } else {
                let k = (u64::from(v) - 1).min(span);
                (255 - k * 254 / span) as u8
            }
        })
        .collect()
}

pub fn classify(lambda: Complex64, params: &SpectralParams, set: SetKind) -> MembershipResult {
    match set {
        SetKind::F => f_membership(lambda, params),
        SetKind::E => e_membership(lambda, params),
        SetKind::Pt => pt_membership(lambda, params),
    }
}

pub fn render_row(grid: &GridSpec, y: usize, params: &SpectralParams, set: SetKind) -> Vec<u32> {
    (0..grid.width)
        .map(|x| classify(grid.pixel(x, y), params, set).code())
        .collect()
}

pub fn render_set(grid: &GridSpec, params: &SpectralParams, set: SetKind) -> Raster {
    let mut data = Vec::with_capacity(grid.width * grid.height);
    for y in 0..grid.height {
        data.extend(render_row(grid, y, params, set));
    }
    Raster {
        width: grid.width,
        height: grid.height,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::ratio;
    use crate::process::ProbSchedule;

    fn quad(num: i64, den: i64) -> SpectralParams {
        SpectralParams::stationary(
            [1, 1, 1, 1],
            ProbSchedule::constant(ratio(num, den)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn single_pixel_at_one() {
        let g = GridSpec::new((0.5, 1.5), (-0.5, 0.5), 1, 1).unwrap();
        assert_eq!(g.pixel(0, 0), Complex64::new(1.0, 0.0));
        let r = render_set(&g, &quad(1, 2), SetKind::F);
        assert_eq!(r.data, [0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new((0.0, 1.0), (0.0, 1.0), 0, 4).is_err());
        assert!(GridSpec::new((1.0, 1.0), (0.0, 1.0), 4, 4).is_err());
        assert!(GridSpec::new((0.0, f64::NAN), (0.0, 1.0), 4, 4).is_err());
    }

    #[test]
    fn symmetric_rows_are_conjugate() {
        let g = GridSpec::new((-2.0, 2.0), (-1.7, 1.7), 9, 7).unwrap();
        for y in 0..7 {
            for x in 0..9 {
                assert_eq!(g.pixel(x, y), g.pixel(x, 6 - y).conj());
            }
        }
        assert_eq!(g.pixel(0, 0).im, 1.7 - 3.4 / 14.0);
    }

    #[test]
    fn conjugate_symmetric_raster() {
        let g = GridSpec::new((-2.0, 2.0), (-2.0, 2.0), 24, 25).unwrap();
        for p in [quad(1, 2), quad(4, 5)] {
            let r = render_set(&g, &p, SetKind::E);
            assert_eq!(r, r.mirrored());
            assert!(r.bounded_count() > 0);
        }
        let m =
            SpectralParams::stationary([2, 1, 3, 1], ProbSchedule::constant(ratio(3, 5)).unwrap())
                .unwrap();
        let r = render_set(&g, &m, SetKind::F);
        assert_eq!(r, r.mirrored());
    }

    #[test]
    fn unit_disk_at_p_one() {
        let p = quad(1, 1);
        let g = GridSpec::new((-1.5, 1.5), (-1.5, 1.5), 32, 32).unwrap();
        let r = render_set(&g, &p, SetKind::F);
        for y in 0..32 {
            for x in 0..32 {
                let n = g.pixel(x, y).norm();
                if n < 0.95 {
                    assert_eq!(r.get(x, y), 0);
                } else if n > 1.05 {
                    assert_ne!(r.get(x, y), 0);
                }
            }
        }
    }

    #[test]
    fn gray_map() {
        assert_eq!(gray_levels(&[0, 1, 33, 65, 99], 64), [0, 255, 128, 1, 1]);
        assert_eq!(gray_levels(&[1, 2], 0), [255, 1]);
    }
}
