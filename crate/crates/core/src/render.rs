//! One-pixel-per-cell images of a window of `H_{m,n}` values, written as binary PPM.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::closed_form::eval_closed;
use crate::error::Result;
use crate::oracle::oracle_column;
use crate::partition::Window;
use crate::value::HankelValue;

/// Tag identifying [`color`]; bump it whenever the mapping changes.
pub const PALETTE_VERSION: &str = "v1";

/// Zero is white; otherwise hue by sign and shade by `min(|v|, 15)`.
pub fn color(v: &HankelValue) -> [u8; 3] {
    if v.is_zero() {
        return [255, 255, 255];
    }
    let c = v.magnitude_capped(15) as u8;
    let (strong, mid) = (255 - 12 * c, 40 + 10 * c);
    if v.is_negative() {
        [40, mid, strong]
    } else {
        [strong, mid, 40]
    }
}

/// Axis layout. By default `m` grows rightward and `n` upward; `transpose`
/// swaps the two axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Layout {
    pub transpose: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    rgb: Vec<u8>,
}

impl Raster {
    fn blank(width: usize, height: usize) -> Self {
        Raster {
            width,
            height,
            rgb: vec![255; width * height * 3],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel at column `x`, row `y` (row 0 is the top of the image).
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.rgb[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn write_ppm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.rgb)?;
        out.flush()
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.rgb.len() + 32);
        self.write_ppm(&mut buf)
            .expect("writing to a Vec cannot fail");
        buf
    }
}

/// Image position of cell `(m, n)`.
pub fn pixel_of(window: Window, layout: Layout, m: u64, n: u64) -> (usize, usize) {
    let (x, y) = if layout.transpose {
        (n - window.n_min, window.m_max - m)
    } else {
        (m, window.n_max - n)
    };
    (x as usize, y as usize)
}

fn dimensions(window: Window, layout: Layout) -> (usize, usize) {
    let (w, h) = (window.width() as usize, window.height() as usize);
    if layout.transpose {
        (h, w)
    } else {
        (w, h)
    }
}

/// Renders per-column value vectors: `columns[m][n - n_min]`.
fn paint(window: Window, layout: Layout, columns: &[Vec<HankelValue>]) -> Raster {
    let (w, h) = dimensions(window, layout);
    let mut raster = Raster::blank(w, h);
    for (m, column) in columns.iter().enumerate() {
        for (j, v) in column.iter().enumerate() {
            let (x, y) = pixel_of(window, layout, m as u64, window.n_min + j as u64);
            raster.set(x, y, color(v));
        }
    }
    raster
}

/// Renders from an arbitrary evaluator, one column per `m` in parallel.
pub fn render_with<F>(window: Window, layout: Layout, eval: F) -> Result<Raster>
where
    F: Fn(u64, u64) -> Result<HankelValue> + Sync,
{
    if window.is_empty() {
        return Ok(Raster::blank(0, 0));
    }
    let columns: Vec<Vec<HankelValue>> = (0..=window.m_max)
        .into_par_iter()
        .map(|m| (window.n_min..=window.n_max).map(|n| eval(m, n)).collect())
        .collect::<Result<_>>()?;
    Ok(paint(window, layout, &columns))
}

/// Image of the closed-form values.
pub fn render_closed(window: Window, layout: Layout) -> Result<Raster> {
    render_with(window, layout, eval_closed)
}

/// Image of the determinant oracle, computed one leading-minor column per `m`.
pub fn render_oracle(window: Window, layout: Layout) -> Result<Raster> {
    if window.is_empty() {
        return Ok(Raster::blank(0, 0));
    }
    let columns: Vec<Vec<HankelValue>> = (0..=window.m_max)
        .into_par_iter()
        .map(|m| {
            let mut col = oracle_column(m, window.n_max)?;
            col.drain(..(window.n_min - 1) as usize);
            Ok(col)
        })
        .collect::<Result<_>>()?;
    Ok(paint(window, layout, &columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette() {
        assert_eq!(color(&HankelValue::zero()), [255, 255, 255]);
        assert_eq!(color(&HankelValue::from(1)), [243, 50, 40]);
        assert_eq!(color(&HankelValue::from(-2)), [40, 60, 231]);
        assert_eq!(color(&HankelValue::from(15)), [75, 190, 40]);
        assert_eq!(color(&HankelValue::from(1_000_000)), [75, 190, 40]);
        assert_eq!(color(&HankelValue::from(i64::MIN)), [40, 190, 75]);
    }

    #[test]
    fn small_window_orientation() {
        let w = Window::new(5, 3);
        let r = render_closed(w, Layout::default()).unwrap();
        assert_eq!((r.width(), r.height()), (6, 3));
        // (0, 1) sits bottom-left.
        assert_eq!(r.pixel(0, 2), [243, 50, 40]);
        let t = render_closed(w, Layout { transpose: true }).unwrap();
        assert_eq!((t.width(), t.height()), (3, 6));
        assert_eq!(t.pixel(0, 5), [243, 50, 40]);
        for m in 0..=5 {
            for n in 1..=3 {
                let (x, y) = pixel_of(w, Layout::default(), m, n);
                let (tx, ty) = pixel_of(w, Layout { transpose: true }, m, n);
                assert_eq!(r.pixel(x, y), t.pixel(tx, ty));
            }
        }
    }

    #[test]
    fn ppm_header() {
        let r = render_closed(Window::new(5, 3), Layout::default()).unwrap();
        let bytes = r.to_ppm();
        assert!(bytes.starts_with(b"P6\n6 3\n255\n"));
        assert_eq!(bytes.len(), b"P6\n6 3\n255\n".len() + 6 * 3 * 3);
        assert_eq!(bytes, r.to_ppm());
    }

    #[test]
    fn oracle_image_matches_on_small_window() {
        let w = Window::with_rows(40, 3, 20);
        assert_eq!(
            render_oracle(w, Layout::default()).unwrap(),
            render_closed(w, Layout::default()).unwrap()
        );
    }

    #[test]
    fn empty_window() {
        let r = render_closed(Window::new(4, 0), Layout::default()).unwrap();
        assert_eq!(r.to_ppm(), b"P6\n0 0\n255\n");
    }
}
