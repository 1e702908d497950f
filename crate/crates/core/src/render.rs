//! Raster figures: two-color pre-image plots, mesh (domain) coloring,
//! curve/zero overlays and binary PPM output.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lfunction::{eval_target, eval_target_with_derivative, Target};
use crate::preimage::{CurveComponent, Window};
use crate::zeros::Zero;

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];
/// Largest accepted width or height.
pub const MAX_SIDE: usize = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub window: Window,
    /// Row-major RGB, top row first.
    pub pixels: Vec<u8>,
    /// Set by [`rotate`]: the picture is turned a quarter counterclockwise.
    pub rotated: bool,
}

impl RasterImage {
    pub fn filled(width: usize, height: usize, window: Window, color: Rgb) -> RasterImage {
        RasterImage {
            width,
            height,
            window,
            pixels: color.repeat(width * height),
            rotated: false,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let k = 3 * (y * self.width + x);
        [self.pixels[k], self.pixels[k + 1], self.pixels[k + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        let k = 3 * (y * self.width + x);
        self.pixels[k..k + 3].copy_from_slice(&c);
    }

    /// The point sampled by pixel `(x, y)`: its center. Rows are placed
    /// symmetrically about the window's middle height, so a window symmetric
    /// about the real axis samples exactly mirrored points.
    pub fn pixel_center(&self, x: usize, y: usize) -> Complex64 {
        pixel_center(&self.window, self.width, self.height, x, y)
    }

    /// The pixel containing `s`, if inside the image.
    pub fn pixel_of(&self, s: Complex64) -> Option<(usize, usize)> {
        let (x, y) = pixel_coords(&self.window, self.width, self.height, s);
        (x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height).then(|| (x as usize, y as usize))
    }

    /// Whether the image equals its reflection across the horizontal midline.
    pub fn is_mirror_symmetric(&self) -> bool {
        let row = 3 * self.width;
        (0..self.height / 2).all(|y| {
            let a = &self.pixels[y * row..(y + 1) * row];
            let b = &self.pixels[(self.height - 1 - y) * row..(self.height - y) * row];
            a == b
        })
    }
}

fn pixel_center(w: &Window, width: usize, height: usize, x: usize, y: usize) -> Complex64 {
    let dx = w.width() / width as f64;
    let tc = 0.5 * (w.t_min + w.t_max);
    let span = w.height();
    Complex64::new(
        w.sigma_min + (x as f64 + 0.5) * dx,
        tc + span * (height as f64 - 1.0 - 2.0 * y as f64) / (2.0 * height as f64),
    )
}

fn pixel_coords(w: &Window, width: usize, height: usize, s: Complex64) -> (i64, i64) {
    let x = ((s.re - w.sigma_min) / w.width() * width as f64).floor();
    let y = ((w.t_max - s.im) / w.height() * height as f64).floor();
    (x as i64, y as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    TwoColor,
    Mesh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorScheme {
    pub mode: Mode,
    pub pos_color: Rgb,
    pub neg_color: Rgb,
    /// Mesh: number of rays `arg z = 2 pi k / n`.
    pub ray_count: usize,
    /// Mesh: circles `|z| = r`, strictly increasing.
    pub circle_radii: Vec<f64>,
}

impl ColorScheme {
    pub fn two_color() -> ColorScheme {
        ColorScheme {
            mode: Mode::TwoColor,
            pos_color: [238, 170, 51],
            neg_color: [51, 102, 204],
            ray_count: 8,
            circle_radii: vec![0.25, 0.5, 1.0, 2.0, 4.0],
        }
    }

    pub fn mesh() -> ColorScheme {
        ColorScheme {
            mode: Mode::Mesh,
            ..ColorScheme::two_color()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ray_count < 2 {
            return Err(Error::InvalidArgument("ray_count must be at least 2".into()));
        }
        if self.circle_radii.iter().any(|r| !(*r > 0.0)) || self.circle_radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("circle radii must be positive and strictly increasing".into()));
        }
        Ok(())
    }

    /// `+1` for the positive color (or its darkened band), `-1` for the
    /// negative one, `None` otherwise.
    pub fn classify(&self, c: Rgb) -> Option<i8> {
        if c == self.pos_color || c == darken(self.pos_color) {
            Some(1)
        } else if c == self.neg_color || c == darken(self.neg_color) {
            Some(-1)
        } else {
            None
        }
    }
}

fn darken(c: Rgb) -> Rgb {
    [c[0] / 2, c[1] / 2, c[2] / 2]
}

fn check_size(window: &Window, width: usize, height: usize) -> Result<()> {
    if window.is_degenerate() {
        return Err(Error::InvalidArgument("window must have positive width and height".into()));
    }
    if width == 0 || height == 0 || width > MAX_SIDE || height > MAX_SIDE {
        return Err(Error::InvalidArgument(format!(
            "image size {width}x{height} must be within 1..={MAX_SIDE} on each side"
        )));
    }
    Ok(())
}

/// Renders row by row in parallel; `paint` maps a sample point to a color.
fn render_rows(window: Window, width: usize, height: usize, paint: impl Fn(Complex64) -> Rgb + Sync) -> RasterImage {
    let mut pixels = vec![0u8; 3 * width * height];
    pixels.par_chunks_mut(3 * width).enumerate().for_each(|(y, row)| {
        for x in 0..width {
            let c = paint(pixel_center(&window, width, height, x, y));
            row[3 * x..3 * x + 3].copy_from_slice(&c);
        }
    });
    RasterImage {
        width,
        height,
        window,
        pixels,
        rotated: false,
    }
}

/// Two-color plot of `f` given `(f, f')` at each point: the sign of `Re f`
/// picks the color and a band `|Im f| < 2.5 h |f'|` (`h` the pixel width)
/// is darkened to draw the pre-image of the real axis. Points where the
/// evaluation fails (the pole) are white.
pub fn render_two_color_with(
    f: impl Fn(Complex64) -> Result<(Complex64, Complex64)> + Sync,
    window: Window,
    width: usize,
    height: usize,
    scheme: &ColorScheme,
) -> Result<RasterImage> {
    check_size(&window, width, height)?;
    let h = window.width() / width as f64;
    Ok(render_rows(window, width, height, |s| match f(s) {
        Ok((v, d)) if v.re.is_finite() && v.im.is_finite() => {
            let base = if v.re >= 0.0 { scheme.pos_color } else { scheme.neg_color };
            let dn = d.norm();
            if dn >= 1e-4 && v.im.abs() < 2.5 * h * dn {
                darken(base)
            } else {
                base
            }
        }
        _ => WHITE,
    }))
}

pub fn render_two_color(
    chi: &DirichletCharacter,
    window: Window,
    width: usize,
    height: usize,
    target: Target,
) -> Result<RasterImage> {
    let scheme = ColorScheme::two_color();
    let mut img = render_two_color_with(|s| eval_target_with_derivative(chi, target, s), window, width, height, &scheme)?;
    paint_pole(chi, &mut img);
    Ok(img)
}

fn paint_pole(chi: &DirichletCharacter, img: &mut RasterImage) {
    if chi.is_principal() {
        if let Some((x, y)) = img.pixel_of(Complex64::new(1.0, 0.0)) {
            img.set(x, y, WHITE);
        }
    }
}

/// Mesh color of `z`: hue by the sector around the nearest ray
/// `arg z = 2 pi k / n` (saturation grows with `k`, counterclockwise),
/// brightness by how many circle radii lie below `|z|`.
pub fn mesh_color(z: Complex64, scheme: &ColorScheme) -> Rgb {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return WHITE;
    }
    let n = scheme.ray_count;
    let width = 2.0 * PI / n as f64;
    let k = ((z.arg().rem_euclid(2.0 * PI) / width).round() as usize) % n;
    let r = z.norm();
    let band = scheme.circle_radii.iter().filter(|&&c| c <= r).count();
    let hue = 360.0 * k as f64 / n as f64;
    let sat = 0.35 + 0.65 * k as f64 / (n - 1) as f64;
    let val = 0.2 + 0.8 * band as f64 / scheme.circle_radii.len().max(1) as f64;
    hsv_to_rgb(hue, sat, val)
}

/// Brightness band index of `|z|` (0 = inside the smallest circle).
pub fn mesh_band(z: Complex64, scheme: &ColorScheme) -> usize {
    scheme.circle_radii.iter().filter(|&&c| c <= z.norm()).count()
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let hp = (h / 60.0).rem_euclid(6.0);
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to = |u: f64| ((u + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [to(r), to(g), to(b)]
}

pub fn render_mesh_with(
    f: impl Fn(Complex64) -> Result<Complex64> + Sync,
    window: Window,
    width: usize,
    height: usize,
    scheme: &ColorScheme,
) -> Result<RasterImage> {
    check_size(&window, width, height)?;
    scheme.validate()?;
    Ok(render_rows(window, width, height, |s| match f(s) {
        Ok(z) => mesh_color(z, scheme),
        Err(_) => WHITE,
    }))
}

pub fn render_mesh(
    chi: &DirichletCharacter,
    window: Window,
    width: usize,
    height: usize,
    scheme: &ColorScheme,
    target: Target,
) -> Result<RasterImage> {
    let mut img = render_mesh_with(|s| eval_target(chi, target, s), window, width, height, scheme)?;
    paint_pole(chi, &mut img);
    Ok(img)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayStyle {
    pub curve: Rgb,
    pub zero: Rgb,
}

impl Default for OverlayStyle {
    fn default() -> Self {
        OverlayStyle { curve: BLACK, zero: WHITE }
    }
}

/// Draws the curves (1-px Bresenham lines) and a 3x3 cross at each zero on
/// a copy of `image`; anything outside the image is clipped.
pub fn overlay_curves(image: &RasterImage, curves: &[CurveComponent], zeros: &[Zero], style: OverlayStyle) -> RasterImage {
    let mut out = image.clone();
    let (w, h) = (image.width as i64, image.height as i64);
    let put = |img: &mut RasterImage, x: i64, y: i64, c: Rgb| {
        if x >= 0 && y >= 0 && x < w && y < h {
            img.set(x as usize, y as usize, c);
        }
    };
    for curve in curves {
        for seg in curve.vertices.windows(2) {
            let (mut x0, mut y0) = pixel_coords(&image.window, image.width, image.height, seg[0]);
            let (x1, y1) = pixel_coords(&image.window, image.width, image.height, seg[1]);
            let outside = |x: i64, y: i64| x < 0 || y < 0 || x >= w || y >= h;
            if outside(x0, y0) && outside(x1, y1) {
                continue;
            }
            let dx = (x1 - x0).abs();
            let dy = -(y1 - y0).abs();
            let sx = if x0 < x1 { 1 } else { -1 };
            let sy = if y0 < y1 { 1 } else { -1 };
            let mut err = dx + dy;
            loop {
                put(&mut out, x0, y0, style.curve);
                if x0 == x1 && y0 == y1 {
                    break;
                }
                let e2 = 2 * err;
                if e2 >= dy {
                    err += dy;
                    x0 += sx;
                }
                if e2 <= dx {
                    err += dx;
                    y0 += sy;
                }
            }
        }
    }
    for z in zeros {
        let (x, y) = pixel_coords(&image.window, image.width, image.height, z.location);
        for (dx, dy) in [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)] {
            put(&mut out, x + dx, y + dy, style.zero);
        }
    }
    out
}

/// The image turned a quarter counterclockwise (width and height swap).
pub fn rotate(image: &RasterImage) -> RasterImage {
    let (w, h) = (image.width, image.height);
    let mut out = RasterImage::filled(h, w, image.window, BLACK);
    for y in 0..h {
        for x in 0..w {
            // top-right corner goes to the top-left
            out.set(y, w - 1 - x, image.get(x, y));
        }
    }
    out.rotated = !image.rotated;
    out
}

pub fn ppm_bytes(image: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.pixels);
    out
}

pub fn write_ppm(image: &RasterImage, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(&ppm_bytes(image)).map_err(io)?;
    f.flush().map_err(io)
}

/// For each zero whose whole 3x3 pixel neighbourhood lies in the image,
/// whether that neighbourhood holds both colors of `scheme`. Zeros on the
/// border pixels are skipped.
pub fn zero_junctions(image: &RasterImage, scheme: &ColorScheme, zeros: &[Complex64]) -> Vec<(Complex64, bool)> {
    zeros
        .iter()
        .filter_map(|&z| {
            let (x, y) = image.pixel_of(z)?;
            if x == 0 || y == 0 || x + 1 >= image.width || y + 1 >= image.height {
                return None;
            }
            let (mut pos, mut neg) = (false, false);
            for yy in y - 1..=y + 1 {
                for xx in x - 1..=x + 1 {
                    match scheme.classify(image.get(xx, yy)) {
                        Some(1) => pos = true,
                        Some(_) => neg = true,
                        None => {}
                    }
                }
            }
            Some((z, pos && neg))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    fn unit() -> Window {
        Window::new(0.0, 1.0, 0.0, 1.0)
    }

    #[test]
    fn one_white_pixel() {
        let img = RasterImage::filled(1, 1, unit(), WHITE);
        let bytes = ppm_bytes(&img);
        // 11 header bytes + one RGB triple
        assert_eq!(bytes.len(), 14);
        assert_eq!(&bytes, b"P6\n1 1\n255\n\xff\xff\xff");
    }

    #[test]
    fn red_then_blue() {
        let mut img = RasterImage::filled(2, 1, unit(), BLACK);
        img.set(0, 0, [255, 0, 0]);
        img.set(1, 0, [0, 0, 255]);
        assert_eq!(&ppm_bytes(&img)[11..], &[0xff, 0, 0, 0, 0, 0xff]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.ppm");
        write_ppm(&img, &p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), ppm_bytes(&img));
    }

    #[test]
    fn io_error_names_the_path() {
        let img = RasterImage::filled(1, 1, unit(), WHITE);
        let err = write_ppm(&img, Path::new("/nonexistent-dir/x.ppm")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.ppm"));
    }

    #[test]
    fn constant_function_gives_a_uniform_mesh() {
        let img = render_mesh_with(|_| Ok(Complex64::new(1.0, 0.0)), unit(), 7, 5, &ColorScheme::mesh()).unwrap();
        let first = img.get(0, 0);
        assert!(img.pixels.chunks(3).all(|c| c == first));
    }

    #[test]
    fn far_right_is_one_color() {
        let zeta = enumerate_characters(1).remove(0);
        let img = render_two_color(&zeta, Window::new(7.0, 9.0, -3.0, 3.0), 20, 30, Target::L).unwrap();
        let scheme = ColorScheme::two_color();
        assert!(img.pixels.chunks(3).all(|c| scheme.classify([c[0], c[1], c[2]]) == Some(1)));
    }

    #[test]
    fn pixel_centers_mirror_exactly() {
        let w = Window::new(-1.0, 1.0, -3.0, 3.0);
        for y in 0..7 {
            let a = pixel_center(&w, 4, 7, 1, y);
            let b = pixel_center(&w, 4, 7, 1, 6 - y);
            assert_eq!(a.im, -b.im);
        }
        let img = RasterImage::filled(4, 7, w, BLACK);
        assert_eq!(img.pixel_of(pixel_center(&w, 4, 7, 3, 5)), Some((3, 5)));
    }

    #[test]
    fn zeta_is_mirror_symmetric_and_rendering_is_deterministic() {
        let zeta = enumerate_characters(1).remove(0);
        let w = Window::new(-3.0, 3.0, -4.0, 4.0);
        let a = render_two_color(&zeta, w, 30, 41, Target::L).unwrap();
        let b = render_two_color(&zeta, w, 30, 41, Target::L).unwrap();
        assert_eq!(a, b);
        assert!(a.is_mirror_symmetric());
        // the pole pixel
        let (x, y) = a.pixel_of(Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(a.get(x, y), WHITE);
    }

    #[test]
    fn trivial_zero_is_a_color_junction() {
        let zeta = enumerate_characters(1).remove(0);
        let img = render_two_color(&zeta, Window::new(-3.0, -1.0, -1.0, 1.0), 61, 61, Target::L).unwrap();
        let j = zero_junctions(&img, &ColorScheme::two_color(), &[Complex64::new(-2.0, 0.0)]);
        assert_eq!(j, vec![(Complex64::new(-2.0, 0.0), true)]);
    }

    #[test]
    fn overlay_marks_a_cross_and_leaves_input_alone() {
        let img = RasterImage::filled(5, 5, Window::new(-1.0, 1.0, -1.0, 1.0), BLACK);
        assert_eq!(overlay_curves(&img, &[], &[], OverlayStyle::default()), img);
        let z = Zero::from_record(
            &crate::zeros::ZeroRecord {
                q: 1,
                index: 1,
                re: 0.0,
                im: 0.0,
                kind: crate::zeros::ZeroKind::Nontrivial,
                residual: 0.0,
                deriv_abs: 1.0,
            },
            Target::L,
        );
        let out = overlay_curves(&img, &[], &[z], OverlayStyle::default());
        let lit: Vec<(usize, usize)> = (0..5)
            .flat_map(|y| (0..5).map(move |x| (x, y)))
            .filter(|&(x, y)| out.get(x, y) == WHITE)
            .collect();
        assert_eq!(lit, vec![(2, 1), (1, 2), (2, 2), (3, 2), (2, 3)]);
        assert!(img.pixels.iter().all(|&b| b == 0));
    }

    #[test]
    fn rotation_moves_top_right_to_top_left() {
        let mut img = RasterImage::filled(3, 2, unit(), BLACK);
        img.set(2, 0, WHITE);
        let r = rotate(&img);
        assert_eq!((r.width, r.height), (2, 3));
        assert_eq!(r.get(0, 0), WHITE);
        assert_eq!(rotate(&rotate(&rotate(&rotate(&img)))), img);
    }

    #[test]
    fn mesh_sectors_centre_on_rays() {
        let s = ColorScheme::mesh();
        let a = mesh_color(Complex64::new(2.0, 1e-12), &s);
        let b = mesh_color(Complex64::new(2.0, -1e-12), &s);
        assert_eq!(a, b);
        assert_eq!(mesh_band(Complex64::new(0.1, 0.0), &s), 0);
        assert_eq!(mesh_band(Complex64::new(3.0, 0.0), &s), 4);
    }
}
