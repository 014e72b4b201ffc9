//! Transverse field maps of a spin-orbit mode.
//!
//! `ψ_V` is the Hermite-Gaussian mode with lobes along `y` (odd under
//! reflection about the horizontal plane), `ψ_H` the one with lobes along
//! `x`. Unit waist, evaluated at the waist plane.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mode::SpinOrbitState;

/// Normalized first-order HG mode `√(2/π)·2u·e^{−(x²+y²)}` with `u` the lobe axis.
fn hg1(u: f64, x: f64, y: f64) -> f64 {
    (2.0 / PI).sqrt() * 2.0 * u * (-(x * x + y * y)).exp()
}

pub fn psi_v(x: f64, y: f64) -> f64 {
    hg1(y, x, y)
}

pub fn psi_h(x: f64, y: f64) -> f64 {
    hg1(x, x, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    /// Half-width of the square window `[−extent, extent]²`.
    pub extent: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, extent: f64) -> Result<Self> {
        if nx < 2 || ny < 2 || !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidGrid);
        }
        Ok(Self { nx, ny, extent })
    }

    /// Pixel-centre coordinates.
    fn coord(&self, i: usize, n: usize) -> f64 {
        let step = 2.0 * self.extent / n as f64;
        -self.extent + (i as f64 + 0.5) * step
    }

    pub fn pixel_area(&self) -> f64 {
        (2.0 * self.extent / self.nx as f64) * (2.0 * self.extent / self.ny as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pixel {
    pub x: f64,
    pub y: f64,
    pub ex: Complex64,
    pub ey: Complex64,
    pub intensity: f64,
    /// Ellipse orientation from the horizontal, radians in `(−π/2, π/2]`.
    pub orientation: f64,
    /// Ellipticity angle, radians in `[−π/4, π/4]`.
    pub ellipticity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: Grid,
    /// Row-major, `y` outer.
    pub pixels: Vec<Pixel>,
}

impl FieldMap {
    pub fn integrated_intensity(&self) -> f64 {
        self.pixels.iter().map(|p| p.intensity).sum::<f64>() * self.grid.pixel_area()
    }

    /// `x,y,intensity,orientation,ellipticity` per pixel.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "intensity", "orientation", "ellipticity"])?;
        for p in &self.pixels {
            w.write_record([
                format!("{:.6}", p.x),
                format!("{:.6}", p.y),
                format!("{:.9}", p.intensity),
                format!("{:.6}", p.orientation),
                format!("{:.6}", p.ellipticity),
            ])?;
        }
        w.flush()
    }

    /// Binary PGM of the intensity, scaled to the brightest pixel.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let max = self.pixels.iter().map(|p| p.intensity).fold(0.0, f64::max);
        write!(out, "P5\n{} {}\n255\n", self.grid.nx, self.grid.ny)?;
        // PGM rows run top to bottom; our rows run from −y upward
        for row in (0..self.grid.ny).rev() {
            let line: Vec<u8> = self.pixels[row * self.grid.nx..(row + 1) * self.grid.nx]
                .iter()
                .map(|p| {
                    if max > 0.0 {
                        (p.intensity / max * 255.0).round() as u8
                    } else {
                        0
                    }
                })
                .collect();
            out.write_all(&line)?;
        }
        Ok(())
    }
}

/// Evaluates `E = Σ A_{tp} ψ_t ê_p` on the grid. `E_x` is the H
/// polarization component, `E_y` the V one.
pub fn render_field(state: &SpinOrbitState, grid: &Grid) -> Result<FieldMap> {
    let grid = Grid::new(grid.nx, grid.ny, grid.extent)?;
    let mut pixels = Vec::with_capacity(grid.nx * grid.ny);
    for j in 0..grid.ny {
        let y = grid.coord(j, grid.ny);
        for i in 0..grid.nx {
            let x = grid.coord(i, grid.nx);
            let (v, h) = (psi_v(x, y), psi_h(x, y));
            let ex = state.a_vh() * v + state.a_hh() * h;
            let ey = state.a_vv() * v + state.a_hv() * h;
            pixels.push(pixel(x, y, ex, ey));
        }
    }
    Ok(FieldMap { grid, pixels })
}

fn pixel(x: f64, y: f64, ex: Complex64, ey: Complex64) -> Pixel {
    let s0 = ex.norm_sqr() + ey.norm_sqr();
    let s1 = ex.norm_sqr() - ey.norm_sqr();
    let cross = ex.conj() * ey;
    let (s2, s3) = (2.0 * cross.re, 2.0 * cross.im);
    let (orientation, ellipticity) = if s0 > 0.0 {
        (0.5 * s2.atan2(s1), 0.5 * (s3 / s0).clamp(-1.0, 1.0).asin())
    } else {
        (0.0, 0.0)
    };
    Pixel {
        x,
        y,
        ex,
        ey,
        intensity: s0,
        orientation,
        ellipticity,
    }
}
