//! Spin-orbit mode algebra.
//!
//! A mode is a vector in the 4-dimensional product space spanned by the
//! first-order Hermite-Gaussian doublet {ψ_V, ψ_H} and the linear
//! polarization pair {ê_V, ê_H}. Coordinates are always ordered
//! `(VV, VH, HV, HH)` with the transverse label first.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::Vector4;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Tolerance on `Σ|A|² = 1` for states that claim to be normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Norms below this cannot be normalized.
pub const MIN_NORM: f64 = 1e-9;

pub const VV: usize = 0;
pub const VH: usize = 1;
pub const HV: usize = 2;
pub const HH: usize = 3;

/// Transverse (orbital) label of a first-order HG mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transverse {
    V,
    H,
}

/// Linear polarization label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    V,
    H,
}

impl Transverse {
    pub(crate) fn index(self) -> usize {
        match self {
            Transverse::V => 0,
            Transverse::H => 1,
        }
    }
}

impl Polarization {
    pub(crate) fn index(self) -> usize {
        match self {
            Polarization::V => 0,
            Polarization::H => 1,
        }
    }
}

/// Flat coordinate of the product basis element `ψ_t ê_p`.
pub fn basis_index(t: Transverse, p: Polarization) -> usize {
    2 * t.index() + p.index()
}

/// Complex amplitudes `(A₁, A₂, A₃, A₄)` of a spin-orbit mode.
///
/// Values produced by element operators or port splits need not be
/// normalized; operations that require a unit vector check it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOrbitState {
    pub(crate) amps: Vector4<Complex64>,
}

impl SpinOrbitState {
    pub fn new(a_vv: Complex64, a_vh: Complex64, a_hv: Complex64, a_hh: Complex64) -> Self {
        Self {
            amps: Vector4::new(a_vv, a_vh, a_hv, a_hh),
        }
    }

    /// Real-amplitude shorthand.
    pub fn from_real(a: [f64; 4]) -> Self {
        Self::new(a[0].into(), a[1].into(), a[2].into(), a[3].into())
    }

    pub fn from_amplitudes(a: [Complex64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub(crate) fn from_vector(amps: Vector4<Complex64>) -> Self {
        Self { amps }
    }

    pub fn zero() -> Self {
        Self::from_real([0.0; 4])
    }

    /// The product basis element `ψ_t ê_p`.
    pub fn basis(t: Transverse, p: Polarization) -> Self {
        let mut amps = Vector4::zeros();
        amps[basis_index(t, p)] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn a_vv(&self) -> Complex64 {
        self.amps[VV]
    }

    pub fn a_vh(&self) -> Complex64 {
        self.amps[VH]
    }

    pub fn a_hv(&self) -> Complex64 {
        self.amps[HV]
    }

    pub fn a_hh(&self) -> Complex64 {
        self.amps[HH]
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.amps[0], self.amps[1], self.amps[2], self.amps[3]]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::Unnormalized {
                norm_sqr: self.norm_sqr(),
            })
        }
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm >= MIN_NORM) {
            return Err(Error::ZeroNorm { norm });
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            amps: self.amps * k,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            amps: self.amps + other.amps,
        }
    }

    /// Rotates the global phase so that amplitude `index` is real and
    /// non-negative. Leaves the state untouched if that amplitude is zero.
    pub fn with_reference_phase(&self, index: usize) -> Self {
        let a = self.amps[index];
        if a.norm() == 0.0 {
            return *self;
        }
        self.scale(Complex64::from_polar(1.0, -a.arg()))
    }

    /// Largest component-wise distance after aligning global phases.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap = inner(other, self);
        let phase = if overlap.norm() > 0.0 {
            Complex64::from_polar(1.0, -overlap.arg())
        } else {
            Complex64::new(1.0, 0.0)
        };
        let aligned = self.scale(phase);
        aligned
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest component-wise distance.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for SpinOrbitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = ["VV", "VH", "HV", "HH"];
        for (i, (label, a)) in labels.iter().zip(self.amps.iter()).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{label}: {:.6}{:+.6}i", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Hermitian inner product, conjugate-linear in `a`.
pub fn inner(a: &SpinOrbitState, b: &SpinOrbitState) -> Complex64 {
    a.amps
        .iter()
        .zip(b.amps.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// The maximally non-separable mode `(ψ_V ê_V + ψ_H ê_H)/√2`.
pub fn make_mns() -> SpinOrbitState {
    SpinOrbitState::from_real([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])
}

/// Coefficients of a product mode `(b1 ψ_V + b2 ψ_H)(b3 ê_V + b4 ê_H)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableSpec {
    pub b1: Complex64,
    pub b2: Complex64,
    pub b3: Complex64,
    pub b4: Complex64,
}

impl SeparableSpec {
    pub fn new(b1: Complex64, b2: Complex64, b3: Complex64, b4: Complex64) -> Self {
        Self { b1, b2, b3, b4 }
    }

    pub fn from_real(b: [f64; 4]) -> Self {
        Self::new(b[0].into(), b[1].into(), b[2].into(), b[3].into())
    }

    pub fn validate(&self) -> Result<()> {
        let transverse = self.b1.norm_sqr() + self.b2.norm_sqr();
        let polarization = self.b3.norm_sqr() + self.b4.norm_sqr();
        if !(transverse > 0.0) {
            return Err(Error::DegenerateSeparable("transverse factor is zero"));
        }
        if !(polarization > 0.0) {
            return Err(Error::DegenerateSeparable("polarization factor is zero"));
        }
        Ok(())
    }

    /// Haar-random factors: each factor is an independent random qubit.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut c = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        Self::new(c(), c(), c(), c())
    }
}

pub fn make_separable(spec: &SeparableSpec) -> Result<SpinOrbitState> {
    spec.validate()?;
    SpinOrbitState::new(
        spec.b1 * spec.b3,
        spec.b1 * spec.b4,
        spec.b2 * spec.b3,
        spec.b2 * spec.b4,
    )
    .normalize()
}

/// Uniformly distributed pure state: eight standard normals, normalized.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> SpinOrbitState {
    loop {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        for a in amps.iter_mut() {
            *a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        if let Ok(s) = SpinOrbitState::from_amplitudes(amps).normalize() {
            return s;
        }
    }
}

/// `2|A₂A₃ − A₁A₄|`. Requires a normalized state.
pub fn concurrence(state: &SpinOrbitState) -> Result<f64> {
    state.ensure_normalized()?;
    let [a1, a2, a3, a4] = state.amplitudes();
    Ok(2.0 * (a2 * a3 - a1 * a4).norm())
}

/// Half-wave-plate angle `alpha` and Dove-prism angle `beta`, in radians,
/// reduced modulo π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    alpha: f64,
    beta: f64,
}

impl MeasurementSetting {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self {
            alpha: reduce_mod(alpha, PI),
            beta: reduce_mod(beta, PI),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Rotated polarization basis `(ê_{α+}, ê_{α−})` as `[V, H]` coordinates.
    pub fn polarization_basis(&self) -> [[f64; 2]; 2] {
        rotated_pair(self.alpha)
    }

    /// Rotated transverse basis `(ψ_{β+}, ψ_{β−})` as `[V, H]` coordinates.
    pub fn transverse_basis(&self) -> [[f64; 2]; 2] {
        rotated_pair(self.beta)
    }

    /// Basis states `ψ_{β±} ê_{α±}` in the order `++, +−, −+, −−`
    /// (transverse sign first).
    pub fn rotated_basis(&self) -> [SpinOrbitState; 4] {
        let t = self.transverse_basis();
        let p = self.polarization_basis();
        let product = |ti: usize, pi: usize| {
            SpinOrbitState::from_real([
                t[ti][0] * p[pi][0],
                t[ti][0] * p[pi][1],
                t[ti][1] * p[pi][0],
                t[ti][1] * p[pi][1],
            ])
        };
        [product(0, 0), product(0, 1), product(1, 0), product(1, 1)]
    }
}

fn rotated_pair(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = (2.0 * angle).sin_cos();
    [[c, s], [s, -c]]
}

pub(crate) fn reduce_mod(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can round up to exactly `period`
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Amplitudes on the rotated basis `{ψ_{β±} ê_{α±}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedExpansion {
    pub c_pp: Complex64,
    pub c_pm: Complex64,
    pub c_mp: Complex64,
    pub c_mm: Complex64,
}

impl RotatedExpansion {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.c_pp, self.c_pm, self.c_mp, self.c_mm]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.as_array().iter().map(|c| c.norm_sqr()).sum()
    }

    /// Reads the rotated coordinates back as a standard-basis state.
    pub fn as_state(&self) -> SpinOrbitState {
        SpinOrbitState::from_amplitudes(self.as_array())
    }

    /// `I₊₊ + I₋₋ − I₊₋ − I₋₊` over the expansion weights.
    pub fn correlation(&self) -> f64 {
        self.c_pp.norm_sqr() + self.c_mm.norm_sqr() - self.c_pm.norm_sqr() - self.c_mp.norm_sqr()
    }
}

/// Projects `state` onto the rotated basis selected by `setting`.
pub fn expand_rotated(state: &SpinOrbitState, setting: &MeasurementSetting) -> RotatedExpansion {
    let [pp, pm, mp, mm] = setting.rotated_basis();
    RotatedExpansion {
        c_pp: inner(&pp, state),
        c_pm: inner(&pm, state),
        c_mp: inner(&mp, state),
        c_mm: inner(&mm, state),
    }
}

/// Even and odd weights `(A_e, A_o)` of the MNS mode in the rotated basis.
pub fn mns_rotated_weights(setting: &MeasurementSetting) -> (f64, f64) {
    let (sa, ca) = (2.0 * setting.alpha()).sin_cos();
    let (sb, cb) = (2.0 * setting.beta()).sin_cos();
    (ca * cb + sa * sb, ca * sb - sa * cb)
}
