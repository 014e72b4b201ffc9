//! Optical elements and the two stages of the spin-orbit Bell experiment.
//!
//! Elements are 4×4 operators on [`SpinOrbitState`] coordinates. Beam
//! splitters act on a pair of paths ([`TwoPath`]) rather than on the mode
//! space, so interferometers are simulated path by path.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, TAU};

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mode::{
    expand_rotated, reduce_mod, MeasurementSetting, Polarization, RotatedExpansion, SpinOrbitState,
    Transverse, HH,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalOperator {
    m: Matrix4<Complex64>,
    unitary: bool,
}

impl OpticalOperator {
    pub fn identity() -> Self {
        Self {
            m: Matrix4::identity(),
            unitary: true,
        }
    }

    /// `transverse ⊗ polarization`, matching the `(VV, VH, HV, HH)` ordering.
    pub fn product(transverse: &Matrix2<Complex64>, polarization: &Matrix2<Complex64>) -> Self {
        let k = transverse.kronecker(polarization);
        let m = Matrix4::from_fn(|r, c| k[(r, c)]);
        Self {
            m,
            unitary: is_unitary(&m, 1e-12),
        }
    }

    pub fn polarization_only(block: &Matrix2<Complex64>) -> Self {
        Self::product(&Matrix2::identity(), block)
    }

    pub fn transverse_only(block: &Matrix2<Complex64>) -> Self {
        Self::product(block, &Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    /// False for projections such as beam-splitter port selections.
    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn unitarity_error(&self) -> f64 {
        let d = self.m.adjoint() * self.m - Matrix4::identity();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, state: &SpinOrbitState) -> SpinOrbitState {
        SpinOrbitState::from_vector(self.m * state.amps)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &OpticalOperator) -> OpticalOperator {
        OpticalOperator {
            m: next.m * self.m,
            unitary: self.unitary && next.unitary,
        }
    }

    pub fn compose<'a>(ops: impl IntoIterator<Item = &'a OpticalOperator>) -> OpticalOperator {
        ops.into_iter()
            .fold(OpticalOperator::identity(), |acc, op| acc.then(op))
    }
}

fn is_unitary(m: &Matrix4<Complex64>, tol: f64) -> bool {
    let d = m.adjoint() * m - Matrix4::identity();
    d.iter().all(|z| z.norm() <= tol)
}

/// `[[cos2θ, sin2θ], [sin2θ, −cos2θ]]` on a `(V, H)` doublet.
fn reflection_block(theta: f64) -> Matrix2<Complex64> {
    let (s, c) = (2.0 * theta).sin_cos();
    Matrix2::new(c.into(), s.into(), s.into(), (-c).into())
}

pub fn half_wave_plate(theta: f64) -> OpticalOperator {
    OpticalOperator::polarization_only(&reflection_block(theta))
}

/// Image-rotating prism acting on the transverse doublet like a half-wave
/// plate acts on polarization.
pub fn dove_prism(theta: f64) -> OpticalOperator {
    OpticalOperator::transverse_only(&reflection_block(theta))
}

pub fn phase_shift(phi: f64) -> OpticalOperator {
    OpticalOperator {
        m: Matrix4::identity() * Complex64::from_polar(1.0, phi),
        unitary: true,
    }
}

/// Image reflection about the horizontal plane: the parity operator.
/// `ψ_V ê_V` and `ψ_H ê_H` are even, `ψ_V ê_H` and `ψ_H ê_V` odd.
pub fn horizontal_mirror() -> OpticalOperator {
    dove_prism(0.0).then(&half_wave_plate(0.0))
}

/// Port of a polarizing beam splitter that passes `pol`. Not unitary.
pub fn polarizer(pol: Polarization) -> OpticalOperator {
    let mut block = Matrix2::zeros();
    block[(pol.index(), pol.index())] = ONE;
    let mut op = OpticalOperator::polarization_only(&block);
    op.unitary = false;
    op
}

/// Preparation phase `phi` and MZIM phase `chi`, both reduced modulo 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    phi: f64,
    chi: f64,
}

impl PhaseConfig {
    pub fn new(phi: f64, chi: f64) -> Self {
        Self {
            phi: reduce_mod(phi, TAU),
            chi: reduce_mod(chi, TAU),
        }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }
}

/// Field in the two paths between a pair of beam splitters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPath {
    pub upper: SpinOrbitState,
    pub lower: SpinOrbitState,
}

impl TwoPath {
    pub fn single(input: SpinOrbitState) -> Self {
        Self {
            upper: input,
            lower: SpinOrbitState::zero(),
        }
    }

    /// Symmetric lossless 50/50 splitter; reflection picks up a factor `i`.
    pub fn beam_splitter(&self) -> Self {
        let k = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            upper: self.upper.add(&self.lower.scale(I)).scale(k),
            lower: self.upper.scale(I).add(&self.lower).scale(k),
        }
    }

    pub fn apply_upper(&self, op: &OpticalOperator) -> Self {
        Self {
            upper: op.apply(&self.upper),
            lower: self.lower,
        }
    }

    pub fn apply_lower(&self, op: &OpticalOperator) -> Self {
        Self {
            upper: self.upper,
            lower: op.apply(&self.lower),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }
}

/// Runs a Mach-Zehnder interferometer: split, transform each arm, recombine.
pub fn mach_zehnder(
    input: &SpinOrbitState,
    upper_arm: &OpticalOperator,
    lower_arm: &OpticalOperator,
) -> TwoPath {
    TwoPath::single(*input)
        .beam_splitter()
        .apply_upper(upper_arm)
        .apply_lower(lower_arm)
        .beam_splitter()
}

/// Output of the holographic mask: `ψ_V ê_H`.
pub fn mask_output() -> SpinOrbitState {
    SpinOrbitState::basis(Transverse::V, Polarization::H)
}

/// Output port of the preparation interferometer, before renormalization.
///
/// One arm carries `HWP@45°` followed by the phase `phi`, the other
/// `DP@45°`. The lower port of the second splitter is the one used.
pub fn preparation_port(input: &SpinOrbitState, phi: f64) -> SpinOrbitState {
    let hwp_arm = half_wave_plate(FRAC_PI_4).then(&phase_shift(phi));
    let dove_arm = dove_prism(FRAC_PI_4);
    mach_zehnder(input, &hwp_arm, &dove_arm).lower
}

/// `(ψ_H ê_H + e^{iφ} ψ_V ê_V)/√2`, simulated through the preparation stage
/// and renormalized, with the global phase referenced to the Dove arm.
pub fn prepare_mns(phi: f64) -> SpinOrbitState {
    preparation_port(&mask_output(), phi)
        .normalize()
        .expect("preparation port carries half the input power")
        .with_reference_phase(HH)
}

/// The four analysis amplitudes `A^{±±}(φ)`, scaled by `1/√2` so that their
/// weights sum to one.
pub fn analysis_amplitudes(phi: f64, setting: &MeasurementSetting) -> RotatedExpansion {
    let (sa, ca) = (2.0 * setting.alpha()).sin_cos();
    let (sb, cb) = (2.0 * setting.beta()).sin_cos();
    let e = Complex64::from_polar(FRAC_1_SQRT_2, phi);
    let k = FRAC_1_SQRT_2;
    RotatedExpansion {
        c_pp: e * (ca * cb) + sa * sb * k,
        c_pm: e * (sa * cb) - ca * sb * k,
        c_mp: e * (ca * sb) - sa * cb * k,
        c_mm: e * (sa * sb) + ca * cb * k,
    }
}

/// Four photo-current intensities and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorRecord {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i_tot: f64,
}

impl DetectorRecord {
    pub fn new(i1: f64, i2: f64, i3: f64, i4: f64) -> Result<Self> {
        for (which, value) in [("I1", i1), ("I2", i2), ("I3", i3), ("I4", i4)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::BadIntensity { which, value });
            }
        }
        let i_tot = i1 + i2 + i3 + i4;
        if !(i_tot > 0.0) {
            return Err(Error::ZeroIntensity(i_tot));
        }
        Ok(Self {
            i1,
            i2,
            i3,
            i4,
            i_tot,
        })
    }

    /// Rescaled so that `i_tot = 1`.
    pub fn normalized(&self) -> Self {
        let k = 1.0 / self.i_tot;
        Self {
            i1: self.i1 * k,
            i2: self.i2 * k,
            i3: self.i3 * k,
            i4: self.i4 * k,
            i_tot: 1.0,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.i1, self.i2, self.i3, self.i4]
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Detector intensities from the closed-form amplitudes, normalized to the
/// total intensity.
///
/// At `chi = 0`: `I₁ = |A^{+−}|²`, `I₂ = |A^{−+}|²`, `I₃ = |A^{++}|²`,
/// `I₄ = |A^{−−}|²`; the MZIM swaps even and odd outputs as `chi → π`.
pub fn measure_intensities(phi: f64, setting: &MeasurementSetting, chi: f64) -> DetectorRecord {
    intensities_from_amplitudes(&analysis_amplitudes(phi, setting), chi)
}

fn intensities_from_amplitudes(a: &RotatedExpansion, chi: f64) -> DetectorRecord {
    let (s, c) = (chi / 2.0).sin_cos();
    let (s2, c2) = (s * s, c * c);
    let pp = a.c_pp.norm_sqr();
    let pm = a.c_pm.norm_sqr();
    let mp = a.c_mp.norm_sqr();
    let mm = a.c_mm.norm_sqr();
    DetectorRecord {
        i1: s2 * mm + c2 * pm,
        i2: s2 * pp + c2 * mp,
        i3: c2 * pp + s2 * mp,
        i4: c2 * mm + s2 * pm,
        i_tot: pp + pm + mp + mm,
    }
}

/// Even and odd output ports of the parity-sorting interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzimPorts {
    pub even: SpinOrbitState,
    pub odd: SpinOrbitState,
}

/// Mach-Zehnder with an extra mirror in one arm and phase `chi` in that arm.
/// At `chi = 0` the even modes leave by `even`, the odd ones by `odd`.
/// Port amplitudes keep the splitter phases.
pub fn mzim_split(state: &SpinOrbitState, chi: f64) -> MzimPorts {
    let mirror_arm = horizontal_mirror().then(&phase_shift(chi));
    let out = mach_zehnder(state, &OpticalOperator::identity(), &mirror_arm);
    MzimPorts {
        even: out.lower,
        odd: out.upper,
    }
}

/// Reads the four detectors behind the two polarizing beam splitters.
/// D1/D2 see the H/V outputs of the odd port, D3/D4 the V/H outputs of the
/// even port.
pub fn detect(ports: &MzimPorts) -> Result<DetectorRecord> {
    let v = polarizer(Polarization::V);
    let h = polarizer(Polarization::H);
    DetectorRecord::new(
        h.apply(&ports.odd).norm_sqr(),
        v.apply(&ports.odd).norm_sqr(),
        v.apply(&ports.even).norm_sqr(),
        h.apply(&ports.even).norm_sqr(),
    )
}

/// Measurement stage operator: `DP@β` followed by `HWP@α`.
pub fn analyzer(setting: &MeasurementSetting) -> OpticalOperator {
    dove_prism(setting.beta()).then(&half_wave_plate(setting.alpha()))
}

/// Element-by-element measurement of an arbitrary input mode, normalized to
/// the total intensity.
pub fn measure_state(
    state: &SpinOrbitState,
    setting: &MeasurementSetting,
    chi: f64,
) -> Result<DetectorRecord> {
    let analyzed = analyzer(setting).apply(state);
    Ok(detect(&mzim_split(&analyzed, chi))?.normalized())
}

/// Full simulation: mask, preparation interferometer, measurement stage.
pub fn simulate_intensities(phi: f64, setting: &MeasurementSetting, chi: f64) -> DetectorRecord {
    measure_state(&prepare_mns(phi), setting, chi).expect("prepared mode has unit norm")
}

/// Closed-form amplitudes checked against the element pipeline; returns the
/// largest component deviation.
pub fn amplitude_pipeline_error(phi: f64, setting: &MeasurementSetting) -> f64 {
    let closed = analysis_amplitudes(phi, setting).as_state();
    let piped = expand_rotated(&prepare_mns(phi), setting).as_state();
    piped.distance_up_to_phase(&closed)
}
