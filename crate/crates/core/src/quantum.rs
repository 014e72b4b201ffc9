//! Coherent state of the MNS mode, its Fock decomposition over the `VV` and
//! `HH` modes, and post-selection of the single-photon sector.
//!
//! The coherent amplitude is called `amp` throughout; `alpha` stays reserved
//! for the wave-plate angle.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::bell::{correlation_m, Basis, BellResult, BellSettings};
use crate::error::{Error, Result};
use crate::mode::{concurrence, expand_rotated, SpinOrbitState};
use crate::optics::DetectorRecord;

pub const DEFAULT_CUTOFF: usize = 30;

/// Truncated two-mode expansion `Σ c(n_vv, n_hh) |n_vv, n_hh⟩` with
/// `n_vv + n_hh ≤ cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockExpansion {
    cutoff: usize,
    amp: Complex64,
    // row-major over the triangle: total photon number n, then n_vv = 0..=n
    coeffs: Vec<Complex64>,
}

impl FockExpansion {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amp(&self) -> Complex64 {
        self.amp
    }

    fn offset(n_vv: usize, n_hh: usize) -> usize {
        let n = n_vv + n_hh;
        n * (n + 1) / 2 + n_vv
    }

    /// Zero outside the truncation.
    pub fn coeff(&self, n_vv: usize, n_hh: usize) -> Complex64 {
        if n_vv + n_hh > self.cutoff {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[Self::offset(n_vv, n_hh)]
    }

    /// `(n_vv, n_hh, coefficient)` ordered by total photon number.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.cutoff)
            .flat_map(|n| (0..=n).map(move |q| (q, n - q)))
            .map(|(q, m)| (q, m, self.coeff(q, m)))
    }

    pub fn total_probability(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Weight of the sector with `n` photons in total.
    pub fn sector_probability(&self, n: usize) -> f64 {
        if n > self.cutoff {
            return 0.0;
        }
        (0..=n).map(|q| self.coeff(q, n - q).norm_sqr()).sum()
    }
}

/// Expands `e^{−|amp|²/2} Σₙ ampⁿ (a†_MNS)ⁿ/n! |0⟩` with
/// `a†_MNS = (a†_VV + a†_HH)/√2` by the binomial theorem.
pub fn coherent_mns(amp: Complex64, cutoff: usize) -> FockExpansion {
    let mut coeffs = Vec::with_capacity((cutoff + 1) * (cutoff + 2) / 2);
    let envelope = (-amp.norm_sqr() / 2.0).exp();
    // ampⁿ / n! · 2^{−n/2}, built up iteratively
    let mut prefactor = Complex64::new(envelope, 0.0);
    let mut sqrt_factorial = vec![1.0f64; cutoff + 1];
    for k in 1..=cutoff {
        sqrt_factorial[k] = sqrt_factorial[k - 1] * (k as f64).sqrt();
    }
    for n in 0..=cutoff {
        if n > 0 {
            prefactor *= amp * FRAC_1_SQRT_2 / n as f64;
        }
        let mut binom = 1.0f64;
        for q in 0..=n {
            if q > 0 {
                binom *= (n - q + 1) as f64 / q as f64;
            }
            // (a†)^q |0⟩ = √q! |q⟩
            let ladder = sqrt_factorial[q] * sqrt_factorial[n - q];
            coeffs.push(prefactor * binom * ladder);
        }
    }
    FockExpansion {
        cutoff,
        amp,
        coeffs,
    }
}

/// Coefficient of `|n⟩` in a single-mode coherent state.
pub fn coherent_coeff(amp: Complex64, n: usize) -> Complex64 {
    let mut c = Complex64::new((-amp.norm_sqr() / 2.0).exp(), 0.0);
    for k in 1..=n {
        c *= amp / (k as f64).sqrt();
    }
    c
}

/// Largest deviation between [`coherent_mns`] and the product
/// `|amp/√2⟩_VV ⊗ |amp/√2⟩_HH` over the truncated lattice.
pub fn verify_factorization(amp: Complex64, cutoff: usize) -> f64 {
    let half = amp * FRAC_1_SQRT_2;
    coherent_mns(amp, cutoff)
        .iter()
        .map(|(q, m, c)| (c - coherent_coeff(half, q) * coherent_coeff(half, m)).norm())
        .fold(0.0, f64::max)
}

/// Normalized single-photon state on `{|1_HH 0_VV⟩, |0_HH 1_VV⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostSelectedState {
    pub one_hh: Complex64,
    pub one_vv: Complex64,
    pub probability: f64,
}

impl PostSelectedState {
    pub fn new(one_hh: Complex64, one_vv: Complex64) -> Result<Self> {
        let norm = (one_hh.norm_sqr() + one_vv.norm_sqr()).sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroSinglePhotonWeight);
        }
        Ok(Self {
            one_hh: one_hh / norm,
            one_vv: one_vv / norm,
            probability: 1.0,
        })
    }

    /// The one-photon state read as a spin-orbit mode:
    /// `|1_HH⟩ ↔ ψ_H ê_H`, `|1_VV⟩ ↔ ψ_V ê_V`.
    pub fn as_spin_orbit(&self) -> SpinOrbitState {
        let zero = Complex64::new(0.0, 0.0);
        SpinOrbitState::new(self.one_vv, zero, zero, self.one_hh)
    }

    pub fn concurrence(&self) -> f64 {
        concurrence(&self.as_spin_orbit()).expect("post-selected state is normalized")
    }
}

pub fn post_select_single_photon(exp: &FockExpansion) -> Result<PostSelectedState> {
    let one_hh = exp.coeff(0, 1);
    let one_vv = exp.coeff(1, 0);
    let probability = one_hh.norm_sqr() + one_vv.norm_sqr();
    if !(probability > 0.0) {
        return Err(Error::ZeroSinglePhotonWeight);
    }
    let mut state = PostSelectedState::new(one_hh, one_vv)?;
    state.probability = probability;
    Ok(state)
}

/// CHSH value from the outcome probabilities of the post-selected photon in
/// the four rotated bases.
pub fn quantum_chsh(state: &PostSelectedState, settings: &BellSettings) -> BellResult {
    let spin_orbit = state.as_spin_orbit();
    let m = Basis::ALL.map(|b| {
        let e = expand_rotated(&spin_orbit, settings.get(b));
        // D1..D4 ↔ (+−, −+, ++, −−)
        let rec = DetectorRecord::new(
            e.c_pm.norm_sqr(),
            e.c_mp.norm_sqr(),
            e.c_pp.norm_sqr(),
            e.c_mm.norm_sqr(),
        )
        .expect("normalized state has unit total");
        correlation_m(&rec).expect("positive total")
    });
    BellResult::from_correlations(m[0], m[1], m[2], m[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::closed_form_s;
    use approx::assert_abs_diff_eq;
    use std::collections::HashMap;
    use std::f64::consts::{PI, SQRT_2};

    /// Sparse two-mode ket built by applying `a†_MNS` repeatedly to vacuum.
    fn direct_expansion(amp: Complex64, cutoff: usize) -> HashMap<(usize, usize), Complex64> {
        let mut term: HashMap<(usize, usize), Complex64> = HashMap::new();
        term.insert((0, 0), Complex64::new(1.0, 0.0));
        let mut total = term.clone();
        for n in 1..=cutoff {
            let mut next: HashMap<(usize, usize), Complex64> = HashMap::new();
            for (&(q, m), &c) in &term {
                // a†|k⟩ = √(k+1)|k+1⟩
                *next.entry((q + 1, m)).or_default() += c * ((q + 1) as f64).sqrt() * FRAC_1_SQRT_2;
                *next.entry((q, m + 1)).or_default() += c * ((m + 1) as f64).sqrt() * FRAC_1_SQRT_2;
            }
            for c in next.values_mut() {
                *c *= amp / n as f64;
            }
            for (k, c) in &next {
                *total.entry(*k).or_default() += *c;
            }
            term = next;
        }
        let env = (-amp.norm_sqr() / 2.0).exp();
        total.values_mut().for_each(|c| *c *= env);
        total
    }

    #[test]
    fn vacuum_for_zero_amplitude() {
        let e = coherent_mns(Complex64::new(0.0, 0.0), 5);
        assert_eq!(e.coeff(0, 0), Complex64::new(1.0, 0.0));
        assert!(e
            .iter()
            .skip(1)
            .all(|(_, _, c)| c == Complex64::new(0.0, 0.0)));
        assert_eq!(verify_factorization(Complex64::new(0.0, 0.0), 10), 0.0);
    }

    #[test]
    fn single_photon_coefficients() {
        let e = coherent_mns(Complex64::new(1.0, 0.0), 20);
        let want = (-0.5f64).exp() / SQRT_2;
        assert_abs_diff_eq!(want, 0.42888, epsilon = 1e-5);
        assert_abs_diff_eq!(e.coeff(1, 0).re, want, epsilon = 1e-15);
        assert_abs_diff_eq!(e.coeff(0, 1).re, want, epsilon = 1e-15);
        assert_abs_diff_eq!(e.total_probability(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn matches_repeated_operator_application() {
        for amp in [
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(2.0, PI / 3.0),
            Complex64::new(-0.4, 2.1),
        ] {
            let direct = direct_expansion(amp, 25);
            let e = coherent_mns(amp, 25);
            for (q, m, c) in e.iter() {
                let d = direct.get(&(q, m)).copied().unwrap_or_default();
                assert!((c - d).norm() < 1e-13, "({q},{m}) {c} vs {d}");
            }
        }
    }

    #[test]
    fn factorization_holds() {
        assert!(verify_factorization(Complex64::new(1.0, 0.0), 20) < 1e-12);
        assert!(verify_factorization(Complex64::from_polar(2.0, PI / 3.0), 30) < 1e-12);
    }

    #[test]
    fn photon_number_is_poisson() {
        let amp = Complex64::new(1.2, -0.7);
        let e = coherent_mns(amp, 40);
        let mean = amp.norm_sqr();
        let mut poisson = (-mean).exp();
        for n in 0..=20 {
            if n > 0 {
                poisson *= mean / n as f64;
            }
            assert_abs_diff_eq!(e.sector_probability(n), poisson, epsilon = 1e-14);
        }
        assert_eq!(e.sector_probability(41), 0.0);
    }

    #[test]
    fn post_selection() {
        let s = post_select_single_photon(&coherent_mns(Complex64::new(1.0, 0.0), 20)).unwrap();
        assert_abs_diff_eq!(s.probability, (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.one_hh.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.one_vv.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        for amp in [
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::from_polar(3.0, 1.0),
        ] {
            let s = post_select_single_photon(&coherent_mns(amp, 30)).unwrap();
            assert_abs_diff_eq!(s.concurrence(), 1.0, epsilon = 1e-14);
            let n = amp.norm_sqr();
            assert_abs_diff_eq!(s.probability, n * (-n).exp(), epsilon = 1e-14);
        }
        assert_eq!(
            post_select_single_photon(&coherent_mns(Complex64::new(0.0, 0.0), 20)),
            Err(Error::ZeroSinglePhotonWeight)
        );
    }

    #[test]
    fn chsh_of_post_selected_photon() {
        let s =
            post_select_single_photon(&coherent_mns(Complex64::from_polar(1.5, 0.8), 30)).unwrap();
        let r = quantum_chsh(&s, &BellSettings::canonical());
        assert_abs_diff_eq!(r.s, closed_form_s(0.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn degenerate_settings_cannot_violate() {
        let s = post_select_single_photon(&coherent_mns(Complex64::new(1.0, 0.0), 20)).unwrap();
        let settings = BellSettings::from_angles(0.2, 0.2, 0.0, 0.4);
        let r = quantum_chsh(&s, &settings);
        assert_abs_diff_eq!(r.s, 2.0 * r.m12, epsilon = 1e-12);
        assert!(r.s.abs() <= 2.0 + 1e-12);
    }

    #[test]
    fn product_photon_respects_separable_bound() {
        let s = PostSelectedState::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s.concurrence(), 0.0);
        assert!(quantum_chsh(&s, &BellSettings::canonical()).s.abs() <= 2.0 + 1e-12);
    }
}
