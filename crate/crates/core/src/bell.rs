//! Correlations `M(α, β)`, the Bell quantity `S`, and analysis of measured
//! intensity tables.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mode::{make_separable, MeasurementSetting, SeparableSpec, SpinOrbitState};
use crate::optics::{measure_intensities, measure_state, DetectorRecord};

/// Slack allowed above the separable bound of 2.
pub const SEPARABLE_SLACK: f64 = 1e-9;

/// The four `(αᵢ, βⱼ)` analysis settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSettings {
    pub s11: MeasurementSetting,
    pub s12: MeasurementSetting,
    pub s21: MeasurementSetting,
    pub s22: MeasurementSetting,
}

impl BellSettings {
    pub fn from_angles(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            s11: MeasurementSetting::new(alpha1, beta1),
            s12: MeasurementSetting::new(alpha1, beta2),
            s21: MeasurementSetting::new(alpha2, beta1),
            s22: MeasurementSetting::new(alpha2, beta2),
        }
    }

    /// `α₁ = π/16, α₂ = 3π/16, β₁ = 0, β₂ = π/8`: maximal violation.
    pub fn canonical() -> Self {
        Self::from_angles(PI / 16.0, 3.0 * PI / 16.0, 0.0, PI / 8.0)
    }

    pub fn get(&self, basis: Basis) -> &MeasurementSetting {
        match basis {
            Basis::A1B1 => &self.s11,
            Basis::A1B2 => &self.s12,
            Basis::A2B1 => &self.s21,
            Basis::A2B2 => &self.s22,
        }
    }
}

impl Default for BellSettings {
    fn default() -> Self {
        Self::canonical()
    }
}

/// One of the four analysis bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    A1B1,
    A1B2,
    A2B1,
    A2B2,
}

impl Basis {
    pub const ALL: [Basis; 4] = [Basis::A1B1, Basis::A1B2, Basis::A2B1, Basis::A2B2];

    pub fn label(self) -> &'static str {
        match self {
            Basis::A1B1 => "a1b1",
            Basis::A1B2 => "a1b2",
            Basis::A2B1 => "a2b1",
            Basis::A2B2 => "a2b2",
        }
    }

    /// Accepts `a1b1`, `s11`, `(alpha1, beta1)` and similar spellings.
    pub fn parse(text: &str) -> Option<Basis> {
        let key: String = text
            .chars()
            .map(|c| match c {
                'α' => 'a',
                'β' => 'b',
                '₁' => '1',
                '₂' => '2',
                other => other,
            })
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase()
            .replace("alpha", "a")
            .replace("beta", "b");
        match key.as_str() {
            "a1b1" | "s11" => Some(Basis::A1B1),
            "a1b2" | "s12" => Some(Basis::A1B2),
            "a2b1" | "s21" => Some(Basis::A2B1),
            "a2b2" | "s22" => Some(Basis::A2B2),
            _ => None,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellResult {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    pub s: f64,
}

impl BellResult {
    pub fn from_correlations(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self {
            m11,
            m12,
            m21,
            m22,
            s: m11 + m12 - m21 + m22,
        }
    }

    pub fn correlations(&self) -> [f64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn violates_separable_bound(&self) -> bool {
        self.s.abs() > 2.0 + SEPARABLE_SLACK
    }
}

/// `(I₊₊ + I₋₋ − I₊₋ − I₋₊)/I_tot`, with the even detectors D3/D4 carrying
/// `I₊₊`/`I₋₋`.
pub fn correlation_m(rec: &DetectorRecord) -> Result<f64> {
    if !(rec.i_tot > 0.0) {
        return Err(Error::ZeroIntensity(rec.i_tot));
    }
    Ok((rec.i3 + rec.i4 - rec.i1 - rec.i2) / rec.i_tot)
}

fn combine(records: [DetectorRecord; 4]) -> BellResult {
    let m = records.map(|r| correlation_m(&r).expect("simulated records have positive total"));
    BellResult::from_correlations(m[0], m[1], m[2], m[3])
}

/// Simulated `S` for the prepared mode with phases `phi` and `chi`.
pub fn bell_s(phi: f64, chi: f64, settings: &BellSettings) -> BellResult {
    combine(Basis::ALL.map(|b| measure_intensities(phi, settings.get(b), chi)))
}

/// `S` for an arbitrary input mode sent through the measurement stage.
pub fn bell_s_for_state(
    state: &SpinOrbitState,
    chi: f64,
    settings: &BellSettings,
) -> Result<BellResult> {
    let mut recs = [None; 4];
    for (slot, b) in recs.iter_mut().zip(Basis::ALL) {
        *slot = Some(measure_state(state, settings.get(b), chi)?);
    }
    Ok(combine(recs.map(|r| r.expect("filled above"))))
}

/// `√2 cos χ (1 + cos φ)`.
pub fn closed_form_s(chi: f64, phi: f64) -> f64 {
    SQRT_2 * chi.cos() * (1.0 + phi.cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableBound {
    pub samples: usize,
    pub max_abs_s: f64,
    pub violations: usize,
}

const SAMPLE_CHUNK: usize = 4096;

/// Draws `n` random product modes, measures `S` over the canonical settings
/// at `χ = 0`, and reports the largest `|S|` and the count above `2`.
///
/// Each chunk of draws has its own ChaCha stream derived from `seed`, so the
/// result does not depend on thread scheduling.
pub fn sample_separable_bound(n: usize, seed: u64) -> Result<SeparableBound> {
    if n == 0 {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    let settings = BellSettings::canonical();
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let (max_abs_s, violations) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let len = SAMPLE_CHUNK.min(n - chunk * SAMPLE_CHUNK);
            let mut max = 0.0f64;
            let mut violations = 0usize;
            for _ in 0..len {
                let state = make_separable(&SeparableSpec::random(&mut rng))
                    .expect("gaussian factors are nonzero almost surely");
                let s = bell_s_for_state(&state, 0.0, &settings)
                    .expect("normalized input")
                    .s
                    .abs();
                max = max.max(s);
                if s > 2.0 + SEPARABLE_SLACK {
                    violations += 1;
                }
            }
            (max, violations)
        })
        .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    Ok(SeparableBound {
        samples: n,
        max_abs_s,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub chi: f64,
    pub record: DetectorRecord,
}

/// Uniform sweep of `χ` over `[0, 4π)` emulating the PZT voltage ramp.
pub fn chi_ramp_trace(
    phi: f64,
    setting: &MeasurementSetting,
    chi_samples: usize,
) -> Result<Vec<TracePoint>> {
    if chi_samples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: chi_samples,
        });
    }
    let step = 2.0 * TAU / chi_samples as f64;
    Ok((0..chi_samples)
        .map(|k| {
            let chi = k as f64 * step;
            TracePoint {
                chi,
                record: measure_intensities(phi, setting, chi),
            }
        })
        .collect())
}

/// Indices where `values` has a local maximum over a 3-point window.
/// With `periodic`, the ends wrap around.
pub fn local_maxima(values: &[f64], periodic: bool) -> Vec<usize> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    (0..n)
        .filter(|&i| {
            let (prev, next) = if periodic {
                ((i + n - 1) % n, (i + 1) % n)
            } else if i == 0 || i == n - 1 {
                return false;
            } else {
                (i - 1, i + 1)
            };
            // strict on one side so flat tops count once
            values[i] > values[prev] && values[i] >= values[next]
        })
        .collect()
}

/// Samples where `I₃ + I₄` peaks, i.e. `χ = 2nπ`.
pub fn trace_peaks(trace: &[TracePoint]) -> Vec<usize> {
    let even: Vec<f64> = trace.iter().map(|p| p.record.i3 + p.record.i4).collect();
    local_maxima(&even, true)
}

/// Fringe visibility `(max − min)/(max + min)`.
pub fn visibility(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if hi + lo > 0.0 {
        (hi - lo) / (hi + lo)
    } else {
        0.0
    }
}

/// One row of a measured intensity table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRow {
    pub basis: Basis,
    pub record: DetectorRecord,
}

/// `M` per row, each row normalized by its own total, then `S`.
pub fn analyze_raw_table(rows: &[RawRow]) -> Result<BellResult> {
    let mut m = [None; 4];
    for row in rows {
        let slot = &mut m[Basis::ALL
            .iter()
            .position(|&b| b == row.basis)
            .expect("ALL lists every basis")];
        if slot.is_some() {
            return Err(Error::DuplicateBasis(row.basis.label()));
        }
        *slot = Some(correlation_m(&row.record)?);
    }
    let mut out = [0.0; 4];
    for ((o, v), b) in out.iter_mut().zip(m).zip(Basis::ALL) {
        *o = v.ok_or(Error::MissingBasis(b.label()))?;
    }
    Ok(BellResult::from_correlations(
        out[0], out[1], out[2], out[3],
    ))
}

/// Synthetic intensities `((1−M)/4, (1−M)/4, (1+M)/4, (1+M)/4)·scale` that
/// reproduce a given correlation.
pub fn record_for_correlation(m: f64, scale: f64) -> Result<DetectorRecord> {
    let odd = (1.0 - m) / 4.0 * scale;
    let even = (1.0 + m) / 4.0 * scale;
    DetectorRecord::new(odd, odd, even, even)
}
