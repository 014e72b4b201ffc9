//! Classical spin-orbit Bell experiment: mode algebra, optical elements,
//! Bell analysis, a bench description language and the coherent-state
//! bridge to the single-photon regime.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod dsl;
pub mod error;
pub mod io;
pub mod mode;
pub mod optics;
pub mod quantum;
pub mod render;

pub use num_complex::Complex64;

pub use bell::{
    analyze_raw_table, bell_s, bell_s_for_state, chi_ramp_trace, closed_form_s, correlation_m,
    sample_separable_bound, Basis, BellResult, BellSettings, RawRow, SeparableBound, TracePoint,
};
pub use dsl::{compile, parse, run_bench, BenchAst, Bindings, ParseError, Pipeline};
pub use error::{Error, Result};
pub use mode::{
    concurrence, expand_rotated, inner, make_mns, make_separable, MeasurementSetting, Polarization,
    RotatedExpansion, SeparableSpec, SpinOrbitState, Transverse,
};
pub use optics::{
    analysis_amplitudes, dove_prism, half_wave_plate, measure_intensities, measure_state,
    mzim_split, prepare_mns, simulate_intensities, DetectorRecord, MzimPorts, OpticalOperator,
    PhaseConfig,
};
pub use quantum::{
    coherent_mns, post_select_single_photon, quantum_chsh, verify_factorization, FockExpansion,
    PostSelectedState,
};
pub use render::{render_field, FieldMap, Grid};
