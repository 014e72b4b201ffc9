//! The measured system behind `bell`, `sweep` and `render`.

use anyhow::{bail, Context, Result};
use spinorbit_core::{
    bell_s, bell_s_for_state, closed_form_s, compile, correlation_m, expand_rotated,
    make_separable, measure_intensities, measure_state, parse, prepare_mns, Basis, BellResult,
    BellSettings, BenchAst, Bindings, DetectorRecord, MeasurementSetting, Pipeline, SpinOrbitState,
};

use crate::config::{Mode, SweepParam};

pub enum Experiment {
    Mns,
    Separable(SpinOrbitState),
    Bench { name: String, ast: BenchAst },
}

impl Experiment {
    pub fn load(mode: &Mode) -> Result<Self> {
        Ok(match mode {
            Mode::Mns => Experiment::Mns,
            Mode::Separable(spec) => Experiment::Separable(make_separable(spec)?),
            Mode::Bench(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let ast = parse(&text).with_context(|| path.display().to_string())?;
                Experiment::Bench {
                    name: path.display().to_string(),
                    ast,
                }
            }
        })
    }

    /// Fails when sweeping `param` cannot change the outcome.
    pub fn check_parameter(&self, param: SweepParam) -> Result<()> {
        match (self, param) {
            (Experiment::Separable(_), SweepParam::Phi) => {
                bail!("phi is not a parameter of a separable mode")
            }
            (Experiment::Bench { name, ast }, p) if !ast.symbols().contains(&p.name()) => {
                bail!("{name} has no parameter `{}`", p.name())
            }
            _ => Ok(()),
        }
    }

    fn pipeline(&self, phi: f64, chi: f64, setting: &MeasurementSetting) -> Result<Pipeline> {
        let Experiment::Bench { name, ast } = self else {
            unreachable!("only bench programs compile")
        };
        let bindings: Bindings = [
            ("alpha", setting.alpha()),
            ("beta", setting.beta()),
            ("phi", phi),
            ("chi", chi),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        compile(ast, &bindings).with_context(|| name.clone())
    }

    /// Normalized detector record.
    pub fn record(
        &self,
        phi: f64,
        chi: f64,
        setting: &MeasurementSetting,
    ) -> Result<DetectorRecord> {
        match self {
            Experiment::Mns => Ok(measure_intensities(phi, setting, chi)),
            Experiment::Separable(state) => Ok(measure_state(state, setting, chi)?),
            Experiment::Bench { .. } => Ok(self.pipeline(phi, chi, setting)?.run()?),
        }
    }

    pub fn bell(&self, phi: f64, chi: f64, settings: &BellSettings) -> Result<BellResult> {
        match self {
            Experiment::Mns => Ok(bell_s(phi, chi, settings)),
            Experiment::Separable(state) => Ok(bell_s_for_state(state, chi, settings)?),
            Experiment::Bench { .. } => {
                let mut m = [0.0; 4];
                for (slot, b) in m.iter_mut().zip(Basis::ALL) {
                    *slot = correlation_m(&self.record(phi, chi, settings.get(b))?)?;
                }
                Ok(BellResult::from_correlations(m[0], m[1], m[2], m[3]))
            }
        }
    }

    /// Analytic `S`, where one exists independently of the simulation.
    pub fn predicted_s(&self, phi: f64, chi: f64, settings: &BellSettings) -> Option<f64> {
        match self {
            Experiment::Mns if is_canonical(settings) => Some(closed_form_s(chi, phi)),
            Experiment::Mns => Some(rotated_s(&prepare_mns(phi), chi, settings)),
            Experiment::Separable(state) => Some(rotated_s(state, chi, settings)),
            Experiment::Bench { .. } => None,
        }
    }

    /// The mode entering the analyzer.
    pub fn state(&self, phi: f64) -> Result<SpinOrbitState> {
        match self {
            Experiment::Mns => Ok(prepare_mns(phi)),
            Experiment::Separable(state) => Ok(*state),
            Experiment::Bench { name, .. } => {
                bail!("{name}: a bench program has no fixed input mode to render")
            }
        }
    }
}

fn is_canonical(settings: &BellSettings) -> bool {
    settings == &BellSettings::canonical()
}

// The MZIM scales every correlation by cos χ.
fn rotated_s(state: &SpinOrbitState, chi: f64, settings: &BellSettings) -> f64 {
    let m = Basis::ALL.map(|b| expand_rotated(state, settings.get(b)).correlation());
    chi.cos() * BellResult::from_correlations(m[0], m[1], m[2], m[3]).s
}
