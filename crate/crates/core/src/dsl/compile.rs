use std::collections::HashMap;

use super::{Arm, BenchAst, Element, Param, Port};
use crate::error::{Error, Result};
use crate::mode::SpinOrbitState;
use crate::optics::{
    detect, dove_prism, half_wave_plate, mach_zehnder, mzim_split, phase_shift, DetectorRecord,
    OpticalOperator,
};

pub type Bindings = HashMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Stage {
    /// Element acting on the single beam.
    Beam(OpticalOperator),
    /// Mach-Zehnder built from a pair of beam splitters; the output is the
    /// port where the arms add with the splitter phase `i`.
    BsPair {
        arm_a: OpticalOperator,
        arm_b: OpticalOperator,
    },
}

/// Compiled, fully bound bench program.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub source: SpinOrbitState,
    pub stages: Vec<Stage>,
    /// MZIM phase, if the program has one. Without it the detector bank
    /// sorts the four product components directly.
    pub mzim: Option<f64>,
}

impl Pipeline {
    /// Field arriving at the MZIM (or at the detectors without one).
    pub fn analyzed_state(&self) -> SpinOrbitState {
        self.stages
            .iter()
            .fold(self.source, |state, stage| match stage {
                Stage::Beam(op) => op.apply(&state),
                Stage::BsPair { arm_a, arm_b } => mach_zehnder(&state, arm_a, arm_b).lower,
            })
    }

    /// Detector intensities normalized to their total.
    pub fn run(&self) -> Result<DetectorRecord> {
        let state = self.analyzed_state();
        let ports = mzim_split(&state, self.mzim.unwrap_or(0.0));
        Ok(detect(&ports)?.normalized())
    }
}

fn resolve(p: &Param, bindings: &Bindings) -> Result<f64> {
    match p {
        Param::Value(v) => Ok(*v),
        Param::Symbol(name) => bindings
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnboundParameter(name.clone())),
    }
}

fn element_operator(e: &Element, bindings: &Bindings) -> Result<OpticalOperator> {
    Ok(match e {
        Element::Hwp { angle, .. } => half_wave_plate(resolve(angle, bindings)?),
        Element::Dove { angle, .. } => dove_prism(resolve(angle, bindings)?),
        Element::Phase { angle, .. } => phase_shift(resolve(angle, bindings)?),
        Element::Mzim { .. } | Element::Pbs { .. } => unreachable!("handled by compile"),
    })
}

pub fn compile(ast: &BenchAst, bindings: &Bindings) -> Result<Pipeline> {
    let source = SpinOrbitState::basis(ast.transverse, ast.polarization);
    let mut stages = Vec::new();
    let mut mzim = None;
    let mut pbs_odd = false;
    let mut pbs_even = false;
    let mut open: Option<(OpticalOperator, OpticalOperator)> = None;

    for e in &ast.elements {
        if !matches!(e, Element::Pbs { .. }) && mzim.is_some() {
            return Err(Error::Pipeline(format!(
                "`{e}` after mzim: only pbs may follow it"
            )));
        }
        match e.arm() {
            Some(arm) => {
                let op = element_operator(e, bindings)?;
                let (a, b) = open.get_or_insert_with(|| {
                    (OpticalOperator::identity(), OpticalOperator::identity())
                });
                match arm {
                    Arm::A => *a = a.then(&op),
                    Arm::B => *b = b.then(&op),
                }
                continue;
            }
            None => {
                if let Some((arm_a, arm_b)) = open.take() {
                    stages.push(Stage::BsPair { arm_a, arm_b });
                }
            }
        }
        match e {
            Element::Mzim { chi } => mzim = Some(resolve(chi, bindings)?),
            Element::Pbs { port } => {
                if mzim.is_none() {
                    return Err(Error::Pipeline("pbs must follow an mzim".into()));
                }
                let seen = match port {
                    Port::Odd => &mut pbs_odd,
                    Port::Even => &mut pbs_even,
                };
                if *seen {
                    return Err(Error::Pipeline(format!("second `{e}` on the same port")));
                }
                *seen = true;
            }
            _ => stages.push(Stage::Beam(element_operator(e, bindings)?)),
        }
    }
    if let Some((arm_a, arm_b)) = open.take() {
        stages.push(Stage::BsPair { arm_a, arm_b });
    }

    if !ast.detectors {
        return Err(Error::NoDetectors);
    }
    if mzim.is_some() {
        if !pbs_odd {
            return Err(Error::Pipeline("no pbs on the odd mzim port".into()));
        }
        if !pbs_even {
            return Err(Error::Pipeline("no pbs on the even mzim port".into()));
        }
    }
    Ok(Pipeline {
        source,
        stages,
        mzim,
    })
}

/// Parses, compiles and runs a bench program.
pub fn run_bench(text: &str, bindings: &Bindings) -> Result<DetectorRecord> {
    compile(&super::parse(text)?, bindings)?.run()
}
