use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use spinorbit_core::bell::local_maxima;
use spinorbit_core::io::{fmt_num, format_bell_result, parse_raw_table, write_fock_table};
use spinorbit_core::{
    analyze_raw_table, coherent_mns, correlation_m, post_select_single_photon, quantum_chsh,
    render_field, run_bench, verify_factorization, Basis, BellSettings, Bindings, Complex64, Grid,
    MeasurementSetting,
};

use crate::config::{RunConfig, SweepParam, SweepSpec};
use crate::experiment::Experiment;

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn bell(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let exp = Experiment::load(&cfg.mode)?;
    let result = exp.bell(cfg.phi, cfg.chi, &cfg.settings)?;
    writeln!(out, "mode = {}", cfg.mode.name())?;
    writeln!(out, "phi = {}", fmt_num(cfg.phi))?;
    writeln!(out, "chi = {}", fmt_num(cfg.chi))?;
    write!(out, "{}", format_bell_result(&result))?;
    match exp.predicted_s(cfg.phi, cfg.chi, &cfg.settings) {
        Some(p) => {
            writeln!(out, "predicted = {}", fmt_num(p))?;
            writeln!(out, "deviation = {:.3e}", (result.s - p).abs())?;
        }
        None => writeln!(out, "predicted = n/a")?,
    }
    writeln!(out, "violation = {}", result.violates_separable_bound())?;
    Ok(())
}

pub struct SweepOptions<'a> {
    pub spec: SweepSpec,
    pub basis: Basis,
    pub out: Option<&'a Path>,
}

/// CSV `<param>,i1,i2,i3,i4,m[,s][,peak]`. The `s` column is present for
/// `chi` and `phi` sweeps, `peak` for `chi` sweeps only.
pub fn sweep(cfg: &RunConfig, opts: &SweepOptions, stdout: &mut dyn Write) -> Result<()> {
    let spec = &opts.spec;
    if spec.samples < 2 {
        bail!("a sweep needs at least 2 samples, got {}", spec.samples);
    }
    if spec.from == spec.to {
        bail!(
            "empty sweep range: from and to are both {}",
            fmt_num(spec.from)
        );
    }
    let exp = Experiment::load(&cfg.mode)?;
    exp.check_parameter(spec.param)?;

    let base = cfg.settings.get(opts.basis);
    let with_s = matches!(spec.param, SweepParam::Chi | SweepParam::Phi);
    let with_peak = spec.param == SweepParam::Chi;

    let mut rows = Vec::with_capacity(spec.samples);
    for v in spec.values() {
        let (mut phi, mut chi) = (cfg.phi, cfg.chi);
        let mut setting = *base;
        match spec.param {
            SweepParam::Chi => chi = v,
            SweepParam::Phi => phi = v,
            SweepParam::Alpha => setting = MeasurementSetting::new(v, base.beta()),
            SweepParam::Beta => setting = MeasurementSetting::new(base.alpha(), v),
        }
        let rec = exp.record(phi, chi, &setting)?;
        let s = if with_s {
            Some(exp.bell(phi, chi, &cfg.settings)?.s)
        } else {
            None
        };
        rows.push((v, rec, correlation_m(&rec)?, s));
    }
    let peaks = if with_peak {
        let even: Vec<f64> = rows.iter().map(|(_, r, ..)| r.i3 + r.i4).collect();
        peak_flags(&even)
    } else {
        Vec::new()
    };

    let mut file;
    let out: &mut dyn Write = match opts.out {
        Some(path) => {
            file = create(path)?;
            &mut file
        }
        None => stdout,
    };
    write!(out, "{},i1,i2,i3,i4,m", spec.param.name())?;
    if with_s {
        write!(out, ",s")?;
    }
    if with_peak {
        write!(out, ",peak")?;
    }
    writeln!(out)?;
    for (k, (v, rec, m, s)) in rows.iter().enumerate() {
        let cells: Vec<String> = [*v, rec.i1, rec.i2, rec.i3, rec.i4, *m]
            .into_iter()
            .chain(*s)
            .map(fmt_num)
            .collect();
        write!(out, "{}", cells.join(","))?;
        if with_peak {
            write!(out, ",{}", u8::from(peaks[k]))?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

// Interior local maxima, plus an endpoint that is not below its neighbour.
fn peak_flags(values: &[f64]) -> Vec<bool> {
    let n = values.len();
    let mut flags = vec![false; n];
    for i in local_maxima(values, false) {
        flags[i] = true;
    }
    const FLAT: f64 = 1e-12;
    if n >= 2 {
        flags[0] = values[0] >= values[1] - FLAT;
        flags[n - 1] = values[n - 1] >= values[n - 2] - FLAT;
    }
    flags
}

pub fn ingest(path: &Path, out: &mut dyn Write) -> Result<()> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = parse_raw_table(&text).with_context(|| path.display().to_string())?;
    for row in &rows {
        writeln!(
            out,
            "{}: m = {}  (i_tot = {})",
            row.basis,
            fmt_num(correlation_m(&row.record)?),
            fmt_num(row.record.i_tot)
        )?;
    }
    let result = analyze_raw_table(&rows).with_context(|| path.display().to_string())?;
    write!(out, "{}", format_bell_result(&result))?;
    let verdict = if result.violates_separable_bound() {
        "violates separable bound"
    } else {
        "within separable bound"
    };
    writeln!(out, "verdict = {verdict}")?;
    Ok(())
}

pub struct QuantumOptions<'a> {
    pub amp: Complex64,
    pub cutoff: usize,
    pub settings: BellSettings,
    pub post_select: bool,
    pub fock_out: Option<&'a Path>,
}

pub fn quantum(opts: &QuantumOptions, out: &mut dyn Write) -> Result<()> {
    if opts.cutoff < 1 {
        bail!("cutoff must be at least 1");
    }
    let exp = coherent_mns(opts.amp, opts.cutoff);
    let selected = post_select_single_photon(&exp);
    if let (Err(e), true) = (&selected, opts.post_select) {
        bail!("cannot post-select: {e}");
    }
    if let Some(path) = opts.fock_out {
        let mut file = create(path)?;
        write_fock_table(&exp, &mut file)?;
        file.flush()?;
    }
    writeln!(out, "amp_re = {}", fmt_num(opts.amp.re))?;
    writeln!(out, "amp_im = {}", fmt_num(opts.amp.im))?;
    writeln!(out, "cutoff = {}", opts.cutoff)?;
    writeln!(
        out,
        "factorization_deviation = {:.3e}",
        verify_factorization(opts.amp, opts.cutoff)
    )?;
    writeln!(
        out,
        "captured_probability = {}",
        fmt_num(exp.total_probability())
    )?;
    match selected {
        Ok(state) => {
            let result = quantum_chsh(&state, &opts.settings);
            writeln!(
                out,
                "single_photon_probability = {}",
                fmt_num(state.probability)
            )?;
            writeln!(out, "concurrence = {}", fmt_num(state.concurrence()))?;
            writeln!(out, "s = {}", fmt_num(result.s))?;
        }
        Err(_) => {
            writeln!(out, "single_photon_probability = {}", fmt_num(0.0))?;
            writeln!(out, "concurrence = n/a")?;
            writeln!(out, "s = n/a")?;
        }
    }
    Ok(())
}

pub struct RenderOptions<'a> {
    pub size: usize,
    pub extent: f64,
    pub out: &'a Path,
    pub pgm: Option<&'a Path>,
}

pub fn render(cfg: &RunConfig, opts: &RenderOptions, stdout: &mut dyn Write) -> Result<()> {
    let state = Experiment::load(&cfg.mode)?.state(cfg.phi)?;
    let map = render_field(&state, &Grid::new(opts.size, opts.size, opts.extent)?)?;
    let mut csv = create(opts.out)?;
    map.write_csv(&mut csv)?;
    csv.flush()?;
    if let Some(path) = opts.pgm {
        let mut pgm = create(path)?;
        map.write_pgm(&mut pgm)?;
        pgm.flush()?;
    }
    writeln!(stdout, "pixels = {}", map.pixels.len())?;
    writeln!(
        stdout,
        "integrated_intensity = {:.6}",
        map.integrated_intensity()
    )?;
    Ok(())
}

pub fn bench(path: &Path, bindings: &Bindings, print: bool, out: &mut dyn Write) -> Result<()> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if print {
        let ast = spinorbit_core::parse(&text).with_context(|| path.display().to_string())?;
        write!(out, "{ast}")?;
    }
    let rec = run_bench(&text, bindings).with_context(|| path.display().to_string())?;
    for (k, v) in ["i1", "i2", "i3", "i4"].iter().zip(rec.as_array()) {
        writeln!(out, "{k} = {}", fmt_num(v))?;
    }
    writeln!(out, "m = {}", fmt_num(correlation_m(&rec)?))?;
    Ok(())
}
