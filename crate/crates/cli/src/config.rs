//! Run configuration: flags layered over an optional flat TOML file.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinorbit_core::{BellSettings, Complex64, SeparableSpec};

/// Parses an angle. Bare numbers are degrees; `deg`, `°` and `rad` suffixes
/// are accepted, as is `pi` as a factor (`pi/8 rad` is not needed: `pi/8`
/// alone is read in radians).
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim();
    let err = || anyhow!("invalid angle `{text}`");
    if let Some(expr) = t.strip_suffix("rad").map(str::trim) {
        return parse_radians(expr).ok_or_else(err);
    }
    if t.contains("pi") {
        return parse_radians(t).ok_or_else(err);
    }
    let deg = t
        .strip_suffix("deg")
        .or_else(|| t.strip_suffix('°'))
        .unwrap_or(t)
        .trim();
    deg.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(f64::to_radians)
        .ok_or_else(err)
}

// `1.2`, `pi`, `3pi/16`, `-pi/4`
fn parse_radians(expr: &str) -> Option<f64> {
    let (num, den) = match expr.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (expr, 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(k) => {
            let k = k.trim().trim_end_matches('*').trim();
            let k = match k {
                "" | "+" => 1.0,
                "-" => -1.0,
                k => k.parse::<f64>().ok()?,
            };
            k * PI
        }
        None => num.parse::<f64>().ok()?,
    };
    let v = value / den;
    v.is_finite().then_some(v)
}

/// Flag values take precedence over the config file.
#[derive(Debug, Default)]
pub struct Layered {
    flags: BTreeMap<&'static str, String>,
    file: BTreeMap<String, String>,
    origin: Option<PathBuf>,
}

impl Layered {
    pub fn new(config: Option<&Path>) -> Result<Self> {
        let mut layered = Layered::default();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let table: toml::Table = text
                .parse()
                .with_context(|| format!("parsing config {}", path.display()))?;
            for (key, value) in table {
                let value = match value {
                    toml::Value::String(s) => s,
                    toml::Value::Integer(i) => i.to_string(),
                    toml::Value::Float(f) => f.to_string(),
                    toml::Value::Boolean(b) => b.to_string(),
                    other => bail!(
                        "{}: key `{key}` must be a string, number or boolean, found {}",
                        path.display(),
                        other.type_str()
                    ),
                };
                layered.file.insert(key, value);
            }
            layered.origin = Some(path.to_path_buf());
        }
        Ok(layered)
    }

    pub fn flag(&mut self, key: &'static str, value: Option<impl ToString>) -> &mut Self {
        if let Some(v) = value {
            self.flags.insert(key, v.to_string());
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.flags
            .get(key)
            .or_else(|| self.file.get(key))
            .map(String::as_str)
    }

    /// Rejects config-file keys that no command reads.
    pub fn check_known(&self, known: &[&str]) -> Result<()> {
        for key in self.file.keys() {
            if !known.contains(&key.as_str()) {
                let origin = self.origin.as_deref().unwrap_or(Path::new("config"));
                bail!("{}: unknown key `{key}`", origin.display());
            }
        }
        Ok(())
    }

    pub fn angle(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| parse_angle(v).with_context(|| format!("`{key}`")))
            .transpose()
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.trim()
                    .parse::<T>()
                    .map_err(|e| anyhow!("`{key}`: invalid value `{v}`: {e}"))
            })
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Mns,
    Separable(SeparableSpec),
    Bench(PathBuf),
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Mns => "mns",
            Mode::Separable(_) => "separable",
            Mode::Bench(_) => "bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Chi,
    Phi,
    Alpha,
    Beta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Chi => "chi",
            SweepParam::Phi => "phi",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
        }
    }
}

impl FromStr for SweepParam {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "chi" | "χ" => SweepParam::Chi,
            "phi" | "φ" => SweepParam::Phi,
            "alpha" | "α" => SweepParam::Alpha,
            "beta" | "β" => SweepParam::Beta,
            other => bail!("unknown sweep parameter `{other}` (expected chi, phi, alpha or beta)"),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub samples: usize,
}

impl SweepSpec {
    /// Evenly spaced values from `from` to `to`, both included.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.to - self.from) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| {
                if k + 1 == self.samples {
                    self.to
                } else {
                    self.from + k as f64 * step
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub phi: f64,
    pub chi: f64,
    pub settings: BellSettings,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

pub const RUN_KEYS: &[&str] = &[
    "mode", "b", "bench", "phi", "chi", "settings", "alpha1", "alpha2", "beta1", "beta2", "seed",
];

impl RunConfig {
    pub fn from_layered(cfg: &Layered) -> Result<Self> {
        let seed = cfg.parsed::<u64>("seed")?.unwrap_or(DEFAULT_SEED);
        let b = cfg.get("b");
        let bench = cfg.get("bench");
        let mode = match (cfg.get("mode").map(str::trim), b, bench) {
            (Some("mns") | None, None, None) => Mode::Mns,
            (Some("separable") | None, Some(b), None) => Mode::Separable(parse_b(b, seed)?),
            (Some("bench") | None, None, Some(path)) => Mode::Bench(PathBuf::from(path)),
            (Some("separable"), None, _) => {
                bail!("mode `separable` needs a B-spec (`--b b1,b2,b3,b4`)")
            }
            (Some("bench"), _, None) => bail!("mode `bench` needs a program (`--bench-file PATH`)"),
            (Some(m), _, _) if !["mns", "separable", "bench"].contains(&m) => {
                bail!("unknown mode `{m}` (expected mns, separable or bench)")
            }
            _ => bail!(
                "exactly one mode selector is allowed: pick one of mns, `--b` or `--bench-file`"
            ),
        };
        Ok(RunConfig {
            mode,
            phi: cfg.angle("phi")?.unwrap_or(0.0),
            chi: cfg.angle("chi")?.unwrap_or(0.0),
            settings: parse_settings(cfg)?,
            seed,
        })
    }
}

/// `b1,b2,b3,b4` as real or complex numbers (`1`, `0.5+0.5i`), or `random`
/// for a spec drawn from the seed.
pub fn parse_b(text: &str, seed: u64) -> Result<SeparableSpec> {
    if text.trim() == "random" {
        return Ok(SeparableSpec::random(&mut ChaCha8Rng::seed_from_u64(seed)));
    }
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!("B-spec `{text}` must have four comma-separated coefficients");
    }
    let mut b = [Complex64::new(0.0, 0.0); 4];
    for (slot, p) in b.iter_mut().zip(&parts) {
        *slot = p
            .parse::<Complex64>()
            .map_err(|_| anyhow!("B-spec coefficient `{p}` is not a number"))?;
    }
    let spec = SeparableSpec::new(b[0], b[1], b[2], b[3]);
    spec.validate()?;
    Ok(spec)
}

fn parse_settings(cfg: &Layered) -> Result<BellSettings> {
    let explicit = ["alpha1", "alpha2", "beta1", "beta2"].map(|k| cfg.angle(k));
    let [a1, a2, b1, b2] = explicit;
    let (a1, a2, b1, b2) = (a1?, a2?, b1?, b2?);
    let named = cfg.get("settings").map(str::trim);
    match (named, a1, a2, b1, b2) {
        (None | Some("canonical"), None, None, None, None) => Ok(BellSettings::canonical()),
        (None | Some("explicit"), Some(a1), Some(a2), Some(b1), Some(b2)) => {
            Ok(BellSettings::from_angles(a1, a2, b1, b2))
        }
        (Some("canonical"), ..) => {
            bail!("canonical settings cannot be combined with explicit angles")
        }
        (Some(s), ..) if s != "explicit" => {
            bail!("unknown settings `{s}` (expected canonical or explicit)")
        }
        _ => bail!("explicit settings need all of alpha1, alpha2, beta1 and beta2"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn angles() {
        assert!(close(parse_angle("180").unwrap(), PI));
        assert!(close(parse_angle("180deg").unwrap(), PI));
        assert!(close(parse_angle("90 °").unwrap(), PI / 2.0));
        assert!(close(parse_angle("1.5rad").unwrap(), 1.5));
        assert!(close(parse_angle("pi/16").unwrap(), PI / 16.0));
        assert!(close(parse_angle("3pi/16").unwrap(), 3.0 * PI / 16.0));
        assert!(close(parse_angle("-pi/4 rad").unwrap(), -PI / 4.0));
        assert!(close(parse_angle("2*pi").unwrap(), 2.0 * PI));
        for bad in ["", "deg", "abc", "1/0pi", "nan", "pi/x"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("spinorbit-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "phi = 90\nchi = \"pi rad\"\nseed = 7\n").unwrap();
        let mut cfg = Layered::new(Some(&path)).unwrap();
        cfg.flag("phi", Some("45deg"));
        let run = RunConfig::from_layered(&cfg).unwrap();
        assert!(close(run.phi, PI / 4.0));
        assert!(close(run.chi, PI));
        assert_eq!(run.seed, 7);

        std::fs::write(&path, "nonsense = 1\n").unwrap();
        let cfg = Layered::new(Some(&path)).unwrap();
        assert!(cfg.check_known(RUN_KEYS).is_err());
        std::fs::write(&path, "phi = [1, 2]\n").unwrap();
        assert!(Layered::new(Some(&path)).is_err());
    }

    #[test]
    fn mode_selection() {
        let mut cfg = Layered::default();
        assert_eq!(RunConfig::from_layered(&cfg).unwrap().mode, Mode::Mns);
        cfg.flag("b", Some("1,0,1,0"));
        assert!(matches!(
            RunConfig::from_layered(&cfg).unwrap().mode,
            Mode::Separable(_)
        ));
        cfg.flag("bench", Some("x.bench"));
        assert!(RunConfig::from_layered(&cfg).is_err());

        let mut cfg = Layered::default();
        cfg.flag("mode", Some("separable"));
        assert!(RunConfig::from_layered(&cfg).is_err());
        let mut cfg = Layered::default();
        cfg.flag("mode", Some("mns")).flag("b", Some("1,0,1,0"));
        assert!(RunConfig::from_layered(&cfg).is_err());
        let mut cfg = Layered::default();
        cfg.flag("mode", Some("quantum"));
        let err = RunConfig::from_layered(&cfg).unwrap_err().to_string();
        assert!(err.contains("unknown mode"), "{err}");
    }

    #[test]
    fn b_specs() {
        let spec = parse_b("1, 0, 1, 0", 0).unwrap();
        assert_eq!(spec, SeparableSpec::from_real([1.0, 0.0, 1.0, 0.0]));
        assert!(parse_b("0.5+0.5i,1,0,1", 0).is_ok());
        assert!(parse_b("1,0,1", 0).is_err());
        assert!(parse_b("0,0,1,0", 0).is_err());
        assert_eq!(parse_b("random", 3).unwrap(), parse_b("random", 3).unwrap());
    }

    #[test]
    fn settings() {
        let mut cfg = Layered::default();
        cfg.flag("alpha1", Some("0"));
        assert!(parse_settings(&cfg).is_err());
        cfg.flag("alpha2", Some("45"))
            .flag("beta1", Some("0"))
            .flag("beta2", Some("22.5"));
        let s = parse_settings(&cfg).unwrap();
        assert!(close(s.s22.beta(), PI / 8.0));
        cfg.flag("settings", Some("canonical"));
        assert!(parse_settings(&cfg).is_err());
    }

    #[test]
    fn sweep_values_include_both_ends() {
        let s = SweepSpec {
            param: SweepParam::Chi,
            from: 0.0,
            to: 1.0,
            samples: 5,
        };
        assert_eq!(s.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
