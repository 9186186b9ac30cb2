//! INI run configuration.
//!
//! ```ini
//! [envelope]
//! shape = sin2          ; sin2 | gaussian | constant | sampled
//! area = 1.5707963      ; or: peak = ... (detuning values are absolute)
//! [detuning]
//! mode = constant       ; constant | proportional
//! value = 0.05
//! [window]
//! t0 = 0
//! tf = 3.14159265
//! [initial]
//! state = ground        ; or g1/g2/g3
//! [relax]
//! gamma01_deph = 0.1
//! [run]
//! method = reference    ; reference | magnus1 | magnus3 | weinorman | fframe
//! output = out.csv
//! format = csv          ; csv | json
//! samples = 200
//! tol = 1e-10
//! [logic]
//! population_threshold = 0.6
//! coherence_threshold = 0.5
//! area = 2.0
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::{Ini, Properties};

use crate::dissipation::RelaxationRates;
use crate::drive::{DetuningLaw, DriveConfig, PulseEnvelope};
use crate::logic::LogicConfig;
use crate::propagators::DEFAULT_TOL;
use crate::state::CoherenceVector;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Reference,
    Magnus1,
    Magnus3,
    WeiNorman,
    FFrame,
}

impl FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "reference" => Method::Reference,
            "magnus1" => Method::Magnus1,
            "magnus3" => Method::Magnus3,
            "weinorman" => Method::WeiNorman,
            "fframe" => Method::FFrame,
            _ => return Err(CliError::Config(format!("unknown method {s:?}"))),
        })
    }
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Reference => "reference",
            Method::Magnus1 => "magnus1",
            Method::Magnus3 => "magnus3",
            Method::WeiNorman => "weinorman",
            Method::FFrame => "fframe",
        }
    }

    pub fn is_magnus(self) -> bool {
        matches!(self, Method::Magnus1 | Method::Magnus3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Config(format!("unknown output format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub drive: DriveConfig<f64>,
    pub initial: CoherenceVector<f64>,
    pub relax: Option<RelaxationRates<f64>>,
    pub method: Method,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub samples: usize,
    pub tol: f64,
    pub logic: LogicConfig<f64>,
    /// Whether the file had an `[envelope]` section.
    pub has_drive: bool,
}

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "envelope",
        &["shape", "peak", "area", "center", "width", "samples"],
    ),
    ("detuning", &["mode", "value"]),
    ("window", &["t0", "tf"]),
    ("initial", &["state", "g1", "g2", "g3"]),
    (
        "relax",
        &[
            "gamma01_pop",
            "gamma10_pop",
            "gamma01_shift",
            "gamma01_deph",
        ],
    ),
    ("run", &["method", "output", "format", "samples", "tol"]),
    (
        "logic",
        &["population_threshold", "coherence_threshold", "area"],
    ),
];

struct Section<'a> {
    name: &'a str,
    props: Option<&'a Properties>,
}

impl<'a> Section<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.props.and_then(|p| p.get(key)).map(str::trim)
    }

    fn parse<V: FromStr>(&self, key: &str) -> Result<Option<V>, CliError> {
        self.raw(key)
            .map(|s| {
                s.parse().map_err(|_| {
                    CliError::Config(format!("[{}] {key}: cannot parse {s:?}", self.name))
                })
            })
            .transpose()
    }

    fn real(&self, key: &str) -> Result<Option<f64>, CliError> {
        let v: Option<f64> = self.parse(key)?;
        match v {
            Some(x) if !x.is_finite() => Err(CliError::Config(format!(
                "[{}] {key} must be finite",
                self.name
            ))),
            other => Ok(other),
        }
    }

    fn require(&self, key: &str) -> Result<f64, CliError> {
        self.real(key)?
            .ok_or_else(|| CliError::Config(format!("missing [{}] {key}", self.name)))
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    fn section<'a>(ini: &'a Ini, name: &'a str) -> Section<'a> {
        Section {
            name,
            props: ini.section(Some(name)),
        }
    }

    fn check_keys(ini: &Ini) -> Result<(), CliError> {
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if props.is_empty() {
                    continue;
                }
                return Err(CliError::Config("keys outside of a section".into()));
            };
            let known = SECTIONS
                .iter()
                .find(|(s, _)| *s == name)
                .ok_or_else(|| CliError::Config(format!("unknown section [{name}]")))?
                .1;
            for (key, _) in props.iter() {
                if !known.contains(&key) {
                    return Err(CliError::Config(format!("unknown key {key:?} in [{name}]")));
                }
            }
        }
        Ok(())
    }

    fn parse_drive(ini: &Ini) -> Result<DriveConfig<f64>, CliError> {
        let window = Self::section(ini, "window");
        let t0 = window.real("t0")?.unwrap_or(0.0);
        let tf = window.require("tf")?;

        let env = Self::section(ini, "envelope");
        let peak = env.real("peak")?;
        let area = env.real("area")?;
        if peak.is_some() && area.is_some() {
            return Err(CliError::Config(
                "[envelope] takes either peak or area, not both".into(),
            ));
        }
        let center = env.real("center")?.unwrap_or(0.5 * (t0 + tf));
        let shape = env.raw("shape").unwrap_or("sin2");
        let envelope = match shape {
            "sin2" | "sin_squared" => PulseEnvelope::sin_squared(
                peak.unwrap_or(1.0),
                center,
                env.real("width")?.unwrap_or(tf - t0),
            ),
            "gaussian" => {
                PulseEnvelope::gaussian(peak.unwrap_or(1.0), center, env.require("width")?)
            }
            "constant" => PulseEnvelope::constant(peak.unwrap_or(1.0)),
            "sampled" => {
                if peak.is_some() {
                    return Err(CliError::Config(
                        "sampled envelopes take their peak from the samples".into(),
                    ));
                }
                let raw = env
                    .raw("samples")
                    .ok_or_else(|| CliError::Config("missing [envelope] samples".into()))?;
                PulseEnvelope::sampled(&parse_samples(raw)?)?
            }
            _ => {
                return Err(CliError::Config(format!(
                    "unknown envelope shape {shape:?}"
                )))
            }
        };

        let det = Self::section(ini, "detuning");
        let value = det.real("value")?.unwrap_or(0.0);
        let detuning = match det.raw("mode").unwrap_or("constant") {
            "constant" => DetuningLaw::Constant(value),
            "proportional" => DetuningLaw::Proportional { peak: value },
            m => return Err(CliError::Config(format!("unknown detuning mode {m:?}"))),
        };

        let drive = DriveConfig::new(envelope, detuning, t0, tf)?;
        match area {
            Some(a) => Ok(drive.with_area(a)?),
            None => Ok(drive),
        }
    }

    fn parse_initial(ini: &Ini) -> Result<CoherenceVector<f64>, CliError> {
        let s = Self::section(ini, "initial");
        let comps = [s.real("g1")?, s.real("g2")?, s.real("g3")?];
        match (s.raw("state"), comps.iter().any(Option::is_some)) {
            (Some(_), true) => Err(CliError::Config(
                "[initial] takes either state or g1/g2/g3".into(),
            )),
            (Some("ground") | None, false) => Ok(CoherenceVector::ground()),
            (Some("excited"), false) => Ok(CoherenceVector::excited()),
            (Some(other), false) => {
                Err(CliError::Config(format!("unknown initial state {other:?}")))
            }
            (None, true) => {
                let g = CoherenceVector::new(
                    comps[0].unwrap_or(0.0),
                    comps[1].unwrap_or(0.0),
                    comps[2].unwrap_or(0.0),
                );
                if g.norm() > 1.0 + 1e-10 {
                    return Err(CliError::Config(format!(
                        "initial state has norm {} > 1",
                        g.norm()
                    )));
                }
                Ok(g)
            }
        }
    }

    fn parse_relax(ini: &Ini) -> Result<Option<RelaxationRates<f64>>, CliError> {
        if ini.section(Some("relax")).is_none() {
            return Ok(None);
        }
        let s = Self::section(ini, "relax");
        let rates = RelaxationRates {
            gamma_pop_01: s.real("gamma01_pop")?.unwrap_or(0.0),
            gamma_pop_10: s.real("gamma10_pop")?.unwrap_or(0.0),
            gamma_shift: s.real("gamma01_shift")?.unwrap_or(0.0),
            gamma_deph: s.real("gamma01_deph")?.unwrap_or(0.0),
        };
        rates.validate()?;
        Ok(Some(rates))
    }

    fn parse_logic(ini: &Ini) -> Result<LogicConfig<f64>, CliError> {
        let s = Self::section(ini, "logic");
        let d = LogicConfig::default();
        let cfg = LogicConfig {
            population_threshold: s
                .real("population_threshold")?
                .unwrap_or(d.population_threshold),
            coherence_threshold: s
                .real("coherence_threshold")?
                .unwrap_or(d.coherence_threshold),
            gate_pulse_area: s.real("area")?.unwrap_or(d.gate_pulse_area),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a configuration used for the logic subcommands, where the drive
    /// sections are optional.
    pub fn logic_from_file(
        path: &Path,
    ) -> Result<
        (
            LogicConfig<f64>,
            Option<DriveConfig<f64>>,
            Option<RelaxationRates<f64>>,
        ),
        CliError,
    > {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let ini = Ini::load_from_str_noescape(&text)
            .map_err(|e| CliError::Config(format!("parse error: {e}")))?;
        Self::check_keys(&ini)?;
        let drive = if ini.section(Some("window")).is_some() {
            Some(Self::parse_drive(&ini)?)
        } else {
            None
        };
        Ok((Self::parse_logic(&ini)?, drive, Self::parse_relax(&ini)?))
    }
}

impl FromStr for RunConfig {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str_noescape(text)
            .map_err(|e| CliError::Config(format!("parse error: {e}")))?;
        Self::check_keys(&ini)?;
        let drive = Self::parse_drive(&ini)?;
        let run = Self::section(&ini, "run");
        let method: Method = run.parse("method")?.unwrap_or(Method::Reference);
        let output = run
            .raw("output")
            .filter(|s| !s.is_empty())
            .map(PathBuf::from);
        let format = match run.parse::<Format>("format")? {
            Some(f) => f,
            None => match output
                .as_ref()
                .and_then(|p| p.extension())
                .and_then(|e| e.to_str())
            {
                Some("json") => Format::Json,
                _ => Format::Csv,
            },
        };
        let samples: usize = run.parse("samples")?.unwrap_or(200);
        if samples < 2 {
            return Err(CliError::Config("[run] samples must be at least 2".into()));
        }
        let tol = run.real("tol")?.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(CliError::Config("[run] tol must be positive".into()));
        }
        let relax = Self::parse_relax(&ini)?;
        let cfg = RunConfig {
            has_drive: ini.section(Some("envelope")).is_some(),
            drive,
            initial: Self::parse_initial(&ini)?,
            relax,
            method,
            output,
            format,
            samples,
            tol,
            logic: Self::parse_logic(&ini)?,
        };
        cfg.check_method()?;
        Ok(cfg)
    }
}

impl RunConfig {
    /// Relaxation rates that actually act, if any.
    pub fn active_relax(&self) -> Option<&RelaxationRates<f64>> {
        self.relax.as_ref().filter(|r| !r.is_zero())
    }

    fn check_method(&self) -> Result<(), CliError> {
        if self.method == Method::FFrame
            && !(self.drive.is_proportional() || self.drive.is_resonant())
        {
            return Err(CliError::Config(
                "mode mismatch: method fframe requires proportional detuning".into(),
            ));
        }
        if self.method != Method::Reference && self.active_relax().is_some() {
            return Err(CliError::Config(format!(
                "mode mismatch: relaxation is only supported by the reference method, not {}",
                self.method.name()
            )));
        }
        Ok(())
    }
}

/// `t:v` pairs separated by commas or whitespace.
fn parse_samples(raw: &str) -> Result<Vec<(f64, f64)>, CliError> {
    raw.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (t, v) = pair.split_once(':').ok_or_else(|| {
                CliError::Config(format!("sample {pair:?} is not of the form t:value"))
            })?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("cannot parse sample {pair:?}")))
            };
            Ok((parse(t)?, parse(v)?))
        })
        .collect()
}
