//! Run configuration: JSON config files, manifests and flag overlays.
//!
//! A [`PartialConfig`] holds whatever a source specified. Sources are
//! layered (flags over file over figure preset over defaults) and then
//! resolved into a validated [`RunConfig`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, Family};
use crate::disorder::DEFAULT_REALIZATIONS;
use crate::error::{Error, Result};
use crate::output::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Eigenstates,
    Disorder,
    Evolve,
    Memory,
    Pst,
    Classify,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Spectrum,
        Command::Eigenstates,
        Command::Disorder,
        Command::Evolve,
        Command::Memory,
        Command::Pst,
        Command::Classify,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Eigenstates => "eigenstates",
            Command::Disorder => "disorder",
            Command::Evolve => "evolve",
            Command::Memory => "memory",
            Command::Pst => "pst",
            Command::Classify => "classify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

/// Where an excitation is injected: a site label or the localized in-gap
/// eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectTarget {
    Site(i64),
    GapState,
}

impl FromStr for InjectTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("gapstate") {
            return Ok(InjectTarget::GapState);
        }
        s.parse::<i64>()
            .map(InjectTarget::Site)
            .map_err(|_| Error::Config(format!("inject must be a site label or \"gapstate\", got {s:?}")))
    }
}

impl fmt::Display for InjectTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InjectTarget::Site(s) => write!(f, "{s}"),
            InjectTarget::GapState => f.write_str("gapstate"),
        }
    }
}

impl Serialize for InjectTarget {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InjectTarget {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Site(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Site(s) => Ok(InjectTarget::Site(s)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A number or a list of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    One(f64),
    Many(Vec<f64>),
}

impl Values {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Values::One(x) => vec![*x],
            Values::Many(v) => v.clone(),
        }
    }
}

/// Configuration as given by one source; unset fields fall through to the
/// next layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strong: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<Values>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disorder: Option<Values>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inject: Option<InjectTarget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<u8>,
    /// Interpret `tmax` in raw time instead of `1/Δ` units.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_time: Option<bool>,
}

macro_rules! overlay_fields {
    ($top:expr, $bottom:expr, $($f:ident),*) => {
        PartialConfig { $($f: $top.$f.or($bottom.$f)),* }
    };
}

impl PartialConfig {
    /// Parses a config file. A run manifest is accepted too, in which case
    /// its embedded config is used.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_slice(bytes).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        let is_manifest = value.get("artifacts").is_some() && value.get("config").is_some();
        // parse the bytes again rather than the value so duplicate keys are rejected
        if is_manifest {
            return Manifest::from_json(bytes).map(|m| m.config);
        }
        serde_json::from_slice(bytes).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn overlay(self, lower: PartialConfig) -> PartialConfig {
        overlay_fields!(
            self,
            lower,
            command,
            family,
            sites,
            strong,
            weak,
            ratio,
            disorder,
            realizations,
            seed,
            tmax,
            samples,
            inject,
            out,
            format,
            figure,
            raw_time
        )
    }

    /// Parameters reproducing one of the published figures.
    pub fn figure_preset(figure: u8) -> Result<PartialConfig> {
        let base = PartialConfig {
            sites: Some(101),
            strong: Some(ChainSpec::DEFAULT_STRONG),
            weak: Some(ChainSpec::DEFAULT_WEAK),
            ..Default::default()
        };
        let preset = match figure {
            2 => PartialConfig { command: Some(Command::Eigenstates), ..base },
            3 => PartialConfig { command: Some(Command::Spectrum), ..base },
            4 | 5 => PartialConfig {
                command: Some(Command::Disorder),
                disorder: Some(Values::Many(vec![0.0, 0.1, 1.0, 1.5])),
                realizations: Some(DEFAULT_REALIZATIONS),
                ..base
            },
            6 => PartialConfig {
                command: Some(Command::Memory),
                sites: Some(21),
                disorder: Some(Values::One(0.1)),
                realizations: Some(DEFAULT_REALIZATIONS),
                tmax: Some(1000.0),
                ..base
            },
            7 => PartialConfig {
                command: Some(Command::Pst),
                family: Some(Family::StrongCenter),
                sites: Some(21),
                weak: None,
                ratio: Some(Values::Many(vec![5.0, 10.0, 20.0])),
                ..base
            },
            other => return Err(Error::Config(format!("no preset for figure {other}, expected 2-7"))),
        };
        Ok(preset)
    }

    /// Applies the figure preset and defaults, then validates.
    pub fn resolve(self) -> Result<RunConfig> {
        let layered = match self.figure {
            Some(f) => self.overlay(Self::figure_preset(f)?),
            None => self,
        };
        RunConfig::from_layered(layered)
    }
}

/// Fully resolved and validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Chain; for `pst` the weak coupling comes from the first ratio.
    pub chain: ChainSpec,
    /// Coupling ratios scanned by `pst`.
    pub ratios: Vec<f64>,
    /// Disorder scales `E`.
    pub disorder: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    /// Horizon in `1/Δ` units; `None` selects the command default.
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
    pub inject: Option<InjectTarget>,
    pub out: PathBuf,
    pub format: Format,
    pub figure: Option<u8>,
}

fn cfg_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl RunConfig {
    fn from_layered(p: PartialConfig) -> Result<Self> {
        let command = p.command.ok_or_else(|| Error::Config("no command given".into()))?;
        let family = p.family.unwrap_or(Family::WeakCenter);
        let sites = p.sites.unwrap_or(101);
        let strong = p.strong.unwrap_or(ChainSpec::DEFAULT_STRONG);
        let ratios = p.ratio.as_ref().map(Values::to_vec).unwrap_or_default();
        if ratios.iter().any(|r| !(r.is_finite() && *r > 1.0)) {
            return Err(Error::Config("coupling ratios must be finite and > 1".into()));
        }
        if command != Command::Pst && ratios.len() > 1 {
            return Err(Error::Config(format!("{command} takes a single ratio")));
        }
        if command == Command::Pst && ratios.iter().any(|&r| r < 2.0) {
            return Err(Error::Config("pst ratios must be >= 2".into()));
        }
        let weak = match (p.weak, ratios.first()) {
            (Some(w), Some(r)) if command != Command::Pst && (w - strong / r).abs() > 1e-12 * strong => {
                return Err(Error::Config(format!("weak = {w} conflicts with ratio = {r}")))
            }
            (_, Some(r)) => strong / r,
            (Some(w), None) => w,
            (None, None) => ChainSpec::DEFAULT_WEAK,
        };
        let chain = ChainSpec::new(family, sites, strong, weak).map_err(cfg_err)?;
        // outside pst the ratio only serves to set the weak coupling
        let ratios = match command {
            Command::Pst if ratios.is_empty() => vec![strong / weak],
            Command::Pst => ratios,
            _ => vec![],
        };

        let disorder = match p.disorder.as_ref().map(Values::to_vec) {
            Some(v) => v,
            None => match command {
                Command::Disorder => vec![0.0, 0.1, 1.0, 1.5],
                Command::Memory => vec![0.1],
                _ => vec![],
            },
        };
        if disorder.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Config("disorder scales must be finite and >= 0".into()));
        }
        if command == Command::Evolve && disorder.len() > 1 {
            return Err(Error::Config("evolve takes at most one disorder scale".into()));
        }
        let realizations = p.realizations.unwrap_or(DEFAULT_REALIZATIONS);
        if realizations == 0 {
            return Err(Error::Config("realizations must be >= 1".into()));
        }
        let tmax = match p.tmax {
            Some(t) if !(t.is_finite() && t > 0.0) => return Err(Error::Config(format!("tmax must be > 0, got {t}"))),
            Some(t) if p.raw_time.unwrap_or(false) => Some(t * strong),
            other => other,
        };
        if let Some(t) = tmax.filter(|t| !t.is_finite()) {
            return Err(Error::Config(format!("tmax overflows in 1/Δ units: {t}")));
        }
        if let Some(s) = p.samples {
            if s < 2 {
                return Err(Error::Config(format!("samples must be >= 2, got {s}")));
            }
        }
        if let Some(InjectTarget::Site(s)) = p.inject {
            if chain.index_of(s).is_none() {
                return Err(Error::Config(format!("inject site {s} outside the chain")));
            }
        }
        Ok(RunConfig {
            command,
            chain,
            ratios,
            disorder,
            realizations,
            seed: p.seed.unwrap_or(0),
            tmax,
            samples: p.samples,
            inject: p.inject,
            out: p.out.unwrap_or_else(|| PathBuf::from("out")),
            format: p.format.unwrap_or_default(),
            figure: p.figure,
        })
    }

    /// Explicit form of this config; resolving it gives back `self` minus
    /// the figure tag, whose preset is already folded into the fields.
    pub fn to_partial(&self) -> PartialConfig {
        let pst = self.command == Command::Pst;
        PartialConfig {
            command: Some(self.command),
            family: Some(self.chain.family),
            sites: Some(self.chain.n_sites),
            strong: Some(self.chain.strong),
            weak: (!pst).then_some(self.chain.weak),
            ratio: pst.then(|| Values::Many(self.ratios.clone())),
            disorder: Some(Values::Many(self.disorder.clone())),
            realizations: Some(self.realizations),
            seed: Some(self.seed),
            tmax: self.tmax,
            samples: self.samples,
            inject: self.inject,
            out: Some(self.out.clone()),
            format: Some(self.format),
            figure: None,
            raw_time: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inject_parsing() {
        assert_eq!("gapstate".parse::<InjectTarget>().unwrap(), InjectTarget::GapState);
        assert_eq!("-10".parse::<InjectTarget>().unwrap(), InjectTarget::Site(-10));
        assert!("left".parse::<InjectTarget>().is_err());
        let p: PartialConfig = serde_json::from_str(r#"{"inject": 3}"#).unwrap();
        assert_eq!(p.inject, Some(InjectTarget::Site(3)));
        let p: PartialConfig = serde_json::from_str(r#"{"inject": "gapstate"}"#).unwrap();
        assert_eq!(p.inject, Some(InjectTarget::GapState));
    }

    #[test]
    fn flags_override_file() {
        let file = PartialConfig::from_json(br#"{"command":"spectrum","sites":21,"weak":0.4}"#).unwrap();
        let flags = PartialConfig { sites: Some(41), ..Default::default() };
        let cfg = flags.overlay(file).resolve().unwrap();
        assert_eq!(cfg.chain.n_sites, 41);
        assert_eq!(cfg.chain.weak, 0.4);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(PartialConfig::from_json(br#"{"command":"spectrum","sitez":21}"#).is_err());
        assert!(PartialConfig::from_json(b"not json").is_err());
    }

    #[test]
    fn ratio_sets_weak() {
        let cfg =
            PartialConfig { command: Some(Command::Spectrum), ratio: Some(Values::One(4.0)), ..Default::default() }
                .resolve()
                .unwrap();
        assert_eq!(cfg.chain.weak, 2.0);
        let clash = PartialConfig {
            command: Some(Command::Spectrum),
            ratio: Some(Values::One(4.0)),
            weak: Some(0.2),
            ..Default::default()
        };
        assert!(clash.resolve().is_err());
    }

    #[test]
    fn resolve_errors_are_config_errors() {
        let bad = PartialConfig { command: Some(Command::Spectrum), sites: Some(4), ..Default::default() };
        assert!(matches!(bad.resolve(), Err(Error::Config(_))));
        assert!(PartialConfig::default().resolve().is_err());
        let fig = PartialConfig { figure: Some(9), ..Default::default() };
        assert!(fig.resolve().is_err());
    }

    #[test]
    fn presets_resolve() {
        for f in 2..=7 {
            let cfg = PartialConfig { figure: Some(f), ..Default::default() }.resolve().unwrap();
            assert_eq!(cfg.figure, Some(f));
        }
        let seven = PartialConfig { figure: Some(7), ..Default::default() }.resolve().unwrap();
        assert_eq!(seven.ratios, vec![5.0, 10.0, 20.0]);
        assert_eq!(seven.chain.family, Family::StrongCenter);
    }

    #[test]
    fn partial_round_trip() {
        for f in 2..=7 {
            let cfg = PartialConfig { figure: Some(f), seed: Some(7), ..Default::default() }.resolve().unwrap();
            let again = cfg.to_partial().resolve().unwrap();
            assert_eq!(RunConfig { figure: None, ..cfg }, again);
        }
    }

    #[test]
    fn manifest_wrapper_accepted() {
        let m = br#"{"tool":"dimerchain","version":"0.1.0","seed":0,"config":{"command":"classify"},"artifacts":[]}"#;
        assert_eq!(PartialConfig::from_json(m).unwrap().command, Some(Command::Classify));
        let dup = br#"{"tool":"x","version":"0","seed":0,"seed":1,"config":{},"artifacts":[]}"#;
        assert!(PartialConfig::from_json(dup).is_err());
    }

    #[test]
    fn duplicate_keys_rejected() {
        assert!(PartialConfig::from_json(br#"{"command":"spectrum","ratio":4,"ratio":42}"#).is_err());
    }

    #[test]
    fn ratio_is_folded_into_weak_outside_pst() {
        let p =
            PartialConfig { command: Some(Command::Spectrum), ratio: Some(Values::One(42.0)), ..Default::default() };
        let cfg = p.resolve().unwrap();
        assert!(cfg.ratios.is_empty());
        assert_eq!(cfg.to_partial().resolve().unwrap(), cfg);
    }

    #[test]
    fn raw_time_scales_horizon() {
        let cfg = PartialConfig {
            command: Some(Command::Evolve),
            tmax: Some(10.0),
            raw_time: Some(true),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(cfg.tmax, Some(80.0));
    }
}
