//! Run configuration: a flat `key = value` file merged under command-line
//! flags.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scattering::PathPolicy;
use crate::sht::Scheme;
use crate::wavelets::KernelConfig;

/// Parameter-size preset for experiments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Preset {
    #[default]
    Desk,
    Full,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Desk => "desk",
            Preset::Full => "full",
        }
    }
}

/// Either scale parameter of the scaling function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingScale {
    J0(usize),
    L0(usize),
}

/// Every setting a subcommand may consume; unset fields fall back to the
/// subcommand's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub subcommand: String,
    pub bandlimit: Option<usize>,
    pub alpha: Option<f64>,
    pub scale: Option<ScalingScale>,
    pub depth: Option<i64>,
    pub policy: Option<PathPolicy>,
    pub multires: Option<bool>,
    pub oversample: Option<usize>,
    pub seed: Option<u64>,
    pub signals: Option<usize>,
    pub rotations: Option<usize>,
    pub scheme: Option<Scheme>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub preset: Option<Preset>,
    pub threads: Option<usize>,
}

const KEYS: &[&str] = &[
    "bandlimit",
    "alpha",
    "j0",
    "l0",
    "depth",
    "policy",
    "multires",
    "oversample",
    "seed",
    "signals",
    "rotations",
    "scheme",
    "input",
    "out",
    "preset",
    "threads",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse {key} = '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::InvalidConfig(format!(
            "cannot parse {key} = '{value}' as a boolean"
        ))),
    }
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// ignored, keys are case-insensitive and `L`, `D`, `J0`, `L0` are
    /// accepted aliases.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut j0 = None;
        let mut l0 = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
            let key = key.trim().to_ascii_lowercase();
            let key = match key.as_str() {
                "l" => "bandlimit".to_string(),
                "d" => "depth".to_string(),
                _ => key,
            };
            let v = value.trim();
            match key.as_str() {
                "bandlimit" => cfg.bandlimit = Some(parse_value(&key, v)?),
                "alpha" => cfg.alpha = Some(parse_value(&key, v)?),
                "j0" => j0 = Some(parse_value(&key, v)?),
                "l0" => l0 = Some(parse_value(&key, v)?),
                "depth" => cfg.depth = Some(parse_value(&key, v)?),
                "policy" => {
                    cfg.policy = Some(
                        v.parse()
                            .map_err(|_| Error::InvalidConfig(format!("unknown policy '{v}'")))?,
                    )
                }
                "multires" => cfg.multires = Some(parse_bool(&key, v)?),
                "oversample" => cfg.oversample = Some(parse_value(&key, v)?),
                "seed" => cfg.seed = Some(parse_value(&key, v)?),
                "signals" => cfg.signals = Some(parse_value(&key, v)?),
                "rotations" => cfg.rotations = Some(parse_value(&key, v)?),
                "scheme" => {
                    cfg.scheme = Some(
                        v.parse()
                            .map_err(|_| Error::InvalidConfig(format!("unknown scheme '{v}'")))?,
                    )
                }
                "input" => cfg.input = Some(PathBuf::from(v)),
                "out" => cfg.out = Some(PathBuf::from(v)),
                "preset" => {
                    cfg.preset = Some(match v {
                        "desk" => Preset::Desk,
                        "full" => Preset::Full,
                        _ => return Err(Error::InvalidConfig(format!("unknown preset '{v}'"))),
                    })
                }
                "threads" => cfg.threads = Some(parse_value(&key, v)?),
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown key '{other}' (known: {})",
                        n + 1,
                        KEYS.join(", ")
                    )))
                }
            }
        }
        cfg.scale = exclusive_scale(j0, l0)?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `self` with every field set in `over` replaced; `J0` and `L0`
    /// override each other as one setting.
    pub fn overridden_by(&self, over: &RunConfig) -> RunConfig {
        fn pick<T: Clone>(a: &Option<T>, b: &Option<T>) -> Option<T> {
            b.clone().or_else(|| a.clone())
        }
        RunConfig {
            subcommand: if over.subcommand.is_empty() {
                self.subcommand.clone()
            } else {
                over.subcommand.clone()
            },
            bandlimit: pick(&self.bandlimit, &over.bandlimit),
            alpha: pick(&self.alpha, &over.alpha),
            scale: pick(&self.scale, &over.scale),
            depth: pick(&self.depth, &over.depth),
            policy: pick(&self.policy, &over.policy),
            multires: pick(&self.multires, &over.multires),
            oversample: pick(&self.oversample, &over.oversample),
            seed: pick(&self.seed, &over.seed),
            signals: pick(&self.signals, &over.signals),
            rotations: pick(&self.rotations, &over.rotations),
            scheme: pick(&self.scheme, &over.scheme),
            input: pick(&self.input, &over.input),
            out: pick(&self.out, &over.out),
            preset: pick(&self.preset, &over.preset),
            threads: pick(&self.threads, &over.threads),
        }
    }

    /// Filter-bank parameters at band-limit `bandlimit`; requires a scale.
    pub fn kernel_config(&self, bandlimit: usize) -> Result<KernelConfig> {
        let alpha = self.alpha.unwrap_or(2.0);
        let cfg = match self.scale {
            Some(ScalingScale::J0(j0)) => KernelConfig::new(bandlimit, alpha, j0),
            Some(ScalingScale::L0(l0)) => KernelConfig::from_scaling_bandlimit(bandlimit, alpha, l0),
            None => return Err(Error::InvalidConfig("exactly one of J0 / L0 must be provided".into())),
        };
        cfg.map_err(|e| Error::InvalidConfig(format!("{e} (L = {bandlimit}, alpha = {alpha}, {self})")))
    }

    /// Re-checks the module-level constraints of every field that is set.
    pub fn validate(&self) -> Result<()> {
        if let Some(0) = self.bandlimit {
            return Err(Error::InvalidBandlimit(0));
        }
        if let Some(a) = self.alpha {
            if !(a.is_finite() && a > 1.0) {
                return Err(Error::InvalidConfig(format!("alpha = {a} must exceed 1")));
            }
        }
        if let Some(d) = self.depth {
            if d < 0 {
                return Err(Error::InvalidDepth(d));
            }
        }
        if let Some(ScalingScale::L0(0)) = self.scale {
            return Err(Error::InvalidConfig("L0 must be positive".into()));
        }
        for (name, v) in [
            ("oversample", self.oversample),
            ("signals", self.signals),
            ("rotations", self.rotations),
            ("threads", self.threads),
        ] {
            if v == Some(0) {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if let (Some(l), Some(_)) = (self.bandlimit, self.scale) {
            self.kernel_config(l)?;
        }
        Ok(())
    }

    /// `key = value` lines of every set field, for output headers.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        put(
            "subcommand",
            (!self.subcommand.is_empty()).then(|| self.subcommand.clone()),
        );
        put("bandlimit", self.bandlimit.map(|v| v.to_string()));
        put("alpha", self.alpha.map(|v| v.to_string()));
        match self.scale {
            Some(ScalingScale::J0(j)) => put("j0", Some(j.to_string())),
            Some(ScalingScale::L0(l)) => put("l0", Some(l.to_string())),
            None => {}
        }
        put("depth", self.depth.map(|v| v.to_string()));
        put("policy", self.policy.map(|v| v.to_string()));
        put("multires", self.multires.map(|v| v.to_string()));
        put("oversample", self.oversample.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("signals", self.signals.map(|v| v.to_string()));
        put("rotations", self.rotations.map(|v| v.to_string()));
        put("scheme", self.scheme.map(|v| v.name().to_string()));
        put("input", self.input.as_ref().map(|p| p.display().to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("preset", self.preset.map(|p| p.name().to_string()));
        put("threads", self.threads.map(|v| v.to_string()));
        out
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().into_iter().map(|(k, v)| format!("{k} = {v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// At most one of `j0` / `l0`.
pub fn exclusive_scale(j0: Option<usize>, l0: Option<usize>) -> Result<Option<ScalingScale>> {
    match (j0, l0) {
        (Some(_), Some(_)) => Err(Error::InvalidConfig(
            "exactly one of J0 / L0 may be given, not both".into(),
        )),
        (Some(j), None) => Ok(Some(ScalingScale::J0(j))),
        (None, Some(l)) => Ok(Some(ScalingScale::L0(l))),
        (None, None) => Ok(None),
    }
}
