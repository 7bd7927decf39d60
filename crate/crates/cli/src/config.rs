//! Run configuration: defaults, then a `key = value` file, then flags.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gcrsi_core::saturation::Sign;
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Smallest sample count accepted by subcommands that estimate measures.
pub const MIN_SAMPLES: usize = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Assert,
    Explore,
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub mode: Option<Mode>,
    pub params: Vec<(String, String)>,
}

#[derive(Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub mode: Mode,
    params: BTreeMap<String, String>,
    /// Every parameter read so far with the value actually used, defaults
    /// included, for the report's config echo.
    resolved: RefCell<BTreeMap<String, String>>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value, got {raw:?}", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            bail!("line {}: empty key", i + 1);
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

pub fn parse_assignment(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Reals may be written as fractions such as `1/4`.
pub fn parse_real(s: &str) -> Result<f64> {
    let v = match s.split_once('/') {
        Some((p, q)) => p.trim().parse::<f64>()? / q.trim().parse::<f64>()?,
        None => s.parse::<f64>()?,
    };
    if !v.is_finite() {
        bail!("{s:?} is not a finite number");
    }
    Ok(v)
}

pub fn parse_sign(s: &str) -> Result<Sign> {
    match s {
        "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
        "-" | "-1" | "minus" => Ok(Sign::Minus),
        _ => bail!("sign must be +1 or -1, got {s:?}"),
    }
}

fn parse_mode(s: &str) -> Result<Mode> {
    match s {
        "assert" => Ok(Mode::Assert),
        "explore" => Ok(Mode::Explore),
        _ => bail!("mode must be assert or explore, got {s:?}"),
    }
}

impl RunConfig {
    /// Merges the layers and rejects parameter keys the subcommand does not
    /// know.
    pub fn resolve(file: Option<&Path>, cli: Overrides, allowed: &[&str]) -> Result<Self> {
        let mut layered: BTreeMap<String, String> = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            layered.extend(parse_config_text(&text).with_context(|| format!("in config {}", path.display()))?);
        }
        let take = |m: &mut BTreeMap<String, String>, k: &str| m.remove(k);
        let file_seed = take(&mut layered, "seed").map(|v| v.parse::<u64>().with_context(|| format!("seed = {v:?}"))).transpose()?;
        let file_samples =
            take(&mut layered, "samples").map(|v| v.parse::<usize>().with_context(|| format!("samples = {v:?}"))).transpose()?;
        let file_mode = take(&mut layered, "mode").map(|v| parse_mode(&v)).transpose()?;
        layered.extend(cli.params);
        if let Some(k) = layered.keys().find(|k| !allowed.contains(&k.as_str())) {
            bail!("unknown parameter {k:?}; this subcommand accepts: {}", allowed.join(", "));
        }
        Ok(Self {
            seed: cli.seed.or(file_seed).unwrap_or(DEFAULT_SEED),
            samples: cli.samples.or(file_samples).unwrap_or(DEFAULT_SAMPLES),
            mode: cli.mode.or(file_mode).unwrap_or(Mode::Assert),
            params: layered,
            resolved: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn require_samples(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            bail!("samples = {} is below the minimum of {MIN_SAMPLES} for measure estimates", self.samples);
        }
        Ok(())
    }

    fn get<T: ToString>(&self, key: &str, default: T, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
        let v = match self.params.get(key) {
            Some(s) => parse(s).with_context(|| format!("parameter {key} = {s:?}"))?,
            None => default,
        };
        self.resolved.borrow_mut().insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn real(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key, default, parse_real)
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key, default, |s| Ok(s.parse::<usize>()?))
    }

    pub fn text(&self, key: &str, default: &str) -> Result<String> {
        self.get(key, default.to_string(), |s| Ok(s.to_string()))
    }

    pub fn sign(&self, key: &str, default: Sign) -> Result<Sign> {
        let s = self.get(key, if default == Sign::Plus { "+1".to_string() } else { "-1".to_string() }, |s| {
            parse_sign(s).map(|v| if v == Sign::Plus { "+1".into() } else { "-1".into() })
        })?;
        parse_sign(&s)
    }

    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }
}
