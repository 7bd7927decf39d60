//! One module per subcommand. Each declares the parameter keys it reads and
//! turns a resolved [`RunConfig`](crate::config::RunConfig) into a report.

pub mod convolve;
pub mod counterexample;
pub mod functional;
pub mod geometric;
pub mod region;
pub mod saturate;

use gcrsi_core::geometry::InequalityParams;
use gcrsi_core::saturation::{classify_region, Region, Sign};

use crate::config::{Mode, RunConfig};

/// How the `(a, b)` parameters relate to what has been proved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Standing {
    Proven,
    Open,
    Fails,
}

impl Standing {
    pub fn label(self) -> &'static str {
        match self {
            Standing::Proven => "holds",
            Standing::Open => "open",
            Standing::Fails => "fails",
        }
    }
}

/// For `σ = +1` the `(a, b)` plane is classified by the region rules; for
/// `σ = −1` only the proven parameter sets count as settled.
pub fn standing(p: &InequalityParams) -> Standing {
    if p.sigma == Sign::Plus {
        if let Ok(v) = classify_region(p.a, p.b) {
            match v.region {
                Region::Holds if p.is_proven() => return Standing::Proven,
                Region::Fails => return Standing::Fails,
                _ => return Standing::Open,
            }
        }
    }
    if p.is_proven() {
        Standing::Proven
    } else {
        Standing::Open
    }
}

/// Whether a check should count towards the exit status.
pub fn asserting(cfg: &RunConfig, s: Standing) -> bool {
    cfg.mode == Mode::Assert && s == Standing::Proven
}

/// Builds the parameters named by `family` from `(a, b, sigma)`.
pub fn family_params(family: &str, a: f64, b: f64, sigma: Sign) -> anyhow::Result<InequalityParams> {
    let p = match family {
        "ab" => InequalityParams::new(1.0, 1.0, a, b, sigma)?,
        "gcmpi" => InequalityParams::new(1.0 / b, 1.0 / a, a, b, sigma)?,
        "unified" => InequalityParams::new((1.0 / b.abs()).max(1.0), (1.0 / a.abs()).max(1.0), a, b, sigma)?,
        other => anyhow::bail!("family must be ab, gcmpi or unified, got {other:?}"),
    };
    Ok(p)
}
