//! Classification of the `(a, b)` plane and the tail test behind the
//! necessity of `a + b ≥ 1`.

use crate::error::{check_range, Result};
use crate::special::upper_tail;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Holds,
    Fails,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionRule {
    /// `min(a, b) ≥ 1`.
    BothAtLeastOne,
    /// `3·min(a², b²) + max(a², b²) ≥ 1`.
    WeightedSquares,
    /// `a + b < 1`.
    SumBelowOne,
    /// Neither criterion decides.
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub region: Region,
    pub rule: RegionRule,
}

pub fn classify_region(a: f64, b: f64) -> Result<RegionVerdict> {
    check_range("a", a, a > 0.0, "> 0")?;
    check_range("b", b, b > 0.0, "> 0")?;
    let (lo, hi) = (a.min(b), a.max(b));
    let (region, rule) = if lo >= 1.0 {
        (Region::Holds, RegionRule::BothAtLeastOne)
    } else if 3.0 * lo * lo + hi * hi >= 1.0 {
        (Region::Holds, RegionRule::WeightedSquares)
    } else if a + b < 1.0 {
        (Region::Fails, RegionRule::SumBelowOne)
    } else {
        (Region::Open, RegionRule::Undecided)
    };
    Ok(RegionVerdict { region, rule })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailMargin {
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

/// `Φ0((a+b)R)` against `2·Φ0(R)`, where `Φ0(R) = γ¹([R, ∞))`.
pub fn tail_necessity_margin(a: f64, b: f64, r: f64) -> Result<TailMargin> {
    check_range("R", r, r > 0.0, "> 0")?;
    let lhs = upper_tail((a + b) * r);
    let rhs = 2.0 * upper_tail(r);
    Ok(TailMargin { lhs, rhs, violated: lhs > rhs })
}

/// Smallest `R` on a 0.05-spaced grid over `[1, 20]` with a violated margin.
pub fn find_tail_violation(a: f64, b: f64) -> Result<Option<f64>> {
    for k in 0..=380 {
        let r = 1.0 + 0.05 * k as f64;
        if tail_necessity_margin(a, b, r)?.violated {
            return Ok(Some(r));
        }
    }
    Ok(None)
}
