use anyhow::{bail, Result};
use gcrsi_core::functional::{
    check_functional_gcrsi, four_functions_check, level_sets_to_fourtuple, MeasureAssignment, QuasiConcaveFn,
};
use gcrsi_core::geometry::{check_geometric_inequality, ConvexBody};
use gcrsi_core::rng::derive_seed;
use gcrsi_core::saturation::Sign;
use gcrsi_core::{Exec, Grid, GridFn};

use super::{asserting, family_params, standing};
use crate::config::{Mode, RunConfig};
use crate::report::{Entry, Report};

pub const KEYS: &[&str] = &["shape", "rk", "rl", "a", "b", "sigma", "family", "h", "extent", "tol.sigmas"];

fn input(shape: &str, grid: Grid, r: f64) -> Result<GridFn> {
    Ok(match shape {
        "indicator" => GridFn::indicator_box(grid, &[-r], &[r])?,
        "tent" => GridFn::from_fn(grid, |x| (1.0 - x[0].abs() / r).max(0.0))?,
        other => bail!("shape must be indicator or tent, got {other:?}"),
    })
}

/// Delta-method standard error of a product of two independent estimates.
fn product_se(m1: (f64, f64), m2: (f64, f64)) -> f64 {
    ((m1.0 * m2.1).powi(2) + (m2.0 * m1.1).powi(2)).sqrt()
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.require_samples()?;
    let shape = cfg.text("shape", "indicator")?;
    let (rk, rl) = (cfg.real("rk", 1.0)?, cfg.real("rl", 1.0)?);
    let a = cfg.real("a", 1.0)?;
    let b = cfg.real("b", 1.0)?;
    let sigma = cfg.sign("sigma", Sign::Plus)?;
    let family = cfg.text("family", "ab")?;
    let h = cfg.real("h", 1.0 / 256.0)?;
    let extent = cfg.real("extent", 6.0)?;
    let k_sigmas = cfg.real("tol.sigmas", 3.0)?;
    let params = family_params(&family, a, b, sigma)?;
    let assert_main = asserting(cfg, standing(&params));
    let assert = cfg.mode == Mode::Assert;

    let grid = Grid::new(1, h, extent)?;
    let f = QuasiConcaveFn::new(input(&shape, grid, rk)?);
    let g = QuasiConcaveFn::new(input(&shape, grid, rl)?);
    let mut report = Report::new("functional-check");

    let r = check_functional_gcrsi(&f, &g, &params)?;
    let label = if r.guaranteed { "guaranteed" } else { "exploratory" };
    report.push(
        Entry::value("functional/margin", r.margin).with_label(label).check(
            r.lhs,
            r.rhs,
            1e-6 * r.rhs,
            assert_main && r.guaranteed,
        ),
    );

    if shape == "indicator" {
        let k = ConvexBody::axis_box(vec![rk])?;
        let l = ConvexBody::axis_box(vec![rl])?;
        let seed = derive_seed(cfg.seed, "functional-check/geometric");
        let geo = check_geometric_inequality(&k, &l, &params, cfg.samples, seed, Exec::default())?;
        let m = &geo.measures;
        let se_l = product_se((m.k.mean, m.k.stderr), (m.l.mean, m.l.stderr));
        let se_r = product_se((m.intersection.mean, m.intersection.stderr), (m.sum.mean, m.sum.stderr));
        for (side, grid_value, mc, se) in [("lhs", r.lhs, geo.lhs, se_l), ("rhs", r.rhs, geo.rhs, se_r)] {
            report.push(
                Entry::value(format!("geometric/{side}"), mc)
                    .with_stderr(se)
                    .check((grid_value - mc).abs(), 0.0, k_sigmas * se, assert),
            );
        }
    }

    let tuple = level_sets_to_fourtuple(&f, &g, &params, &MeasureAssignment::gaussian(1))?;
    let ff = four_functions_check(&tuple);
    report.push(Entry::value("four_functions/worst_ratio", ff.worst_ratio).with_label(if ff.hypothesis_ok {
        "hypothesis holds"
    } else {
        "hypothesis fails"
    }));
    // The lattice lemma: once the hypothesis holds the conclusion must too.
    report.push(Entry::value("four_functions/conclusion", ff.rhs - ff.lhs).check(
        ff.lhs,
        ff.rhs,
        1e-6 * ff.rhs,
        assert && ff.hypothesis_ok,
    ));
    report.sidecar("fourtuple", tuple.to_csv()?);

    let one = QuasiConcaveFn::new(GridFn::constant(grid, 1.0)?);
    let c = check_functional_gcrsi(&one, &one, &params)?;
    report.push(Entry::value("constant/gap", c.rhs - c.lhs).check((c.rhs - c.lhs).abs(), 0.0, 1e-6, assert));
    Ok(report)
}
