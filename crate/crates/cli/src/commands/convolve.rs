use anyhow::Result;
use gcrsi_core::convolution::{check_cov_bound, doubling_iterate, self_convolve_step};
use gcrsi_core::{Exec, Grid, GridFn, SymMatrix, Weight};

use crate::config::{Mode, RunConfig};
use crate::report::{Entry, Report};

pub const KEYS: &[&str] =
    &["h", "extent", "iterations", "variance", "tol.squaring", "tol.cov_drift", "tol.sup", "tol.gap"];

/// Integral-squaring, covariance preservation and convergence of the
/// doubling iteration on the indicator of `[-1, 1]`, plus the covariance
/// bound on the same input.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let assert = cfg.mode == Mode::Assert;
    let h = cfg.real("h", 1.0 / 256.0)?;
    let extent = cfg.real("extent", 4.0)?;
    let n = cfg.count("iterations", 8)?;
    let var = cfg.real("variance", 1.0)?;
    let tol_sq = cfg.real("tol.squaring", 1e-6)?;
    let tol_cov = cfg.real("tol.cov_drift", 1e-6)?;
    let tol_sup = cfg.real("tol.sup", 0.01)?;
    let tol_gap = cfg.real("tol.gap", 1e-6)?;

    let grid = Grid::new(1, h, extent)?;
    let f = GridFn::indicator_box(grid, &[-1.0], &[1.0])?;
    let sigma = SymMatrix::scalar(var);
    let w = Weight::Gaussian(sigma.clone());
    let mut report = Report::new("convolve-demo");

    let before = f.integral(&w)?;
    let after = self_convolve_step(&f, &sigma)?.integral(&w)?;
    let err = (after - before * before).abs();
    report.push(Entry::value("squaring_error", err).check(err, 0.0, tol_sq, assert));

    let diag = doubling_iterate(&f, &sigma, n, Exec::default())?;
    let drift = diag.max_cov_drift();
    report.push(Entry::value("max_cov_drift", drift).check(drift, 0.0, tol_cov, assert));
    report.push(Entry::value("max_integral_error", diag.max_integral_error()));
    let sup = diag.final_sup_distance();
    report.push(Entry::value("final_sup_distance", sup).check(sup, tol_sup, 0.0, assert));
    report.sidecar("doubling", diag.to_csv()?);

    let cb = check_cov_bound(&f, &sigma)?;
    report.push(Entry::value("cov_bound/variance", cb.cov.get(0, 0)));
    report.push(Entry::value("cov_bound/gap_min_eig", cb.gap_min_eig).check(-cb.gap_min_eig, 0.0, tol_gap, assert));
    Ok(report)
}
