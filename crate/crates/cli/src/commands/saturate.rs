use anyhow::{bail, Result};
use gcrsi_core::saturation::{
    counterexample_conjugate, counterexample_difference, estimate_fr_gaussian, verify_certificate, CertificateSet,
    CrsDatum, Sign,
};

use super::counterexample::certificate_entries;
use crate::config::{Mode, RunConfig};
use crate::report::{Entry, Report};

pub const KEYS: &[&str] = &["a", "b", "sigma", "datum", "n", "budget", "tol.ratio"];

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let a = cfg.real("a", 1.0)?;
    let b = cfg.real("b", 1.0)?;
    let sigma = cfg.sign("sigma", Sign::Plus)?;
    let n = cfg.count("n", 1)?;
    let budget = cfg.count("budget", 4000)?;
    let tol = cfg.real("tol.ratio", 1e-6)?;
    let datum = match cfg.text("datum", "gcmpi")?.as_str() {
        "gcrsi" => CrsDatum::gcrsi(n, a, b, sigma)?,
        "gcmpi" => CrsDatum::gcmpi(n, a, b, sigma)?,
        "unified" => CrsDatum::unified(n, a, b, sigma)?,
        other => bail!("datum must be gcrsi, gcmpi or unified, got {other:?}"),
    };
    let guaranteed = datum.saturation_guaranteed();
    let mut report = Report::new("saturate");
    let est = estimate_fr_gaussian(&datum, budget, cfg.seed)?;
    let searched = verify_certificate(&est.best_cert)?;
    let mut lower = est.best_ratio;
    let entry = Entry::value("search_best_ratio", est.best_ratio).with_label(if guaranteed { "proven" } else { "open" });
    report.push(if guaranteed {
        entry.check(est.best_ratio, 1.0, tol, cfg.mode == Mode::Assert)
    } else {
        entry
    });
    report.push(Entry::value("search_evaluations", est.evaluations as f64));
    report.push(Entry::value("search_lmi_min_eig", searched.lmi_min_eig));

    // Closed forms exist for n = 1 with α = 1/b, β = 1/a.
    let mut closed: Option<(&str, f64, CertificateSet)> = None;
    if n == 1 && datum.is_gcmpi() {
        if datum.sigma == Sign::Plus && (datum.a + datum.b - 1.0).abs() < 1e-12 && datum.a < 1.0 {
            let f = counterexample_conjugate(datum.a)?;
            closed = Some(("conjugate_family", f.fr_sq_lower, f.cert));
        } else if datum.sigma == Sign::Minus {
            let f = counterexample_difference(datum.a, datum.b)?;
            closed = Some(("difference_family", f.fr_sq_lower, f.cert));
        }
    }
    if let Some((name, value, cert)) = closed {
        for e in certificate_entries(name, value, &cert, cfg.mode == Mode::Assert)? {
            report.push(e);
        }
        report.push(Entry::value("search_over_closed_form", est.best_ratio / value));
        lower = lower.max(value);
    }
    report.push(Entry::value("fr_sq_lower_bound", lower));
    Ok(report)
}
