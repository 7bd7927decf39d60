use anyhow::Result;
use gcrsi_core::saturation::{
    counterexample_conjugate, counterexample_difference, find_tail_violation, tail_necessity_margin, verify_certificate,
    CertificateSet, CrsDatum, Sign,
};
use gcrsi_core::SymMatrix;

use crate::config::{Mode, RunConfig};
use crate::report::{Entry, Report};

pub const KEYS: &[&str] = &["a", "da", "db", "tail_a", "tail_b"];

/// Feasibility, agreement with the closed form and the excess over 1 for
/// one explicit certificate.
pub fn certificate_entries(name: &str, closed: f64, cert: &CertificateSet, assert: bool) -> Result<Vec<Entry>> {
    let r = verify_certificate(cert)?;
    let tol = cert.lmi_matrix()?.default_tolerance()?;
    Ok(vec![
        Entry::value(format!("{name}/lmi_min_eig"), r.lmi_min_eig).check(-r.lmi_min_eig, 0.0, tol, assert),
        Entry::value(format!("{name}/ratio"), r.ratio).check((r.ratio - closed).abs(), 0.0, 1e-9 * closed, assert),
        Entry::value(format!("{name}/exceeds_one"), r.ratio - 1.0).check(1.0, r.ratio, 0.0, assert),
    ])
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let assert = cfg.mode == Mode::Assert;
    let a = cfg.real("a", 0.25)?;
    let (da, db) = (cfg.real("da", 0.5)?, cfg.real("db", 0.5)?);
    let (ta, tb) = (cfg.real("tail_a", 0.45)?, cfg.real("tail_b", 0.45)?);
    let mut report = Report::new("counterexample");

    // The first attempt at a difference inequality: 2·2 < 3·3/2.
    let d = CrsDatum::gcrsi(1, 1.0, 1.0, Sign::Minus)?;
    let half = SymMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]])?;
    let cert = CertificateSet::new(SymMatrix::scalar(1.0), SymMatrix::scalar(1.0), half, SymMatrix::scalar(0.5), d)?;
    for e in certificate_entries("failed_attempt", 9.0 / 8.0, &cert, assert)? {
        report.push(e);
    }

    let c = counterexample_conjugate(a)?;
    report.push(Entry::value("conjugate_family/r_a", c.r_a));
    report.push(Entry::value("conjugate_family/phi_at_r_a", c.phi_at_ra));
    report.push(Entry::value("conjugate_family/s_star", c.s_star));
    for e in certificate_entries("conjugate_family", c.fr_sq_lower, &c.cert, assert)? {
        report.push(e);
    }

    let f = counterexample_difference(da, db)?;
    report.push(Entry::value("difference_family/c", f.c_value));
    report.push(Entry::value("difference_family/z_star", f.z_star));
    for e in certificate_entries("difference_family", f.fr_sq_lower, &f.cert, assert)? {
        report.push(e);
    }

    match find_tail_violation(ta, tb)? {
        Some(r) => {
            let m = tail_necessity_margin(ta, tb, r)?;
            // Violation: 2·Φ0(R) < Φ0((a+b)R).
            report.push(Entry::value("tail/violating_r", r).check(m.rhs, m.lhs, 0.0, assert && ta + tb < 1.0));
        }
        None => report.push(Entry::value("tail/violating_r", f64::NAN).with_label("none found")),
    }
    Ok(report)
}
