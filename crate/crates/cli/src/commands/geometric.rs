use std::io::BufReader;

use anyhow::{bail, Context, Result};
use gcrsi_core::geometry::{check_geometric_inequality, random_symmetric_pairs, read_corpus};
use gcrsi_core::rng::derive_seed;
use gcrsi_core::saturation::Sign;
use gcrsi_core::Exec;

use super::{asserting, family_params, standing, Standing};
use crate::config::{Mode, RunConfig};
use crate::report::{Entry, Report};

pub const KEYS: &[&str] = &["a", "b", "sigma", "family", "pairs", "corpus", "tol.sigmas"];

pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.require_samples()?;
    let a = cfg.real("a", 1.0)?;
    let b = cfg.real("b", 1.0)?;
    let sigma = cfg.sign("sigma", Sign::Plus)?;
    let family = cfg.text("family", "unified")?;
    let k_sigmas = cfg.real("tol.sigmas", 3.0)?;
    let params = family_params(&family, a, b, sigma)?;
    let st = standing(&params);
    if st == Standing::Fails && cfg.mode == Mode::Assert {
        bail!(
            "refusing assertion mode: (a, b) = ({a}, {b}) lies in the Fails region (a + b < 1), \
             where the inequality is known to be false; rerun with --explore"
        );
    }
    let corpus = cfg.text("corpus", "")?;
    let pairs = if corpus.is_empty() {
        random_symmetric_pairs(cfg.count("pairs", 20)?, derive_seed(cfg.seed, "verify-geometric/corpus"))?
    } else {
        let file = std::fs::File::open(&corpus).with_context(|| format!("opening corpus {corpus}"))?;
        read_corpus(BufReader::new(file))?
    };
    if pairs.is_empty() {
        bail!("the corpus is empty");
    }

    let assert = asserting(cfg, st);
    let mut report = Report::new("verify-geometric");
    report.push(Entry::value("region", 0.0).with_label(st.label()));
    let mut within = 0usize;
    let mut csv = String::from("pair,dim,lhs,rhs,stderr,margin_sigmas\n");
    for (i, p) in pairs.iter().enumerate() {
        let seed = derive_seed(cfg.seed, &format!("verify-geometric/pair-{i}"));
        let g = check_geometric_inequality(&p.k, &p.l, &params, cfg.samples, seed, Exec::default())?;
        within += usize::from(g.margin_sigmas >= -k_sigmas);
        csv.push_str(&format!("{i},{},{},{},{},{}\n", p.k.dim(), g.lhs, g.rhs, g.stderr, g.margin_sigmas));
        let label = if assert { "asserted" } else { "exploratory" };
        report.push(
            Entry::value(format!("pair-{i}"), g.margin_sigmas)
                .with_stderr(g.stderr)
                .with_label(label)
                .check(g.lhs, g.rhs, k_sigmas * g.stderr, assert),
        );
    }
    report.push(Entry::value("fraction_within_tolerance", within as f64 / pairs.len() as f64));
    report.sidecar("pairs", csv);
    Ok(report)
}
