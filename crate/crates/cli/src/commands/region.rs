use anyhow::Result;
use gcrsi_core::saturation::{classify_region, find_tail_violation, tail_necessity_margin, Region};

use crate::config::{Mode, RunConfig};
use crate::report::{Entry, Report};

pub const KEYS: &[&str] = &["resolution", "max", "tail_sum"];

fn name(r: Region) -> &'static str {
    match r {
        Region::Holds => "holds",
        Region::Fails => "fails",
        Region::Open => "open",
    }
}

/// Reference points in the `(a², b²)` plane with the regions of the figure.
const PROBES: [(f64, f64, Region); 6] = [
    (1.0, 1.0, Region::Holds),
    (0.25, 0.25, Region::Holds),
    (0.04, 0.04, Region::Fails),
    (0.16, 0.16, Region::Fails),
    (0.09, 0.64, Region::Open),
    (0.64, 0.09, Region::Open),
];

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let assert = cfg.mode == Mode::Assert;
    let res = cfg.count("resolution", 40)?.max(1);
    let max = cfg.real("max", 1.25)?;
    let tail_sum = cfg.real("tail_sum", 0.9)?;
    let mut report = Report::new("region-map");

    let mut csv = String::from("a2,b2,region\n");
    let mut counts = [0usize; 3];
    for i in 1..=res {
        for j in 1..=res {
            let (a2, b2) = (max * i as f64 / res as f64, max * j as f64 / res as f64);
            let r = classify_region(a2.sqrt(), b2.sqrt())?.region;
            counts[r as usize] += 1;
            csv.push_str(&format!("{a2},{b2},{}\n", name(r)));
        }
    }
    report.sidecar("regions", csv);
    for (r, c) in [Region::Holds, Region::Fails, Region::Open].iter().zip(counts) {
        report.push(Entry::value(format!("cells/{}", name(*r)), c as f64));
    }

    for (a2, b2, expected) in PROBES {
        let v = classify_region(a2.sqrt(), b2.sqrt())?;
        let mismatch = f64::from(u8::from(v.region != expected));
        report.push(
            Entry::value(format!("probe/{a2},{b2}"), mismatch)
                .with_label(format!("{} by {:?}", name(v.region), v.rule))
                .check(mismatch, 0.0, 0.0, assert),
        );
    }

    let (ta, tb) = (0.5 * tail_sum, 0.5 * tail_sum);
    match find_tail_violation(ta, tb)? {
        Some(r) => {
            let m = tail_necessity_margin(ta, tb, r)?;
            report.push(Entry::value("tail/violating_r", r).check(m.rhs, m.lhs, 0.0, assert && tail_sum < 1.0));
        }
        None => report.push(Entry::value("tail/violating_r", f64::NAN).with_label("none found")),
    }
    Ok(report)
}
