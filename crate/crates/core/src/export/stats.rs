use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::csv::format_sci;
use super::ExportError;
use crate::pipeline::ResultSet;
use crate::raytracer::PathType;

pub const HISTOGRAM_BINS: usize = 50;

/// Uniform bins over the observed range of the finite inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

pub fn histogram(values: &[f64], bins: usize) -> Histogram {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let mut counts = vec![0u64; bins];
    if finite.is_empty() {
        return Histogram {
            edges: vec![0.0; bins + 1],
            counts,
        };
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins)
        .map(|k| if k == bins { hi } else { lo + width * k as f64 })
        .collect();
    for v in finite {
        let k = if hi > lo {
            ((v - lo) / (hi - lo) * bins as f64) as usize
        } else {
            0
        };
        counts[k.min(bins - 1)] += 1;
    }
    Histogram { edges, counts }
}

fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (k, c) in h.counts.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_sci(h.edges[k]),
            format_sci(h.edges[k + 1]),
            c
        );
    }
    out
}

fn type_counts(rs: &ResultSet) -> [u64; 4] {
    let mut counts = [0u64; 4];
    for p in rs.records.iter().flat_map(|r| &r.paths) {
        counts[p.path_type.code() as usize] += 1;
    }
    counts
}

pub(crate) fn stats_text(rs: &ResultSet) -> String {
    let counts = type_counts(rs);
    let outdoor = rs.outdoor_count();
    let total = rs.path_count();
    let mut s = String::new();
    let _ = writeln!(s, "scene_id: {}", rs.scene_id);
    let _ = writeln!(s, "receivers: {}", rs.records.len());
    let _ = writeln!(s, "outdoor_receivers: {outdoor}");
    let _ = writeln!(s, "outdoor_fraction: {:.6}", rs.qc.outdoor_fraction);
    let _ = writeln!(
        s,
        "qc_min_outdoor_fraction: {:.6}",
        rs.config.min_outdoor_fraction
    );
    let _ = writeln!(s, "qc_passed: {}", rs.qc.passed);
    let _ = writeln!(s, "paths: {total}");
    for t in PathType::ALL {
        let _ = writeln!(s, "paths_{}: {}", t.as_str(), counts[t.code() as usize]);
    }
    let mean = if outdoor > 0 {
        total as f64 / outdoor as f64
    } else {
        0.0
    };
    let _ = writeln!(s, "mean_paths_per_outdoor_receiver: {mean:.6}");
    let _ = writeln!(s, "max_reflection_depth: {}", rs.config.depth());
    let _ = writeln!(s, "degradation_events: {}", rs.degradation_log.len());
    for e in &rs.degradation_log {
        let _ = writeln!(
            s,
            "  batch {}: depth {} -> {} after {:.3} s",
            e.batch_index, e.old_depth, e.new_depth, e.elapsed_s
        );
    }
    let _ = writeln!(s, "wall_time_s: {:.3}", rs.wall_time_s);
    s
}

/// Gain and ToA histograms over every emitted path, path-type counts and
/// the human-readable `generation_stats.txt` summary.
pub fn write_stats(rs: &ResultSet, dir: &Path) -> Result<(), ExportError> {
    let paths = || rs.records.iter().flat_map(|r| &r.paths);
    let gains: Vec<f64> = paths().map(|p| p.gain_db()).collect();
    let toas: Vec<f64> = paths().map(|p| p.toa_s).collect();
    fs::write(
        dir.join("channel_gain_distribution.csv"),
        histogram_csv(&histogram(&gains, HISTOGRAM_BINS)),
    )?;
    fs::write(
        dir.join("ToA_distribution.csv"),
        histogram_csv(&histogram(&toas, HISTOGRAM_BINS)),
    )?;

    let counts = type_counts(rs);
    let total: u64 = counts.iter().sum();
    let mut types = String::from("path_type,count,fraction\n");
    for t in PathType::ALL {
        let c = counts[t.code() as usize];
        let frac = if total > 0 {
            c as f64 / total as f64
        } else {
            0.0
        };
        let _ = writeln!(types, "{},{},{}", t.as_str(), c, format_sci(frac));
    }
    fs::write(dir.join("path_type_distribution.csv"), types)?;
    fs::write(dir.join("generation_stats.txt"), stats_text(rs))?;
    Ok(())
}
