//! First-path rasters as 8-bit binary PGM, north-up.

use std::fs;
use std::path::Path;

use super::ExportError;
use crate::config::GridSpec;
use crate::pipeline::ResultSet;
use crate::raytracer::PropagationPath;

pub const HEATMAP_NAMES: [&str; 4] = [
    "channel_gain_heatmap",
    "ToA_heatmap",
    "elevation_heatmap",
    "azimuth_heatmap",
];

const QUANTITIES: [fn(&PropagationPath) -> f64; 4] = [
    |p| p.gain_db(),
    |p| p.toa_s,
    |p| p.aoa.elevation_deg,
    |p| p.aoa.azimuth_deg,
];

/// Linear-interpolated percentile of ascending `sorted`, `q` in [0, 100].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Monotone map of the 1st–99th percentile window onto [1, 255].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapScale {
    pub lo: f64,
    pub hi: f64,
}

impl HeatmapScale {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        if sorted.is_empty() {
            return None;
        }
        sorted.sort_by(f64::total_cmp);
        Some(Self {
            lo: percentile(&sorted, 1.0),
            hi: percentile(&sorted, 99.0),
        })
    }

    pub fn pixel(&self, v: f64) -> u8 {
        if self.hi.is_nan() || self.lo.is_nan() || self.hi <= self.lo {
            return 255;
        }
        let t = ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0);
        (1.0 + t * 254.0).round() as u8
    }
}

fn check_grid(rs: &ResultSet, grid: &GridSpec) -> Result<(), ExportError> {
    if rs.records.len() != grid.len() {
        return Err(ExportError::Format(format!(
            "result set has {} receivers, grid is {}x{}",
            rs.records.len(),
            grid.nx(),
            grid.ny()
        )));
    }
    Ok(())
}

fn pgm(nx: usize, ny: usize, pixel: impl Fn(usize, usize) -> u8) -> Vec<u8> {
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(nx * ny);
    for row in 0..ny {
        let j = ny - 1 - row;
        out.extend((0..nx).map(|i| pixel(i, j)));
    }
    out
}

pub(crate) fn heatmap_bytes(rs: &ResultSet, which: usize) -> Result<Vec<u8>, ExportError> {
    let grid = &rs.config.rx_grid;
    check_grid(rs, grid)?;
    let f = QUANTITIES[which];
    let values: Vec<Option<f64>> = rs.records.iter().map(|r| r.paths.first().map(f)).collect();
    let finite: Vec<f64> = values.iter().flatten().copied().collect();
    let scale = HeatmapScale::from_values(&finite);
    let nx = grid.nx();
    Ok(pgm(nx, grid.ny(), |i, j| {
        match (values[j * nx + i], scale) {
            (Some(v), Some(s)) if v.is_finite() => s.pixel(v),
            _ => 0,
        }
    }))
}

/// Writes the four rasters into `dir` (normally `<results>/heatmaps`).
pub fn render_heatmaps(rs: &ResultSet, dir: &Path) -> Result<(), ExportError> {
    fs::create_dir_all(dir)?;
    for (k, name) in HEATMAP_NAMES.iter().enumerate() {
        fs::write(dir.join(format!("{name}.pgm")), heatmap_bytes(rs, k)?)?;
    }
    Ok(())
}

/// 255 for outdoor receivers, 0 for indoor ones.
pub fn render_outdoor_mask(rs: &ResultSet, path: &Path) -> Result<(), ExportError> {
    let grid = &rs.config.rx_grid;
    check_grid(rs, grid)?;
    let nx = grid.nx();
    let bytes = pgm(nx, grid.ny(), |i, j| {
        if rs.records[j * nx + i].rx.outdoor {
            255
        } else {
            0
        }
    });
    fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let v = [0.0, 10.0, 20.0, 30.0, 40.0];
        assert_eq!(percentile(&v, 0.0), 0.0);
        assert_eq!(percentile(&v, 100.0), 40.0);
        assert_eq!(percentile(&v, 50.0), 20.0);
        assert!((percentile(&v, 10.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scale_is_monotone_and_clamped() {
        let values: Vec<f64> = (0..1000).map(f64::from).collect();
        let s = HeatmapScale::from_values(&values).unwrap();
        assert_eq!(s.pixel(-1e9), 1);
        assert_eq!(s.pixel(1e9), 255);
        let mut last = 0;
        for v in &values {
            let p = s.pixel(*v);
            assert!(p >= last);
            last = p;
        }
    }
}
