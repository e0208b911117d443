//! NPY v1.0 writer for the `(receivers, N, 8)` float64 path array.

use std::fs;
use std::path::Path;

use super::ExportError;
use crate::pipeline::ResultSet;

/// Last-axis layout of the path array.
pub const ARRAY_FIELDS: [&str; 8] = [
    "gain_db",
    "phase_rad",
    "toa_s",
    "aod_az",
    "aod_el",
    "aoa_az",
    "aoa_el",
    "path_type_code",
];

/// Magic, version 1.0, little-endian header length and the space-padded
/// dict, so that the preamble is a multiple of 64 bytes.
pub fn npy_header(shape: &[usize]) -> Vec<u8> {
    let dims: Vec<String> = shape.iter().map(ToString::to_string).collect();
    let shape = if dims.len() == 1 {
        format!("({},)", dims[0])
    } else {
        format!("({})", dims.join(", "))
    };
    let mut dict = format!("{{'descr': '<f8', 'fortran_order': False, 'shape': {shape}, }}");
    let unpadded = 10 + dict.len() + 1;
    dict.push_str(&" ".repeat((64 - unpadded % 64) % 64));
    dict.push('\n');
    let mut out = Vec::with_capacity(10 + dict.len());
    out.extend_from_slice(b"\x93NUMPY");
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(dict.len() as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out
}

pub(crate) fn array_bytes(rs: &ResultSet) -> Vec<u8> {
    let n = rs.config.n_paths();
    let shape = [rs.records.len(), n, ARRAY_FIELDS.len()];
    let mut out = npy_header(&shape);
    out.reserve(shape.iter().product::<usize>() * 8);
    for rec in &rs.records {
        for slot in 0..n {
            let values = match rec.paths.get(slot) {
                Some(p) => [
                    p.gain_db(),
                    p.phase_rad(),
                    p.toa_s,
                    p.aod.azimuth_deg,
                    p.aod.elevation_deg,
                    p.aoa.azimuth_deg,
                    p.aoa.elevation_deg,
                    f64::from(p.path_type.code()),
                ],
                None => [f64::NAN; 8],
            };
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

/// Missing paths are NaN-padded.
pub fn write_array(rs: &ResultSet, path: &Path) -> Result<(), ExportError> {
    fs::write(path, array_bytes(rs))?;
    Ok(())
}
