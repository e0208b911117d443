use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::ExportError;
use crate::pipeline::ResultSet;

pub const CSV_HEADER: &str = "rx_index,x_m,y_m,z_m,path_rank,path_type,gain_db,phase_rad,toa_s,\
aod_az_deg,aod_el_deg,aoa_az_deg,aoa_el_deg,n_interactions";

/// C-style `%.9e`: nine decimals, signed two-digit-minimum exponent.
pub fn format_sci(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let v = if v == 0.0 { 0.0 } else { v };
    let s = format!("{v:.9e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!(
        "{mantissa}e{}{:02}",
        if exp < 0 { '-' } else { '+' },
        exp.abs()
    )
}

pub(crate) fn csv_text(rs: &ResultSet) -> String {
    let mut out = String::with_capacity(64 + rs.path_count() * 200);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rec in &rs.records {
        let p0 = rec.rx.position;
        for (rank, p) in rec.paths.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                rec.rx.index,
                format_sci(p0.x),
                format_sci(p0.y),
                format_sci(p0.z),
                rank,
                p.path_type.as_str(),
                format_sci(p.gain_db()),
                format_sci(p.phase_rad()),
                format_sci(p.toa_s),
                format_sci(p.aod.azimuth_deg),
                format_sci(p.aod.elevation_deg),
                format_sci(p.aoa.azimuth_deg),
                format_sci(p.aoa.elevation_deg),
                p.order
            );
        }
    }
    out
}

/// One row per retained path, sorted by receiver then rank.
pub fn write_csv(rs: &ResultSet, path: &Path) -> Result<(), ExportError> {
    fs::write(path, csv_text(rs))?;
    Ok(())
}
