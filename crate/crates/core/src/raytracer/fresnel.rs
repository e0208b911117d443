use num_complex::Complex64;

/// Reflection coefficients at a planar interface from free space into a
/// medium of complex relative permittivity `eps` (with `Im(eps) <= 0`).
///
/// `s = sqrt(eps - sin^2 theta)`; TE = (cos - s)/(cos + s),
/// TM = (eps cos - s)/(eps cos + s).
pub fn fresnel_coefficients(theta_i_rad: f64, eps: Complex64) -> (Complex64, Complex64) {
    fresnel_from_cos(theta_i_rad.cos(), eps)
}

pub fn fresnel_from_cos(cos_i: f64, eps: Complex64) -> (Complex64, Complex64) {
    let cos_i = cos_i.clamp(0.0, 1.0);
    let sin2 = 1.0 - cos_i * cos_i;
    let s = (eps - sin2).sqrt();
    let te = (cos_i - s) / (cos_i + s);
    let tm = (eps * cos_i - s) / (eps * cos_i + s);
    (te, tm)
}
