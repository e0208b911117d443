//! Single knife-edge diffraction around vertical building edges.

use num_complex::Complex64;

use super::path::{free_space_gain, PathType, PropagationPath};
use super::Tracer;
use crate::geometry::Vec3;

/// Tolerance of the diffraction-point search along an edge, in meters.
pub const EDGE_SEARCH_TOL_M: f64 = 1e-6;

/// Knife-edge loss approximation J(nu) in dB; zero for nu <= -0.78.
pub fn knife_edge_loss_db(nu: f64) -> f64 {
    if nu <= -0.78 {
        return 0.0;
    }
    let x = nu - 0.1;
    (6.9 + 20.0 * ((x * x + 1.0).sqrt() + x).log10()).max(0.0)
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

impl Tracer<'_> {
    /// Diffraction paths for a receiver without line of sight. Each vertical
    /// footprint edge contributes at most one path through the point on the
    /// edge that minimizes the total length.
    pub fn trace_diffraction(&self, tx: Vec3, rx: Vec3) -> Vec<PropagationPath> {
        if !self.bvh.occluded(tx, rx) {
            return Vec::new();
        }
        let lambda = self.wavelength;
        let axis = rx - tx;
        let axis_len = axis.norm();
        let mut out = Vec::new();
        for b in &self.scene.buildings {
            for &[x, y] in &b.footprint {
                let point = |z: f64| Vec3::new(x, y, z);
                let total = |z: f64| tx.distance(point(z)) + point(z).distance(rx);
                let z = golden_section_min(total, 0.0, b.height_m, EDGE_SEARCH_TOL_M);
                let d = point(z);
                let (d1, d2) = (tx.distance(d), d.distance(rx));
                if d1 == 0.0 || d2 == 0.0 {
                    continue;
                }
                if self.bvh.occluded(tx, d) || self.bvh.occluded(d, rx) {
                    continue;
                }
                let clearance = (d - tx).cross(axis).norm() / axis_len;
                let nu = fresnel_kirchhoff_nu(clearance, d1, d2, lambda);
                let loss = 10f64.powf(-knife_edge_loss_db(nu) / 20.0);
                let gain = free_space_gain(d1 + d2, lambda) * Complex64::new(loss, 0.0);
                out.push(PropagationPath::new(
                    PathType::Diffraction,
                    vec![tx, d, rx],
                    gain,
                ));
            }
        }
        out
    }
}

/// Fresnel-Kirchhoff parameter for a point at perpendicular distance `h`
/// from the direct ray, `d1`/`d2` from the terminals.
pub fn fresnel_kirchhoff_nu(h: f64, d1: f64, d2: f64, wavelength: f64) -> f64 {
    h * (2.0 * (d1 + d2) / (wavelength * d1 * d2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grazing_incidence_costs_six_db() {
        assert!((knife_edge_loss_db(0.0) - 6.03).abs() < 0.01);
    }

    #[test]
    fn loss_vanishes_at_lower_limit() {
        assert_eq!(knife_edge_loss_db(-0.78), 0.0);
        assert_eq!(knife_edge_loss_db(-5.0), 0.0);
        assert!(knife_edge_loss_db(-0.7799) < 0.1);
    }

    #[test]
    fn loss_grows_with_nu() {
        let mut last = 0.0;
        for k in 0..50 {
            let j = knife_edge_loss_db(-0.7 + 0.1 * k as f64);
            assert!(j >= last);
            last = j;
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let x = golden_section_min(|x| (x - 1.25).powi(2), 0.0, 4.0, 1e-9);
        assert!((x - 1.25).abs() < 1e-8);
        // Minimum at the boundary.
        let x = golden_section_min(|x| x, 0.0, 4.0, 1e-9);
        assert!(x < 1e-8);
    }
}
