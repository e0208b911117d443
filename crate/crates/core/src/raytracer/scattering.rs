//! Lambertian single-bounce diffuse scattering, one candidate per mesh
//! triangle at its centroid.

use std::f64::consts::PI;

use super::path::{free_space_gain, PathType, PropagationPath};
use super::Tracer;
use crate::geometry::Vec3;

impl Tracer<'_> {
    pub fn trace_scattering(&self, tx: Vec3, rx: Vec3) -> Vec<PropagationPath> {
        let lambda = self.wavelength;
        let mut out = Vec::new();
        for tri in &self.mesh.triangles {
            let s = self.scattering[tri.face_id];
            if s <= 0.0 {
                continue;
            }
            let normal = self.mesh.facets[tri.face_id].normal;
            let c = tri.centroid();
            let (to_tx, to_rx) = (tx - c, rx - c);
            let (d1, d2) = (to_tx.norm(), to_rx.norm());
            let cos_i = normal.dot(to_tx) / d1;
            let cos_s = normal.dot(to_rx) / d2;
            if !(cos_i > 0.0 && cos_s > 0.0) {
                continue;
            }
            let skip = [tri.face_id];
            if self.bvh.occluded_excluding(tx, c, &skip)
                || self.bvh.occluded_excluding(c, rx, &skip)
            {
                continue;
            }
            let magnitude =
                s * (lambda / (4.0 * PI)) * (tri.area() * cos_i * cos_s / PI).sqrt() / (d1 * d2);
            // Unit phasor carrying e^{-j 2 pi (d1 + d2) / lambda}.
            let phasor = free_space_gain(d1 + d2, lambda);
            let gain = phasor / phasor.norm() * magnitude;
            out.push(PropagationPath::new(
                PathType::Scattering,
                vec![tx, c, rx],
                gain,
            ));
        }
        out
    }
}
