//! Exact image-method specular reflections over planar facets.
//!
//! For a transmitter the image tree holds every admissible facet sequence up
//! to the maximum depth together with the successive mirror images of the
//! transmitter. A sequence is admissible when each image lies strictly on
//! the outward side of the next facet and consecutive facets face each
//! other. Per receiver, each tree node is back-tracked from the receiver
//! through the images to recover the reflection points.

use num_complex::Complex64;

use super::fresnel::fresnel_from_cos;
use super::path::{free_space_gain, PathType, PropagationPath};
use super::Tracer;
use crate::geometry::Vec3;
use crate::scene::Facet;

/// Reflection points closer than this to a facet boundary are rejected;
/// edge-grazing specular paths are left to the diffraction mechanism.
pub const FACET_MARGIN_M: f64 = 1e-9;

pub(crate) fn facing_matrix(facets: &[Facet]) -> Vec<bool> {
    let n = facets.len();
    let mut out = vec![false; n * n];
    for (i, a) in facets.iter().enumerate() {
        for (j, b) in facets.iter().enumerate() {
            if i == j {
                continue;
            }
            let b_before_a = b.polygon.iter().any(|&p| a.signed_distance(p) > 0.0);
            let a_before_b = a.polygon.iter().any(|&p| b.signed_distance(p) > 0.0);
            out[i * n + j] = b_before_a && a_before_b;
        }
    }
    out
}

#[derive(Clone, Debug)]
struct ImageNode {
    facet: usize,
    image: Vec3,
    parent: Option<usize>,
    depth: usize,
}

/// Transmitter images for every admissible facet sequence, in
/// breadth-first order.
#[derive(Clone, Debug)]
pub struct ImageTree {
    tx: Vec3,
    max_depth: usize,
    nodes: Vec<ImageNode>,
}

impl ImageTree {
    pub fn tx(&self) -> Vec3 {
        self.tx
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Facet sequence (first bounce first) ending at node `k`.
    fn chain(&self, mut k: usize, out: &mut Vec<usize>) {
        out.clear();
        loop {
            let node = &self.nodes[k];
            out.push(k);
            match node.parent {
                Some(p) => k = p,
                None => break,
            }
        }
        out.reverse();
    }
}

impl Tracer<'_> {
    pub fn image_tree(&self, tx: Vec3, max_depth: usize) -> ImageTree {
        let facets = &self.mesh.facets;
        let n = facets.len();
        let mut nodes: Vec<ImageNode> = Vec::new();
        if max_depth >= 1 {
            for f in facets {
                if f.signed_distance(tx) > 0.0 {
                    nodes.push(ImageNode {
                        facet: f.id,
                        image: f.mirror(tx),
                        parent: None,
                        depth: 1,
                    });
                }
            }
        }
        let mut level_start = 0;
        for depth in 2..=max_depth {
            let level_end = nodes.len();
            for k in level_start..level_end {
                let (prev, source) = (nodes[k].facet, nodes[k].image);
                for f in facets {
                    if self.facing[prev * n + f.id] && f.signed_distance(source) > 0.0 {
                        nodes.push(ImageNode {
                            facet: f.id,
                            image: f.mirror(source),
                            parent: Some(k),
                            depth,
                        });
                    }
                }
            }
            level_start = level_end;
        }
        ImageTree {
            tx,
            max_depth,
            nodes,
        }
    }

    /// All valid specular paths with at most `depth` bounces.
    pub fn enumerate_reflections(&self, tx: Vec3, rx: Vec3, depth: usize) -> Vec<PropagationPath> {
        if depth == 0 {
            return Vec::new();
        }
        let tree = self.image_tree(tx, depth);
        self.reflections_from_tree(&tree, rx, depth)
    }

    /// Back-tracks every tree node of depth <= `depth` from `rx`.
    pub fn reflections_from_tree(
        &self,
        tree: &ImageTree,
        rx: Vec3,
        depth: usize,
    ) -> Vec<PropagationPath> {
        let mut out = Vec::new();
        let mut chain = Vec::with_capacity(tree.max_depth);
        let mut points = Vec::with_capacity(tree.max_depth);
        for (k, node) in tree.nodes.iter().enumerate() {
            if node.depth > depth {
                break;
            }
            // Cheap reject before walking the chain.
            if self.mesh.facets[node.facet].signed_distance(rx) <= 0.0 {
                continue;
            }
            tree.chain(k, &mut chain);
            if let Some(path) = self.backtrack(tree, &chain, rx, &mut points) {
                out.push(path);
            }
        }
        out
    }

    fn backtrack(
        &self,
        tree: &ImageTree,
        chain: &[usize],
        rx: Vec3,
        points: &mut Vec<Vec3>,
    ) -> Option<PropagationPath> {
        let facets = &self.mesh.facets;
        points.clear();
        let mut target = rx;
        for &k in chain.iter().rev() {
            let node = &tree.nodes[k];
            let facet = &facets[node.facet];
            let dt = facet.signed_distance(target);
            let di = facet.signed_distance(node.image);
            if !(dt > 0.0 && di < 0.0) {
                return None;
            }
            let s = dt / (dt - di);
            let hit = target + (node.image - target) * s;
            if !facet.contains_strict(hit, FACET_MARGIN_M) {
                return None;
            }
            points.push(hit);
            target = hit;
        }
        points.reverse();

        let mut vertices = Vec::with_capacity(points.len() + 2);
        vertices.push(tree.tx);
        vertices.extend_from_slice(points);
        vertices.push(rx);
        let faces: Vec<usize> = chain.iter().map(|&k| tree.nodes[k].facet).collect();
        for (seg, w) in vertices.windows(2).enumerate() {
            let mut skip = [usize::MAX; 2];
            if seg > 0 {
                skip[0] = faces[seg - 1];
            }
            if seg < faces.len() {
                skip[1] = faces[seg];
            }
            if self.bvh.occluded_excluding(w[0], w[1], &skip) {
                return None;
            }
        }

        let mut coeff = Complex64::new(1.0, 0.0);
        for (i, &f) in faces.iter().enumerate() {
            let facet = &facets[f];
            let incoming = (vertices[i + 1] - vertices[i]).normalized();
            let cos_i = incoming.dot(facet.normal).abs();
            let (te, tm) = fresnel_from_cos(cos_i, self.permittivity[f]);
            coeff *= if facet.kind.is_horizontal() { tm } else { te };
        }
        let length: f64 = vertices.windows(2).map(|w| w[0].distance(w[1])).sum();
        let gain = free_space_gain(length, self.wavelength) * coeff;
        Some(PropagationPath::new(PathType::Reflection, vertices, gain))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Bvh;
    use crate::raytracer::fresnel_coefficients;
    use crate::scene::{triangulate, Scene};

    #[test]
    fn two_ray_ground_bounce() {
        let scene = Scene::ground_only();
        let mesh = triangulate(&scene).unwrap();
        let bvh = Bvh::build(&mesh);
        let t = Tracer::new(&scene, &mesh, &bvh, 3.5e9).unwrap();
        let tx = Vec3::new(0.0, 0.0, 30.0);
        let rx = Vec3::new(50.0, 0.0, 1.0);
        let paths = t.enumerate_reflections(tx, rx, 3);
        assert_eq!(paths.len(), 1);
        let p = &paths[0];
        let r = p.vertices[1];
        assert!((r.x - 48.387).abs() < 1e-3 && r.y == 0.0 && r.z.abs() < 1e-12);
        let l = (50.0f64.powi(2) + 31.0f64.powi(2)).sqrt();
        assert!((p.length_m - l).abs() < 1e-9);
        assert!((p.length_m - 58.830).abs() < 1e-3);

        let eps = scene.materials["concrete"].permittivity(3.5e9);
        let theta = (50.0f64 / 31.0).atan();
        let (_, tm) = fresnel_coefficients(theta, eps);
        let expect = t.wavelength() / (4.0 * std::f64::consts::PI * l) * tm.norm();
        assert!((p.gain.norm() - expect).abs() / expect < 1e-9);
        assert!(t.enumerate_reflections(tx, rx, 0).is_empty());
    }

    #[test]
    fn metal_ground_is_nearly_lossless() {
        let mut scene = Scene::ground_only();
        scene.ground_material = Some("metal".into());
        let mesh = triangulate(&scene).unwrap();
        let bvh = Bvh::build(&mesh);
        let t = Tracer::new(&scene, &mesh, &bvh, 3.5e9).unwrap();
        let p =
            &t.enumerate_reflections(Vec3::new(0.0, 0.0, 30.0), Vec3::new(50.0, 0.0, 1.0), 1)[0];
        let free = t.wavelength() / (4.0 * std::f64::consts::PI * p.length_m);
        assert!(p.gain.norm() / free >= 0.999);
        assert!(p.gain.norm() <= free + 1e-15);
    }
}
