//! Scene builders and independent reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use urbanpaths::geometry::{intersect_triangle, Bvh, Vec3};
use urbanpaths::raytracer::{free_space_gain, PathType, PropagationPath, Tracer, FACET_MARGIN_M};
use urbanpaths::scene::{triangulate, Building, Scene, SurfaceKind, TriangleMesh};

pub const FREQ: f64 = 3.5e9;
pub const C: f64 = 299_792_458.0;

pub fn wavelength() -> f64 {
    C / FREQ
}

pub fn rect(id: u64, x0: f64, y0: f64, x1: f64, y1: f64, h: f64) -> Building {
    Building {
        id,
        footprint: vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
        height_m: h,
        material: "concrete".to_string(),
    }
}

pub fn scene_with(buildings: Vec<Building>, ground: bool) -> Scene {
    let mut s = if ground {
        Scene::ground_only()
    } else {
        Scene::free_space()
    };
    s.buildings = buildings;
    s
}

pub fn with_tracer<R>(scene: &Scene, f: impl FnOnce(&Tracer) -> R) -> R {
    let mesh = triangulate(scene).expect("scene triangulates");
    let bvh = Bvh::build(&mesh);
    let tracer = Tracer::new(scene, &mesh, &bvh, FREQ).expect("materials resolve");
    f(&tracer)
}

/// Up to `n` non-overlapping boxes on a 4x4 cell layout over [-40, 40]^2,
/// with random materials and heights.
pub fn random_box_scene(rng: &mut impl Rng, n: usize, ground: bool) -> Scene {
    let mut cells: Vec<(usize, usize)> = (0..4).flat_map(|j| (0..4).map(move |i| (i, j))).collect();
    let mut buildings = Vec::new();
    for k in 0..n.min(16) {
        let c = cells.swap_remove(rng.random_range(0..cells.len()));
        let x0 = -40.0 + 20.0 * c.0 as f64 + rng.random_range(1.0..6.0);
        let y0 = -40.0 + 20.0 * c.1 as f64 + rng.random_range(1.0..6.0);
        let w = rng.random_range(4.0..12.0);
        let d = rng.random_range(4.0..12.0);
        let mut b = rect(
            k as u64,
            x0,
            y0,
            x0 + w,
            y0 + d,
            rng.random_range(5.0..30.0),
        );
        b.material = ["concrete", "glass", "metal"][rng.random_range(0..3)].to_string();
        buildings.push(b);
    }
    scene_with(buildings, ground)
}

/// A point in the street space of [`random_box_scene`] layouts, outside
/// every building footprint.
pub fn random_outdoor_point(rng: &mut impl Rng, scene: &Scene, z: (f64, f64)) -> Vec3 {
    loop {
        let p = Vec3::new(
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(z.0..z.1),
        );
        let inside = scene.buildings.iter().any(|b| {
            let xs = b.footprint.iter().map(|v| v[0]);
            let ys = b.footprint.iter().map(|v| v[1]);
            let (x0, x1) = (
                xs.clone().fold(f64::INFINITY, f64::min),
                xs.fold(f64::NEG_INFINITY, f64::max),
            );
            let (y0, y1) = (
                ys.clone().fold(f64::INFINITY, f64::min),
                ys.fold(f64::NEG_INFINITY, f64::max),
            );
            p.x > x0 - 0.5
                && p.x < x1 + 0.5
                && p.y > y0 - 0.5
                && p.y < y1 + 0.5
                && p.z < b.height_m + 0.5
        });
        if !inside {
            return p;
        }
    }
}

/// Linear scan over every triangle; ties go to the lowest index.
pub fn brute_force_hit(
    mesh: &TriangleMesh,
    origin: Vec3,
    dir: Vec3,
    t_max: f64,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (k, tri) in mesh.triangles.iter().enumerate() {
        if let Some((t, _, _)) = intersect_triangle(origin, dir, &tri.v) {
            if t > 0.0 && t <= t_max && best.is_none_or(|(_, bt)| t < bt) {
                best = Some((k, t));
            }
        }
    }
    best
}

/// Reflection coefficients written out from the textbook formulas, kept
/// separate from the library version.
pub fn reference_gamma(theta_i: f64, eps: Complex64) -> (Complex64, Complex64) {
    let (s, c) = theta_i.sin_cos();
    let root = (eps - Complex64::new(s * s, 0.0)).sqrt();
    let te = (c - root) / (c + root);
    let tm = (eps * c - root) / (eps * c + root);
    (te, tm)
}

pub fn reference_permittivity(eps_r: f64, sigma: f64, f: f64) -> Complex64 {
    let eps0 = 8.854_187_812_8e-12;
    Complex64::new(eps_r, -sigma / (2.0 * PI * f * eps0))
}

/// Every facet sequence up to `depth`, without the side and facing
/// pruning of the image tree.
pub fn exhaustive_reflections(
    t: &Tracer,
    tx: Vec3,
    rx: Vec3,
    depth: usize,
) -> Vec<PropagationPath> {
    let n = t.mesh.facets.len();
    let mut out = Vec::new();
    let mut seq: Vec<usize> = Vec::new();
    fn recurse(
        t: &Tracer,
        tx: Vec3,
        rx: Vec3,
        depth: usize,
        n: usize,
        seq: &mut Vec<usize>,
        out: &mut Vec<PropagationPath>,
    ) {
        if !seq.is_empty() {
            if let Some(p) = evaluate_sequence(t, tx, rx, seq) {
                out.push(p);
            }
        }
        if seq.len() == depth {
            return;
        }
        for f in 0..n {
            if seq.last() == Some(&f) {
                continue;
            }
            seq.push(f);
            recurse(t, tx, rx, depth, n, seq, out);
            seq.pop();
        }
    }
    recurse(t, tx, rx, depth, n, &mut seq, &mut out);
    out
}

fn evaluate_sequence(t: &Tracer, tx: Vec3, rx: Vec3, seq: &[usize]) -> Option<PropagationPath> {
    let facets = &t.mesh.facets;
    let mut images = vec![tx];
    for &f in seq {
        let last = *images.last().unwrap();
        images.push(facets[f].mirror(last));
    }
    let mut points = Vec::new();
    let mut target = rx;
    for (k, &f) in seq.iter().enumerate().rev() {
        let facet = &facets[f];
        let image = images[k + 1];
        let dt = facet.signed_distance(target);
        let di = facet.signed_distance(image);
        // The segment towards the image must cross the plane from the front.
        if !(dt > 0.0 && di < 0.0) {
            return None;
        }
        let hit = target + (image - target) * (dt / (dt - di));
        if !facet.contains_strict(hit, FACET_MARGIN_M) {
            return None;
        }
        points.push(hit);
        target = hit;
    }
    points.reverse();
    let mut vertices = vec![tx];
    vertices.extend(points);
    vertices.push(rx);
    for (s, w) in vertices.windows(2).enumerate() {
        let mut skip = Vec::new();
        if s > 0 {
            skip.push(seq[s - 1]);
        }
        if s < seq.len() {
            skip.push(seq[s]);
        }
        if t.bvh.occluded_excluding(w[0], w[1], &skip) {
            return None;
        }
    }
    let mut coeff = Complex64::new(1.0, 0.0);
    for (k, &f) in seq.iter().enumerate() {
        let facet = &facets[f];
        let m = &t.scene.materials[&facet.material];
        let eps = reference_permittivity(m.eps_r, m.conductivity_s_per_m, FREQ);
        let d = (vertices[k + 1] - vertices[k]).normalized();
        let theta = d.dot(facet.normal).abs().min(1.0).acos();
        let (te, tm) = reference_gamma(theta, eps);
        coeff *= if facet.kind == SurfaceKind::Wall {
            te
        } else {
            tm
        };
    }
    let length: f64 = vertices.windows(2).map(|w| w[0].distance(w[1])).sum();
    Some(PropagationPath::new(
        PathType::Reflection,
        vertices,
        free_space_gain(length, t.wavelength()) * coeff,
    ))
}

/// Orders paths by type, then length, then vertex coordinates, for
/// multiset comparison.
pub fn canonical_order(paths: &mut [PropagationPath]) {
    paths.sort_by(|a, b| {
        a.path_type
            .cmp(&b.path_type)
            .then(a.length_m.total_cmp(&b.length_m))
            .then_with(|| {
                for (p, q) in a.vertices.iter().zip(&b.vertices) {
                    let o = p.lex_cmp(q);
                    if o.is_ne() {
                        return o;
                    }
                }
                a.vertices.len().cmp(&b.vertices.len())
            })
    });
}

/// Differences between two path multisets, empty when they agree within
/// `tol` on every vertex and relatively on |gain|.
pub fn multiset_mismatch(a: &[PropagationPath], b: &[PropagationPath], tol: f64) -> Vec<String> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    canonical_order(&mut a);
    canonical_order(&mut b);
    let mut out = Vec::new();
    if a.len() != b.len() {
        out.push(format!("count {} vs {}", a.len(), b.len()));
        return out;
    }
    for (p, q) in a.iter().zip(&b) {
        let same_vertices = p.vertices.len() == q.vertices.len()
            && p.vertices
                .iter()
                .zip(&q.vertices)
                .all(|(u, v)| u.distance(*v) <= tol);
        let rel = (p.gain.norm() - q.gain.norm()).abs() / q.gain.norm().max(1e-300);
        if !same_vertices || rel > 1e-9 {
            out.push(format!("{:?} vs {:?}", p.vertices, q.vertices));
        }
    }
    out
}

/// Smallest angular separation of two azimuths in degrees.
pub fn azimuth_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}
