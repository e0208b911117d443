mod common;

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use urbanpaths::geometry::Vec3;
use urbanpaths::raytracer::{PathType, PropagationPath, TraceOptions, Tracer};
use urbanpaths::scene::default_materials;
use urbanpaths::Scene;

use common::{azimuth_gap, random_box_scene, random_outdoor_point, wavelength, with_tracer};

const ALL: TraceOptions = TraceOptions {
    max_depth: 2,
    diffraction: true,
    scattering: true,
    n_paths: usize::MAX,
};

fn sorted(mut v: Vec<PropagationPath>) -> Vec<PropagationPath> {
    v.sort_by(|a, b| {
        a.path_type
            .cmp(&b.path_type)
            .then(a.length_m.total_cmp(&b.length_m))
    });
    v
}

/// The facet normal at a reflection vertex.
fn normal_at(t: &Tracer, p: Vec3) -> Vec3 {
    t.mesh
        .facets
        .iter()
        .find(|f| f.signed_distance(p).abs() < 1e-7 && f.contains_strict(p, 0.0))
        .map(|f| f.normal)
        .expect("reflection vertex lies on a facet")
}

fn random_scenes() -> Vec<Scene> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    (0..4)
        .map(|k| {
            let mut s = random_box_scene(&mut rng, 6 + k, true);
            s.materials = default_materials(0.2);
            s
        })
        .collect()
}

#[test]
fn swapping_terminals_preserves_every_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut checked = 0;
    for scene in random_scenes() {
        with_tracer(&scene, |t| {
            for _ in 0..25 {
                let a = random_outdoor_point(&mut rng, &scene, (1.0, 30.0));
                let b = random_outdoor_point(&mut rng, &scene, (1.0, 30.0));
                let fwd = sorted(t.trace_receiver(a, b, &ALL, None));
                let rev = sorted(t.trace_receiver(b, a, &ALL, None));
                assert_eq!(
                    fwd.len(),
                    rev.len(),
                    "path count differs for {a:?} <-> {b:?}"
                );
                for (p, q) in fwd.iter().zip(&rev) {
                    assert_eq!(p.path_type, q.path_type);
                    assert!((p.length_m - q.length_m).abs() <= 1e-9);
                    assert!((p.toa_s - q.toa_s).abs() <= 1e-9 / common::C + 1e-20);
                    assert!((p.gain.norm() - q.gain.norm()).abs() <= 1e-9 * q.gain.norm());
                    assert!(azimuth_gap(p.aod.azimuth_deg, q.aoa.azimuth_deg) <= 1e-9);
                    assert!((p.aod.elevation_deg - q.aoa.elevation_deg).abs() <= 1e-9);
                    assert!(azimuth_gap(p.aoa.azimuth_deg, q.aod.azimuth_deg) <= 1e-9);
                    assert!((p.aoa.elevation_deg - q.aod.elevation_deg).abs() <= 1e-9);
                }
                checked += fwd.len();
            }
        });
    }
    assert!(checked > 1000, "only {checked} paths compared");
}

#[test]
fn reflections_obey_the_specular_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut vertices = 0;
    for scene in random_scenes() {
        with_tracer(&scene, |t| {
            for _ in 0..25 {
                let tx = random_outdoor_point(&mut rng, &scene, (10.0, 30.0));
                let rx = random_outdoor_point(&mut rng, &scene, (1.0, 2.0));
                for p in t.enumerate_reflections(tx, rx, 3) {
                    for w in p.vertices.windows(3) {
                        let n = normal_at(t, w[1]);
                        let din = (w[1] - w[0]).normalized();
                        let dout = (w[2] - w[1]).normalized();
                        let mirrored = din - n * (2.0 * din.dot(n));
                        let err = mirrored.cross(dout).norm().atan2(mirrored.dot(dout));
                        assert!(err <= 1e-9, "specular error {err} rad");
                        vertices += 1;
                    }
                }
            }
        });
    }
    assert!(vertices > 200);
}

#[test]
fn no_deterministic_path_beats_free_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for scene in random_scenes() {
        with_tracer(&scene, |t| {
            for _ in 0..40 {
                let tx = random_outdoor_point(&mut rng, &scene, (1.0, 30.0));
                let rx = random_outdoor_point(&mut rng, &scene, (1.0, 3.0));
                for p in t.trace_receiver(tx, rx, &ALL, None) {
                    assert!((-180.0..180.0).contains(&p.aod.azimuth_deg));
                    assert!((-180.0..180.0).contains(&p.aoa.azimuth_deg));
                    assert!((0.0..=180.0).contains(&p.aod.elevation_deg));
                    assert!((0.0..=180.0).contains(&p.aoa.elevation_deg));
                    assert!(p.phase_rad() > -PI && p.phase_rad() <= PI);
                    if p.path_type != PathType::Scattering {
                        let bound = wavelength() / (4.0 * PI * p.length_m);
                        assert!(p.gain.norm() <= bound * (1.0 + 1e-12), "{p:?}");
                    }
                }
            }
        });
    }
}

#[test]
fn ranked_output_is_sorted_and_truncated() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let scene = random_box_scene(&mut rng, 10, true);
    with_tracer(&scene, |t| {
        let opts = TraceOptions { n_paths: 5, ..ALL };
        for _ in 0..50 {
            let tx = random_outdoor_point(&mut rng, &scene, (10.0, 30.0));
            let rx = random_outdoor_point(&mut rng, &scene, (1.0, 2.0));
            let all = t.trace_receiver(tx, rx, &ALL, None);
            let top = t.trace_receiver(tx, rx, &opts, None);
            assert_eq!(top.len(), all.len().min(5));
            assert_eq!(&all[..top.len()], &top[..]);
            for w in all.windows(2) {
                assert!(w[0].gain.norm() >= w[1].gain.norm());
            }
        }
    });
}
