mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use urbanpaths::config::{load_config, GridSpec, TraceConfig};
use urbanpaths::geometry::polygon::signed_area;
use urbanpaths::geometry::{Bvh, Vec3};
use urbanpaths::raytracer::TraceOptions;
use urbanpaths::scene::{
    export_scene, generate_procedural_scene, import_scene, triangulate, Building, ProcGenParams,
    SurfaceKind,
};

use common::{random_box_scene, random_outdoor_point, scene_with, with_tracer};

/// A star-shaped (hence simple) counterclockwise polygon.
fn star_polygon() -> impl Strategy<Value = Vec<[f64; 2]>> {
    (3usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..1.0, n),
            prop::collection::vec(3.0f64..20.0, n),
        )
            .prop_map(move |(jit, radii)| {
                (0..n)
                    .map(|k| {
                        let a = (k as f64 + 0.8 * jit[k]) / n as f64 * std::f64::consts::TAU;
                        [radii[k] * a.cos(), radii[k] * a.sin()]
                    })
                    .collect()
            })
    })
}

fn arbitrary_config() -> impl Strategy<Value = TraceConfig> {
    (
        (
            1e8f64..1e11,
            0i64..5,
            any::<bool>(),
            any::<bool>(),
            1i64..20,
        ),
        (
            prop::array::uniform3(-100.0f64..100.0),
            1i64..300,
            1i64..300,
            0.1f64..5.0,
        ),
        (
            any::<u64>(),
            1i64..5000,
            prop::option::of(0.0f64..10.0),
            0.0f64..=1.0,
            0.0f64..=1.0,
        ),
        (1u32..=6, 0.0f64..=1.0),
    )
        .prop_map(|(a, b, c, d)| {
            let mut cfg = TraceConfig {
                carrier_frequency_hz: a.0,
                max_reflection_depth: a.1,
                enable_diffraction: a.2,
                enable_scattering: a.3,
                n_paths_retained: a.4,
                tx_position: b.0,
                rx_grid: GridSpec {
                    nx: b.1,
                    ny: b.2,
                    spacing_m: b.3,
                    ..GridSpec::default()
                },
                seed: c.0,
                batch_size: c.1,
                batch_time_budget_s: c.2,
                min_outdoor_fraction: c.3,
                scattering_coefficient_default: c.4,
                ..TraceConfig::default()
            };
            cfg.procedural.block_grid = d.0;
            cfg.procedural.building_probability = d.1;
            cfg
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn config_survives_yaml_round_trip(cfg in arbitrary_config()) {
        let back = load_config(&cfg.to_yaml()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn scene_survives_xml_round_trip(seed in any::<u64>(), grid in 1u32..=6, prob in 0.0f64..=1.0, ground in any::<bool>()) {
        let params = ProcGenParams { block_grid: grid, building_probability: prob, ground, ..ProcGenParams::default() };
        let scene = generate_procedural_scene(&params, seed).unwrap();
        let dir = tempfile::tempdir().unwrap();
        export_scene(&scene, dir.path()).unwrap();
        let back = import_scene(dir.path()).unwrap();
        prop_assert_eq!(&back, &scene);
        prop_assert_eq!(triangulate(&back).unwrap(), triangulate(&scene).unwrap());
    }

    #[test]
    fn roof_triangles_tile_the_footprint(ring in star_polygon(), h in 3.0f64..80.0) {
        let area = signed_area(&ring);
        let building = Building { id: 0, footprint: ring, height_m: h, material: "concrete".into() };
        let mesh = triangulate(&scene_with(vec![building], false)).unwrap();
        let roof: f64 = mesh.triangles.iter().filter(|t| t.kind == SurfaceKind::Roof).map(|t| t.area()).sum();
        prop_assert!((roof - area).abs() <= 1e-9 * area);
        for t in mesh.triangles.iter().filter(|t| t.kind == SurfaceKind::Roof) {
            prop_assert!(t.normal().z > 0.999_999);
        }
    }

    #[test]
    fn occlusion_does_not_depend_on_direction(seed in any::<u64>(), p in prop::array::uniform3(-60.0f64..60.0), q in prop::array::uniform3(-60.0f64..60.0)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scene = random_box_scene(&mut rng, 8, true);
        let mesh = triangulate(&scene).unwrap();
        let bvh = Bvh::build(&mesh);
        let (p, q) = (Vec3::new(p[0], p[1], p[2].abs()), Vec3::new(q[0], q[1], q[2].abs()));
        prop_assert_eq!(bvh.occluded(p, q), bvh.occluded(q, p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn building_order_does_not_change_paths(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scene = random_box_scene(&mut rng, 6, true);
        let mut shuffled = scene.clone();
        let mut order: Vec<usize> = (0..shuffled.buildings.len()).collect();
        let mut prng = ChaCha8Rng::seed_from_u64(perm_seed);
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut prng);
        shuffled.buildings = order.iter().map(|&k| scene.buildings[k].clone()).collect();

        let opts = TraceOptions { max_depth: 2, diffraction: true, scattering: true, n_paths: usize::MAX };
        let tx = random_outdoor_point(&mut rng, &scene, (5.0, 30.0));
        let rx = random_outdoor_point(&mut rng, &scene, (1.0, 2.0));
        let key = |v: Vec<urbanpaths::raytracer::PropagationPath>| {
            let mut k: Vec<(u8, f64, f64)> = v.iter().map(|p| (p.path_type.code(), p.length_m, p.gain.norm())).collect();
            k.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            k
        };
        let a = key(with_tracer(&scene, |t| t.trace_receiver(tx, rx, &opts, None)));
        let b = key(with_tracer(&shuffled, |t| t.trace_receiver(tx, rx, &opts, None)));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.0, y.0);
            prop_assert!((x.1 - y.1).abs() <= 1e-9);
            prop_assert!((x.2 - y.2).abs() <= 1e-12 * y.2.max(1e-30));
        }
    }
}
