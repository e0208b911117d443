mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urbanpaths::geometry::{Aabb, Bvh, NodeKind, Ray, Vec3};
use urbanpaths::scene::{triangulate, SurfaceKind, Triangle, TriangleMesh};

use common::{brute_force_hit, random_box_scene};

fn random_vec(rng: &mut impl Rng, r: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-r..r),
        rng.random_range(-r..r),
        rng.random_range(-r..r),
    )
}

fn random_soup(rng: &mut impl Rng, n: usize) -> TriangleMesh {
    let triangles = (0..n)
        .map(|k| {
            let c = random_vec(rng, 10.0);
            Triangle {
                v: [
                    c + random_vec(rng, 3.0),
                    c + random_vec(rng, 3.0),
                    c + random_vec(rng, 3.0),
                ],
                face_id: k,
                material: "concrete".into(),
                kind: SurfaceKind::Wall,
            }
        })
        .collect();
    TriangleMesh {
        triangles,
        facets: Vec::new(),
    }
}

fn check_against_brute_force(mesh: &TriangleMesh, rng: &mut impl Rng, rays: usize) {
    let bvh = Bvh::build(mesh);
    for _ in 0..rays {
        let origin = random_vec(rng, 20.0);
        let target = random_vec(rng, 12.0);
        let t_max = if rng.random_bool(0.5) {
            f64::INFINITY
        } else {
            rng.random_range(1.0..40.0)
        };
        let ray = Ray::new(origin, target - origin, t_max);
        let got = bvh.intersect(&ray).map(|h| (h.triangle, h.t));
        let want = brute_force_hit(mesh, ray.origin, ray.direction, t_max);
        match (got, want) {
            (None, None) => {}
            (Some((a, ta)), Some((b, tb))) => {
                assert_eq!(a, b, "nearest triangle differs");
                assert!((ta - tb).abs() <= 1e-9);
            }
            other => panic!("bvh/brute-force disagreement: {other:?}"),
        }
    }
}

#[test]
fn nearest_hit_matches_linear_scan_on_triangle_soups() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.random_range(1..=50);
        let mesh = random_soup(&mut rng, n);
        check_against_brute_force(&mesh, &mut rng, 2000);
    }
}

#[test]
fn nearest_hit_matches_linear_scan_on_building_meshes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let scene = random_box_scene(&mut rng, 8, true);
        let mesh = triangulate(&scene).unwrap();
        let bvh = Bvh::build(&mesh);
        for _ in 0..2000 {
            let origin = Vec3::new(
                rng.random_range(-60.0..60.0),
                rng.random_range(-60.0..60.0),
                rng.random_range(0.5..40.0),
            );
            let dir = random_vec(&mut rng, 1.0);
            if dir.norm() < 1e-3 {
                continue;
            }
            let ray = Ray::new(origin, dir, f64::INFINITY);
            let got = bvh.intersect(&ray).map(|h| (h.triangle, h.t));
            let want = brute_force_hit(&mesh, ray.origin, ray.direction, f64::INFINITY);
            match (got, want) {
                (None, None) => {}
                (Some((a, ta)), Some((b, tb))) => {
                    assert_eq!(a, b);
                    assert!((ta - tb).abs() <= 1e-9);
                }
                other => panic!("disagreement: {other:?}"),
            }
        }
    }
}

#[test]
fn leaves_are_small_and_cover_every_triangle_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mesh = random_soup(&mut rng, 300);
    let bvh = Bvh::build(&mesh);
    let mut seen = vec![0; mesh.len()];
    for node in bvh.nodes() {
        if let NodeKind::Leaf { start, count } = node.kind {
            assert!(count <= 4);
            for &t in &bvh.permutation()[start..start + count] {
                seen[t] += 1;
                for v in mesh.triangles[t].v {
                    assert!(node.aabb.contains(&Aabb::from_points(&[v])));
                }
            }
        }
    }
    assert!(seen.iter().all(|&c| c == 1));
}

#[test]
fn occlusion_is_symmetric_between_buildings() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let scene = random_box_scene(&mut rng, 10, true);
    let mesh = triangulate(&scene).unwrap();
    let bvh = Bvh::build(&mesh);
    for _ in 0..5000 {
        let p = Vec3::new(
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(0.1..35.0),
        );
        let q = Vec3::new(
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(0.1..35.0),
        );
        assert_eq!(bvh.occluded(p, q), bvh.occluded(q, p));
    }
}
