use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::config::GridSpec;
use crate::scene::Scene;

/// One receiver grid point. `index = j * nx + i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RxPoint {
    pub index: usize,
    pub position: Vec3,
    pub outdoor: bool,
}

/// True if `p` is below the roof of a building whose footprint contains
/// `(p.x, p.y)`; points on a footprint edge count as inside.
pub fn point_inside_building(scene: &Scene, p: Vec3) -> bool {
    scene
        .buildings
        .iter()
        .any(|b| p.z < b.height_m && b.contains_xy([p.x, p.y]))
}

/// Every grid point in row-major order, flagged indoor or outdoor.
pub fn filter_outdoor_receivers(scene: &Scene, grid: &GridSpec) -> Vec<RxPoint> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let position = grid.position(i, j);
            out.push(RxPoint {
                index: j * nx + i,
                position,
                outdoor: !point_inside_building(scene, position),
            });
        }
    }
    out
}

pub fn outdoor_fraction(points: &[RxPoint]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    points.iter().filter(|p| p.outdoor).count() as f64 / points.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Building;

    fn scene_with_block(x0: f64, y0: f64, side: f64, h: f64) -> Scene {
        let mut s = Scene::ground_only();
        s.buildings.push(Building {
            id: 0,
            footprint: vec![
                [x0, y0],
                [x0 + side, y0],
                [x0 + side, y0 + side],
                [x0, y0 + side],
            ],
            height_m: h,
            material: "concrete".into(),
        });
        s
    }

    #[test]
    fn inside_above_and_on_edge() {
        let s = scene_with_block(0.0, 0.0, 10.0, 20.0);
        assert!(point_inside_building(&s, Vec3::new(5.0, 5.0, 1.0)));
        assert!(!point_inside_building(&s, Vec3::new(5.0, 5.0, 25.0)));
        assert!(point_inside_building(&s, Vec3::new(10.0, 5.0, 1.0)));
        assert!(!point_inside_building(&s, Vec3::new(10.5, 5.0, 1.0)));
    }

    #[test]
    fn free_space_grid_is_all_outdoor() {
        let pts = filter_outdoor_receivers(&Scene::free_space(), &GridSpec::default());
        assert_eq!(pts.len(), 16384);
        assert!(pts.iter().all(|p| p.outdoor));
        assert!(pts.iter().enumerate().all(|(k, p)| p.index == k));
        assert_eq!(outdoor_fraction(&pts), 1.0);
    }
}
