use crate::geometry::polygon::{self, Point2};
use crate::geometry::Vec3;

use super::{Scene, SceneError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    Wall,
    Roof,
    Ground,
}

impl SurfaceKind {
    /// Horizontal surfaces reflect with the TM coefficient, walls with TE.
    pub fn is_horizontal(self) -> bool {
        !matches!(self, SurfaceKind::Wall)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    pub v: [Vec3; 3],
    /// Planar facet this triangle belongs to.
    pub face_id: usize,
    pub material: String,
    pub kind: SurfaceKind,
}

impl Triangle {
    fn raw_normal(&self) -> Vec3 {
        (self.v[1] - self.v[0]).cross(self.v[2] - self.v[0])
    }

    pub fn normal(&self) -> Vec3 {
        self.raw_normal().normalized()
    }

    pub fn area(&self) -> f64 {
        0.5 * self.raw_normal().norm()
    }

    pub fn centroid(&self) -> Vec3 {
        (self.v[0] + self.v[1] + self.v[2]) / 3.0
    }
}

/// One planar reflector: a wall quad, a roof polygon, or the ground
/// rectangle. Triangles sharing a `face_id` tile exactly this polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub id: usize,
    pub kind: SurfaceKind,
    pub material: String,
    /// Index into `Scene::buildings`, `None` for the ground.
    pub building: Option<usize>,
    /// Unit outward normal.
    pub normal: Vec3,
    /// Plane offset: `normal . x == offset` on the facet.
    pub offset: f64,
    pub polygon: Vec<Vec3>,
    pub area: f64,
    origin: Vec3,
    axis_u: Vec3,
    axis_v: Vec3,
    ring: Vec<Point2>,
}

impl Facet {
    fn new(
        id: usize,
        kind: SurfaceKind,
        material: &str,
        building: Option<usize>,
        normal: Vec3,
        polygon: Vec<Vec3>,
    ) -> Facet {
        let (origin, axis_u, axis_v) = if kind.is_horizontal() {
            (
                Vec3::ZERO,
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            )
        } else {
            let u = (polygon[1] - polygon[0]).normalized();
            (polygon[0], u, Vec3::Z)
        };
        let ring: Vec<Point2> = polygon
            .iter()
            .map(|&p| [(p - origin).dot(axis_u), (p - origin).dot(axis_v)])
            .collect();
        let area = polygon::signed_area(&ring).abs();
        Facet {
            id,
            kind,
            material: material.to_string(),
            building,
            normal,
            offset: normal.dot(polygon[0]),
            polygon,
            area,
            origin,
            axis_u,
            axis_v,
            ring,
        }
    }

    /// Signed distance of `p` from the facet plane, positive on the outward side.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    /// Mirror image of `p` across the facet plane.
    pub fn mirror(&self, p: Vec3) -> Vec3 {
        p - self.normal * (2.0 * self.signed_distance(p))
    }

    /// True if `p` (assumed on the plane) lies inside the facet polygon and
    /// more than `margin` meters from its boundary.
    pub fn contains_strict(&self, p: Vec3, margin: f64) -> bool {
        let q = p - self.origin;
        polygon::contains_strict(&self.ring, [q.dot(self.axis_u), q.dot(self.axis_v)], margin)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriangleMesh {
    pub triangles: Vec<Triangle>,
    pub facets: Vec<Facet>,
}

impl TriangleMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    fn push_facet(&mut self, facet: Facet, tris: &[[Vec3; 3]]) {
        for &v in tris {
            self.triangles.push(Triangle {
                v,
                face_id: facet.id,
                material: facet.material.clone(),
                kind: facet.kind,
            });
        }
        self.facets.push(facet);
    }
}

fn point_in_triangle_inclusive(p: Point2, a: Point2, b: Point2, c: Point2) -> bool {
    polygon::orient(a, b, p) >= 0.0
        && polygon::orient(b, c, p) >= 0.0
        && polygon::orient(c, a, p) >= 0.0
}

/// Ear clipping of a counterclockwise simple ring. Returns index triples in
/// counterclockwise order, or `None` when no ear can be found.
pub fn ear_clip(ring: &[Point2]) -> Option<Vec<[usize; 3]>> {
    let mut idx: Vec<usize> = (0..ring.len()).collect();
    if idx.len() < 3 {
        return None;
    }
    let mut out = Vec::with_capacity(ring.len() - 2);
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m).find(|&k| {
            let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (ring[ia], ring[ib], ring[ic]);
            polygon::orient(a, b, c) > 0.0
                && !idx.iter().any(|&j| {
                    j != ia && j != ib && j != ic && point_in_triangle_inclusive(ring[j], a, b, c)
                })
        })?;
        out.push([idx[(ear + m - 1) % m], idx[ear], idx[(ear + 1) % m]]);
        idx.remove(ear);
    }
    if polygon::orient(ring[idx[0]], ring[idx[1]], ring[idx[2]]) <= 0.0 {
        return None;
    }
    out.push([idx[0], idx[1], idx[2]]);
    Some(out)
}

/// Extrudes every building into walls and a flat roof, and adds the ground
/// rectangle when the scene has one.
pub fn triangulate(scene: &Scene) -> Result<TriangleMesh, SceneError> {
    let mut mesh = TriangleMesh::default();
    if let Some(ground) = &scene.ground_material {
        let b = scene.bounds;
        let c = [
            Vec3::new(b.xmin, b.ymin, 0.0),
            Vec3::new(b.xmax, b.ymin, 0.0),
            Vec3::new(b.xmax, b.ymax, 0.0),
            Vec3::new(b.xmin, b.ymax, 0.0),
        ];
        let facet = Facet::new(0, SurfaceKind::Ground, ground, None, Vec3::Z, c.to_vec());
        mesh.push_facet(facet, &[[c[0], c[1], c[2]], [c[0], c[2], c[3]]]);
    }

    for (bi, building) in scene.buildings.iter().enumerate() {
        let fp = &building.footprint;
        let h = building.height_m;
        let n = fp.len();
        let ears = ear_clip(fp).ok_or(SceneError::Triangulation { id: building.id })?;

        for i in 0..n {
            let [ax, ay] = fp[i];
            let [bx, by] = fp[(i + 1) % n];
            let (a0, b0) = (Vec3::new(ax, ay, 0.0), Vec3::new(bx, by, 0.0));
            let (a1, b1) = (Vec3::new(ax, ay, h), Vec3::new(bx, by, h));
            let normal = Vec3::new(by - ay, -(bx - ax), 0.0).normalized();
            let facet = Facet::new(
                mesh.facets.len(),
                SurfaceKind::Wall,
                &building.material,
                Some(bi),
                normal,
                vec![a0, b0, b1, a1],
            );
            mesh.push_facet(facet, &[[a0, b0, b1], [a0, b1, a1]]);
        }

        let top: Vec<Vec3> = fp.iter().map(|&[x, y]| Vec3::new(x, y, h)).collect();
        let tris: Vec<[Vec3; 3]> = ears
            .iter()
            .map(|t| [top[t[0]], top[t[1]], top[t[2]]])
            .collect();
        let facet = Facet::new(
            mesh.facets.len(),
            SurfaceKind::Roof,
            &building.material,
            Some(bi),
            Vec3::Z,
            top,
        );
        mesh.push_facet(facet, &tris);
    }
    Ok(mesh)
}
