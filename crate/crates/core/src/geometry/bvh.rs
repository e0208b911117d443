//! Binned-SAH bounding volume hierarchy over mesh triangles.

use super::vec3::{Aabb, Vec3};
use crate::scene::TriangleMesh;

pub const MAX_LEAF_SIZE: usize = 4;
const SAH_BINS: usize = 16;

/// Relative offset applied to both ends of an occlusion segment.
pub const OCCLUSION_EPSILON: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit length.
    pub direction: Vec3,
    pub t_max: f64,
}

impl Ray {
    /// Normalizes `direction`.
    pub fn new(origin: Vec3, direction: Vec3, t_max: f64) -> Ray {
        Ray {
            origin,
            direction: direction.normalized(),
            t_max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    /// Index into `TriangleMesh::triangles`.
    pub triangle: usize,
    pub face_id: usize,
    pub barycentric: (f64, f64),
}

/// Double-precision Moller-Trumbore test with inclusive edges. Returns
/// `(t, u, v)` for any `t` (the caller applies its own range).
pub fn intersect_triangle(origin: Vec3, dir: Vec3, tri: &[Vec3; 3]) -> Option<(f64, f64, f64)> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(e2);
    let det = e1.dot(p);
    if det.abs() <= 1e-14 * e1.norm() * e2.norm() {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = dir.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    Some((e2.dot(q) * inv, u, v))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    Leaf { start: usize, count: usize },
    Inner { left: usize, right: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BvhNode {
    pub aabb: Aabb,
    pub kind: NodeKind,
}

/// Immutable after construction; queries take `&self` and may run from any
/// number of threads.
#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<BvhNode>,
    /// Leaf slot -> mesh triangle index.
    order: Vec<usize>,
    /// Triangle vertices in leaf order.
    tris: Vec<[Vec3; 3]>,
    face_ids: Vec<usize>,
}

struct BuildItem {
    index: usize,
    aabb: Aabb,
    centroid: Vec3,
}

impl Bvh {
    pub fn build(mesh: &TriangleMesh) -> Bvh {
        let mut items: Vec<BuildItem> = mesh
            .triangles
            .iter()
            .enumerate()
            .map(|(index, t)| {
                let aabb = Aabb::from_points(&t.v);
                BuildItem {
                    index,
                    aabb,
                    centroid: aabb.center(),
                }
            })
            .collect();
        let mut bvh = Bvh {
            nodes: Vec::new(),
            order: Vec::with_capacity(items.len()),
            tris: Vec::with_capacity(items.len()),
            face_ids: Vec::with_capacity(items.len()),
        };
        if !items.is_empty() {
            bvh.build_node(&mut items);
        }
        for &i in &bvh.order {
            bvh.tris.push(mesh.triangles[i].v);
            bvh.face_ids.push(mesh.triangles[i].face_id);
        }
        bvh
    }

    fn build_node(&mut self, items: &mut [BuildItem]) -> usize {
        let aabb = items.iter().fold(Aabb::EMPTY, |b, it| b.union(it.aabb));
        let id = self.nodes.len();
        self.nodes.push(BvhNode {
            aabb,
            kind: NodeKind::Leaf { start: 0, count: 0 },
        });
        if items.len() <= MAX_LEAF_SIZE {
            let start = self.order.len();
            self.order.extend(items.iter().map(|it| it.index));
            self.nodes[id].kind = NodeKind::Leaf {
                start,
                count: items.len(),
            };
            return id;
        }
        let mid = sah_partition(items).unwrap_or_else(|| median_partition(items));
        let (lo, hi) = items.split_at_mut(mid);
        let left = self.build_node(lo);
        let right = self.build_node(hi);
        self.nodes[id].kind = NodeKind::Inner { left, right };
        id
    }

    pub fn nodes(&self) -> &[BvhNode] {
        &self.nodes
    }

    /// Leaf-order permutation of mesh triangle indices.
    pub fn permutation(&self) -> &[usize] {
        &self.order
    }

    pub fn root_aabb(&self) -> Option<Aabb> {
        self.nodes.first().map(|n| n.aabb)
    }

    /// Nearest hit with `0 < t <= ray.t_max`. Equal-`t` ties resolve to the
    /// lowest mesh triangle index.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<Hit> = None;
        let mut best_t = ray.t_max;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node
                .aabb
                .ray_entry(ray.origin, ray.direction, best_t)
                .is_none()
            {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for slot in start..start + count {
                        let Some((t, u, v)) =
                            intersect_triangle(ray.origin, ray.direction, &self.tris[slot])
                        else {
                            continue;
                        };
                        if !(t > 0.0 && t <= ray.t_max) {
                            continue;
                        }
                        let index = self.order[slot];
                        let better = match best {
                            None => true,
                            Some(b) => t < b.t || (t == b.t && index < b.triangle),
                        };
                        if better {
                            best_t = t;
                            best = Some(Hit {
                                t,
                                triangle: index,
                                face_id: self.face_ids[slot],
                                barycentric: (u, v),
                            });
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    let el = self.nodes[left]
                        .aabb
                        .ray_entry(ray.origin, ray.direction, best_t);
                    let er = self.nodes[right]
                        .aabb
                        .ray_entry(ray.origin, ray.direction, best_t);
                    match (el, er) {
                        (Some(a), Some(b)) if a <= b => stack.extend([right, left]),
                        (Some(_), Some(_)) => stack.extend([left, right]),
                        (Some(_), None) => stack.push(left),
                        (None, Some(_)) => stack.push(right),
                        (None, None) => {}
                    }
                }
            }
        }
        best
    }

    /// True if any triangle not belonging to one of `skip_faces` is hit with
    /// `0 < t <= ray.t_max`.
    pub fn any_hit(&self, ray: &Ray, skip_faces: &[usize]) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node
                .aabb
                .ray_entry(ray.origin, ray.direction, ray.t_max)
                .is_none()
            {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for slot in start..start + count {
                        if skip_faces.contains(&self.face_ids[slot]) {
                            continue;
                        }
                        if let Some((t, _, _)) =
                            intersect_triangle(ray.origin, ray.direction, &self.tris[slot])
                        {
                            if t > 0.0 && t <= ray.t_max {
                                return true;
                            }
                        }
                    }
                }
                NodeKind::Inner { left, right } => stack.extend([left, right]),
            }
        }
        false
    }

    /// Segment visibility test between `p` and `q`.
    pub fn occluded(&self, p: Vec3, q: Vec3) -> bool {
        self.occluded_excluding(p, q, &[])
    }

    /// Like [`Bvh::occluded`], ignoring the listed facets. Endpoints are pulled
    /// in by `1e-6 * |q - p|`; the segment is always traced from the
    /// lexicographically smaller endpoint so the result is symmetric.
    pub fn occluded_excluding(&self, p: Vec3, q: Vec3, skip_faces: &[usize]) -> bool {
        match occlusion_ray(p, q) {
            Some(ray) => self.any_hit(&ray, skip_faces),
            None => false,
        }
    }
}

/// The shortened, canonically oriented ray used for segment occlusion.
pub fn occlusion_ray(p: Vec3, q: Vec3) -> Option<Ray> {
    let (a, b) = if p.lex_cmp(&q).is_gt() {
        (q, p)
    } else {
        (p, q)
    };
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return None;
    }
    let dir = d / len;
    let eps = OCCLUSION_EPSILON * len;
    Some(Ray {
        origin: a + dir * eps,
        direction: dir,
        t_max: len - 2.0 * eps,
    })
}

fn sah_partition(items: &mut [BuildItem]) -> Option<usize> {
    let cbox = items.iter().fold(Aabb::EMPTY, |b, it| b.grow(it.centroid));
    let extent = cbox.extent();
    let n = items.len();
    let mut best: Option<(f64, usize, usize)> = None; // (cost, axis, split bin)
    for axis in 0..3 {
        if extent[axis].is_nan() || extent[axis] <= 0.0 {
            continue;
        }
        let bin_of = |c: Vec3| {
            let f = (c[axis] - cbox.min[axis]) / extent[axis];
            ((f * SAH_BINS as f64) as usize).min(SAH_BINS - 1)
        };
        let mut counts = [0usize; SAH_BINS];
        let mut boxes = [Aabb::EMPTY; SAH_BINS];
        for it in items.iter() {
            let b = bin_of(it.centroid);
            counts[b] += 1;
            boxes[b] = boxes[b].union(it.aabb);
        }
        let mut right_area = [0.0; SAH_BINS];
        let mut right_count = [0usize; SAH_BINS];
        let (mut acc_box, mut acc_n) = (Aabb::EMPTY, 0);
        for b in (1..SAH_BINS).rev() {
            acc_box = acc_box.union(boxes[b]);
            acc_n += counts[b];
            right_area[b] = acc_box.surface_area();
            right_count[b] = acc_n;
        }
        let (mut left_box, mut left_n) = (Aabb::EMPTY, 0);
        for split in 1..SAH_BINS {
            left_box = left_box.union(boxes[split - 1]);
            left_n += counts[split - 1];
            if left_n == 0 || left_n == n {
                continue;
            }
            let cost = left_box.surface_area() * left_n as f64
                + right_area[split] * right_count[split] as f64;
            if best.is_none_or(|(c, _, _)| cost < c) {
                best = Some((cost, axis, split));
            }
        }
    }
    let (_, axis, split) = best?;
    let f = |c: Vec3| {
        let r = (c[axis] - cbox.min[axis]) / extent[axis];
        ((r * SAH_BINS as f64) as usize).min(SAH_BINS - 1) < split
    };
    Some(stable_partition(items, |it| f(it.centroid)))
}

fn median_partition(items: &mut [BuildItem]) -> usize {
    let cbox = items.iter().fold(Aabb::EMPTY, |b, it| b.grow(it.centroid));
    let e = cbox.extent();
    let axis = if e.x >= e.y && e.x >= e.z {
        0
    } else if e.y >= e.z {
        1
    } else {
        2
    };
    items.sort_by(|a, b| {
        a.centroid[axis]
            .total_cmp(&b.centroid[axis])
            .then(a.index.cmp(&b.index))
    });
    items.len() / 2
}

fn stable_partition(items: &mut [BuildItem], pred: impl Fn(&BuildItem) -> bool) -> usize {
    items.sort_by_key(|it| !pred(it));
    items.iter().take_while(|it| pred(it)).count()
}
