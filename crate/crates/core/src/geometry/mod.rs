//! Vector math, the triangle BVH with nearest-hit and occlusion queries,
//! and indoor/outdoor receiver classification.

pub mod bvh;
pub mod polygon;
mod receivers;
mod vec3;

pub use bvh::{intersect_triangle, occlusion_ray, Bvh, BvhNode, Hit, NodeKind, Ray};
pub use receivers::{filter_outdoor_receivers, outdoor_fraction, point_inside_building, RxPoint};
pub use vec3::{Aabb, Vec3};
