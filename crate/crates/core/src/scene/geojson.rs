//! GeoJSON footprint ingestion with a local equirectangular projection.

use serde_json::Value;

use super::procedural::DEFAULT_SCATTERING_COEFF;
use super::{default_materials, Bounds, Building, GeoOrigin, Scene, SceneError};
use crate::geometry::polygon::{self, Point2};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
pub const METERS_PER_LEVEL: f64 = 3.0;
pub const DEFAULT_HEIGHT_M: f64 = 10.0;

fn err(msg: impl Into<String>) -> SceneError {
    SceneError::Footprints(msg.into())
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn exterior_ring(feature: &Value, index: usize) -> Result<Vec<[f64; 2]>, SceneError> {
    let geometry = feature
        .get("geometry")
        .ok_or_else(|| err(format!("feature {index}: missing geometry")))?;
    match geometry.get("type").and_then(Value::as_str) {
        Some("Polygon") => {}
        other => {
            return Err(err(format!(
                "feature {index}: geometry type {} is not Polygon",
                other.unwrap_or("<missing>")
            )))
        }
    }
    let ring = geometry
        .get("coordinates")
        .and_then(Value::as_array)
        .and_then(|rings| rings.first())
        .and_then(Value::as_array)
        .ok_or_else(|| err(format!("feature {index}: malformed coordinates")))?;
    ring.iter()
        .map(|pos| {
            let pair = pos.as_array().filter(|p| p.len() >= 2);
            match pair.map(|p| (p[0].as_f64(), p[1].as_f64())) {
                Some((Some(lon), Some(lat))) if lon.is_finite() && lat.is_finite() => {
                    Ok([lon, lat])
                }
                _ => Err(err(format!("feature {index}: malformed position"))),
            }
        })
        .collect()
}

/// Sutherland-Hodgman clip of a ring against an axis-aligned rectangle.
fn clip_to_bounds(ring: &[Point2], b: &Bounds) -> Vec<Point2> {
    // (axis, limit, keep_greater)
    let planes = [
        (0, b.xmin, true),
        (0, b.xmax, false),
        (1, b.ymin, true),
        (1, b.ymax, false),
    ];
    let mut out = ring.to_vec();
    for (axis, limit, keep_greater) in planes {
        let inside = |p: &Point2| {
            if keep_greater {
                p[axis] >= limit
            } else {
                p[axis] <= limit
            }
        };
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            let cross = |a: Point2, c: Point2| {
                let t = (limit - a[axis]) / (c[axis] - a[axis]);
                let mut p = [a[0] + t * (c[0] - a[0]), a[1] + t * (c[1] - a[1])];
                p[axis] = limit;
                p
            };
            match (inside(&prev), inside(&cur)) {
                (true, true) => out.push(cur),
                (true, false) => out.push(cross(prev, cur)),
                (false, true) => {
                    out.push(cross(prev, cur));
                    out.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    out
}

/// Ingests a GeoJSON FeatureCollection of building polygons into a scene
/// centered on the collection centroid, with default 128 m bounds.
///
/// Heights come from the `height` property, else `levels` x 3 m, else 10 m.
/// An optional `material` property must name a built-in material.
pub fn import_footprints(doc: &str) -> Result<Scene, SceneError> {
    let root: Value = serde_json::from_str(doc).map_err(|e| err(e.to_string()))?;
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(err("root is not a FeatureCollection"));
    }
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing features array"))?;

    let rings = features
        .iter()
        .enumerate()
        .map(|(i, f)| exterior_ring(f, i))
        .collect::<Result<Vec<_>, _>>()?;

    let (mut sum_lon, mut sum_lat, mut count) = (0.0, 0.0, 0usize);
    for ring in &rings {
        for p in polygon::simplify_ring(ring) {
            sum_lon += p[0];
            sum_lat += p[1];
            count += 1;
        }
    }
    let origin = if count > 0 {
        GeoOrigin {
            lat: sum_lat / count as f64,
            lon: sum_lon / count as f64,
        }
    } else {
        GeoOrigin { lat: 0.0, lon: 0.0 }
    };
    let coslat = origin.lat.to_radians().cos();
    let project = |[lon, lat]: [f64; 2]| {
        [
            EARTH_RADIUS_M * (lon - origin.lon).to_radians() * coslat,
            EARTH_RADIUS_M * (lat - origin.lat).to_radians(),
        ]
    };

    let materials = default_materials(DEFAULT_SCATTERING_COEFF);
    let bounds = Bounds::DEFAULT;
    let mut buildings = Vec::new();
    for (index, (feature, ring)) in features.iter().zip(&rings).enumerate() {
        let mut local =
            polygon::simplify_ring(&ring.iter().map(|&p| project(p)).collect::<Vec<_>>());
        if local.len() < 3 {
            return Err(err(format!(
                "feature {index}: fewer than 3 distinct vertices"
            )));
        }
        if polygon::signed_area(&local) < 0.0 {
            local.reverse();
        }
        let bbox_outside = local.iter().all(|p| p[0] < bounds.xmin)
            || local.iter().all(|p| p[0] > bounds.xmax)
            || local.iter().all(|p| p[1] < bounds.ymin)
            || local.iter().all(|p| p[1] > bounds.ymax);
        if bbox_outside {
            continue;
        }
        if !local.iter().all(|&p| bounds.contains(p)) {
            local = polygon::simplify_ring(&clip_to_bounds(&local, &bounds));
            if local.len() < 3 || polygon::signed_area(&local) <= 0.0 || !polygon::is_simple(&local)
            {
                continue;
            }
        }

        let props = feature.get("properties");
        let prop = |key: &str| props.and_then(|p| p.get(key));
        let height = match (
            prop("height").and_then(number),
            prop("levels").and_then(number),
        ) {
            (Some(h), _) if h > 0.0 => h,
            (_, Some(l)) if l > 0.0 => l * METERS_PER_LEVEL,
            _ => DEFAULT_HEIGHT_M,
        };
        let material = prop("material")
            .and_then(Value::as_str)
            .unwrap_or("concrete")
            .to_string();
        if !materials.contains_key(&material) {
            return Err(SceneError::UnknownMaterial(material));
        }
        let building = Building {
            id: buildings.len() as u64,
            footprint: local,
            height_m: height,
            material,
        };
        building.check()?;
        buildings.push(building);
    }

    Ok(Scene {
        bounds,
        ground_material: Some("concrete".to_string()),
        buildings,
        geo_origin: Some(origin),
        seed: 0,
        materials,
    })
}
