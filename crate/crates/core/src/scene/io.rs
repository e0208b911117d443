//! `scene.xml` (schema version 1.0) and per-building ASCII PLY meshes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{
    triangulate, Bounds, Building, GeoOrigin, MaterialParams, Scene, SceneError, TriangleMesh,
};
use crate::geometry::Vec3;

pub const SCENE_XML_VERSION: &str = "1.0";

/// 17 significant digits: exact f64 round trip.
fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn scene_to_xml(scene: &Scene) -> String {
    let mut x = String::new();
    let b = scene.bounds;
    x.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        x,
        "<scene version=\"{SCENE_XML_VERSION}\" seed=\"{}\">",
        scene.seed
    );
    let _ = writeln!(
        x,
        "  <bounds xmin=\"{}\" ymin=\"{}\" xmax=\"{}\" ymax=\"{}\"/>",
        f17(b.xmin),
        f17(b.ymin),
        f17(b.xmax),
        f17(b.ymax)
    );
    if let Some(g) = scene.geo_origin {
        let _ = writeln!(
            x,
            "  <geo_origin lat=\"{}\" lon=\"{}\"/>",
            f17(g.lat),
            f17(g.lon)
        );
    }
    for m in scene.materials.values() {
        let _ = writeln!(
            x,
            "  <material name=\"{}\" eps_r=\"{}\" conductivity=\"{}\" scattering=\"{}\"/>",
            escape(&m.name),
            f17(m.eps_r),
            f17(m.conductivity_s_per_m),
            f17(m.scattering_coeff)
        );
    }
    if let Some(g) = &scene.ground_material {
        let _ = writeln!(x, "  <ground material=\"{}\"/>", escape(g));
    }
    for bld in &scene.buildings {
        let _ = writeln!(
            x,
            "  <building id=\"{}\" height=\"{}\" material=\"{}\">",
            bld.id,
            f17(bld.height_m),
            escape(&bld.material)
        );
        for [vx, vy] in &bld.footprint {
            let _ = writeln!(x, "    <v x=\"{}\" y=\"{}\"/>", f17(*vx), f17(*vy));
        }
        x.push_str("  </building>\n");
    }
    x.push_str("</scene>\n");
    x
}

fn schema(msg: impl Into<String>) -> SceneError {
    SceneError::Schema(msg.into())
}

fn attr<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Result<&'a str, SceneError> {
    node.attribute(name).ok_or_else(|| {
        schema(format!(
            "<{}> is missing attribute `{name}`",
            node.tag_name().name()
        ))
    })
}

fn attr_num<T: std::str::FromStr>(
    node: roxmltree::Node<'_, '_>,
    name: &str,
) -> Result<T, SceneError> {
    let raw = attr(node, name)?;
    raw.trim().parse().map_err(|_| {
        schema(format!(
            "<{}> attribute `{name}` is not a number: {raw}",
            node.tag_name().name()
        ))
    })
}

pub(crate) fn scene_from_xml(text: &str) -> Result<Scene, SceneError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| schema(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "scene" {
        return Err(schema("root element must be <scene>"));
    }
    let version = attr(root, "version")?;
    if version != SCENE_XML_VERSION {
        return Err(schema(format!("unsupported version {version}")));
    }
    let seed: u64 = attr_num(root, "seed")?;

    let mut bounds = None;
    let mut geo_origin = None;
    let mut materials = BTreeMap::new();
    let mut ground_material = None;
    let mut buildings = Vec::new();
    for node in root.children().filter(|n| n.is_element()) {
        match node.tag_name().name() {
            "bounds" => {
                bounds = Some(Bounds {
                    xmin: attr_num(node, "xmin")?,
                    ymin: attr_num(node, "ymin")?,
                    xmax: attr_num(node, "xmax")?,
                    ymax: attr_num(node, "ymax")?,
                })
            }
            "geo_origin" => {
                geo_origin = Some(GeoOrigin {
                    lat: attr_num(node, "lat")?,
                    lon: attr_num(node, "lon")?,
                })
            }
            "material" => {
                let m = MaterialParams {
                    name: attr(node, "name")?.to_string(),
                    eps_r: attr_num(node, "eps_r")?,
                    conductivity_s_per_m: attr_num(node, "conductivity")?,
                    scattering_coeff: attr_num(node, "scattering")?,
                };
                if materials.insert(m.name.clone(), m).is_some() {
                    return Err(schema("duplicate material"));
                }
            }
            "ground" => ground_material = Some(attr(node, "material")?.to_string()),
            "building" => {
                let footprint = node
                    .children()
                    .filter(|n| n.is_element())
                    .map(|v| {
                        if v.tag_name().name() != "v" {
                            return Err(schema("<building> may only contain <v> elements"));
                        }
                        Ok([attr_num(v, "x")?, attr_num(v, "y")?])
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                buildings.push(Building {
                    id: attr_num(node, "id")?,
                    footprint,
                    height_m: attr_num(node, "height")?,
                    material: attr(node, "material")?.to_string(),
                });
            }
            other => return Err(schema(format!("unexpected element <{other}>"))),
        }
    }

    let scene = Scene {
        bounds: bounds.ok_or_else(|| schema("missing <bounds>"))?,
        ground_material,
        buildings,
        geo_origin,
        seed,
        materials,
    };
    scene.validate().map_err(|e| schema(e.to_string()))?;
    Ok(scene)
}

/// ASCII PLY for a set of triangles, vertices deduplicated in first-use order.
pub(crate) fn ply<'a>(triangles: impl Iterator<Item = &'a [Vec3; 3]>) -> String {
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for tri in triangles {
        let mut face = [0; 3];
        for (k, &p) in tri.iter().enumerate() {
            let key = [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()];
            face[k] = *index.entry(key).or_insert_with(|| {
                vertices.push(p);
                vertices.len() - 1
            });
        }
        faces.push(face);
    }
    let mut s = String::new();
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(s, "element vertex {}", vertices.len());
    s.push_str("property float x\nproperty float y\nproperty float z\n");
    let _ = writeln!(s, "element face {}", faces.len());
    s.push_str("property list uchar int vertex_indices\nend_header\n");
    for v in &vertices {
        let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
    }
    for f in &faces {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}

fn write_meshes(mesh: &TriangleMesh, scene: &Scene, dir: &Path) -> Result<(), SceneError> {
    let mesh_dir = dir.join("mesh");
    fs::create_dir_all(&mesh_dir)?;
    for entry in fs::read_dir(&mesh_dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.ends_with(".ply") && (name == "ground.ply" || name.starts_with("building_")) {
            fs::remove_file(&path)?;
        }
    }
    let of = |pred: &dyn Fn(Option<usize>) -> bool| {
        let ids: Vec<usize> = mesh
            .facets
            .iter()
            .filter(|f| pred(f.building))
            .map(|f| f.id)
            .collect();
        ply(mesh
            .triangles
            .iter()
            .filter(move |t| ids.contains(&t.face_id))
            .map(|t| &t.v))
    };
    if scene.ground_material.is_some() {
        fs::write(mesh_dir.join("ground.ply"), of(&|b| b.is_none()))?;
    }
    for i in 0..scene.buildings.len() {
        fs::write(
            mesh_dir.join(format!("building_{i}.ply")),
            of(&|b| b == Some(i)),
        )?;
    }
    Ok(())
}

/// Writes `scene.xml` plus `mesh/ground.ply` and `mesh/building_<i>.ply`.
pub fn export_scene(scene: &Scene, dir: &Path) -> Result<(), SceneError> {
    scene.validate()?;
    let mesh = triangulate(scene)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("scene.xml"), scene_to_xml(scene))?;
    write_meshes(&mesh, scene, dir)
}

pub fn import_scene(dir: &Path) -> Result<Scene, SceneError> {
    let text = fs::read_to_string(dir.join("scene.xml"))?;
    scene_from_xml(&text)
}
