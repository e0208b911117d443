//! `data/<region>/{scenes,raytracing_results}/scene_<id>/` layout and the
//! region-level index files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use super::metadata::read_metadata;
use super::ExportError;

/// File names inside one scene's results directory.
#[derive(Debug, Clone)]
pub struct ResultFiles {
    pub dir: PathBuf,
}

impl ResultFiles {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
    pub fn csv(&self) -> PathBuf {
        self.dir.join("raytracing_results.csv")
    }
    pub fn jsonl(&self) -> PathBuf {
        self.dir.join("raytracing_results.jsonl")
    }
    pub fn array(&self) -> PathBuf {
        self.dir.join("deepmimo_format.npy")
    }
    pub fn metadata(&self) -> PathBuf {
        self.dir.join("metadata.json")
    }
    pub fn stats(&self) -> PathBuf {
        self.dir.join("generation_stats.txt")
    }
    pub fn heatmaps(&self) -> PathBuf {
        self.dir.join("heatmaps")
    }
    pub fn outdoor_mask(&self) -> PathBuf {
        self.dir.join("outdoor_receivers.pgm")
    }
}

#[derive(Debug, Clone)]
pub struct RegionLayout {
    pub root: PathBuf,
}

impl RegionLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn scene_dir(&self, scene_id: &str) -> PathBuf {
        self.root.join("scenes").join(format!("scene_{scene_id}"))
    }

    pub fn results(&self, scene_id: &str) -> ResultFiles {
        ResultFiles::new(
            self.root
                .join("raytracing_results")
                .join(format!("scene_{scene_id}")),
        )
    }

    fn index_path(&self) -> PathBuf {
        self.root.join("generated_scenes.txt")
    }

    pub fn generated_scenes(&self) -> Result<Vec<String>, ExportError> {
        match fs::read_to_string(self.index_path()) {
            Ok(text) => Ok(text
                .lines()
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    /// Adds `scene_id` to `generated_scenes.txt`, kept sorted and unique.
    pub fn register_scene(&self, scene_id: &str) -> Result<(), ExportError> {
        let mut ids: BTreeSet<String> = self.generated_scenes()?.into_iter().collect();
        ids.insert(scene_id.to_string());
        fs::create_dir_all(&self.root)?;
        let text: String = ids.iter().map(|id| format!("{id}\n")).collect();
        fs::write(self.index_path(), text)?;
        Ok(())
    }

    /// Region summary over every registered scene with traced results.
    /// Wall times are left out so the file only changes with the data.
    pub fn write_region_stats(&self) -> Result<(), ExportError> {
        let ids = self.generated_scenes()?;
        let mut body = String::new();
        let (mut traced, mut passed, mut receivers, mut outdoor, mut paths) = (0, 0, 0, 0, 0);
        for id in &ids {
            let files = self.results(id);
            if !files.metadata().exists() {
                let _ = writeln!(body, "scene_{id}: not traced");
                continue;
            }
            let m = read_metadata(&files.dir)?;
            traced += 1;
            passed += usize::from(m.qc.passed);
            receivers += m.n_receivers;
            outdoor += m.n_outdoor;
            paths += m.n_paths;
            let _ = writeln!(
                body,
                "scene_{id}: buildings={} outdoor_fraction={:.6} qc_passed={} paths={} degradations={}",
                m.n_buildings,
                m.qc.outdoor_fraction,
                m.qc.passed,
                m.n_paths,
                m.degradation_log.len()
            );
        }
        let mut s = String::new();
        let _ = writeln!(s, "scenes: {}", ids.len());
        let _ = writeln!(s, "traced_scenes: {traced}");
        let _ = writeln!(s, "qc_passed_scenes: {passed}");
        let _ = writeln!(s, "receivers: {receivers}");
        let _ = writeln!(s, "outdoor_receivers: {outdoor}");
        let _ = writeln!(s, "paths: {paths}");
        s.push_str(&body);
        fs::create_dir_all(&self.root)?;
        fs::write(self.root.join("generation_stats.txt"), s)?;
        Ok(())
    }
}
