use std::path::{Path, PathBuf};

use pyramid_ga::mall::{generate_mall_instance, MallGenParams, MallInstance};
use pyramid_ga::nurse::{generate_instance, NurseGenParams, NurseInstance};

use crate::config::{InstanceSource, ProblemKind};
use crate::seed::instance_seed;

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("instance {id}: {source}")]
    Problem { id: String, source: pyramid_ga::PyramidError },
    #[error("cannot list {path}: {source}")]
    Dir { path: PathBuf, source: std::io::Error },
    #[error("no instance files in {0}")]
    Empty(PathBuf),
}

#[derive(Debug, Clone)]
pub enum Instances {
    Nurse(Vec<NurseInstance>),
    Mall(Vec<MallInstance>),
}

/// Named instances of one problem family.
#[derive(Debug, Clone)]
pub struct InstanceSet {
    pub ids: Vec<String>,
    pub instances: Instances,
}

impl InstanceSet {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn problem(&self) -> ProblemKind {
        match self.instances {
            Instances::Nurse(_) => ProblemKind::Nurse,
            Instances::Mall(_) => ProblemKind::Mall,
        }
    }

    pub fn generate_nurse(params: &NurseGenParams, count: usize, seed: u64) -> Result<Self, InstanceError> {
        let mut ids = Vec::with_capacity(count);
        let mut list = Vec::with_capacity(count);
        for i in 0..count {
            let id = format!("nurse-{i:03}");
            let inst = generate_instance(params, instance_seed(seed, i))
                .map_err(|source| InstanceError::Problem { id: id.clone(), source })?;
            ids.push(id);
            list.push(inst);
        }
        Ok(Self { ids, instances: Instances::Nurse(list) })
    }

    pub fn generate_mall(params: &MallGenParams, count: usize, seed: u64) -> Result<Self, InstanceError> {
        let mut ids = Vec::with_capacity(count);
        let mut list = Vec::with_capacity(count);
        for i in 0..count {
            let id = format!("mall-{i:03}");
            let inst = generate_mall_instance(params, instance_seed(seed, i))
                .map_err(|source| InstanceError::Problem { id: id.clone(), source })?;
            ids.push(id);
            list.push(inst);
        }
        Ok(Self { ids, instances: Instances::Mall(list) })
    }

    /// Loads the given files, or generates from the source's parameters.
    pub fn from_source(problem: ProblemKind, source: &InstanceSource) -> Result<Self, InstanceError> {
        if !source.paths.is_empty() {
            return Self::load(problem, &source.paths);
        }
        match problem {
            ProblemKind::Nurse => {
                Self::generate_nurse(&source.nurse.clone().unwrap_or_default(), source.count, source.seed)
            }
            ProblemKind::Mall => {
                Self::generate_mall(&source.mall.clone().unwrap_or_default(), source.count, source.seed)
            }
        }
    }

    /// Reads instance files; the file stem becomes the instance id.
    pub fn load(problem: ProblemKind, paths: &[PathBuf]) -> Result<Self, InstanceError> {
        let ids: Vec<String> = paths
            .iter()
            .map(|p| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()))
            .collect();
        let wrap = |id: &String| {
            let id = id.clone();
            move |source| InstanceError::Problem { id, source }
        };
        let instances = match problem {
            ProblemKind::Nurse => Instances::Nurse(
                paths.iter().zip(&ids).map(|(p, id)| NurseInstance::load(p).map_err(wrap(id))).collect::<Result<_, _>>()?,
            ),
            ProblemKind::Mall => Instances::Mall(
                paths.iter().zip(&ids).map(|(p, id)| MallInstance::load(p).map_err(wrap(id))).collect::<Result<_, _>>()?,
            ),
        };
        Ok(Self { ids, instances })
    }

    /// Writes one `<id>.json` per instance and returns the paths.
    pub fn save(&self, dir: &Path) -> Result<Vec<PathBuf>, InstanceError> {
        std::fs::create_dir_all(dir).map_err(|source| InstanceError::Dir { path: dir.into(), source })?;
        let mut paths = Vec::with_capacity(self.len());
        for (i, id) in self.ids.iter().enumerate() {
            let path = dir.join(format!("{id}.json"));
            let written = match &self.instances {
                Instances::Nurse(list) => list[i].save(&path),
                Instances::Mall(list) => list[i].save(&path),
            };
            written.map_err(|source| InstanceError::Problem { id: id.clone(), source })?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// The `.json` files of a directory in name order.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>, InstanceError> {
    let entries = std::fs::read_dir(dir).map_err(|source| InstanceError::Dir { path: dir.into(), source })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(InstanceError::Empty(dir.into()));
    }
    Ok(files)
}
