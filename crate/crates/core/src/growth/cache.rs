use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geodesic::Ball;
use crate::tower::{GroupSpec, SolubleElement};

/// Bumped whenever the canonical element form changes.
pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SphereFile {
    version: u32,
    m: usize,
    d: usize,
    level: u64,
    elements: Vec<String>,
}

/// Completed BFS spheres on disk, one file per `(m, d, level)`.
#[derive(Clone, Debug)]
pub struct BallCache {
    dir: PathBuf,
}

impl BallCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(BallCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, spec: GroupSpec, level: u64) -> PathBuf {
        self.dir.join(format!("sphere-m{}-d{}-r{}.json", spec.m, spec.d, level))
    }

    fn read_level(&self, spec: GroupSpec, level: u64) -> Option<Vec<SolubleElement>> {
        let text = fs::read_to_string(self.path(spec, level)).ok()?;
        let file: SphereFile = serde_json::from_str(&text).ok()?;
        if file.version != CACHE_VERSION || file.m != spec.m || file.d != spec.d || file.level != level {
            return None;
        }
        file.elements
            .iter()
            .map(|e| SolubleElement::parse_canonical(spec, e).ok())
            .collect()
    }

    /// The largest ball whose spheres are all present and current.
    pub fn load(&self, spec: GroupSpec) -> Ball {
        let mut spheres = Vec::new();
        while let Some(sphere) = self.read_level(spec, spheres.len() as u64) {
            spheres.push(sphere);
        }
        if spheres.is_empty() {
            return Ball::new(spec);
        }
        Ball::from_spheres(spec, spheres)
    }

    /// Writes the outermost sphere of `ball`.
    pub fn store_last(&self, ball: &Ball) -> Result<()> {
        let level = ball.radius();
        let file = SphereFile {
            version: CACHE_VERSION,
            m: ball.spec.m,
            d: ball.spec.d,
            level,
            elements: ball.spheres[level as usize].iter().map(|x| x.canonical_form()).collect(),
        };
        let path = self.path(ball.spec, level);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string(&file)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn store_all(&self, ball: &Ball) -> Result<()> {
        for r in 0..=ball.radius() {
            let partial = Ball::from_spheres(ball.spec, ball.spheres[..=r as usize].to_vec());
            self.store_last(&partial)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Limits, Parallelism};

    #[test]
    fn round_trip_and_version_guard() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path()).unwrap();
        let spec = GroupSpec::new(2, 2).unwrap();
        let ball = Ball::grow(spec, 3, &Limits::default(), &Parallelism::sequential());
        cache.store_all(&ball).unwrap();
        let loaded = cache.load(spec);
        assert_eq!(loaded.sizes(), ball.sizes());

        // a stale version at level 2 cuts the cached ball back to radius 1
        let path = cache.path(spec, 2);
        let text = fs::read_to_string(&path).unwrap().replace("\"version\":1", "\"version\":0");
        fs::write(&path, text).unwrap();
        assert_eq!(cache.load(spec).radius(), 1);
        assert_eq!(cache.load(GroupSpec::new(2, 1).unwrap()).radius(), 0);
    }
}
