//! Tag stack manifests and seed trajectories.

use std::path::{Path, PathBuf};

use gaborflow::deform::TagStack;
use gaborflow::io::{read_image, read_json};
use gaborflow::Error;
use serde::{Deserialize, Serialize};

/// `frames[t][i]` is the image of frame `t` tagged along `directions[i]`
/// (radians). Relative paths resolve against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackManifest {
    pub directions: Vec<f64>,
    pub frames: Vec<Vec<PathBuf>>,
}

impl StackManifest {
    pub fn load(path: &Path) -> gaborflow::Result<(Self, TagStack)> {
        let manifest: StackManifest = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let images = manifest
            .frames
            .iter()
            .map(|frame| frame.iter().map(|p| read_image(&base.join(p))).collect())
            .collect::<gaborflow::Result<Vec<Vec<_>>>>()?;
        let stack = TagStack::new(images, manifest.directions.clone())?;
        Ok((manifest, stack))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct SeedRow {
    t: usize,
    x: f64,
    y: f64,
}

pub fn write_seed(path: &Path, seed: &[[f64; 2]]) -> gaborflow::Result<()> {
    let io_err = |e: csv::Error| Error::Format { path: path.into(), reason: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    for (t, x) in seed.iter().enumerate() {
        w.serialize(SeedRow { t, x: x[0], y: x[1] }).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Io { path: path.into(), source: e })
}

/// Rows may come in any order but must cover `t = 0..T` exactly once.
pub fn read_seed(path: &Path) -> gaborflow::Result<Vec<[f64; 2]>> {
    let bad = |reason: String| Error::Format { path: path.into(), reason };
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let rows = r.deserialize::<SeedRow>().collect::<Result<Vec<_>, _>>().map_err(|e| bad(e.to_string()))?;
    let mut out = vec![None; rows.len()];
    for row in rows {
        match out.get_mut(row.t) {
            Some(slot @ None) => *slot = Some([row.x, row.y]),
            _ => return Err(bad(format!("frame {} is out of range or repeated", row.t))),
        }
    }
    if out.is_empty() {
        return Err(bad("seed trajectory is empty".into()));
    }
    Ok(out.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_round_trips_and_rejects_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seed.csv");
        let seed = vec![[1.5, 2.0], [1.25, 2.5], [1.0, 3.0]];
        write_seed(&path, &seed).unwrap();
        assert_eq!(read_seed(&path).unwrap(), seed);
        std::fs::write(&path, "t,x,y\n0,1,2\n2,1,2\n").unwrap();
        assert!(read_seed(&path).unwrap_err().is_validation());
    }
}
