use std::fs;
use std::path::{Path, PathBuf};

use repairforge::format::{Shard, SpecFile};
use repairforge::{SystematicCodeSpec, TransformedCode};

use crate::error::{CliError, Result};

/// A spec file with its flat spec and, when it carries lineage, the
/// structural code it was derived from.
pub struct LoadedSpec {
    pub file: SpecFile,
    pub spec: SystematicCodeSpec,
    pub code: Option<TransformedCode>,
}

pub fn load_spec(path: &Path) -> Result<LoadedSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file = SpecFile::from_json(&text)?;
    let spec = file.to_spec()?;
    let code = file.to_transformed().transpose()?;
    Ok(LoadedSpec { file, spec, code })
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn shard_path(dir: &Path, node: usize) -> PathBuf {
    dir.join(format!("node-{node}.shard"))
}

pub fn write_shard(dir: &Path, shard: &Shard) -> Result<()> {
    let path = shard_path(dir, shard.node);
    fs::write(&path, shard.to_bytes()).map_err(|e| CliError::io(path, e))
}

/// Shards present in `dir`, indexed by node; each one is checked against the
/// spec it is read for.
pub fn read_shards(dir: &Path, spec: &SystematicCodeSpec) -> Result<Vec<Option<Shard>>> {
    let hash = repairforge::format::spec_sha256(spec);
    (0..spec.n())
        .map(|node| {
            let path = shard_path(dir, node);
            if !path.exists() {
                return Ok(None);
            }
            let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            let shard = Shard::from_bytes(&bytes)
                .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
            if shard.node != node || shard.alpha != spec.alpha() {
                return Err(CliError::Invariant(format!(
                    "{}: header says node {} alpha {}, expected node {node} alpha {}",
                    path.display(),
                    shard.node,
                    shard.alpha,
                    spec.alpha()
                )));
            }
            if shard.spec_hash != hash {
                return Err(CliError::Invariant(format!(
                    "{}: shard was written for a different spec",
                    path.display()
                )));
            }
            Ok(Some(shard))
        })
        .collect()
}
