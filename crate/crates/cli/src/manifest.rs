//! Output manifests: every artifact written under an output directory is
//! listed with its SHA-256 so runs can be re-verified byte for byte.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub command: String,
    /// Relative path to SHA-256, sorted by path.
    pub files: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path)?;
    let mut h = Sha256::new();
    h.update(&bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    Ok(out)
}

fn walk(dir: &Path, base: &Path, out: &mut Vec<PathBuf>) -> anyhow::Result<()> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        if path.is_dir() {
            walk(&path, base, out)?;
        } else if path.file_name().is_some_and(|n| n != "manifest.json")
            || path.parent() != Some(base)
        {
            out.push(path);
        }
    }
    Ok(())
}

/// Hash every file under `dir` (except the top-level manifest itself) and
/// write `manifest.json`.
pub fn write_manifest(dir: &Path, config_hash: &str, command: &str) -> anyhow::Result<Manifest> {
    let mut paths = Vec::new();
    walk(dir, dir, &mut paths)?;
    let mut files = BTreeMap::new();
    for path in paths {
        let rel = path
            .strip_prefix(dir)
            .expect("walked path under dir")
            .to_string_lossy()
            .replace('\\', "/");
        files.insert(rel, sha256_file(&path)?);
    }
    let manifest = Manifest {
        config_hash: config_hash.to_string(),
        command: command.to_string(),
        files,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(manifest)
}

/// Re-verify every hash in an existing manifest; returns the mismatched or
/// missing paths.
pub fn verify_manifest(dir: &Path) -> anyhow::Result<Vec<String>> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let mut bad = Vec::new();
    for (rel, want) in &manifest.files {
        let path = dir.join(rel);
        if !path.is_file() {
            bad.push(format!("{rel}: missing"));
            continue;
        }
        let got = sha256_file(&path)?;
        if &got != want {
            bad.push(format!("{rel}: hash mismatch"));
        }
    }
    Ok(bad)
}
