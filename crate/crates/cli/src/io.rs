use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use mixdisc::posmap::from_curvature;
use mixdisc::{BlockMap, CurvatureTensor};

use crate::RunConfig;

pub fn input_path(cfg: &RunConfig) -> anyhow::Result<&Path> {
    cfg.input_path
        .as_deref()
        .ok_or_else(|| anyhow!("this command needs --input"))
}

fn read_value(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let v = read_value(path)?;
    serde_json::from_value(v).with_context(|| format!("decoding {}", path.display()))
}

/// A block map file, or a curvature tensor file turned into its block map.
pub fn read_block_map(path: &Path) -> anyhow::Result<BlockMap> {
    let v = read_value(path)?;
    let is_curvature = v.get("R").is_some();
    let ctx = || format!("decoding {}", path.display());
    if is_curvature {
        let rt: CurvatureTensor = serde_json::from_value(v).with_context(ctx)?;
        Ok(from_curvature(&rt))
    } else {
        serde_json::from_value(v).with_context(ctx)
    }
}

pub fn emit<T: Serialize>(cfg: &RunConfig, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match &cfg.output_path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
