use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use ladderforge_core::config::optional_points;
use ladderforge_core::{LatencyBudget, Pairing, RunConfig, VsrTag};
use serde::Serialize;

use crate::failure::{data, usage, Classify, CmdResult};

pub const EFFECTIVE_CONFIG: &str = "effective_config.json";

/// A VMAF threshold or `none`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Points(pub Option<f64>);

impl FromStr for Points {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        optional_points::parse(s).map(Points)
    }
}

/// Flags shared by every subcommand. Each overrides the matching
/// `--config` entry.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML (or `.json`) run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Latency budget per representation in seconds, or `inf`.
    #[arg(long = "tau-l", global = true, value_name = "SECONDS")]
    pub tau_l: Option<LatencyBudget>,
    /// JND in VMAF points, or `none` to skip pruning.
    #[arg(long, global = true, value_name = "POINTS")]
    pub vj: Option<Points>,
    /// Maximum quality threshold in VMAF points, or `none`.
    #[arg(long, global = true, value_name = "POINTS")]
    pub vt: Option<Points>,
    #[arg(long, global = true, value_name = "TAG")]
    pub vsr: Option<VsrTag>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "block-size", global = true, value_name = "PIXELS")]
    pub block_size: Option<usize>,
    /// Joules per second of encoding.
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    pub fn resolve(&self) -> CmdResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
                let parsed = if path.extension().is_some_and(|e| e == "json") {
                    RunConfig::from_json(&text)
                } else {
                    RunConfig::from_toml(&text)
                };
                parsed.or_usage(&format!("config {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(t) = self.tau_l {
            cfg.tau_l = t;
        }
        if let Some(Points(v)) = self.vj {
            cfg.v_j = v;
        }
        if let Some(Points(v)) = self.vt {
            cfg.v_t = v;
        }
        if let Some(v) = self.vsr {
            cfg.vsr_tag = v;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(b) = self.block_size {
            cfg.block_size = b;
        }
        if let Some(k) = self.kappa {
            cfg.kappa = k;
        }
        cfg.validate().or_usage("effective configuration")?;
        Ok(cfg)
    }

    pub fn require_out(&self) -> CmdResult<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| usage("this command needs --out DIR"))
    }
}

pub fn pairing(cfg: &RunConfig) -> CmdResult<Pairing> {
    match &cfg.pairing {
        Some(path) => {
            let file = fs::File::open(path)
                .map_err(|e| data(format!("cannot open pairing {}: {e}", path.display())))?;
            Pairing::from_csv(file).or_data(&format!("pairing {}", path.display()))
        }
        None => Ok(Pairing::default()),
    }
}

pub fn read_input(path: &Path) -> CmdResult<Vec<u8>> {
    fs::read(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))
}

pub fn open_input(path: &Path) -> CmdResult<fs::File> {
    fs::File::open(path).map_err(|e| data(format!("cannot open {}: {e}", path.display())))
}

/// Creates `dir` and records the effective config in it.
pub fn prepare_out(dir: &Path, cfg: &RunConfig) -> CmdResult {
    fs::create_dir_all(dir).map_err(|e| data(format!("cannot create {}: {e}", dir.display())))?;
    write_json(&dir.join(EFFECTIVE_CONFIG), cfg)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CmdResult {
    fs::write(path, bytes).map_err(|e| data(format!("cannot write {}: {e}", path.display())))
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("outputs always serialize");
    bytes.push(b'\n');
    bytes
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CmdResult {
    write_bytes(path, &to_json(value))
}

/// Segment ids become file names, so keep them to a safe alphabet.
pub fn check_segment_id(id: &str) -> CmdResult {
    let ok = !id.is_empty()
        && !id.starts_with('.')
        && format!("{id}.json") != EFFECTIVE_CONFIG
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(data(format!(
            "segment id `{id}` must use only letters, digits, `-`, `_` and `.`"
        )))
    }
}

pub fn manifest_path(dir: &Path, segment_id: &str) -> PathBuf {
    dir.join(format!("{segment_id}.json"))
}
