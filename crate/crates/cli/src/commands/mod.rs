mod analyze;
mod evaluate;
mod ladder;
mod train;

pub use analyze::{analyze, generate};
pub use evaluate::{evaluate, simulate};
pub use ladder::{baseline, ladder};
pub use train::{synth_records, train};

use std::io::Write;
use std::path::Path;

use ladderforge_core::io::{read_features, FeatureRow};
use ladderforge_core::RunConfig;

use crate::failure::{data, Classify, CmdResult};
use crate::settings::{open_input, prepare_out, write_bytes};

pub(crate) fn load_features(path: &Path) -> CmdResult<Vec<FeatureRow>> {
    read_features(open_input(path)?).or_data(&format!("features {}", path.display()))
}

/// Write `bytes` to `out/name`, or to stdout without `--out`.
pub(crate) fn emit(out: Option<&Path>, cfg: &RunConfig, name: &str, bytes: &[u8]) -> CmdResult {
    match out {
        Some(dir) => {
            prepare_out(dir, cfg)?;
            write_bytes(&dir.join(name), bytes)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| data(format!("cannot write to stdout: {e}")))
        }
    }
}
