use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use pertok::tokenize::{PipelineSpec, StageId, StageTimings};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTime {
    pub stage: StageId,
    pub seconds: f64,
}

/// Everything needed to rerun a `tokenize` invocation and to read back its timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub spec: PipelineSpec,
    /// The spec in its text form, loadable with `--pipeline FILE`.
    pub spec_text: String,
    pub lexicon_dir: Option<PathBuf>,
    pub input: PathBuf,
    pub output: PathBuf,
    pub seed: Option<u64>,
    pub parallel: bool,
    /// Seconds since the Unix epoch.
    pub started_at: f64,
    pub finished_at: f64,
    pub stage_timings: Vec<StageTime>,
    pub stage_total_s: f64,
    /// Wall-clock seconds of the pipeline run, excluding file I/O.
    pub wall_s: f64,
    pub n_sentences: usize,
    pub n_tokens: usize,
}

impl RunManifest {
    pub fn stage_times(timings: &StageTimings) -> Vec<StageTime> {
        timings
            .stages
            .iter()
            .map(|(stage, d)| StageTime {
                stage: *stage,
                seconds: d.as_secs_f64(),
            })
            .collect()
    }

    pub fn default_path(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        output.with_file_name(name)
    }

    pub fn read(path: &Path) -> Option<RunManifest> {
        let text = std::fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }
}

pub fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}
