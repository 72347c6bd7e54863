//! TOML config file, the frozen-flags half of reproduction scripts.
//! Every value here is overridable by the corresponding flag; flags win.

use std::path::Path;

use serde::Deserialize;

use crate::CliResult;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub strict: Option<bool>,
    pub quiet: Option<bool>,
    pub progress_every: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub normalize: NormalizeSection,
    #[serde(default)]
    pub encode: EncodeSection,
    #[serde(default)]
    pub weaklabel: WeaklabelSection,
    #[serde(default)]
    pub resample: ResampleSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizeSection {
    pub url_removal: Option<bool>,
    pub username_removal: Option<bool>,
    pub quote_removal: Option<bool>,
    pub keep_empty: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeSection {
    pub legacy_toxic_prefix: Option<bool>,
    pub pair_format: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeaklabelSection {
    pub batch_size: Option<usize>,
    pub remote_endpoint: Option<String>,
    pub timeout_secs: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleSection {
    pub seed: Option<u64>,
    pub condition: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<FileConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let config = toml::from_str(&text)
            .map_err(|e| anyhow::anyhow!("bad config {}: {e}", path.display()))?;
        Ok(config)
    }
}
