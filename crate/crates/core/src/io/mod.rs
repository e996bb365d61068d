//! Dataset files, report writers and the remote scoring client.
//!
//! Dataset csv schema: `id,score,label,subgroups,text` with a required header.
//! `label` is `0` or `1`, `subgroups` is a `|`-separated tag list (possibly
//! empty) and an empty `text` field means no text. jsonl uses the same field
//! names, one object per line, with `subgroups` as an array of strings.

mod dataset;
mod remote;
mod report;

use serde::{Deserialize, Serialize};

pub use dataset::{load_dataset, load_dataset_with, write_dataset, write_dataset_to, LoadOptions};
pub use remote::{
    score_remote, score_remote_with, HttpResponse, RemoteError, RemoteScorerConfig, Transport,
    UreqTransport,
};
pub use report::{render_report, write_report, Report, ReportFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Jsonl,
}

impl DataFormat {
    /// `.csv` or `.jsonl`/`.json`, by extension.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(DataFormat::Csv),
            "jsonl" | "json" => Some(DataFormat::Jsonl),
            _ => None,
        }
    }
}
