use serde::Serialize;

/// Machine-readable summary of one invocation.
#[derive(Serialize)]
pub struct CommandReport {
    pub command: String,
    /// SHA-256 over the input files, in the order they were read.
    pub inputs_digest: String,
    pub outcome: String,
    pub witness_paths: Vec<String>,
    pub wall_time_ms: u64,
    pub jobs: usize,
    pub seed: Option<u64>,
    /// Fields that may differ between runs on identical inputs.
    pub nondeterministic: Vec<&'static str>,
}

impl CommandReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }
}

/// Tree-shape search keeps the earliest witness whatever `--jobs` is, so
/// only timing varies.
pub const NONDETERMINISTIC: &[&str] = &["wall_time_ms"];
