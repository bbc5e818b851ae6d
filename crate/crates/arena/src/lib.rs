//! Tournament harness, reports, brute-force checks and the HTTP play service
//! around `balance-core`.

use std::path::{Path, PathBuf};

pub mod checks;
pub mod config;
pub mod report;
pub mod runner;
pub mod service;

pub use config::TournamentConfig;
pub use runner::{play_match, run_tournament, MatchRecord, Side, StdClock};

/// Name of the file records are appended to while a tournament runs, in
/// completion order.
pub const STREAM_FILE: &str = "records.partial.ndjson";

#[derive(Debug, thiserror::Error)]
pub enum ArenaError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Record { path: PathBuf, line: usize, message: String },
    #[error("no usable records")]
    NoRecords,
}

impl ArenaError {
    pub fn io(path: &Path, source: std::io::Error) -> ArenaError {
        ArenaError::Io { path: path.to_path_buf(), source }
    }
}

/// Runs `config`, streaming records into its output directory as matches
/// finish, then writes the sorted records and the reports there.
pub fn run_to_dir(
    config: &TournamentConfig,
    progress: &(dyn Fn(&MatchRecord) + Sync),
) -> Result<report::Report, ArenaError> {
    use std::io::Write;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| ArenaError::io(dir, e))?;
    let stream_path = dir.join(STREAM_FILE);
    let stream = std::fs::File::create(&stream_path).map_err(|e| ArenaError::io(&stream_path, e))?;
    let stream = std::sync::Mutex::new(std::io::BufWriter::new(stream));
    let records = run_tournament(config, &|r| {
        let mut out = stream.lock().unwrap_or_else(|p| p.into_inner());
        // the stream is a convenience copy; the sorted file below is authoritative
        let _ = writeln!(out, "{}", serde_json::to_string(r).expect("records serialize"));
        let _ = out.flush();
        progress(r);
    })?;
    drop(stream);
    let (report, _) = report::emit_report(&records, dir)?;
    std::fs::remove_file(&stream_path).map_err(|e| ArenaError::io(&stream_path, e))?;
    Ok(report)
}
