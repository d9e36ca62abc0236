//! Machine-readable run reports with a stable field order and the exit-code
//! contract: 0 when the violations list is empty, 1 otherwise, 2 on usage
//! errors.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub exact: bool,
    pub violations: Vec<String>,
    pub timing_ms: f64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn emit(&self, output: Option<&std::path::Path>) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serialization");
        println!("{text}");
        if let Some(path) = output {
            std::fs::write(path, text)?;
        }
        Ok(())
    }
}

/// One-line diagnostic on stderr, exit 2.
pub fn usage_error(msg: impl std::fmt::Display) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}
