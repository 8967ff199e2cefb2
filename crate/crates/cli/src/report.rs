use std::path::Path;
use std::time::Instant;

use dunkl_core::Error;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const EXIT_NOT_DUNKL: u8 = 1;
pub const EXIT_NOT_APPLICABLE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_INPUT: u8 = 65;
pub const EXIT_INCONSISTENT: u8 = 70;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPositiveDefinite | Error::NotConverged | Error::LpNumericalFailure(_) => {
                EXIT_INCONSISTENT
            }
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Input bytes and digest accumulated while reading files.
#[derive(Default)]
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        String::from_utf8(bytes)
            .map_err(|_| Failure::input(format!("{} is not UTF-8", path.display())))
    }

    pub fn absorb(&mut self, bytes: &[u8]) {
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn digest(self) -> String {
        format!("sha256:{}", hex::encode(self.hasher.finalize()))
    }
}

/// Wall-clock seconds per named stage.
pub struct Timer {
    last: Instant,
    stages: Map<String, Value>,
}

impl Timer {
    pub fn start() -> Self {
        Timer {
            last: Instant::now(),
            stages: Map::new(),
        }
    }

    pub fn stage(&mut self, name: &str) {
        let now = Instant::now();
        self.stages
            .insert(name.to_owned(), json!((now - self.last).as_secs_f64()));
        self.last = now;
    }

    pub fn into_json(self) -> Value {
        Value::Object(self.stages)
    }
}

pub fn run_report(
    command: &str,
    mode: &str,
    digest: String,
    payload: Value,
    timing: Option<Value>,
) -> Value {
    let mut report = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "mode": mode,
        "input_digest": digest,
        "payload": payload,
    });
    if let Some(t) = timing {
        report["timing"] = t;
    }
    report
}

pub fn emit(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
