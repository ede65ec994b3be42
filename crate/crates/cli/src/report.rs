use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "automeasure.run/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Fail => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub args: Value,
    pub inputs: Vec<InputDigest>,
    pub verdict: Verdict,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

/// What a subcommand hands back: a verdict, a JSON result and a short
/// plain-text rendering.
pub struct Outcome {
    pub verdict: Verdict,
    pub result: Value,
    pub text: String,
}

impl Outcome {
    pub fn new(verdict: Verdict, result: impl Serialize, text: String) -> Self {
        Self {
            verdict,
            result: to_value(result),
            text,
        }
    }
}

pub fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize to JSON")
}

#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<automeasure::Error> for InputError {
    fn from(e: automeasure::Error) -> Self {
        InputError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, InputError>;

/// Reads and parses every spec file, keeping a digest of the raw bytes.
#[derive(Default)]
pub struct Inputs {
    digests: Vec<InputDigest>,
}

impl Inputs {
    pub fn load<T: DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let bytes = std::fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        // serde_json errors already carry "at line L column C"
        let value = serde_json::from_slice(&bytes).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        self.digests.push(InputDigest {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(value)
    }

    pub fn into_digests(self) -> Vec<InputDigest> {
        self.digests
    }
}
