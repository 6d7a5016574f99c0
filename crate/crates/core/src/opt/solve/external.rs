use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use crate::opt::problem::{Assignment, PseudoBooleanProblem};
use crate::opt::{OptError, Result};

/// Out-of-process solver. The problem document is written to the child's
/// stdin; an [`AdapterReply`] is expected on stdout before the timeout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterConfig {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_seconds: f64,
}

fn default_timeout() -> f64 {
    60.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterReply {
    pub assignment: Assignment,
    #[serde(default)]
    pub solver: Option<serde_json::Value>,
    pub wall_clock_seconds: f64,
    #[serde(default)]
    pub energy_joules: Option<f64>,
}

fn io(e: std::io::Error) -> OptError {
    OptError::AdapterIo(e.to_string())
}

pub(super) fn run(cfg: &AdapterConfig, p: &PseudoBooleanProblem) -> Result<AdapterReply> {
    if !(cfg.timeout_seconds.is_finite() && cfg.timeout_seconds > 0.0) {
        return Err(OptError::InvalidConfig(format!("adapter timeout {} must be positive", cfg.timeout_seconds)));
    }
    let input = serde_json::to_vec(p).expect("problem serializes");
    let mut child = Command::new(&cfg.command)
        .args(&cfg.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(io)?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    // A child that exits without reading its input breaks the pipe; that
    // surfaces later as a protocol error, not here.
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(&input);
    });
    let reader = thread::spawn(move || {
        let mut buf = Vec::new();
        stdout.read_to_end(&mut buf).map(|_| buf)
    });
    let err_reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr.read_to_string(&mut buf);
        buf
    });
    let status = match child.wait_timeout(Duration::from_secs_f64(cfg.timeout_seconds)).map_err(io)? {
        Some(status) => status,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(OptError::AdapterTimeout(cfg.timeout_seconds));
        }
    };
    let _ = writer.join();
    let out = reader.join().expect("reader thread").map_err(io)?;
    let err = err_reader.join().unwrap_or_default();
    if !status.success() {
        return Err(OptError::AdapterProtocol(format!("adapter exited with {status}: {}", err.trim())));
    }
    let reply: AdapterReply =
        serde_json::from_slice(&out).map_err(|e| OptError::AdapterProtocol(format!("unreadable reply: {e}")))?;
    if reply.assignment.len() != p.num_vars() {
        return Err(OptError::AdapterProtocol(format!(
            "reply has {} bits, problem has {} variables",
            reply.assignment.len(),
            p.num_vars()
        )));
    }
    if !(reply.wall_clock_seconds.is_finite() && reply.wall_clock_seconds >= 0.0) {
        return Err(OptError::AdapterProtocol(format!("invalid wall clock {}", reply.wall_clock_seconds)));
    }
    if let Some(j) = reply.energy_joules {
        if !(j.is_finite() && j >= 0.0) {
            return Err(OptError::AdapterProtocol(format!("invalid energy {j}")));
        }
    }
    Ok(reply)
}
