//! External candidate generators.
//!
//! The wire protocol is newline-delimited JSON. Each request is one line
//!
//! ```json
//! {"prompt":"...","domain":"...","context":{"p":"..."},"atoms":["p"]}
//! ```
//!
//! and each response one line `{"candidate":"..."}`. The same protocol runs
//! over a child process's stdin/stdout or over a TCP connection.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::TrainingTask;
use crate::ltl::AtomName;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("generator i/o failed: {0}")]
    Io(String),
    #[error("generator did not answer within {0:?}")]
    Timeout(Duration),
    #[error("malformed generator response: {0}")]
    Malformed(String),
    #[error("generator closed its output")]
    Closed,
}

impl From<io::Error> for GeneratorError {
    fn from(e: io::Error) -> Self {
        GeneratorError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorEndpoint {
    /// Spawned per request by [`external_generate`]; use [`ChildGenerator`]
    /// to keep one process alive.
    Command { program: String, args: Vec<String> },
    /// `host:port`.
    Tcp { address: String },
}

#[derive(Serialize)]
struct Request<'a> {
    prompt: &'a str,
    domain: &'a str,
    context: &'a BTreeMap<AtomName, String>,
    atoms: Vec<&'a AtomName>,
}

#[derive(Deserialize)]
struct Response {
    candidate: String,
}

fn request_line(task: &TrainingTask) -> String {
    let req = Request {
        prompt: &task.prompt,
        domain: &task.domain,
        context: task.context.definitions(),
        atoms: task.target_atoms.iter().collect(),
    };
    let mut line = serde_json::to_string(&req).expect("request serializes");
    line.push('\n');
    line
}

fn parse_response(line: &str) -> Result<String, GeneratorError> {
    serde_json::from_str::<Response>(line.trim_end())
        .map(|r| r.candidate)
        .map_err(|e| GeneratorError::Malformed(e.to_string()))
}

/// A long-lived generator process answering one line per request.
pub struct ChildGenerator {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<io::Result<String>>,
    timeout: Duration,
}

impl ChildGenerator {
    pub fn spawn(program: &str, args: &[String], timeout: Duration) -> Result<Self, GeneratorError> {
        let mut child = Command::new(program).args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn()?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = child.stdout.take().expect("piped");
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut line = String::new();
                let r = reader.read_line(&mut line);
                let done = !matches!(r, Ok(n) if n > 0);
                if tx.send(r.map(|_| line)).is_err() || done {
                    break;
                }
            }
        });
        Ok(ChildGenerator { child, stdin, lines, timeout })
    }

    pub fn generate(&mut self, task: &TrainingTask) -> Result<String, GeneratorError> {
        self.stdin.write_all(request_line(task).as_bytes())?;
        self.stdin.flush()?;
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) if line.is_empty() => Err(GeneratorError::Closed),
            Ok(Ok(line)) => parse_response(&line),
            Ok(Err(e)) => Err(e.into()),
            Err(RecvTimeoutError::Timeout) => Err(GeneratorError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(GeneratorError::Closed),
        }
    }
}

impl Drop for ChildGenerator {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn tcp_generate(address: &str, task: &TrainingTask, timeout: Duration) -> Result<String, GeneratorError> {
    let addr = address
        .to_socket_addrs()?
        .next()
        .ok_or_else(|| GeneratorError::Io(format!("cannot resolve {address}")))?;
    let timed_out = |e: io::Error| match e.kind() {
        io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => GeneratorError::Timeout(timeout),
        _ => e.into(),
    };
    let mut stream = TcpStream::connect_timeout(&addr, timeout).map_err(timed_out)?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;
    stream.write_all(request_line(task).as_bytes()).map_err(timed_out)?;
    let mut line = String::new();
    BufReader::new(stream).read_line(&mut line).map_err(timed_out)?;
    if line.is_empty() {
        return Err(GeneratorError::Closed);
    }
    parse_response(&line)
}

/// Sends one request to `endpoint` and returns the candidate.
///
/// Callers scoring candidates should treat any error as an unparseable
/// candidate, i.e. reward [`RewardConfig::failure_reward`](super::RewardConfig::failure_reward).
pub fn external_generate(
    task: &TrainingTask,
    endpoint: &GeneratorEndpoint,
    timeout: Duration,
) -> Result<String, GeneratorError> {
    match endpoint {
        GeneratorEndpoint::Command { program, args } => ChildGenerator::spawn(program, args, timeout)?.generate(task),
        GeneratorEndpoint::Tcp { address } => tcp_generate(address, task, timeout),
    }
}
