use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use super::oracle::GoldOracle;
use super::state::{GenState, ParserAction};

/// Errors raised by scorers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScorerError {
    /// The scorer broke the wire protocol.
    #[error("scorer protocol violation: {message}")]
    Protocol {
        /// What went wrong.
        message: String,
        /// Request and response lines exchanged so far.
        transcript: Vec<String>,
    },
    /// The scorer process could not be started or talked to.
    #[error("scorer i/o: {0}")]
    Io(String),
}

/// Weighs the legal actions of a state with values in `[0, 1]`.
pub trait Scorer: Sync {
    /// One weight per action, aligned by index.
    fn score(&self, state: &GenState, actions: &[ParserAction]) -> Result<Vec<f64>, ScorerError>;

    /// False when calls must not overlap; the engine then queues them.
    fn concurrent(&self) -> bool {
        true
    }
}

/// Gives every action weight 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformScorer;

impl Scorer for UniformScorer {
    fn score(&self, _: &GenState, actions: &[ParserAction]) -> Result<Vec<f64>, ScorerError> {
        Ok(vec![1.0; actions.len()])
    }
}

impl Scorer for GoldOracle {
    fn score(&self, state: &GenState, actions: &[ParserAction]) -> Result<Vec<f64>, ScorerError> {
        Ok(GoldOracle::score(self, state, actions))
    }
}

/// The request line sent to external scorers.
pub fn scorer_request(state: &GenState, actions: &[ParserAction]) -> serde_json::Value {
    json!({ "state": state.net().to_json_value(), "actions": actions })
}

#[derive(Deserialize)]
struct Response {
    weights: Vec<f64>,
}

/// Checks a response line against the number of actions.
pub fn parse_response(line: &str, actions: usize) -> Result<Vec<f64>, String> {
    let r: Response = serde_json::from_str(line).map_err(|e| format!("bad response: {e}"))?;
    if r.weights.len() != actions {
        return Err(format!("{} weights for {actions} actions", r.weights.len()));
    }
    if let Some(w) = r.weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(format!("weight {w} outside [0, 1]"));
    }
    Ok(r.weights)
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    transcript: Vec<String>,
}

/// A scorer running as a child process that reads one JSON request per
/// line on standard input and answers one JSON response per line.
pub struct ExternalScorer {
    channel: Mutex<Channel>,
}

impl ExternalScorer {
    /// Starts `command` through the shell.
    pub fn spawn(command: &str) -> Result<Self, ScorerError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| ScorerError::Io(format!("cannot start `{command}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(ExternalScorer { channel: Mutex::new(Channel { child, stdin, stdout, transcript: Vec::new() }) })
    }

    /// Lines exchanged so far.
    pub fn transcript(&self) -> Vec<String> {
        self.channel.lock().map(|c| c.transcript.clone()).unwrap_or_default()
    }
}

impl Scorer for ExternalScorer {
    fn score(&self, state: &GenState, actions: &[ParserAction]) -> Result<Vec<f64>, ScorerError> {
        let mut ch = self.channel.lock().map_err(|_| ScorerError::Io("scorer lock poisoned".into()))?;
        let request = scorer_request(state, actions).to_string();
        ch.transcript.push(format!("> {request}"));
        let sent = writeln!(ch.stdin, "{request}").and_then(|_| ch.stdin.flush());
        if let Err(e) = sent {
            return Err(ScorerError::Protocol {
                message: format!("write failed: {e}"),
                transcript: ch.transcript.clone(),
            });
        }
        let mut line = String::new();
        let read = ch.stdout.read_line(&mut line);
        ch.transcript.push(format!("< {}", line.trim_end()));
        let message = match read {
            Ok(0) => "scorer closed its output".to_string(),
            Ok(_) => match parse_response(&line, actions.len()) {
                Ok(w) => return Ok(w),
                Err(m) => m,
            },
            Err(e) => format!("read failed: {e}"),
        };
        Err(ScorerError::Protocol { message, transcript: ch.transcript.clone() })
    }

    fn concurrent(&self) -> bool {
        false
    }
}

impl Drop for ExternalScorer {
    fn drop(&mut self) {
        if let Ok(ch) = self.channel.get_mut() {
            let _ = ch.child.kill();
            let _ = ch.child.wait();
        }
    }
}
