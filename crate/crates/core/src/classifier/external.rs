use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use super::{check_lengths, Classifier, ClassifierError, ProbVector};
use crate::scalar::Scalar;
use crate::timeseries::TimeSeries;
use crate::wire::{Request, Response};

/// Normalization slack accepted from an external process.
pub const EXTERNAL_TOLERANCE: f64 = 1e-6;

struct Channel {
    child: Child,
    stdin: BufWriter<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    next_id: u64,
}

/// Classifier backed by a subprocess speaking line-delimited JSON.
///
/// Requests are `{"id": n, "series": [[...], ...]}` and responses
/// `{"id": n, "probs": [[...], ...]}`, one object per line. Access to the
/// subprocess is serialized; run several bridges for parallelism.
pub struct ExternalClassifier {
    channel: Mutex<Channel>,
    n_classes: usize,
    series_len: usize,
    description: String,
}

impl std::fmt::Debug for ExternalClassifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalClassifier")
            .field("command", &self.description)
            .field("n_classes", &self.n_classes)
            .field("series_len", &self.series_len)
            .finish()
    }
}

impl ExternalClassifier {
    /// Starts `command` with piped stdin/stdout. Stderr is inherited.
    pub fn spawn(
        mut command: Command,
        n_classes: usize,
        series_len: usize,
    ) -> Result<Self, ClassifierError> {
        let description = format!("{command:?}");
        let mut child = command
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| ClassifierError::Transport(format!("cannot start {description}: {e}")))?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            channel: Mutex::new(Channel {
                child,
                stdin,
                stdout,
                next_id: 0,
            }),
            n_classes,
            series_len,
            description,
        })
    }

    /// Runs `command_line` through `sh -c`.
    pub fn from_shell(
        command_line: &str,
        n_classes: usize,
        series_len: usize,
    ) -> Result<Self, ClassifierError> {
        let mut cmd = Command::new("sh");
        cmd.arg("-c").arg(command_line);
        Self::spawn(cmd, n_classes, series_len)
    }

    fn round_trip(&self, series: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, ClassifierError> {
        let mut ch = self.channel.lock().unwrap_or_else(|e| e.into_inner());
        let id = ch.next_id;
        ch.next_id += 1;
        let rows = series.len();

        let line = serde_json::to_string(&Request { id, series })
            .map_err(|e| ClassifierError::Protocol(e.to_string()))?;
        let sent = writeln!(ch.stdin, "{line}").and_then(|_| ch.stdin.flush());
        if let Err(e) = sent {
            return Err(ch.exited(format!("write failed: {e}")));
        }

        let mut reply = String::new();
        match ch.stdout.read_line(&mut reply) {
            Ok(0) => return Err(ch.exited("no response".into())),
            Ok(_) => {}
            Err(e) => return Err(ch.exited(format!("read failed: {e}"))),
        }
        let resp: Response = serde_json::from_str(reply.trim_end())
            .map_err(|e| ClassifierError::Protocol(format!("malformed response: {e}")))?;
        if resp.id != id {
            return Err(ClassifierError::Protocol(format!(
                "response id {} does not match request id {id}",
                resp.id
            )));
        }
        if resp.probs.len() != rows {
            return Err(ClassifierError::Protocol(format!(
                "{} probability rows for {rows} series",
                resp.probs.len()
            )));
        }
        Ok(resp.probs)
    }

    fn validate_row<T: Scalar>(&self, row: Vec<f64>) -> Result<ProbVector<T>, ClassifierError> {
        if row.len() != self.n_classes {
            return Err(ClassifierError::Protocol(format!(
                "expected {} classes, got {}",
                self.n_classes,
                row.len()
            )));
        }
        if row
            .iter()
            .any(|p| !p.is_finite() || *p < -EXTERNAL_TOLERANCE || *p > 1.0 + EXTERNAL_TOLERANCE)
        {
            return Err(ClassifierError::Protocol(format!(
                "probabilities out of range: {row:?}"
            )));
        }
        let sum: f64 = row.iter().map(|p| p.max(0.0)).sum();
        if (sum - 1.0).abs() > EXTERNAL_TOLERANCE {
            return Err(ClassifierError::Protocol(format!(
                "probabilities sum to {sum}"
            )));
        }
        let probs = row.iter().map(|p| T::of(p.max(0.0) / sum)).collect();
        ProbVector::new(probs).map_err(|e| ClassifierError::Protocol(e.to_string()))
    }
}

impl Channel {
    fn exited(&mut self, what: String) -> ClassifierError {
        let status = match self.child.try_wait() {
            Ok(Some(s)) => format!(" (process exited: {s})"),
            _ => String::new(),
        };
        ClassifierError::Transport(format!("{what}{status}"))
    }
}

impl Drop for ExternalClassifier {
    fn drop(&mut self) {
        let ch = self.channel.get_mut().unwrap_or_else(|e| e.into_inner());
        let _ = ch.stdin.flush();
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}

impl<T: Scalar> Classifier<T> for ExternalClassifier {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn series_len(&self) -> usize {
        self.series_len
    }

    fn predict_proba(
        &self,
        batch: &[TimeSeries<T>],
    ) -> Result<Vec<ProbVector<T>>, ClassifierError> {
        check_lengths(batch, self.series_len)?;
        if batch.is_empty() {
            return Ok(Vec::new());
        }
        let series = batch
            .iter()
            .map(|s| s.values().iter().map(|v| v.as_f64()).collect())
            .collect();
        self.round_trip(series)?
            .into_iter()
            .map(|row| self.validate_row(row))
            .collect()
    }
}
