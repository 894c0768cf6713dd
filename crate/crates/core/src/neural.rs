//! Client side of the neural relation classifier's JSON-lines protocol.
//!
//! A request names the question and the two endpoints, each either as a char
//! span of the question or as a bare surface string:
//!
//! ```text
//! {"question": "...", "subj": {"start": 27, "end": 33}, "obj": {"surface": "amr-unknown"}}
//! ```
//!
//! The service answers with `{"scores": [{"relation": iri, "p": float}, ...]}`
//! or `{"error": "..."}`, one line per request.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amr::UNKNOWN_CONCEPT;
use crate::metadata::{Grounding, LinkedTriple};
use crate::text::{self, char_slice};

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("neural service I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed neural response: {0}")]
    Malformed(String),
    #[error("neural service error: {0}")]
    Service(String),
    #[error("cannot read stub {path}: {message}")]
    Stub { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Span { start: usize, end: usize },
    Surface { surface: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeuralRequest {
    pub question: String,
    pub subj: Endpoint,
    pub obj: Endpoint,
}

impl NeuralRequest {
    /// Spans where the AMR node has one, the surface otherwise; the answer
    /// placeholder is sent as the `amr-unknown` surface so that the service
    /// marks the question word.
    pub fn for_triple(question: &str, lt: &LinkedTriple) -> NeuralRequest {
        let end = |g: &Grounding, span: &Option<crate::amr::Span>, surface: &str| match (g, span) {
            (Grounding::Unknown(_), _) => Endpoint::Surface {
                surface: UNKNOWN_CONCEPT.to_string(),
            },
            (_, Some(s)) => Endpoint::Span {
                start: s.start,
                end: s.end,
            },
            (_, None) => Endpoint::Surface {
                surface: surface.to_string(),
            },
        };
        NeuralRequest {
            question: question.to_string(),
            subj: end(&lt.subject, &lt.subject_span, &lt.triple.subject.surface),
            obj: end(&lt.object, &lt.object_span, &lt.triple.object.surface),
        }
    }

    pub fn surface_of(&self, e: &Endpoint) -> String {
        match e {
            Endpoint::Span { start, end } => char_slice(&self.question, *start, *end),
            Endpoint::Surface { surface } => surface.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationProb {
    pub relation: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NeuralResponse {
    Scores { scores: Vec<RelationProb> },
    Error { error: String },
}

/// Anything that can produce a relation distribution for a request.
pub trait NeuralBackend: Send + Sync {
    fn distribution(&self, request: &NeuralRequest) -> Result<Vec<(String, f64)>, NeuralError>;
}

fn parse_response(line: &str) -> Result<Vec<(String, f64)>, NeuralError> {
    match serde_json::from_str::<NeuralResponse>(line) {
        Ok(NeuralResponse::Scores { scores }) => {
            Ok(scores.into_iter().map(|s| (s.relation, s.p)).collect())
        }
        Ok(NeuralResponse::Error { error }) => Err(NeuralError::Service(error)),
        Err(e) => Err(NeuralError::Malformed(e.to_string())),
    }
}

struct Connection {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

/// TCP client holding one connection, reopened after any failure.
pub struct TcpNeuralClient {
    address: String,
    timeout: Duration,
    conn: Mutex<Option<Connection>>,
}

impl TcpNeuralClient {
    pub fn new(address: &str, timeout: Duration) -> TcpNeuralClient {
        TcpNeuralClient {
            address: address.to_string(),
            timeout,
            conn: Mutex::new(None),
        }
    }

    fn connect(&self) -> Result<Connection, NeuralError> {
        let addr = self
            .address
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| NeuralError::Malformed(format!("no address for {}", self.address)))?;
        let stream = TcpStream::connect_timeout(&addr, self.timeout)?;
        stream.set_read_timeout(Some(self.timeout))?;
        stream.set_write_timeout(Some(self.timeout))?;
        Ok(Connection {
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
        })
    }

    fn round_trip(conn: &mut Connection, request: &NeuralRequest) -> Result<String, NeuralError> {
        let mut body = serde_json::to_string(request).map_err(|e| NeuralError::Malformed(e.to_string()))?;
        body.push('\n');
        conn.writer.write_all(body.as_bytes())?;
        conn.writer.flush()?;
        let mut line = String::new();
        if conn.reader.read_line(&mut line)? == 0 {
            return Err(NeuralError::Io(std::io::ErrorKind::UnexpectedEof.into()));
        }
        Ok(line)
    }
}

impl NeuralBackend for TcpNeuralClient {
    fn distribution(&self, request: &NeuralRequest) -> Result<Vec<(String, f64)>, NeuralError> {
        let mut guard = self.conn.lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            *guard = Some(self.connect()?);
        }
        let conn = guard.as_mut().expect("connection just set");
        match Self::round_trip(conn, request) {
            Ok(line) => parse_response(&line),
            Err(e) => {
                *guard = None;
                Err(e)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StubEntry {
    pub subj: String,
    pub obj: String,
    pub scores: Vec<RelationProb>,
}

/// A fixed lookup table standing in for a trained model: the first entry whose
/// subject and object surfaces match the request (after case folding) answers.
/// Unmatched requests get an empty distribution.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StubNeural {
    pub entries: Vec<StubEntry>,
}

impl StubNeural {
    pub fn load(path: &Path) -> Result<StubNeural, NeuralError> {
        let stub_err = |message: String| NeuralError::Stub {
            path: path.display().to_string(),
            message,
        };
        let body = fs::read_to_string(path).map_err(|e| stub_err(e.to_string()))?;
        serde_json::from_str(&body).map_err(|e| stub_err(e.to_string()))
    }
}

impl NeuralBackend for StubNeural {
    fn distribution(&self, request: &NeuralRequest) -> Result<Vec<(String, f64)>, NeuralError> {
        let subj = text::fold(&request.surface_of(&request.subj));
        let obj = text::fold(&request.surface_of(&request.obj));
        Ok(self
            .entries
            .iter()
            .find(|e| text::fold(&e.subj) == subj && text::fold(&e.obj) == obj)
            .map(|e| e.scores.iter().map(|s| (s.relation.clone(), s.p)).collect())
            .unwrap_or_default())
    }
}

/// Answers requests on `listener` from `backend`, one connection at a time.
/// Malformed lines get an error response and the connection stays open.
/// Returns when the listener fails.
pub fn serve(listener: TcpListener, backend: Arc<dyn NeuralBackend>) {
    for stream in listener.incoming() {
        let Ok(stream) = stream else { return };
        let Ok(read_half) = stream.try_clone() else { continue };
        let mut writer = stream;
        for line in BufReader::new(read_half).lines() {
            let Ok(line) = line else { break };
            let response = match serde_json::from_str::<NeuralRequest>(&line) {
                Ok(req) => match backend.distribution(&req) {
                    Ok(mut scores) => {
                        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                        NeuralResponse::Scores {
                            scores: scores
                                .into_iter()
                                .map(|(relation, p)| RelationProb { relation, p })
                                .collect(),
                        }
                    }
                    Err(e) => NeuralResponse::Error { error: e.to_string() },
                },
                Err(e) => NeuralResponse::Error { error: e.to_string() },
            };
            let mut out = serde_json::to_string(&response).expect("serializable response");
            out.push('\n');
            if writer.write_all(out.as_bytes()).is_err() {
                break;
            }
        }
    }
}
