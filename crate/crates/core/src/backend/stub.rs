//! Local chat-completion server for exercising the remote backend.

use serde_json::json;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{Shutdown, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StubReply {
    /// 200 with a well-formed body whose first choice carries this text.
    Completion(String),
    /// Arbitrary status and body.
    Raw { status: u16, body: String },
    /// Close the connection without answering.
    Hangup,
}

impl StubReply {
    pub fn completion(text: &str) -> StubReply {
        StubReply::Completion(text.to_string())
    }

    pub fn empty_choices() -> StubReply {
        StubReply::Raw {
            status: 200,
            body: r#"{"choices":[]}"#.to_string(),
        }
    }

    pub fn status(code: u16) -> StubReply {
        StubReply::Raw {
            status: code,
            body: r#"{"error":"stub"}"#.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordedRequest {
    pub method: String,
    pub path: String,
    /// Header names lowercased.
    pub headers: Vec<(String, String)>,
    pub body: String,
}

impl RecordedRequest {
    pub fn header(&self, name: &str) -> Option<&str> {
        let name = name.to_ascii_lowercase();
        self.headers.iter().find(|(k, _)| *k == name).map(|(_, v)| v.as_str())
    }
}

struct Shared {
    replies: Vec<StubReply>,
    served: usize,
    requests: Vec<RecordedRequest>,
}

/// A server on `127.0.0.1` answering requests with scripted replies in
/// order; the last reply repeats once the script runs out.
pub struct StubServer {
    addr: std::net::SocketAddr,
    shared: Arc<Mutex<Shared>>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

fn read_request(stream: &mut TcpStream) -> std::io::Result<RecordedRequest> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let mut parts = line.split_whitespace();
    let method = parts.next().unwrap_or_default().to_string();
    let path = parts.next().unwrap_or_default().to_string();
    let mut headers = Vec::new();
    let mut len = 0usize;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        let l = line.trim_end();
        if l.is_empty() {
            break;
        }
        if let Some((k, v)) = l.split_once(':') {
            let k = k.trim().to_ascii_lowercase();
            let v = v.trim().to_string();
            if k == "content-length" {
                len = v.parse().unwrap_or(0);
            }
            headers.push((k, v));
        }
    }
    let mut body = vec![0u8; len];
    reader.read_exact(&mut body)?;
    Ok(RecordedRequest {
        method,
        path,
        headers,
        body: String::from_utf8_lossy(&body).into_owned(),
    })
}

fn reason(status: u16) -> &'static str {
    match status {
        200 => "OK",
        400 => "Bad Request",
        401 => "Unauthorized",
        403 => "Forbidden",
        413 => "Payload Too Large",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    }
}

fn serve(mut stream: TcpStream, shared: &Mutex<Shared>) {
    let Ok(req) = read_request(&mut stream) else {
        return;
    };
    let reply = {
        let mut s = shared.lock().unwrap_or_else(|e| e.into_inner());
        s.requests.push(req);
        let idx = s.served.min(s.replies.len().saturating_sub(1));
        s.served += 1;
        s.replies.get(idx).cloned().unwrap_or(StubReply::Hangup)
    };
    let (status, body) = match reply {
        StubReply::Hangup => {
            let _ = stream.shutdown(Shutdown::Both);
            return;
        }
        StubReply::Completion(text) => (
            200,
            json!({
                "id": "stub",
                "object": "chat.completion",
                "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
            })
            .to_string(),
        ),
        StubReply::Raw { status, body } => (status, body),
    };
    let head = format!(
        "HTTP/1.1 {status} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        reason(status),
        body.len()
    );
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(body.as_bytes());
    let _ = stream.flush();
}

impl StubServer {
    pub fn start(replies: Vec<StubReply>) -> std::io::Result<StubServer> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Mutex::new(Shared {
            replies,
            served: 0,
            requests: Vec::new(),
        }));
        let stop = Arc::new(AtomicBool::new(false));
        let handle = {
            let shared = Arc::clone(&shared);
            let stop = Arc::clone(&stop);
            std::thread::spawn(move || {
                for conn in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    if let Ok(stream) = conn {
                        serve(stream, &shared);
                    }
                }
            })
        };
        Ok(StubServer {
            addr,
            shared,
            stop,
            handle: Some(handle),
        })
    }

    /// Endpoint URL for the backend config.
    pub fn url(&self) -> String {
        format!("http://{}/v1/chat/completions", self.addr)
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.shared.lock().unwrap_or_else(|e| e.into_inner()).requests.clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{Backend, BackendConfig, BackendError, BackendKind, RemoteBackend};
    use crate::prompting::Prompt;

    fn prompt() -> Prompt {
        Prompt {
            system_preamble: "sys".into(),
            examples: Vec::new(),
            target_block: "target\n".into(),
            output_contract: "contract".into(),
            feedback: None,
        }
    }

    fn backend(url: String, key_env: &str) -> RemoteBackend {
        RemoteBackend::new(BackendConfig {
            kind: BackendKind::Remote,
            endpoint_url: Some(url),
            api_key_env: key_env.into(),
            backoff_base_ms: 1,
            timeout_s: 5,
            ..BackendConfig::default()
        })
        .unwrap()
    }

    // each test uses its own variable name so parallel tests do not interfere
    fn set_key(name: &str) {
        // SAFETY: the variable is private to this test
        unsafe { std::env::set_var(name, "stub-secret") };
    }

    #[test]
    fn round_trip_with_bearer_token() {
        let s = StubServer::start(vec![StubReply::completion("#pragma omp parallel for")]).unwrap();
        set_key("OMPAR_TEST_KEY_RT");
        let b = backend(s.url(), "OMPAR_TEST_KEY_RT");
        assert_eq!(b.complete(&prompt()).unwrap(), "#pragma omp parallel for");
        let reqs = s.requests();
        assert_eq!(reqs.len(), 1);
        assert_eq!(reqs[0].method, "POST");
        assert_eq!(reqs[0].header("authorization"), Some("Bearer stub-secret"));
        let body: serde_json::Value = serde_json::from_str(&reqs[0].body).unwrap();
        assert_eq!(body["messages"][0]["role"], "system");
        assert_eq!(body["messages"][1]["role"], "user");
        assert_eq!(body["temperature"], 0.0);
    }

    #[test]
    fn missing_key_fails_before_network() {
        let s = StubServer::start(vec![StubReply::completion("x")]).unwrap();
        let b = backend(s.url(), "OMPAR_TEST_KEY_UNSET_42");
        assert!(matches!(b.complete(&prompt()), Err(BackendError::AuthError(_))));
        assert!(s.requests().is_empty());
    }

    #[test]
    fn transient_failures_are_retried() {
        let s = StubServer::start(vec![
            StubReply::status(503),
            StubReply::Hangup,
            StubReply::completion("ok"),
        ])
        .unwrap();
        set_key("OMPAR_TEST_KEY_RETRY");
        let b = backend(s.url(), "OMPAR_TEST_KEY_RETRY");
        assert_eq!(b.complete(&prompt()).unwrap(), "ok");
        assert_eq!(s.requests().len(), 3);
    }

    #[test]
    fn retries_are_bounded() {
        let s = StubServer::start(vec![StubReply::status(500)]).unwrap();
        set_key("OMPAR_TEST_KEY_BOUND");
        let b = backend(s.url(), "OMPAR_TEST_KEY_BOUND");
        assert!(matches!(b.complete(&prompt()), Err(BackendError::TransportError(_))));
        assert_eq!(s.requests().len(), 3);
    }

    #[test]
    fn auth_and_malformed_are_not_retried() {
        let s = StubServer::start(vec![StubReply::status(401)]).unwrap();
        set_key("OMPAR_TEST_KEY_AUTH");
        let b = backend(s.url(), "OMPAR_TEST_KEY_AUTH");
        assert!(matches!(b.complete(&prompt()), Err(BackendError::AuthError(_))));
        assert_eq!(s.requests().len(), 1);

        let s = StubServer::start(vec![StubReply::empty_choices()]).unwrap();
        let b = backend(s.url(), "OMPAR_TEST_KEY_AUTH");
        assert!(matches!(
            b.complete(&prompt()),
            Err(BackendError::MalformedProviderResponse(_))
        ));
        assert_eq!(s.requests().len(), 1);
    }
}
