//! Shared test support: fixture loading and a minimal SPARQL protocol
//! endpoint over a raw TCP socket, answering every request from the local
//! evaluator. One request per connection; the response always closes.

#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use sprefql::backend::results::{ask_to_json, solutions_to_json};
use sprefql::rdf::{load_turtle, Dataset};
use sprefql::sparql::{eval_ask, eval_select, parse_query, QueryForm};

pub fn fixture(rel: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read fixture {}: {}", path.display(), e))
}

pub fn films() -> Dataset {
    load_turtle(&fixture("data/films.ttl")).unwrap()
}

enum Behavior {
    Serve(Dataset),
    /// Close the first `n` connections without answering, then serve.
    DropFirst(usize, Dataset),
    /// Answer every request with this status and body.
    Fail(u16, &'static str),
}

pub struct StubServer {
    url: String,
    addr: SocketAddr,
    connections: Arc<AtomicU64>,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn serving(dataset: Dataset) -> StubServer {
        StubServer::spawn(Behavior::Serve(dataset))
    }

    pub fn dropping_first(drops: usize, dataset: Dataset) -> StubServer {
        StubServer::spawn(Behavior::DropFirst(drops, dataset))
    }

    pub fn failing(status: u16, body: &'static str) -> StubServer {
        StubServer::spawn(Behavior::Fail(status, body))
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// Connections accepted so far, including dropped ones.
    pub fn connections(&self) -> u64 {
        self.connections.load(Ordering::SeqCst)
    }

    fn spawn(behavior: Behavior) -> StubServer {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let connections = Arc::new(AtomicU64::new(0));
        let shutdown = Arc::new(AtomicBool::new(false));
        let handle = {
            let connections = Arc::clone(&connections);
            let shutdown = Arc::clone(&shutdown);
            std::thread::spawn(move || {
                let mut dropped = 0;
                for stream in listener.incoming() {
                    if shutdown.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(mut stream) = stream else { continue };
                    connections.fetch_add(1, Ordering::SeqCst);
                    match &behavior {
                        Behavior::Serve(ds) => serve(&mut stream, ds),
                        Behavior::DropFirst(n, ds) => {
                            if dropped < *n {
                                dropped += 1;
                                // closing without a response looks like a
                                // transport failure to the client
                            } else {
                                serve(&mut stream, ds);
                            }
                        }
                        Behavior::Fail(status, body) => {
                            if read_request(&mut stream).is_some() {
                                respond(&mut stream, *status, "text/plain", body);
                            }
                        }
                    }
                }
            })
        };
        StubServer {
            url: format!("http://{}", addr),
            addr,
            connections,
            shutdown,
            handle: Some(handle),
        }
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        // unblock the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn serve(stream: &mut TcpStream, dataset: &Dataset) {
    let Some(query_text) = read_request(stream) else { return };
    match answer(&query_text, dataset) {
        Ok(json) => respond(stream, 200, "application/sparql-results+json", &json),
        Err(message) => respond(stream, 400, "text/plain", &message),
    }
}

fn answer(query_text: &str, dataset: &Dataset) -> Result<String, String> {
    let query = parse_query(query_text).map_err(|e| e.to_string())?;
    match query.form {
        QueryForm::Ask => {
            Ok(ask_to_json(eval_ask(&query, dataset).map_err(|e| e.to_string())?))
        }
        QueryForm::Select => {
            Ok(solutions_to_json(&eval_select(&query, dataset).map_err(|e| e.to_string())?))
        }
    }
}

/// Reads one POST request and returns its body, the bare query text.
fn read_request(stream: &mut TcpStream) -> Option<String> {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    let header_end = loop {
        if let Some(pos) = find(&buf, b"\r\n\r\n") {
            break pos + 4;
        }
        match stream.read(&mut chunk) {
            Ok(0) | Err(_) => return None,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
        }
    };
    let head = String::from_utf8_lossy(&buf[..header_end]).into_owned();
    let content_length = head
        .lines()
        .find_map(|line| {
            let (name, value) = line.split_once(':')?;
            name.trim()
                .eq_ignore_ascii_case("content-length")
                .then(|| value.trim().parse::<usize>().ok())?
        })
        .unwrap_or(0);
    while buf.len() < header_end + content_length {
        match stream.read(&mut chunk) {
            Ok(0) | Err(_) => return None,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
        }
    }
    Some(String::from_utf8_lossy(&buf[header_end..header_end + content_length]).into_owned())
}

fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

fn respond(stream: &mut TcpStream, status: u16, content_type: &str, body: &str) {
    let reason = match status {
        200 => "OK",
        400 => "Bad Request",
        500 => "Internal Server Error",
        _ => "Error",
    };
    let head = format!(
        "HTTP/1.1 {} {}\r\nContent-Type: {}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        status,
        reason,
        content_type,
        body.len()
    );
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(body.as_bytes());
    let _ = stream.flush();
}
