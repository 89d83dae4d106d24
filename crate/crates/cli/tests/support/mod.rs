//! A `pedforge serve` child process and a small JSON client for it.

#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Stdio};

use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_pedforge");

pub const ANSWERS: [(&str, &str); 5] = [
    ("ConceptScope", "fraction equivalence for fourth graders"),
    ("Materials", "fraction strips and worksheets"),
    ("ObservableAction", "solve matching problems"),
    (
        "PerformanceTarget",
        "accurately solve 8 of 10 problems within 15 minutes",
    ),
    ("Context", "environment: kitchen; realism: stylized; tone: playful"),
];

pub struct Server {
    child: Child,
    pub base: String,
    agent: ureq::Agent,
}

impl Server {
    pub fn start(data_dir: &Path, seed: u64) -> Server {
        let mut child = Command::new(BIN)
            .args(["serve", "--port", "0", "--mock-llm", &seed.to_string(), "--data-dir"])
            .arg(data_dir)
            .env("RUST_LOG", "warn")
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn pedforge serve");
        let mut line = String::new();
        BufReader::new(child.stdout.take().expect("stdout"))
            .read_line(&mut line)
            .expect("read listen line");
        let base = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected first line {line:?}"))
            .to_string();
        let agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
        Server { child, base, agent }
    }

    /// Sends SIGKILL and waits for the process to exit.
    pub fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        Self::finish(self.agent.get(format!("{}{path}", self.base)).call())
    }

    pub fn get_text(&self, path: &str) -> (u16, String) {
        let mut res = self.agent.get(format!("{}{path}", self.base)).call().expect("request");
        let status = res.status().as_u16();
        (status, res.body_mut().read_to_string().expect("body"))
    }

    pub fn post(&self, path: &str, body: Option<Value>) -> (u16, Value) {
        let req = self.agent.post(format!("{}{path}", self.base));
        Self::finish(match body {
            Some(b) => req.send_json(&b),
            None => req.send_empty(),
        })
    }

    pub fn patch(&self, path: &str, body: Value) -> (u16, Value) {
        Self::finish(self.agent.patch(format!("{}{path}", self.base)).send_json(&body))
    }

    fn finish(res: Result<ureq::http::Response<ureq::Body>, ureq::Error>) -> (u16, Value) {
        let mut res = res.expect("request");
        let status = res.status().as_u16();
        let text = res.body_mut().read_to_string().expect("body");
        let value = if text.is_empty() {
            Value::Null
        } else {
            serde_json::from_str(&text).unwrap_or(Value::String(text))
        };
        (status, value)
    }

    pub fn create_project(&self) -> String {
        let (status, body) = self.post("/projects", None);
        assert_eq!(status, 201, "{body}");
        body["id"].as_str().expect("id").to_string()
    }

    pub fn answer(&self, id: &str, field: &str, text: &str) -> Value {
        let (status, body) = self.post(
            &format!("/projects/{id}/answers"),
            Some(serde_json::json!({"field": field, "text": text})),
        );
        assert_eq!(status, 200, "{body}");
        body
    }

    /// Posts `path` and asserts the expected status.
    pub fn expect_post(&self, path: &str, body: Option<Value>, status: u16) -> Value {
        let (got, value) = self.post(path, body);
        assert_eq!(got, status, "POST {path}: {value}");
        value
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
