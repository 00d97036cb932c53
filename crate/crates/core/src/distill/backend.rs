//! Summary backends: a deterministic offline fallback and an HTTP client
//! for chat-completion style endpoints.

use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::{PromptBundle, TITLE_PREFIX, UNITS_PREFIX};
use super::DistillError;
use crate::table::{infer_column_kinds, ColumnKind, DataTable};
use crate::tasks::unflatten;

pub trait Backend: Send + Sync {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, DistillError>;

    /// Strips secrets from text bound for logs.
    fn redact(&self, text: &str) -> String {
        text.to_string()
    }
}

/// Rule-based summary of a table payload: a title sentence, then for each
/// numeric column its maximum and minimum, and the label nearest its mean.
/// Every number printed is a cell of the table.
pub fn fallback_summary(table: &DataTable) -> String {
    let cols = table.columns();
    let label_col = cols.iter().position(|c| c.kind == ColumnKind::Categorical);
    let label = |r: usize| match label_col {
        Some(c) => table.rows()[r][c].render(),
        None => format!("row {}", r + 1),
    };
    let mut sentences = Vec::new();
    let numeric = table.numeric_columns();
    match table.title() {
        Some(t) if !t.trim().is_empty() => sentences.push(format!("The chart shows {}.", t.trim())),
        _ => {
            let names: Vec<&str> = numeric.iter().map(|i| cols[*i].name.as_str()).collect();
            let by = label_col.map(|c| format!(" by {}", cols[c].name)).unwrap_or_default();
            sentences.push(format!("The chart shows {}{by}.", names.join(" and ")));
        }
    }
    for &c in &numeric {
        let vals: Vec<(usize, f64)> = table
            .rows()
            .iter()
            .enumerate()
            .filter_map(|(r, row)| row[c].as_number().map(|v| (r, v)))
            .collect();
        if vals.is_empty() {
            continue;
        }
        let name = &cols[c].name;
        let hi = vals.iter().fold(vals[0], |a, b| if b.1 > a.1 { *b } else { a });
        let lo = vals.iter().fold(vals[0], |a, b| if b.1 < a.1 { *b } else { a });
        let cell = |r: usize| table.rows()[r][c].render();
        sentences.push(format!("{name} is highest for {} at {}.", label(hi.0), cell(hi.0)));
        sentences.push(format!("{name} is lowest for {} at {}.", label(lo.0), cell(lo.0)));
        if vals.len() > 2 {
            let mean = vals.iter().map(|v| v.1).sum::<f64>() / vals.len() as f64;
            let near = vals.iter().fold(
                vals[0],
                |a, b| if (b.1 - mean).abs() < (a.1 - mean).abs() { *b } else { a },
            );
            sentences.push(format!("{name} at {} is closest to the average.", label(near.0)));
        }
    }
    sentences.join(" ")
}

/// Recovers the table from a payload built by `table_payload`.
pub fn payload_table(payload: &str) -> Option<DataTable> {
    let mut title = None;
    let mut body = Vec::new();
    for line in payload.lines() {
        if let Some(t) = line.strip_prefix(TITLE_PREFIX) {
            title = Some(t.to_string());
        } else if !line.starts_with(UNITS_PREFIX) {
            body.push(line);
        }
    }
    let grid = unflatten(&body.join("\n")).ok()?;
    let table = infer_column_kinds(&grid).ok()?;
    Some(table.with_title(title))
}

/// Offline backend. Never touches the network.
#[derive(Debug, Clone, Copy, Default)]
pub struct FallbackBackend;

impl Backend for FallbackBackend {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, DistillError> {
        let table = payload_table(&bundle.target_payload)
            .ok_or_else(|| DistillError::ParseFailure("fallback needs a flattened table payload".into()))?;
        Ok(fallback_summary(&table))
    }
}

/// File-configured endpoint. The token is read from the environment
/// variable named by `auth_env` and is never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub endpoint: String,
    pub model: String,
    #[serde(default)]
    pub auth_env: Option<String>,
    #[serde(default = "default_rpm")]
    pub rpm: u32,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_base_s: f64,
}

fn default_rpm() -> u32 {
    60
}
fn default_timeout() -> f64 {
    60.0
}
fn default_retries() -> u32 {
    3
}
fn default_backoff() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    Timeout,
    Other(String),
}

/// Wire-level POST of a JSON body.
pub trait Transport: Send + Sync {
    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &Value,
        timeout: Duration,
    ) -> Result<HttpResponse, TransportError>;
}

#[derive(Debug, Default)]
pub struct UreqTransport;

impl Transport for UreqTransport {
    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &Value,
        timeout: Duration,
    ) -> Result<HttpResponse, TransportError> {
        let mut req = ureq::post(url).timeout(timeout);
        for (k, v) in headers {
            req = req.set(k, v);
        }
        match req.send_json(body.clone()) {
            Ok(resp) => {
                let status = resp.status();
                let body = resp.into_string().map_err(|e| TransportError::Other(e.to_string()))?;
                Ok(HttpResponse { status, body })
            }
            Err(ureq::Error::Status(status, resp)) => Ok(HttpResponse {
                status,
                body: resp.into_string().unwrap_or_default(),
            }),
            Err(ureq::Error::Transport(t)) => {
                let msg = t.to_string();
                if msg.to_lowercase().contains("timed out") {
                    Err(TransportError::Timeout)
                } else {
                    Err(TransportError::Other(msg))
                }
            }
        }
    }
}

/// Time source for backoff and rate limiting.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

pub struct SystemClock {
    start: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock { start: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.start.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// Spaces request starts at least `60 / rpm` seconds apart.
pub struct RateLimiter {
    interval: Duration,
    next: Mutex<Duration>,
}

impl RateLimiter {
    pub fn new(rpm: u32) -> Self {
        RateLimiter {
            interval: Duration::from_secs_f64(60.0 / f64::from(rpm.max(1))),
            next: Mutex::new(Duration::ZERO),
        }
    }

    pub fn acquire(&self, clock: &dyn Clock) {
        let wait = {
            let mut next = self.next.lock().expect("limiter lock");
            let now = clock.now();
            let start = (*next).max(now);
            *next = start + self.interval;
            start - now
        };
        if !wait.is_zero() {
            clock.sleep(wait);
        }
    }
}

pub struct HttpBackend {
    config: BackendConfig,
    token: Option<String>,
    transport: Arc<dyn Transport>,
    clock: Arc<dyn Clock>,
    limiter: RateLimiter,
}

impl HttpBackend {
    /// Reads the token from the configured environment variable.
    pub fn new(
        config: BackendConfig,
        transport: Arc<dyn Transport>,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, DistillError> {
        let token = match &config.auth_env {
            Some(var) => Some(std::env::var(var).map_err(|_| DistillError::MissingCredential(var.clone()))?),
            None => None,
        };
        Ok(Self::with_token(config, token, transport, clock))
    }

    pub fn with_token(
        config: BackendConfig,
        token: Option<String>,
        transport: Arc<dyn Transport>,
        clock: Arc<dyn Clock>,
    ) -> Self {
        let limiter = RateLimiter::new(config.rpm);
        HttpBackend {
            config,
            token,
            transport,
            clock,
            limiter,
        }
    }

    pub fn request_body(&self, bundle: &PromptBundle) -> Value {
        json!({
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": bundle.system_preamble},
                {"role": "user", "content": bundle.demonstration.input},
                {"role": "assistant", "content": bundle.demonstration.summary},
                {"role": "user", "content": bundle.target_payload},
            ],
            "max_tokens": bundle.decoding.max_tokens,
            "temperature": bundle.decoding.temperature,
        })
    }
}

fn response_text(body: &str) -> Result<String, DistillError> {
    let v: Value = serde_json::from_str(body).map_err(|e| DistillError::ParseFailure(e.to_string()))?;
    let choice = &v["choices"][0];
    choice["message"]["content"]
        .as_str()
        .or_else(|| choice["text"].as_str())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| DistillError::ParseFailure("response has no completion text".into()))
}

impl Backend for HttpBackend {
    fn redact(&self, text: &str) -> String {
        match &self.token {
            Some(t) if !t.is_empty() => text.replace(t.as_str(), "[REDACTED]"),
            _ => text.to_string(),
        }
    }

    /// Retries timeouts, 429 and 5xx with exponential backoff; the last
    /// failure decides the error once the retry budget is spent.
    fn complete(&self, bundle: &PromptBundle) -> Result<String, DistillError> {
        let body = self.request_body(bundle);
        let mut headers = vec![("Content-Type".to_string(), "application/json".to_string())];
        if let Some(t) = &self.token {
            headers.push(("Authorization".to_string(), format!("Bearer {t}")));
        }
        let timeout = Duration::from_secs_f64(self.config.timeout_s.max(0.001));
        let mut attempt = 0;
        loop {
            self.limiter.acquire(self.clock.as_ref());
            let err = match self
                .transport
                .post_json(&self.config.endpoint, &headers, &body, timeout)
            {
                Ok(r) if (200..300).contains(&r.status) => return response_text(&r.body),
                Ok(r) if r.status == 429 => DistillError::RateLimited,
                Ok(r) if r.status >= 500 => DistillError::Backend {
                    status: r.status,
                    message: self.redact(&r.body),
                },
                Ok(r) => {
                    return Err(DistillError::Backend {
                        status: r.status,
                        message: self.redact(&r.body),
                    })
                }
                Err(TransportError::Timeout) => DistillError::BackendTimeout,
                Err(TransportError::Other(m)) => DistillError::Transport(self.redact(&m)),
            };
            if attempt >= self.config.max_retries {
                return Err(err);
            }
            let backoff = self.config.backoff_base_s * 2f64.powi(attempt as i32);
            self.clock.sleep(Duration::from_secs_f64(backoff));
            attempt += 1;
        }
    }
}

/// The configured HTTP backend, or the offline fallback when no config is
/// given.
pub fn backend_from_config(
    config: Option<BackendConfig>,
    transport: Arc<dyn Transport>,
    clock: Arc<dyn Clock>,
) -> Result<Box<dyn Backend>, DistillError> {
    match config {
        Some(c) => Ok(Box::new(HttpBackend::new(c, transport, clock)?)),
        None => Ok(Box::new(FallbackBackend)),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use super::*;
    use crate::distill::prompt::{build_table_summary_prompt, Demonstration};
    use crate::table::{Cell, Column};

    /// Headers and JSON body of one request.
    pub type SeenRequest = (Vec<(String, String)>, Value);

    pub struct ScriptedTransport {
        pub replies: Mutex<Vec<Result<HttpResponse, TransportError>>>,
        pub calls: AtomicUsize,
        pub seen: Mutex<Vec<SeenRequest>>,
    }

    impl ScriptedTransport {
        pub fn new(replies: Vec<Result<HttpResponse, TransportError>>) -> Self {
            ScriptedTransport {
                replies: Mutex::new(replies),
                calls: AtomicUsize::new(0),
                seen: Mutex::new(Vec::new()),
            }
        }
    }

    impl Transport for ScriptedTransport {
        fn post_json(
            &self,
            _url: &str,
            headers: &[(String, String)],
            body: &Value,
            _timeout: Duration,
        ) -> Result<HttpResponse, TransportError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.seen.lock().unwrap().push((headers.to_vec(), body.clone()));
            let mut r = self.replies.lock().unwrap();
            if r.is_empty() {
                Ok(ok("default"))
            } else {
                r.remove(0)
            }
        }
    }

    #[derive(Default)]
    pub struct FakeClock {
        pub now: Mutex<Duration>,
        pub sleeps: Mutex<Vec<Duration>>,
    }

    impl Clock for FakeClock {
        fn now(&self) -> Duration {
            *self.now.lock().unwrap()
        }

        fn sleep(&self, d: Duration) {
            *self.now.lock().unwrap() += d;
            self.sleeps.lock().unwrap().push(d);
        }
    }

    pub fn ok(text: &str) -> HttpResponse {
        HttpResponse {
            status: 200,
            body: json!({"choices": [{"message": {"content": text}}]}).to_string(),
        }
    }

    fn status(code: u16) -> HttpResponse {
        HttpResponse {
            status: code,
            body: "busy".into(),
        }
    }

    fn config(retries: u32) -> BackendConfig {
        BackendConfig {
            endpoint: "http://localhost/v1/chat/completions".into(),
            model: "m".into(),
            auth_env: None,
            rpm: 6000,
            timeout_s: 5.0,
            max_retries: retries,
            backoff_base_s: 0.5,
        }
    }

    fn bundle() -> PromptBundle {
        let t = DataTable::new(
            None,
            vec![Column::categorical("Year"), Column::numeric("Sales", None)],
            vec![
                vec![Cell::text("2001"), Cell::Number(5.0)],
                vec![Cell::text("2002"), Cell::Number(9.5)],
                vec![Cell::text("2003"), Cell::Number(7.0)],
            ],
        )
        .unwrap();
        build_table_summary_prompt(&t, &Demonstration::new("a | b & c | 1", "c is 1.").unwrap()).unwrap()
    }

    #[test]
    fn fallback_mentions_extremes() {
        let s = FallbackBackend.complete(&bundle()).unwrap();
        assert!(s.contains("2002") && s.contains("9.5"), "{s}");
        assert_eq!(s, FallbackBackend.complete(&bundle()).unwrap());
    }

    #[test]
    fn rate_limited_after_budget() {
        let transport = Arc::new(ScriptedTransport::new(vec![
            Ok(status(429)),
            Ok(status(429)),
            Ok(status(429)),
        ]));
        let clock = Arc::new(FakeClock::default());
        let b = HttpBackend::with_token(config(2), None, transport.clone(), clock.clone());
        assert_eq!(b.complete(&bundle()), Err(DistillError::RateLimited));
        assert_eq!(transport.calls.load(Ordering::SeqCst), 3);
        let backoffs: Vec<f64> = clock
            .sleeps
            .lock()
            .unwrap()
            .iter()
            .map(Duration::as_secs_f64)
            .filter(|s| *s >= 0.5)
            .collect();
        assert_eq!(backoffs, vec![0.5, 1.0]);
    }

    #[test]
    fn retries_then_succeeds_and_sends_token() {
        let transport = Arc::new(ScriptedTransport::new(vec![
            Err(TransportError::Timeout),
            Ok(status(503)),
            Ok(ok("A summary.")),
        ]));
        let b = HttpBackend::with_token(
            config(3),
            Some("sekrit".into()),
            transport.clone(),
            Arc::new(FakeClock::default()),
        );
        assert_eq!(b.complete(&bundle()).unwrap(), "A summary.");
        let seen = transport.seen.lock().unwrap();
        assert!(seen[0]
            .0
            .iter()
            .any(|(k, v)| k == "Authorization" && v == "Bearer sekrit"));
        assert_eq!(seen[0].1["messages"].as_array().unwrap().len(), 4);
        assert_eq!(b.redact("token sekrit here"), "token [REDACTED] here");
    }

    #[test]
    fn timeout_after_budget_and_client_errors_are_final() {
        let transport = Arc::new(ScriptedTransport::new(vec![Err(TransportError::Timeout); 2]));
        let b = HttpBackend::with_token(config(1), None, transport, Arc::new(FakeClock::default()));
        assert_eq!(b.complete(&bundle()), Err(DistillError::BackendTimeout));
        let transport = Arc::new(ScriptedTransport::new(vec![Ok(status(400))]));
        let b = HttpBackend::with_token(config(5), None, transport.clone(), Arc::new(FakeClock::default()));
        assert!(matches!(
            b.complete(&bundle()),
            Err(DistillError::Backend { status: 400, .. })
        ));
        assert_eq!(transport.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn limiter_spaces_requests() {
        let clock = FakeClock::default();
        let l = RateLimiter::new(60);
        l.acquire(&clock);
        l.acquire(&clock);
        l.acquire(&clock);
        assert_eq!(clock.now(), Duration::from_secs(2));
    }

    #[test]
    fn no_config_means_no_network() {
        let transport = Arc::new(ScriptedTransport::new(vec![]));
        let b = backend_from_config(None, transport.clone(), Arc::new(FakeClock::default())).unwrap();
        b.complete(&bundle()).unwrap();
        assert_eq!(transport.calls.load(Ordering::SeqCst), 0);
    }
}
