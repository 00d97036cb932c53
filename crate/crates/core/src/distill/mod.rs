//! Distillation prompts and summary backends.

mod backend;
mod batch;
mod prompt;

use thiserror::Error;

pub use backend::{
    backend_from_config, fallback_summary, payload_table, Backend, BackendConfig, Clock, FallbackBackend, HttpBackend,
    HttpResponse, RateLimiter, SystemClock, Transport, TransportError, UreqTransport,
};
pub use batch::{read_checkpoint, run_batch, write_checkpoint, BatchJob, BatchOptions, BatchOutcome, CheckpointEntry};
pub use prompt::{
    build_ocr_layout_prompt, build_rubric_eval_prompt, build_table_summary_prompt, layout_ocr_text, parse_rating,
    table_payload, Decoding, Demonstration, OcrLine, PromptBundle, RubricPrompt, OCR_PREAMBLE, TABLE_PREAMBLE,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistillError {
    #[error("demonstration needs both an input and a summary")]
    EmptyDemonstration,
    #[error("prompt payload is empty")]
    EmptyPayload,
    #[error("backend timed out")]
    BackendTimeout,
    #[error("backend kept answering 429 after the retry budget")]
    RateLimited,
    #[error("backend returned status {status}: {message}")]
    Backend { status: u16, message: String },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("could not parse reply: {0}")]
    ParseFailure(String),
    #[error("environment variable {0} is not set")]
    MissingCredential(String),
}

/// Runs one bundle through `backend`.
pub fn summarize(bundle: &PromptBundle, backend: &dyn Backend) -> Result<String, DistillError> {
    backend.complete(bundle)
}
