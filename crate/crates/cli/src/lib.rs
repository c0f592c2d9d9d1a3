//! Front end for the `tripower` binary: subcommands, reports and verification suites.

pub mod commands;
pub mod report;
pub mod verify;

use tripower::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::SizeGuard { .. } => EXIT_GUARD,
        Error::NotPrime(_)
        | Error::UnsupportedOrder { .. }
        | Error::NotPrimePower(_)
        | Error::InvalidArgument(_)
        | Error::MissingCensus { .. }
        | Error::DimensionMismatch { .. } => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Machine-readable description of a refused or failed run.
pub fn error_document(command: &str, err: &Error) -> serde_json::Value {
    let kind = match err {
        Error::SizeGuard { .. } => "size-guard",
        Error::MissingCensus { .. } => "missing-census",
        e if exit_code_for(e) == EXIT_USAGE => "usage",
        _ => "failure",
    };
    let mut doc = serde_json::json!({
        "command": command,
        "error": { "kind": kind, "message": err.to_string() },
        "passed": false,
    });
    if let Error::SizeGuard { required, limit, .. } = err {
        doc["error"]["required"] = serde_json::json!(required.to_string());
        doc["error"]["limit"] = serde_json::json!(limit.to_string());
    }
    doc
}
