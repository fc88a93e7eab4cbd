//! Output sinks, number formatting and the machine-readable error object.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use annulus_core::Error;
use serde_json::{json, Value};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Input = 1,
    Numerical = 2,
    Verification = 3,
}

impl Exit {
    pub fn of(e: &Error) -> Self {
        if e.is_numerical() {
            Exit::Numerical
        } else {
            Exit::Input
        }
    }

    /// The more serious of two statuses: input errors, then numerical
    /// failures, then failed checks.
    pub fn worst(self, other: Exit) -> Exit {
        let rank = |e: Exit| match e {
            Exit::Ok => 0,
            Exit::Verification => 1,
            Exit::Numerical => 2,
            Exit::Input => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

pub fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write + Send>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Stable name of an error variant.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } => "syntax",
        Error::ExponentOverflow { .. } => "exponent_overflow",
        Error::Singular { .. } => "singular",
        Error::ZeroAtPoint { .. } => "zero_at_point",
        Error::NonConvergence { .. } => "non_convergence",
        Error::Integrality { .. } => "integrality",
        Error::OnCircle { .. } => "on_circle",
        Error::BoundaryRoot { .. } => "boundary_root",
        Error::Unsupported(_) => "unsupported",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::RootsNotConverged { .. } => "roots_not_converged",
    }
}

/// `{"error": {"kind", "message", "offset"?}}`.
pub fn error_json(e: &Error) -> Value {
    let mut obj = json!({ "kind": error_kind(e), "message": e.to_string() });
    if let Error::Syntax { offset, .. } | Error::ExponentOverflow { offset, .. } = e {
        obj["offset"] = json!(offset);
    }
    json!({ "error": obj })
}

/// Shortest round-trip scientific notation; `nan` and `inf` spelled out.
pub fn sci(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_json(w: &mut dyn Write, v: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    w.write_all(b"\n")
}
