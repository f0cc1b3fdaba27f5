//! Library side of the `lps` command-line tool.

pub mod commands;
pub mod experiment;

use pretopo::Error;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_SIZE: i32 = 4;

/// Exit status for an error: the first library error in the chain decides.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Config(_) => EXIT_CONFIG,
                Error::Parse { .. } => EXIT_PARSE,
                Error::Size { .. } => EXIT_SIZE,
                _ => EXIT_FAILURE,
            };
        }
    }
    EXIT_FAILURE
}
