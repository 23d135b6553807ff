//! Evaluation harness for the `ccn-fib-core` FIB variants: size tables, Monte
//! Carlo experiments and FIB dump analysis. The `fib` binary is a thin
//! front end over these modules.

pub mod dump;
pub mod experiments;
pub mod tables;
pub mod workload;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// An oracle law was violated.
    pub const LAW_VIOLATION: i32 = 1;
    /// Bad usage, unreadable input or a parse error.
    pub const USAGE: i32 = 2;
}
