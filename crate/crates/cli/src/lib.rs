//! Configuration, dispatch and output for the `casimir` binary, plus the cross-route
//! verification suites behind `casimir verify`.

pub mod commands;
pub mod config;
pub mod sweep;
pub mod table;
pub mod verify;
