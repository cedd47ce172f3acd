//! Configuration-driven experiments on top of `legendre_core`: a small
//! integrand language, TOML experiment files and the subcommand bodies behind
//! the `legendre` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
