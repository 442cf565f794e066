pub mod commands;
pub mod harness;
