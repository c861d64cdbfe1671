//! Experiment runner for the bit-escrow and coin-flip protocols.

pub mod commands;
pub mod config;
pub mod output;
pub mod selftest;
