//! File formats, plotting, and experiment commands for the `scatrec`
//! command-line tool; the numerical pipeline itself lives in
//! `scatrec-core`.

pub mod commands;
pub mod config;
pub mod dataset_io;
pub mod plot;
pub mod report;
