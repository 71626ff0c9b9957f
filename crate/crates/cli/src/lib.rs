//! Command-line surface and float-valued scaling-limit probes for the
//! exact GUE/Toda/KdV library.

pub mod backend;
pub mod cachefile;
pub mod config;
pub mod hp;
pub mod limit;
pub mod output;
pub mod pool;
pub mod verify;
