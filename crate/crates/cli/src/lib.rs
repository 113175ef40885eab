//! IO, file formats, and the batch experiment harness around
//! `lowertail-core`.

pub mod formats;
pub mod harness;
