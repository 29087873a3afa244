//! maskforge: automated region masking of overlapped fingerprint impressions.
//!
//! Given a grayscale image containing two or three overlapped fingerprints,
//! the pipeline segments it into background, the region common to all
//! impressions, and one region per individual impression — no manual markup.
//! The crate also ships a synthetic fixture generator with exact ground-truth
//! masks and an evaluation harness, so every claim is testable without any
//! external fingerprint database.

pub mod edges;
pub mod eval;
pub mod filters;
pub mod image;
pub mod morphology;
pub mod pgm;
pub mod pipeline;
pub mod synth;

pub use image::{BinaryMask, GrayImage};
pub use pipeline::{PipelineConfig, RegionMaskSet};
