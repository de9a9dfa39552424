pub mod error;
pub mod events;
pub mod graphio;
pub mod hetnet;
pub mod pipeline;
pub mod sbm;
pub mod sigfilter;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
