pub mod aesthetics;
pub mod error;
pub mod interface;
pub mod optimize;
pub mod postproc;
pub mod render;
pub mod robotplan;
pub mod scene;
pub mod time;

pub use error::{Error, Result};
