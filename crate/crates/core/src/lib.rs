pub mod audio_io;
pub mod dataset;
pub mod eval;
pub mod program;
pub mod render;
pub mod rng;
pub mod scene;
pub mod soundbank;
pub mod template;
